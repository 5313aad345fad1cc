#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lossnet/equilibrium.hpp"
#include "lossnet/experiments.hpp"
#include "lossnet/io.hpp"
#include "lossnet/optimizer.hpp"
#include "lossnet/packet_sim.hpp"
#include "lossnet/two_source.hpp"

namespace py = pybind11;
using namespace lossnet;

namespace {

using Flow = std::vector<std::vector<int>>;

RoutingProfile to_profile(const Instance& inst, const Flow& flow) {
  auto p = RoutingProfile::from_rows(flow);
  validate_profile(inst, p);
  return p;
}

py::dict solution_dict(const OptimalSolution& s) {
  py::dict d;
  d["u"] = s.u;
  d["v"] = s.v;
  d["flow"] = s.profile.rows();
  d["tr"] = s.tr;
  d["threshold"] = s.threshold;
  d["relayed"] = s.relayed;
  return d;
}

py::dict verdict_dict(const NeVerdict& v) {
  py::list violations;
  for (const auto& x : v.violations) {
    py::dict e;
    e["kind"] = to_string(x.kind);
    e["source"] = x.source;
    e["relay"] = x.relay;
    e["lhs"] = x.lhs;
    e["rhs"] = x.rhs;
    violations.append(e);
  }
  py::dict d;
  d["is_ne"] = v.is_ne;
  d["i_star"] = v.i_star;
  d["violations"] = violations;
  return d;
}

two_source::State state(const std::pair<int, int>& s) { return {s.first, s.second}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Routing games on loss networks";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<CapacityExceeded>(m, "CapacityExceeded", PyExc_RuntimeError);

  py::class_<Instance>(m, "Instance")
      .def(py::init([](std::vector<int> n, double phi, double mu, double q) {
             Instance inst{std::move(n), phi, mu, q};
             inst.validate();
             return inst;
           }),
           py::arg("n"), py::arg("phi"), py::arg("mu"), py::arg("q"))
      .def_readonly("n", &Instance::user_counts)
      .def_readonly("phi", &Instance::phi)
      .def_readonly("mu", &Instance::mu)
      .def_readonly("q", &Instance::q)
      .def_property_readonly("m", &Instance::m)
      .def("__repr__", [](const Instance& i) { return instance_to_json(i).dump(); });

  m.def("instance_from_json", [](const std::string& text) {
    return instance_from_json(nlohmann::json::parse(text));
  });

  m.def("traffic_rates", [](const Instance& inst, const Flow& flow) {
    return traffic_rates(inst, to_profile(inst, flow));
  });
  m.def("loss_rate", [](const Instance& inst, const Flow& flow, std::size_t origin, std::size_t relay) {
    return loss_rate(inst, to_profile(inst, flow), origin, relay);
  });
  m.def("total_traffic", [](const Instance& inst, const Flow& flow) {
    return total_traffic(inst, to_profile(inst, flow));
  });

  m.def("solve_optimal", [](const Instance& inst) { return solution_dict(solve_optimal(inst)); });
  m.def("brute_force_optimal", [](const Instance& inst, std::uint64_t cap) {
    return solution_dict(brute_force_optimal(inst, cap));
  }, py::arg("inst"), py::arg("cap") = kDefaultBruteForceCap);

  m.def("is_nash", [](const Instance& inst, const Flow& flow) {
    return verdict_dict(is_nash_characterization(inst, to_profile(inst, flow)));
  });
  m.def("is_nash_oracle", [](const Instance& inst, const Flow& flow) {
    return verdict_dict(is_nash_deviation_oracle(inst, to_profile(inst, flow)));
  });
  m.def("enumerate_nash", [](const Instance& inst, std::uint64_t cap) {
    py::list out;
    for (const auto& e : enumerate_nash(inst, cap)) {
      py::dict d;
      d["flow"] = e.profile.rows();
      d["tr"] = e.summary.total_traffic;
      out.append(d);
    }
    return out;
  }, py::arg("inst"), py::arg("cap") = kDefaultEnumerationCap);

  m.def("poa_report", [](const Instance& inst, std::uint64_t cap) {
    const auto r = poa_report(inst, cap);
    py::dict d;
    d["tr_opt"] = r.tr_opt;
    d["tr_worst_ne"] = r.tr_worst_ne;
    d["poa_exact"] = r.poa_exact;
    d["z"] = r.z;
    d["poa_bound"] = r.poa_bound;
    d["ne_count"] = r.ne_count;
    return d;
  }, py::arg("inst"), py::arg("cap") = kDefaultEnumerationCap);

  m.def("best_response_dynamics",
        [](const Instance& inst, const Flow& start, int max_rounds, std::uint64_t seed) {
          const auto r = best_response_dynamics(inst, to_profile(inst, start), max_rounds, seed);
          py::dict d;
          d["flow"] = r.profile.rows();
          d["rounds"] = r.rounds;
          d["moves"] = r.moves;
          d["outcome"] = to_string(r.outcome);
          return d;
        },
        py::arg("inst"), py::arg("start"), py::arg("max_rounds") = 1000, py::arg("seed") = 1);

  m.def("two_source_scan", [](const Instance& inst) {
    std::vector<std::pair<int, int>> out;
    for (auto s : two_source::scan_nash(inst)) out.emplace_back(s.u1, s.u2);
    return out;
  });
  m.def("two_source_classify", [](const Instance& inst, std::pair<int, int> s) {
    const auto v = two_source::classify(inst, state(s));
    py::dict d;
    d["case"] = two_source::to_string(v.case_id);
    d["is_ne"] = v.is_ne;
    d["t1"] = v.t1_at_u2;
    d["t2"] = v.t2_at_u1;
    return d;
  });

  m.def("simulate",
        [](const Instance& inst, const Flow& flow, double horizon, std::uint64_t seed) {
          SimConfig cfg;
          cfg.instance = inst;
          cfg.profile = to_profile(inst, flow);
          cfg.horizon = horizon;
          cfg.seed = seed;
          const auto o = simulate(cfg);
          py::list links;
          for (const auto& l : o.per_link) {
            py::dict d;
            d["offered"] = l.offered;
            d["blocked"] = l.blocked;
            d["empirical"] = l.empirical_block_prob;
            d["std_err"] = l.std_err;
            links.append(d);
          }
          std::uint64_t generated = 0, accounted = 0;
          for (const auto& c : o.per_class) {
            generated += c.generated;
            accounted += c.sidelink_lost + c.congestion_lost + c.delivered;
          }
          py::dict d;
          d["links"] = links;
          d["empirical_tr"] = o.empirical_tr;
          d["generated"] = generated;
          d["conserved"] = generated == accounted;
          return d;
        },
        py::arg("inst"), py::arg("flow"), py::arg("horizon") = 1e5, py::arg("seed") = 1);

  m.def("run_sweep", [](const std::string& spec_json) {
    return to_csv(run_sweep(sweep_spec_from_json(nlohmann::json::parse(spec_json))));
  }, "Run a sweep described by a JSON spec and return the CSV text");
  m.def("preset_sweep_csv", [](const std::string& name) { return to_csv(run_sweep(preset_sweep(name))); });
}
