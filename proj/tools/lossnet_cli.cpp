#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lossnet/equilibrium.hpp"
#include "lossnet/experiments.hpp"
#include "lossnet/io.hpp"
#include "lossnet/model.hpp"
#include "lossnet/optimizer.hpp"
#include "lossnet/packet_sim.hpp"
#include "lossnet/two_source.hpp"

namespace {

using nlohmann::json;
using namespace lossnet;

constexpr int kExitInvalid = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitInternal = 4;

// Two computations that must agree did not.
class InternalAssertion : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

json vec_json(const std::vector<int>& v) { return json(v); }

json solution_json(const OptimalSolution& s) {
  return {{"u", vec_json(s.u)},
          {"v", vec_json(s.v)},
          {"flow", s.profile.rows()},
          {"tr", s.tr},
          {"threshold", s.threshold},
          {"relayed", s.relayed}};
}

json verdict_json(const NeVerdict& v) {
  json violations = json::array();
  for (const auto& x : v.violations) {
    violations.push_back({{"kind", to_string(x.kind)},
                          {"source", x.source},
                          {"relay", x.relay},
                          {"lhs", x.lhs},
                          {"rhs", x.rhs}});
  }
  return {{"is_ne", v.is_ne}, {"i_star", v.i_star}, {"violations", violations}};
}

template <typename T>
json opt_json(const std::optional<T>& x) {
  return x ? json(*x) : json(nullptr);
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  return f;
}

struct Options {
  std::string instance;
  std::string profile;
  std::string start;
  std::string spec;
  std::string preset;
  std::string out;
  std::string plot_dir;
  std::string links;
  bool oracle = false;
  bool validate = false;
  std::uint64_t cap = kDefaultEnumerationCap;
  std::uint64_t seed = 1;
  int max_rounds = 1000;
  double horizon = 1e6;
  double sigmas = 3.0;
  double warmup = 0.01;
  int u1 = 0;
  int u2 = 0;
};

void run_solve_opt(const Options& o) {
  const auto inst = load_instance(o.instance);
  const auto sol = solve_optimal(inst);
  json out = solution_json(sol);
  if (o.oracle) {
    const auto brute = brute_force_optimal(inst, o.cap);
    out["oracle"] = solution_json(brute);
    if (std::abs(brute.tr - sol.tr) > 1e-9 * std::max(1.0, brute.tr)) {
      print(out);
      throw InternalAssertion("solve-opt: optimizer and exhaustive search disagree");
    }
  }
  print(out);
}

void run_check_ne(const Options& o) {
  const auto inst = load_instance(o.instance);
  const auto prof = load_profile(o.profile, inst);
  const auto closed = is_nash_characterization(inst, prof);
  json out = verdict_json(closed);
  out["tr"] = total_traffic(inst, prof);
  if (o.oracle) {
    const auto dev = is_nash_deviation_oracle(inst, prof);
    out["oracle"] = verdict_json(dev);
    if (dev.is_ne != closed.is_ne) {
      print(out);
      throw InternalAssertion("check-ne: closed form and deviation oracle disagree");
    }
  }
  print(out);
}

void run_enumerate_ne(const Options& o) {
  const auto inst = load_instance(o.instance);
  const auto entries = enumerate_nash(inst, o.cap);
  const std::size_t m = inst.m();
  if (!o.out.empty()) {
    auto f = open_output(o.out);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) f << "flow_" << i << '_' << j << ',';
    for (std::size_t i = 0; i < m; ++i) f << "u_" << i << ',';
    for (std::size_t i = 0; i < m; ++i) f << "v_" << i << ',';
    f << "tr\n";
    char buf[32];
    for (const auto& e : entries) {
      for (int x : e.profile.flat()) f << x << ',';
      for (std::size_t i = 0; i < m; ++i) f << e.profile.direct(i) << ',';
      for (std::size_t i = 0; i < m; ++i) f << e.profile.incoming(i) << ',';
      std::snprintf(buf, sizeof buf, "%.17g", e.summary.total_traffic);
      f << buf << '\n';
    }
    if (!f) throw std::runtime_error(o.out + ": write failed");
  }
  json list = json::array();
  for (const auto& e : entries) list.push_back({{"flow", e.profile.rows()}, {"tr", e.summary.total_traffic}});
  print({{"count", entries.size()}, {"equilibria", list}});
}

void run_poa(const Options& o) {
  const auto inst = load_instance(o.instance);
  const auto r = poa_report(inst, o.cap);
  const auto bounds = ne_traffic_bounds(inst);
  print({{"tr_opt", r.tr_opt},
         {"tr_worst_ne", opt_json(r.tr_worst_ne)},
         {"poa_exact", opt_json(r.poa_exact)},
         {"z", r.z},
         {"poa_bound", opt_json(r.poa_bound)},
         {"opt_upper", bounds.opt_upper},
         {"ne_lower", opt_json(bounds.ne_lower)},
         {"ne_count", r.ne_count},
         {"worst_ne", r.worst_ne ? json(r.worst_ne->rows()) : json(nullptr)}});
}

void run_dynamics(const Options& o) {
  const auto inst = load_instance(o.instance);
  const auto start = o.start.empty() ? RoutingProfile::all_direct(inst) : load_profile(o.start, inst);
  const auto r = best_response_dynamics(inst, start, o.max_rounds, o.seed);
  json out = {{"outcome", to_string(r.outcome)},
              {"rounds", r.rounds},
              {"moves", r.moves},
              {"flow", r.profile.rows()},
              {"tr", total_traffic(inst, r.profile)}};
  if (r.outcome == DynamicsResult::Outcome::kConverged) {
    const bool ok = is_nash_deviation_oracle(inst, r.profile).is_ne;
    out["oracle_accepts"] = ok;
    if (!ok) {
      print(out);
      throw InternalAssertion("dynamics: converged profile is not an equilibrium");
    }
  }
  print(out);
}

// Two-source commands work on n1 >= n2; states are given and reported in the
// instance's own labelling.
struct TwoSourceView {
  Instance canon;
  bool swapped = false;
  two_source::State to_canon(two_source::State s) const {
    return swapped ? two_source::State{s.u2, s.u1} : s;
  }
  two_source::State from_canon(two_source::State s) const { return to_canon(s); }
};

TwoSourceView two_source_view(const Instance& inst) {
  if (inst.m() != 2) throw InvalidArgument("field 'm': two-source commands need m = 2");
  const auto c = canonicalize(inst);
  return {c.instance, c.order[0] != 0};
}

json state_json(two_source::State s) { return json::array({s.u1, s.u2}); }

void run_two_source_scan(const Options& o) {
  const auto view = two_source_view(load_instance(o.instance));
  json states = json::array();
  for (auto s : two_source::scan_nash(view.canon)) states.push_back(state_json(view.from_canon(s)));
  print({{"count", states.size()}, {"states", states}});
}

void run_two_source_classify(const Options& o) {
  const auto view = two_source_view(load_instance(o.instance));
  const auto cs = view.to_canon({o.u1, o.u2});
  const auto v = two_source::classify(view.canon, cs);
  const auto oracle = is_nash_deviation_oracle(view.canon, two_source::to_profile(view.canon, cs));
  json out = {{"case", two_source::to_string(v.case_id)},
              {"is_ne", v.is_ne},
              {"t1", opt_json(v.t1_at_u2)},
              {"t2", opt_json(v.t2_at_u1)},
              {"oracle_is_ne", oracle.is_ne},
              {"swapped", view.swapped}};
  print(out);
  if (oracle.is_ne != v.is_ne) throw InternalAssertion("two-source classify disagrees with the oracle");
}

void run_two_source_existence(const Options& o) {
  const auto view = two_source_view(load_instance(o.instance));
  const auto s = two_source::construct_existence_ne(view.canon);
  const bool ok = two_source::classify(view.canon, s).is_ne;
  print({{"state", state_json(view.from_canon(s))}, {"is_ne", ok}});
  if (!ok) throw InternalAssertion("two-source existence construction is not an equilibrium");
}

void run_two_source_corollaries(const Options& o) {
  const auto view = two_source_view(load_instance(o.instance));
  const auto f = two_source::check_corollaries(view.canon);
  print({{"optimal_all_direct_is_ne", two_source::to_string(f.optimal_all_direct_is_ne)},
         {"all_relay_iff", two_source::to_string(f.all_relay_iff)},
         {"all_relay_sufficient", two_source::to_string(f.all_relay_sufficient)},
         {"unique_all_direct", two_source::to_string(f.unique_all_direct)}});
}

void run_simulate(const Options& o) {
  SimConfig cfg;
  cfg.instance = load_instance(o.instance);
  cfg.profile = o.profile.empty() ? RoutingProfile::all_direct(cfg.instance)
                                  : load_profile(o.profile, cfg.instance);
  cfg.horizon = o.horizon;
  cfg.seed = o.seed;
  cfg.warmup_fraction = o.warmup;
  if (!(cfg.horizon > 0.0)) throw InvalidArgument("option '--horizon': must be > 0");
  if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction < 1.0)) {
    throw InvalidArgument("option '--warmup': must be in [0, 1)");
  }
  const auto outcome = simulate(cfg);
  const auto summary = summarize(cfg.instance, cfg.profile);

  json links = json::array();
  for (std::size_t i = 0; i < outcome.per_link.size(); ++i) {
    const auto& l = outcome.per_link[i];
    links.push_back({{"link", i},
                     {"offered", l.offered},
                     {"blocked", l.blocked},
                     {"empirical", l.empirical_block_prob},
                     {"analytic", 1.0 - summary.no_congestion_prob[i]},
                     {"std_err", l.std_err}});
  }
  std::uint64_t generated = 0, accounted = 0;
  for (const auto& c : outcome.per_class) {
    generated += c.generated;
    accounted += c.sidelink_lost + c.congestion_lost + c.delivered;
  }
  json out = {{"measured_time", outcome.measured_time},
              {"empirical_tr", outcome.empirical_tr},
              {"analytic_tr", summary.total_traffic},
              {"generated", generated},
              {"conserved", generated == accounted},
              {"links", links}};
  bool failed = false;
  if (o.validate) {
    const auto report = validate_outcome(cfg.instance, cfg.profile, outcome, summary.t, o.sigmas);
    json checks = json::array();
    for (const auto& a : report.assertions) {
      checks.push_back({{"name", a.name},
                        {"empirical", a.empirical},
                        {"expected", a.expected},
                        {"std_err", a.std_err},
                        {"pass", a.pass}});
    }
    out["validation"] = {{"sigmas", o.sigmas}, {"all_pass", report.all_pass()}, {"checks", checks}};
    failed = !report.all_pass();
  }
  if (!o.links.empty()) {
    auto f = open_output(o.links);
    f << "link,offered,blocked,empirical,analytic,std_err\n";
    char buf[128];
    for (std::size_t i = 0; i < outcome.per_link.size(); ++i) {
      const auto& l = outcome.per_link[i];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", l.empirical_block_prob,
                    1.0 - summary.no_congestion_prob[i], l.std_err);
      f << i << ',' << l.offered << ',' << l.blocked << ',' << buf << '\n';
    }
    if (!f) throw std::runtime_error(o.links + ": write failed");
  }
  print(out);
  if (generated != accounted) throw InternalAssertion("simulate: packet conservation violated");
  if (failed) std::cerr << "simulate: validation failed at " << o.sigmas << " sigma\n";
}

void run_sweep_cmd(const Options& o) {
  if (o.spec.empty() == o.preset.empty()) {
    throw InvalidArgument("sweep: give exactly one of --spec or --preset");
  }
  const SweepSpec spec = o.spec.empty() ? preset_sweep(o.preset) : sweep_spec_from_json(read_json_file(o.spec));
  const auto table = run_sweep(spec);
  const auto csv = to_csv(table);
  if (o.out.empty()) {
    std::cout << csv;
  } else {
    auto f = open_output(o.out);
    f << csv;
    if (!f) throw std::runtime_error(o.out + ": write failed");
  }
  if (!o.plot_dir.empty()) emit_plot_data(table, spec.outputs, o.plot_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Routing games on loss networks: optimum, equilibria, price of anarchy, simulation"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve-opt", "Traffic-maximizing allocation");
  solve->add_option("--instance", o.instance, "Instance JSON")->required();
  solve->add_flag("--oracle", o.oracle, "Cross-check against exhaustive search");
  solve->add_option("--cap", o.cap, "Profile cap for the exhaustive search");

  auto* check = app.add_subcommand("check-ne", "Test a profile for equilibrium");
  check->add_option("--instance", o.instance)->required();
  check->add_option("--profile", o.profile, "Profile JSON {\"flow\": [[...]]}")->required();
  check->add_flag("--oracle", o.oracle, "Also run the unilateral-deviation check");

  auto* enumerate = app.add_subcommand("enumerate-ne", "List every pure equilibrium");
  enumerate->add_option("--instance", o.instance)->required();
  enumerate->add_option("--cap", o.cap, "Maximum number of profiles to enumerate");
  enumerate->add_option("--out", o.out, "CSV output path");

  auto* poa = app.add_subcommand("poa", "Exact price of anarchy and analytic bounds");
  poa->add_option("--instance", o.instance)->required();
  poa->add_option("--cap", o.cap);

  auto* dyn = app.add_subcommand("dynamics", "Best-response dynamics");
  dyn->add_option("--instance", o.instance)->required();
  dyn->add_option("--start", o.start, "Start profile JSON (default all direct)");
  dyn->add_option("--seed", o.seed);
  dyn->add_option("--max-rounds", o.max_rounds)->check(CLI::PositiveNumber);

  auto* two = app.add_subcommand("two-source", "Closed-form two-source analysis");
  two->add_option("--instance", o.instance)->required();
  two->require_subcommand(1);
  auto* scan = two->add_subcommand("scan", "All equilibrium states (u1, u2)");
  auto* classify = two->add_subcommand("classify", "Case and verdict for one state");
  classify->add_option("--u1", o.u1)->required();
  classify->add_option("--u2", o.u2)->required();
  auto* existence = two->add_subcommand("existence", "Constructive equilibrium");
  auto* corollaries = two->add_subcommand("corollaries", "Check the closed-form corollaries");

  auto* sim = app.add_subcommand("simulate", "Packet-level simulation");
  sim->add_option("--instance", o.instance)->required();
  sim->add_option("--profile", o.profile, "Profile JSON (default all direct)");
  sim->add_option("--horizon", o.horizon);
  sim->add_option("--seed", o.seed);
  sim->add_option("--warmup", o.warmup, "Share of the horizon discarded");
  sim->add_flag("--validate", o.validate, "Compare with the analytic model");
  sim->add_option("--sigmas", o.sigmas);
  sim->add_option("--links-csv", o.links, "Per-link CSV output path");

  auto* sweep = app.add_subcommand("sweep", "Parameter sweep to CSV");
  sweep->add_option("--spec", o.spec, "Sweep spec JSON");
  sweep->add_option("--preset", o.preset, "q-sweep | mu-sweep | n1-sweep | three-source-n1");
  sweep->add_option("--out", o.out, "CSV output path (default stdout)");
  sweep->add_option("--plot-dir", o.plot_dir, "Directory for gnuplot data files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*solve) run_solve_opt(o);
    else if (*check) run_check_ne(o);
    else if (*enumerate) run_enumerate_ne(o);
    else if (*poa) run_poa(o);
    else if (*dyn) run_dynamics(o);
    else if (*scan) run_two_source_scan(o);
    else if (*classify) run_two_source_classify(o);
    else if (*existence) run_two_source_existence(o);
    else if (*corollaries) run_two_source_corollaries(o);
    else if (*sim) run_simulate(o);
    else if (*sweep) run_sweep_cmd(o);
  } catch (const CapacityExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const InternalAssertion& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const two_source::UndefinedThreshold& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return 0;
}
