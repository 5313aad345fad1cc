#include "lossnet/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lossnet/io.hpp"
#include "lossnet/optimizer.hpp"
#include "lossnet/parallel.hpp"

namespace lossnet {

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kQ: return "q";
    case SweepAxis::kMu: return "mu";
    case SweepAxis::kN1: return "n1";
  }
  return "?";
}

const char* to_string(SweepOutput output) {
  switch (output) {
    case SweepOutput::kTrOpt: return "tr_opt";
    case SweepOutput::kTrWorstNe: return "tr_worst_ne";
    case SweepOutput::kPoaExact: return "poa_exact";
    case SweepOutput::kPoaBound: return "poa_bound";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& name) {
  for (auto a : {SweepAxis::kQ, SweepAxis::kMu, SweepAxis::kN1}) {
    if (name == to_string(a)) return a;
  }
  throw InvalidArgument("field 'axis': expected one of q, mu, n1, got '" + name + "'");
}

SweepOutput parse_output(const std::string& name) {
  for (auto o : {SweepOutput::kTrOpt, SweepOutput::kTrWorstNe, SweepOutput::kPoaExact,
                 SweepOutput::kPoaBound}) {
    if (name == to_string(o)) return o;
  }
  throw InvalidArgument("field 'outputs': unknown output '" + name + "'");
}

Instance SweepSpec::at(double value) const {
  Instance inst = base;
  switch (axis) {
    case SweepAxis::kQ: inst.q = value; break;
    case SweepAxis::kMu: inst.mu = value; break;
    case SweepAxis::kN1: inst.user_counts.at(0) = static_cast<int>(std::lround(value)); break;
  }
  return inst;
}

void SweepSpec::validate() const {
  base.validate();
  if (grid.empty()) throw InvalidArgument("field 'grid': must not be empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double g = grid[k];
    const std::string field = "field 'grid[" + std::to_string(k) + "]': ";
    switch (axis) {
      case SweepAxis::kQ:
        if (!(g >= 0.0 && g <= 1.0)) throw InvalidArgument(field + "q must be in [0, 1]");
        break;
      case SweepAxis::kMu:
        if (!(g > 0.0)) throw InvalidArgument(field + "mu must be > 0");
        break;
      case SweepAxis::kN1:
        if (!(g >= 1.0) || g != std::floor(g)) {
          throw InvalidArgument(field + "n1 must be an integer >= 1");
        }
        break;
    }
  }
}

std::vector<double> linear_grid(double from, double to, std::size_t points) {
  if (points == 1) return {from};
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k) {
    g[k] = from + (to - from) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  g.back() = to;
  return g;
}

std::vector<double> log_grid(double from, double to, std::size_t points) {
  if (!(from > 0.0 && to > 0.0)) throw InvalidArgument("log_grid: bounds must be > 0");
  auto g = linear_grid(std::log(from), std::log(to), points);
  for (auto& x : g) x = std::exp(x);
  g.front() = from;
  g.back() = to;
  return g;
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("sweep spec: expected a JSON object");
  SweepSpec spec;
  if (!j.contains("base")) throw InvalidArgument("field 'base': missing");
  try {
    spec.base = instance_from_json(j.at("base"));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string("base.") + e.what());
  }
  if (!j.contains("axis") || !j.at("axis").is_string()) {
    throw InvalidArgument("field 'axis': expected a string");
  }
  spec.axis = parse_axis(j.at("axis").get<std::string>());
  if (!j.contains("grid")) throw InvalidArgument("field 'grid': missing");
  const auto& grid = j.at("grid");
  if (grid.is_array()) {
    for (const auto& g : grid) {
      if (!g.is_number()) throw InvalidArgument("field 'grid': expected numbers");
      spec.grid.push_back(g.get<double>());
    }
  } else if (grid.is_object()) {
    for (const char* key : {"from", "to", "points"}) {
      if (!grid.contains(key) || !grid.at(key).is_number()) {
        throw InvalidArgument(std::string("field 'grid.") + key + "': expected a number");
      }
    }
    const auto points = grid.at("points").get<long long>();
    if (points < 1) throw InvalidArgument("field 'grid.points': must be >= 1");
    const std::string scale = grid.value("scale", "linear");
    const double from = grid.at("from").get<double>();
    const double to = grid.at("to").get<double>();
    if (scale == "linear") {
      spec.grid = linear_grid(from, to, static_cast<std::size_t>(points));
    } else if (scale == "log") {
      spec.grid = log_grid(from, to, static_cast<std::size_t>(points));
    } else {
      throw InvalidArgument("field 'grid.scale': expected linear or log");
    }
  } else {
    throw InvalidArgument("field 'grid': expected an array or a range object");
  }
  if (j.contains("outputs")) {
    if (!j.at("outputs").is_array()) throw InvalidArgument("field 'outputs': expected an array");
    spec.outputs.clear();
    for (const auto& o : j.at("outputs")) {
      if (!o.is_string()) throw InvalidArgument("field 'outputs': expected strings");
      spec.outputs.push_back(parse_output(o.get<std::string>()));
    }
  }
  if (j.contains("cap")) {
    if (!j.at("cap").is_number_integer() || j.at("cap").get<long long>() < 1) {
      throw InvalidArgument("field 'cap': expected a positive integer");
    }
    spec.cap = j.at("cap").get<std::uint64_t>();
  }
  spec.validate();
  return spec;
}

SweepSpec preset_sweep(const std::string& name) {
  SweepSpec spec;
  spec.base.phi = 1.0;
  if (name == "q-sweep") {
    spec.base.user_counts = {1000, 100};
    spec.base.mu = 300.0;
    spec.axis = SweepAxis::kQ;
    spec.grid = linear_grid(0.0, 1.0, 101);
  } else if (name == "mu-sweep") {
    spec.base.user_counts = {1000, 100};
    spec.base.q = 0.3;
    spec.axis = SweepAxis::kMu;
    spec.grid = log_grid(1.0, 6000.0, 60);
  } else if (name == "n1-sweep") {
    spec.base.user_counts = {500, 100};
    spec.base.mu = 300.0;
    spec.base.q = 0.7;
    spec.axis = SweepAxis::kN1;
    spec.grid = linear_grid(500.0, 8000.0, 76);
  } else if (name == "three-source-n1") {
    spec.base.user_counts = {5, 5, 5};
    spec.base.mu = 1.0;
    spec.base.q = 0.3;
    spec.axis = SweepAxis::kN1;
    spec.grid = linear_grid(5.0, 50.0, 10);
  } else {
    throw InvalidArgument("unknown sweep preset '" + name + "'");
  }
  return spec;
}

SweepTable run_sweep(const SweepSpec& spec) {
  spec.validate();
  bool want_ne = false;
  for (auto o : spec.outputs) {
    want_ne |= o == SweepOutput::kTrWorstNe || o == SweepOutput::kPoaExact;
  }
  SweepTable table;
  table.axis = spec.axis;
  table.rows.resize(spec.grid.size());
  parallel_for(spec.grid.size(), [&](std::size_t k) {
    const Instance inst = spec.at(spec.grid[k]);
    SweepRow& row = table.rows[k];
    row.axis_value = spec.grid[k];
    const bool feasible = inst.m() <= 2 || profile_count(inst) <= spec.cap;
    if (want_ne && feasible) {
      const auto report = poa_report(inst, spec.cap);
      row.tr_opt = report.tr_opt;
      row.tr_worst_ne = report.tr_worst_ne;
      row.poa_exact = report.poa_exact;
      row.poa_bound = report.poa_bound;
      row.ne_count = report.ne_count;
    } else {
      row.tr_opt = solve_optimal(inst).tr;
      const double z = anarchy_z(inst);
      if (z > 0.0) {
        const double n1 = inst.max_users();
        row.poa_bound = 1.0 + n1 * inst.mu / (n1 * z * inst.phi + z * inst.mu);
      }
    }
  });
  return table;
}

namespace {

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename T>
std::string format_optional(const std::optional<T>& x) {
  if (!x) return kMissing;
  if constexpr (std::is_floating_point_v<T>) {
    return format_number(*x);
  } else {
    return std::to_string(*x);
  }
}

std::optional<double> parse_optional(const std::string& s) {
  if (s == kMissing) return std::nullopt;
  return std::stod(s);
}

std::optional<double> column(const SweepRow& row, SweepOutput o) {
  switch (o) {
    case SweepOutput::kTrOpt: return row.tr_opt;
    case SweepOutput::kTrWorstNe: return row.tr_worst_ne;
    case SweepOutput::kPoaExact: return row.poa_exact;
    case SweepOutput::kPoaBound: return row.poa_bound;
  }
  return std::nullopt;
}

}  // namespace

std::string to_csv(const SweepTable& table) {
  std::ostringstream out;
  out << to_string(table.axis) << ",tr_opt,tr_worst_ne,poa_exact,poa_bound,ne_count\n";
  for (const auto& r : table.rows) {
    out << format_number(r.axis_value) << ',' << format_number(r.tr_opt) << ','
        << format_optional(r.tr_worst_ne) << ',' << format_optional(r.poa_exact) << ','
        << format_optional(r.poa_bound) << ',' << format_optional(r.ne_count) << '\n';
  }
  return out.str();
}

CsvDocument parse_csv(const std::string& text) {
  CsvDocument doc;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    if (first) {
      doc.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != doc.header.size()) {
        throw InvalidArgument("csv: row " + std::to_string(doc.rows.size() + 1) + " has " +
                              std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(doc.header.size()));
      }
      doc.rows.push_back(std::move(fields));
    }
  }
  return doc;
}

SweepTable parse_sweep_csv(const std::string& text) {
  const auto doc = parse_csv(text);
  if (doc.header.size() != 6) throw InvalidArgument("sweep csv: expected 6 columns");
  SweepTable table;
  table.axis = parse_axis(doc.header[0]);
  for (const auto& f : doc.rows) {
    SweepRow r;
    r.axis_value = std::stod(f[0]);
    r.tr_opt = std::stod(f[1]);
    r.tr_worst_ne = parse_optional(f[2]);
    r.poa_exact = parse_optional(f[3]);
    r.poa_bound = parse_optional(f[4]);
    if (f[5] != kMissing) r.ne_count = std::stoull(f[5]);
    table.rows.push_back(r);
  }
  return table;
}

std::vector<std::filesystem::path> emit_plot_data(const SweepTable& table,
                                                  const std::vector<SweepOutput>& outputs,
                                                  const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto open = [&](const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error(path.string() + ": cannot open for writing");
    return f;
  };
  const std::string axis = to_string(table.axis);
  for (auto o : outputs) {
    const auto path = dir / (std::string(to_string(o)) + ".dat");
    auto f = open(path);
    f << axis << ',' << to_string(o) << '\n';
    for (const auto& r : table.rows) {
      if (const auto y = column(r, o)) f << format_number(r.axis_value) << ',' << format_number(*y) << '\n';
    }
    if (!f) throw std::runtime_error(path.string() + ": write failed");
    written.push_back(path);
  }
  const auto script = dir / "plot.gp";
  auto f = open(script);
  f << "set datafile separator ','\n"
    << "set key autotitle columnhead\n"
    << "set xlabel '" << axis << "'\n";
  if (table.axis == SweepAxis::kMu) f << "set logscale x\n";
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    f << (k == 0 ? "plot " : "     ") << "'" << to_string(outputs[k]) << ".dat' using 1:2 with lines"
      << (k + 1 < outputs.size() ? ", \\\n" : "\n");
  }
  if (!f) throw std::runtime_error(script.string() + ": write failed");
  written.push_back(script);
  return written;
}

}  // namespace lossnet
