#pragma once

// Parameter sweeps over q, mu or n1 producing optimal/equilibrium traffic
// and price-of-anarchy tables, plus gnuplot-ready data files.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lossnet/equilibrium.hpp"
#include "lossnet/model.hpp"

namespace lossnet {

enum class SweepAxis { kQ, kMu, kN1 };
enum class SweepOutput { kTrOpt, kTrWorstNe, kPoaExact, kPoaBound };

const char* to_string(SweepAxis axis);
const char* to_string(SweepOutput output);
SweepAxis parse_axis(const std::string& name);
SweepOutput parse_output(const std::string& name);

struct SweepSpec {
  Instance base;
  SweepAxis axis = SweepAxis::kQ;
  std::vector<double> grid;
  std::vector<SweepOutput> outputs{SweepOutput::kTrOpt, SweepOutput::kTrWorstNe,
                                   SweepOutput::kPoaExact, SweepOutput::kPoaBound};
  std::uint64_t cap = kDefaultEnumerationCap;

  void validate() const;
  Instance at(double value) const;
};

std::vector<double> linear_grid(double from, double to, std::size_t points);
std::vector<double> log_grid(double from, double to, std::size_t points);

// {"base": <instance>, "axis": "q"|"mu"|"n1",
//  "grid": [..] or {"from": a, "to": b, "points": k, "scale": "linear"|"log"},
//  "outputs": ["tr_opt", ...], "cap": int}
SweepSpec sweep_spec_from_json(const nlohmann::json& j);

// Named presets: "q-sweep", "mu-sweep", "n1-sweep", "three-source-n1".
SweepSpec preset_sweep(const std::string& name);

struct SweepRow {
  double axis_value = 0.0;
  double tr_opt = 0.0;
  std::optional<double> tr_worst_ne;
  std::optional<double> poa_exact;
  std::optional<double> poa_bound;
  std::optional<std::uint64_t> ne_count;
};

struct SweepTable {
  SweepAxis axis = SweepAxis::kQ;
  std::vector<SweepRow> rows;  // grid order
};

// Grid points run concurrently. Equilibrium columns are "NA" where the
// profile space exceeds spec.cap (m >= 3) or none were requested.
SweepTable run_sweep(const SweepSpec& spec);

inline constexpr const char* kMissing = "NA";

// Comma separated, header row, LF endings, NA for missing values.
std::string to_csv(const SweepTable& table);

struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvDocument parse_csv(const std::string& text);
SweepTable parse_sweep_csv(const std::string& text);

// Writes one "<output>.dat" file per requested output (columns: axis value,
// output; comma separated with a header row) and a "plot.gp" script.
// Returns the written paths. Throws std::runtime_error naming the path on
// I/O failure.
std::vector<std::filesystem::path> emit_plot_data(const SweepTable& table,
                                                  const std::vector<SweepOutput>& outputs,
                                                  const std::filesystem::path& dir);

}  // namespace lossnet
