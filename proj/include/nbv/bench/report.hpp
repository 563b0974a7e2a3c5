#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbv/bench/config.hpp"
#include "nbv/theorem/theorem.hpp"

namespace nbv {

inline constexpr const char* kToolkitVersion = "0.1.0";

// One seed's outcome. A failed seed records the error and leaves its data
// empty; the run carries on with the remaining seeds. Reconstruction
// protocols fill the trajectory fields; verify-theorem fills theorem_rows.
struct SeedRun {
  uint64_t seed = 0;
  std::vector<int> pose_indices;
  std::vector<std::size_t> cloud_points;
  std::vector<double> curve;  // per-step coverage
  double auc = 0.0;
  std::vector<TheoremTrialResult> theorem_rows;
  std::string error;  // non-empty = this seed failed
  bool ok() const { return error.empty(); }

  friend bool operator==(const SeedRun&, const SeedRun&) = default;
};

// Across-seed aggregation of one shell half-width: mean volume integral,
// mean gap, and the standard error of the mean gap (0 with fewer than two
// successful seeds — no spread to estimate).
struct TheoremAggregate {
  double mu = 0.0;
  double volume_integral = 0.0;
  double gap = 0.0;
  double sigma = 0.0;

  friend bool operator==(const TheoremAggregate&, const TheoremAggregate&) = default;
};

// Fitted-order band accepted as quadratic shrinkage; generous room for
// Monte Carlo noise around the ideal slope of 2.
inline constexpr double kSlopeBandLo = 1.6;
inline constexpr double kSlopeBandHi = 2.4;

struct TheoremVerdict {
  std::vector<TheoremAggregate> rows;
  double slope = 0.0;
  bool conclusive = false;  // false: gaps at the MC noise floor, or schedule unfit
  bool pass = false;        // conclusive && slope within the band

  friend bool operator==(const TheoremVerdict&, const TheoremVerdict&) = default;
};

// Everything one experiment produced. The config echo is the canonical
// flat-key form, so a report is a re-runnable experiment record; aggregate
// statistics are recomputable from the per-seed data they summarize.
struct RunReport {
  std::string version;  // kToolkitVersion at creation
  ExperimentConfig config;
  std::vector<SeedRun> seeds;
  std::size_t seeds_ok = 0;
  double mean_auc = 0.0;  // over successful seeds
  double std_auc = 0.0;   // sample stddev over successful seeds
  TheoremVerdict theorem;
  double wall_time_sec = 0.0;  // excluded from every determinism guarantee
};

// Scene identity a report row is labelled with (mesh path, or shape name).
std::string scene_label(const ExperimentConfig& config);

// JSON round trip: parse_report(emit_report(r)) reconstructs r exactly
// (numbers serialize in shortest form that parses back to the same value;
// the config travels as its canonical flat-key map).
std::string emit_report(const RunReport& report);
RunReport parse_report(const std::string& json_text);  // throws ParseError
RunReport load_report(const std::string& path);        // throws IoError / ParseError

// Per-seed coverage curve as CSV (step,pose,coverage,cloud_points), values
// in round-trip precision. Identical config + seeds produce byte-identical
// output — no clocks, no environment.
void write_curve_csv(const SeedRun& run, std::ostream& os);

// Aggregated theorem table as CSV (mu,volume_integral,gap,sigma).
void write_theorem_csv(const TheoremVerdict& verdict, std::ostream& os);

// Self-contained SVG plots: per-seed coverage polylines with the mean curve
// emphasized; log-log gap-vs-mu scatter with the fitted-order line.
void write_coverage_svg(const RunReport& report, std::ostream& os);
void write_theorem_svg(const RunReport& report, std::ostream& os);

// One comparison cell: a report's AUC statistics for (scene, policy).
struct ComparisonCell {
  double mean_auc = 0.0;
  double std_auc = 0.0;
  int seeds = 0;

  friend bool operator==(const ComparisonCell&, const ComparisonCell&) = default;
};

// One-sided paired test over matching seed lists, H1: column a's mean AUC
// exceeds column b's. Small p means a reliably beats b.
struct PairedPValue {
  std::string scene;
  std::string col_a;
  std::string col_b;
  double p_a_over_b = 1.0;
};

struct ComparisonTable {
  std::vector<std::string> scenes;   // rows
  std::vector<std::string> columns;  // policy labels; repeats get #2, #3 ...
  std::vector<std::vector<std::optional<ComparisonCell>>> cells;  // [row][col]
  std::vector<PairedPValue> p_values;
  std::vector<std::string> notes;    // e.g. why a p-value is omitted
};

// Cross-report table: rows = scenes, columns = one per report (its policy),
// cells = mean AUC +- sample stddev over that report's successful seeds.
// Paired p-values appear for column pairs on the same scene whose reports
// succeeded on identical seed sets (paired by seed value); pairs with
// differing seed lists get a note instead. Throws InvalidInput on fewer
// than two reports, mismatched protocols, or verify-theorem reports.
ComparisonTable compare_reports(std::span<const RunReport> reports);

void write_comparison_csv(const ComparisonTable& table, std::ostream& os);

}  // namespace nbv
