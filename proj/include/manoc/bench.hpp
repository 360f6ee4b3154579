#pragma once

// Experiment runner: builds the built-in problems, executes the
// certification experiments, and emits diff-able artifacts (CSV tables, a
// flat key=value summary record, optional SVG line plots). Every tolerance
// is pinned here; each experiment reports named pass/fail rows that the
// certification summary aggregates into the numbered acceptance lines.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "manoc/problems.hpp"

namespace manoc {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentSpec {
  std::string name;                      // one of experiment_names()
  std::string problem;                   // built-in id ("" = experiment default)
  std::map<std::string, double> params;  // numeric overrides, see bench.cpp
  std::uint64_t seed = 0;
  std::string out_dir;                   // "" = no files written
  bool svg = false;                      // also emit SVG plots

  double param(const std::string& key, double fallback) const;
};

struct CriterionRow {
  std::string id;      // stable row identifier
  std::string detail;  // measured value(s) and the pinned bound
  bool pass = false;
};

struct RunReport {
  ExperimentSpec spec;                    // echo of the input
  std::map<std::string, double> metrics;  // named scalars
  std::vector<CriterionRow> criteria;     // pass/fail rows, fixed per name
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;                 // provenance
  std::string version = kVersion;

  bool all_pass() const;
  const CriterionRow* find(const std::string& id) const;
};

// The nine experiment names, in catalog order.
const std::vector<std::string>& experiment_names();

// Executes one experiment; deterministic given spec.seed. ConfigError on
// unknown experiment or problem identifiers or out-of-guard parameters.
RunReport run_experiment(const ExperimentSpec& spec);

// Spec files: `[experiment-name]` section headers, one experiment per
// section, followed by `key = value` lines ('#' comments). Recognized keys:
// problem, seed, out, svg; every other key must be numeric and lands in
// params. ConfigError on malformed input or unknown experiment names.
std::vector<ExperimentSpec> parse_spec_text(const std::string& text);
std::vector<ExperimentSpec> parse_spec_file(const std::string& path);

// The default full certification run: all nine experiments, derived seeds.
std::vector<ExperimentSpec> certification_suite(std::uint64_t seed);

// Aggregation of experiment rows into the twelve numbered acceptance lines
// (missing experiments mark their lines as failed).
struct AcceptanceLine {
  int number = 0;
  std::string label;
  std::string detail;
  bool pass = false;
};
std::vector<AcceptanceLine> acceptance_summary(
    const std::vector<RunReport>& reports);

// Artifact helpers (shared with the command-line driver).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_record(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& fields);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};
// Minimal line plot; log axes apply log10 to the data before scaling.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<PlotSeries>& series, bool log_x = false,
                    bool log_y = false);

}  // namespace manoc
