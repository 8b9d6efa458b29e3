#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ivph/data.hpp"
#include "ivph/inference.hpp"
#include "ivph/pipeline.hpp"
#include "ivph/simharness.hpp"

namespace ivph {

struct ColumnMapping {
  std::string y = "y";
  std::string delta = "delta";
  std::string x = "x";
  std::string w = "w";
  std::string z_level = "z";           // single level column (default)
  std::vector<std::string> z_dummies;  // alternative: 0/1 dummy columns
};

//! CSV with a header row. Levels are inferred from the distinct z / w
//! values (numeric-aware ordering, first level is the dummy-coding
//! reference). Rows with missing or malformed values raise ParseError with
//! their line number; mismatched level cardinalities raise SchemaError.
Dataset read_dataset(const std::string& path, const ColumnMapping& mapping);

//! Write a dataset with the default column layout (y,delta,z,x,w), z as
//! level labels.
void write_dataset_csv(const Dataset& data, const std::string& path);

struct RunConfig {
  std::string command;  // estimate | simulate | bootstrap
  std::string input_path;
  std::string output_path = "ivph_report";
  ColumnMapping columns;
  EstimatorConfig estimator;
  std::uint64_t seed = 1;
  int bootstrap_resamples = 200;
  double level = 0.95;
  std::string design = "discrete-bernoulli";
  int censoring = 20;
  std::size_t n = 500;
  int reps = 100;
  bool coverage = false;
  double failure_budget = 0.10;
  int threads = 1;
  std::string dump_phi;
  std::string dump_proxies;
  std::string dump_cdf;

  void validate() const;
};

//! Flat key=value text ('#' comments); unknown keys raise ConfigError.
RunConfig parse_config_file(const std::string& path);
//! Apply one key=value pair (also used for CLI flag overrides).
void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value);

struct EstimateReportRow {
  std::string estimator;  // proposed | naive
  std::string component;
  double estimate = 0.0;
  double sd = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
};

struct EstimateReport {
  std::vector<EstimateReportRow> rows;
  std::map<std::string, std::string> audit;  // seed, bandwidths, drops, ...
};

void write_estimate_report(const EstimateReport& report, const std::string& csv_path,
                           const std::string& text_path);
EstimateReport parse_estimate_report(const std::string& csv_path);
std::string render_estimate_text(const EstimateReport& report);

void write_sim_report(const SimReport& report, const std::string& csv_path,
                      const std::string& text_path);
SimReport parse_sim_report(const std::string& csv_path);
std::string render_sim_text(const SimReport& report);

//! estimate: fit proposed + naive, bootstrap sds, normal CIs; writes
//! <output>.csv and <output>.txt plus any configured diagnostic dumps.
EstimateReport run_estimate(const RunConfig& cfg);
EstimateReport run_estimate_on(const Dataset& data, const RunConfig& cfg);
//! simulate: Monte Carlo comparison for the configured design.
SimReport run_simulate(const RunConfig& cfg);
//! bootstrap: proposed fit and bootstrap CI only.
EstimateReport run_bootstrap(const RunConfig& cfg);
EstimateReport run_bootstrap_on(const Dataset& data, const RunConfig& cfg);

}  // namespace ivph
