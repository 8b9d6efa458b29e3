#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ivph/data.hpp"
#include "ivph/pipeline.hpp"
#include "ivph/simharness.hpp"

namespace ivph {

struct CiReport {
  std::vector<double> beta_hat;
  std::vector<double> sd;
  double level = 0.95;
  std::vector<double> lower;
  std::vector<double> upper;
  int resamples = 0;
  std::string method = "naive";  // naive | warp-speed
};

struct BootstrapOptions {
  int resamples = 200;
  std::uint64_t seed = 1;
  int threads = 1;
  double failure_budget = 0.10;
};

//! Full pipeline on one row resample: resample_seed drives the fresh proxy
//! draws, so resampling noise includes proxy-generation noise.
std::vector<double> run_pipeline_on_resample(const Dataset& data,
                                             const std::vector<std::size_t>& rows,
                                             const EstimatorConfig& cfg,
                                             std::uint64_t resample_seed);

//! Componentwise sample sd of the proposed estimator over B row resamples
//! with replacement (the whole pipeline re-run per resample). Failing
//! resamples are dropped and counted; more than the budget raises
//! FailureBudgetError.
struct BootstrapSd {
  std::vector<double> sd;
  int used = 0;
  int failed = 0;
};
BootstrapSd bootstrap_sd(const Dataset& data, const EstimatorConfig& cfg,
                         const BootstrapOptions& opts);

//! Normal-approximation interval beta_hat -/+ z_{1-alpha/2} sd.
//! Throws DegenerateSdError when some sd is not strictly positive.
CiReport normal_ci(const std::vector<double>& beta_hat, const std::vector<double>& sd,
                   double level);

//! Coverage of the warp-speed normal intervals (one bootstrap resample per
//! Monte Carlo replication, sd pooled across replications), per component.
std::vector<double> warp_speed_coverage(const SimDesign& design, std::size_t n,
                                        int censoring_percent, int reps, double level,
                                        std::uint64_t seed, const EstimatorConfig& estimator,
                                        int threads = 1);

}  // namespace ivph
