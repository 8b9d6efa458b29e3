#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ivph/data.hpp"
#include "ivph/pipeline.hpp"

namespace ivph {

enum class CovariateLaw { beta_2_5, uniform_half, bernoulli_half };

//! One simulation design: W ~ Bernoulli(1/2); X per x_law; the treatment
//! follows the threshold rule Z = I(W=1) I(0.5 U - W + c0 + c1 X + 0.5 eps >= 0)
//! (or Z = W under full compliance); durations are unit-exponential baseline
//! T = -log(1-U) / exp(z beta_z + x beta_x); censoring is exponential.
struct SimDesign {
  std::string name;
  CovariateLaw x_law = CovariateLaw::bernoulli_half;
  double z_intercept = 0.0;  // c0
  double z_x_coef = 0.0;     // c1
  double beta_z = 0.7;
  double beta_x = 0.7;
  double lambda_20 = 0.0;  // censoring rate for the 20% level
  double lambda_40 = 0.0;  // censoring rate for the 40% level
  bool full_compliance = false;

  double censoring_rate(int percent) const;
  std::vector<double> beta0() const { return {beta_z, beta_x}; }
};

//! continuous-beta | continuous-uniform | discrete-bernoulli |
//! exogenous-bernoulli (the Z = W variant used for degeneration checks).
SimDesign design_by_name(const std::string& name);

//! iid sample of (Y, delta, Z, X, W); row i is drawn from its own RNG
//! stream, so generation is seed-deterministic and order-independent.
Dataset generate_design(const SimDesign& design, std::size_t n, int censoring_percent,
                        std::uint64_t seed);

//! sqrt( N^{-1} sum_j || beta_j - beta0 ||^2 ).
double rmse(const std::vector<std::vector<double>>& estimates, const std::vector<double>& beta0);

struct SimMetrics {
  std::vector<double> bias;
  std::vector<double> sd;
  std::vector<double> mse;
  double rmse = 0.0;
  std::vector<double> cp95;  // empty unless coverage was requested
  bool sd_defined = true;    // false when only one replication was used
};

struct SimReport {
  std::string design;
  int censoring = 20;
  std::size_t n = 0;
  int reps_requested = 0;
  int reps_used = 0;
  int failed = 0;
  std::vector<std::string> components;
  SimMetrics proposed;
  SimMetrics naive;
  bool has_cp95 = false;
};

struct MonteCarloOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  bool run_proposed = true;
  bool run_naive = true;
  //! One bootstrap resample per replication (warp-speed) for CP95.
  bool coverage = false;
  double level = 0.95;
  double failure_budget = 0.10;
  EstimatorConfig estimator;
};

//! Paired Monte Carlo comparison: both estimators see the same replication
//! datasets; replication r uses RNG streams derived from (seed, r). Failed
//! replications are dropped and counted; exceeding the budget raises
//! FailureBudgetError.
SimReport run_monte_carlo(const SimDesign& design, std::size_t n, int censoring_percent, int reps,
                          const MonteCarloOptions& opts);

}  // namespace ivph
