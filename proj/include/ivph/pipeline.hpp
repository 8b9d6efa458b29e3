#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ivph/coxph.hpp"
#include "ivph/data.hpp"
#include "ivph/phi_solver.hpp"
#include "ivph/proxy.hpp"

namespace ivph {

//! Everything the three estimation steps need, with the defaults used
//! throughout: Epanechnikov kernel, per-instrument-cell rule-of-thumb
//! bandwidth, no time smoothing, degenerate generated censoring at u_bar.
struct EstimatorConfig {
  std::string kernel_family = "epanechnikov";
  std::string kernel_tilde_family = "epanechnikov";
  BandwidthPlan bandwidth;
  double epsilon = 0.0;
  double u_bar = 0.9;
  double t_bar = 0.0;  // <= 0: largest uncensored duration
  double tau = 0.0;
  int grid_size = 101;
  SolverMode solver_mode = SolverMode::automatic;
  int restarts = 8;
  double triangular_tol = 0.0;
  SaturationPolicy on_saturation = SaturationPolicy::drop_with_count;
  double max_drop_fraction = 0.05;
  //! Average the fitted coefficients over this many independent proxy sets.
  int proxy_replicates = 1;
  CoxOptions cox;

  void validate() const;
};

struct EstimateAudit {
  SolverMode solver_mode = SolverMode::triangular;
  bool triangular_found = false;
  std::size_t dropped_saturated = 0;
  std::size_t proxy_rows = 0;
  double t_bar = 0.0;
  std::vector<double> bandwidths;  // resolved at the median covariate value
  bool rank_warning = false;
};

struct EstimateResult {
  CoxFit fit;
  EstimateAudit audit;
};

//! Shared quantile map for one dataset/config (step 1); reusable across
//! proxy draws.
QuantileMap build_quantile_map(std::shared_ptr<const Dataset> data, const EstimatorConfig& cfg);

//! Steps 2-3 on an existing map: generate proxies with the given seed and
//! fit the partial likelihood (averaging over proxy_replicates sets).
EstimateResult estimate_with_map(const Dataset& data, const QuantileMap& map,
                                 const EstimatorConfig& cfg, std::uint64_t proxy_seed);

//! Full three-step estimator on a dataset.
EstimateResult estimate_proposed(std::shared_ptr<const Dataset> data, const EstimatorConfig& cfg,
                                 std::uint64_t proxy_seed);

}  // namespace ivph
