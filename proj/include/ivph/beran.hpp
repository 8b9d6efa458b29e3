#pragma once

#include <vector>

#include "ivph/data.hpp"
#include "ivph/kernels.hpp"
#include "ivph/stepcdf.hpp"

namespace ivph {

//! Nadaraya-Watson weights at covariate value x for cell (z,w): zero off-cell
//! and outside the kernel window, nonnegative, summing to one.
//! Throws ZeroMassError when no in-cell observation has kernel support at x.
std::vector<double> nw_weights(const Dataset& data, int z_index, int w_index, double x, double h,
                               const KernelSpec& kernel);

//! Product-limit (Beran) estimator of F(t | z, x, w) under right censoring
//! with Nadaraya-Watson weights. Jump factors are processed in nondecreasing
//! y order, uncensored before censored among ties; if the at-risk mass hits
//! zero the remaining mass is frozen. t_bar <= 0 means "largest uncensored y
//! in the dataset".
StepCdf beran_cdf(const Dataset& data, int z_index, int w_index, double x, double h,
                  const KernelSpec& kernel, double t_bar = 0.0);

//! Kernel-weighted estimate of p_{z,x,w} = P(Z=z | X=x, W=w).
//! Throws ZeroMassError when no W=w observation has kernel support at x.
double estimate_p(const Dataset& data, int z_index, int w_index, double x, double h,
                  const KernelSpec& kernel);

//! Scale a conditional step CDF by p_hat and optionally smooth it in time
//! with the integrated kernel of kernel_tilde (epsilon = 0 leaves the steps).
SmoothSubCdf smooth_cdf(StepCdf step, double p_hat, double epsilon, KernelSpec kernel_tilde);

namespace detail {

struct CellMember {
  double y;
  int delta;
  double x;
};

//! Per-dataset cell index with members sorted by (y asc, uncensored first).
class CellIndex {
public:
  explicit CellIndex(const Dataset& data);
  const std::vector<CellMember>& cell(int z_index, int w_index) const {
    return cells_[static_cast<std::size_t>(z_index * L_ + w_index)];
  }
  const std::vector<CellMember>& instrument_cell(int w_index) const {
    return wcells_[static_cast<std::size_t>(w_index)];
  }
  int levels() const { return L_; }

private:
  int L_;
  std::vector<std::vector<CellMember>> cells_;
  std::vector<std::vector<CellMember>> wcells_;
};

//! Product-limit core over sorted members with per-member kernel weights
//! (weights need not be normalized; ratios are scale invariant).
StepCdf beran_core(const std::vector<CellMember>& members, const std::vector<double>& weights,
                   double t_bar);

}  // namespace detail

}  // namespace ivph
