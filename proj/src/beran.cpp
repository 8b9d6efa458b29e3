#include "ivph/beran.hpp"

#include <algorithm>
#include <cmath>

#include "ivph/errors.hpp"

namespace ivph {

namespace detail {

CellIndex::CellIndex(const Dataset& data) : L_(data.n_levels()) {
  cells_.resize(static_cast<std::size_t>(L_ * L_));
  wcells_.resize(static_cast<std::size_t>(L_));
  for (const Observation& o : data.obs) {
    CellMember m{o.y, o.delta, o.x};
    cells_[static_cast<std::size_t>(o.z_index * L_ + o.w_index)].push_back(m);
    wcells_[static_cast<std::size_t>(o.w_index)].push_back(m);
  }
  auto by_time = [](const CellMember& a, const CellMember& b) {
    if (a.y != b.y) return a.y < b.y;
    return a.delta > b.delta;  // uncensored first among ties
  };
  for (auto& c : cells_) std::stable_sort(c.begin(), c.end(), by_time);
}

StepCdf beran_core(const std::vector<CellMember>& members, const std::vector<double>& weights,
                   double t_bar) {
  StepCdf out;
  out.upper_limit = t_bar;
  double at_risk = 0.0;
  for (double w : weights) at_risk += w;
  if (at_risk <= 0.0) return out;

  const double tiny = 1e-12 * at_risk;
  double survival = 1.0;
  for (std::size_t j = 0; j < members.size(); ++j) {
    if (at_risk <= tiny) break;  // at-risk mass exhausted, freeze the tail
    const CellMember& m = members[j];
    const double w = weights[j];
    if (m.delta == 1 && w > 0.0 && m.y <= t_bar) {
      survival *= std::max(0.0, 1.0 - w / at_risk);
      const double value = 1.0 - survival;
      if (!out.jump_times.empty() && out.jump_times.back() == m.y) {
        out.values.back() = value;  // merge tied event times into one jump
      } else {
        out.jump_times.push_back(m.y);
        out.values.push_back(value);
      }
    }
    at_risk -= w;
  }
  return out;
}

}  // namespace detail

std::vector<double> nw_weights(const Dataset& data, int z_index, int w_index, double x, double h,
                               const KernelSpec& kernel) {
  if (!(h > 0.0)) throw ConfigError("bandwidth must be positive");
  std::vector<double> w(data.n(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    const Observation& o = data.obs[i];
    if (o.z_index != z_index || o.w_index != w_index) continue;
    const double k = kernel((x - o.x) / h);
    w[i] = k;
    total += k;
  }
  if (total <= 0.0)
    throw ZeroMassError("no kernel mass in cell (z=" + std::to_string(z_index) +
                        ", w=" + std::to_string(w_index) + ") at x=" + std::to_string(x));
  for (double& wi : w) wi /= total;
  return w;
}

StepCdf beran_cdf(const Dataset& data, int z_index, int w_index, double x, double h,
                  const KernelSpec& kernel, double t_bar) {
  if (!(h > 0.0)) throw ConfigError("bandwidth must be positive");
  if (t_bar <= 0.0) t_bar = data.max_uncensored_y();
  detail::CellIndex index(data);
  const auto& members = index.cell(z_index, w_index);
  std::vector<double> weights(members.size(), 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < members.size(); ++j) {
    weights[j] = kernel((x - members[j].x) / h);
    total += weights[j];
  }
  if (total <= 0.0)
    throw ZeroMassError("no kernel mass in cell (z=" + std::to_string(z_index) +
                        ", w=" + std::to_string(w_index) + ") at x=" + std::to_string(x));
  return detail::beran_core(members, weights, t_bar);
}

double estimate_p(const Dataset& data, int z_index, int w_index, double x, double h,
                  const KernelSpec& kernel) {
  if (!(h > 0.0)) throw ConfigError("bandwidth must be positive");
  double num = 0.0, den = 0.0;
  for (const Observation& o : data.obs) {
    if (o.w_index != w_index) continue;
    const double k = kernel((x - o.x) / h);
    den += k;
    if (o.z_index == z_index) num += k;
  }
  if (den <= 0.0)
    throw ZeroMassError("no kernel mass at instrument level w=" + std::to_string(w_index) +
                        " at x=" + std::to_string(x));
  return num / den;
}

SmoothSubCdf smooth_cdf(StepCdf step, double p_hat, double epsilon, KernelSpec kernel_tilde) {
  if (p_hat < 0.0 || p_hat > 1.0 + 1e-12)
    throw Error(ErrorCategory::internal, "p_hat outside [0,1]");
  return SmoothSubCdf(std::move(step), std::min(p_hat, 1.0), epsilon, std::move(kernel_tilde));
}

}  // namespace ivph
