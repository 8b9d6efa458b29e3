#include "ivph/stepcdf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ivph/errors.hpp"

namespace ivph {

double StepCdf::operator()(double t) const {
  // Right-continuous: value of the last jump at or before t.
  auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  if (it == jump_times.begin()) return 0.0;
  return values[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

double StepCdf::max_jump_size() const {
  double m = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) m = std::max(m, jump_size(j));
  return m;
}

void StepCdf::validate() const {
  for (std::size_t j = 0; j < jump_times.size(); ++j) {
    if (j > 0 && !(jump_times[j] > jump_times[j - 1]))
      throw Error(ErrorCategory::internal, "step cdf jump times not strictly increasing");
    if (j > 0 && values[j] < values[j - 1])
      throw Error(ErrorCategory::internal, "step cdf values decreasing");
  }
  if (!values.empty() && values.back() > 1.0 + 1e-12)
    throw Error(ErrorCategory::internal, "step cdf exceeds 1");
}

SmoothSubCdf::SmoothSubCdf()
  : base_{}, scale_(0.0), epsilon_(0.0), kernel_tilde_(KernelSpec::epanechnikov()) {}

SmoothSubCdf::SmoothSubCdf(StepCdf base, double scale, double epsilon, KernelSpec kernel_tilde)
  : base_(std::move(base)), scale_(scale), epsilon_(epsilon), kernel_tilde_(std::move(kernel_tilde)) {
  if (epsilon_ < 0.0) throw ConfigError("time-smoothing bandwidth must be >= 0");
  if (scale_ < 0.0 || scale_ > 1.0 + 1e-12)
    throw Error(ErrorCategory::internal, "sub-cdf scale outside [0,1]");
}

double SmoothSubCdf::operator()(double t) const {
  if (scale_ == 0.0 || base_.values.empty()) return 0.0;
  if (epsilon_ == 0.0) return scale_ * base_(t);
  double acc = 0.0;
  for (std::size_t j = 0; j < base_.jump_times.size(); ++j) {
    acc += base_.jump_size(j) * kernel_tilde_.integrated((t - base_.jump_times[j]) / epsilon_);
  }
  return scale_ * acc;
}

double SmoothSubCdf::total_mass() const { return scale_ * base_.total_mass(); }

double SmoothSubCdf::density(double t) const {
  if (epsilon_ <= 0.0 || scale_ == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < base_.jump_times.size(); ++j) {
    acc += base_.jump_size(j) * kernel_tilde_((t - base_.jump_times[j]) / epsilon_);
  }
  return scale_ * acc / epsilon_;
}

InvertResult SmoothSubCdf::invert(double u) const {
  const double tbar = base_.upper_limit;
  if (u <= 0.0) return {0.0, false};
  const double reach = (*this)(tbar);
  if (u > reach) return {tbar, true};
  if (epsilon_ == 0.0) {
    // Smallest jump whose cumulative scaled value reaches u.
    const auto& vals = base_.values;
    std::size_t lo = 0, hi = vals.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (scale_ * vals[mid] >= u) hi = mid; else lo = mid + 1;
    }
    return {base_.jump_times[lo], false};
  }
  // Smoothed case: march over knot intervals, then bisect the first crossing.
  std::vector<double> knots{0.0, tbar};
  for (double tj : base_.jump_times) {
    knots.push_back(std::clamp(tj - epsilon_, 0.0, tbar));
    knots.push_back(std::clamp(tj + epsilon_, 0.0, tbar));
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  double prev_t = 0.0;
  if ((*this)(0.0) >= u) return {0.0, false};
  for (std::size_t k = 1; k < knots.size(); ++k) {
    const int sub = 64;
    for (int s = 1; s <= sub; ++s) {
      double t = knots[k - 1] + (knots[k] - knots[k - 1]) * s / sub;
      if ((*this)(t) >= u) {
        double lo = prev_t, hi = t;
        for (int it = 0; it < 100 && hi - lo > 1e-13 * (1.0 + tbar); ++it) {
          double mid = 0.5 * (lo + hi);
          if ((*this)(mid) >= u) hi = mid; else lo = mid;
        }
        return {hi, false};
      }
      prev_t = t;
    }
  }
  return {tbar, false};  // u == reach within rounding
}

void write_cdf_csv(const SmoothSubCdf& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::data, "cannot open " + path + " for writing");
  out << "t,value\n";
  out.precision(17);
  out << 0.0 << "," << f(0.0) << "\n";
  for (double t : f.base().jump_times) out << t << "," << f(t) << "\n";
  out << f.upper_limit() << "," << f(f.upper_limit()) << "\n";
}

}  // namespace ivph
