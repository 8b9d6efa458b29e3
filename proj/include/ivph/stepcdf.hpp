#pragma once

#include <string>
#include <vector>

#include "ivph/kernels.hpp"

namespace ivph {

//! Right-continuous step distribution function on [0, upper_limit]:
//! strictly increasing jump times with nondecreasing cumulative values <= 1.
struct StepCdf {
  std::vector<double> jump_times;
  std::vector<double> values;  // value at and after jump_times[j]
  double upper_limit = 0.0;    // time cap T-bar

  double operator()(double t) const;
  //! Total mass, i.e. the value past the last jump (0 if no jumps).
  double total_mass() const { return values.empty() ? 0.0 : values.back(); }
  //! Jump size at jump index j.
  double jump_size(std::size_t j) const {
    return values[j] - (j == 0 ? 0.0 : values[j - 1]);
  }
  double max_jump_size() const;
  void validate() const;
};

struct InvertResult {
  double t = 0.0;
  bool saturated = false;  // requested level above the reachable mass
};

//! Scaled, optionally time-smoothed sub-distribution function
//! F(t) = scale * sum_j dF_j * H((t - u_j) / epsilon), with H the integrated
//! kernel; epsilon = 0 means the plain scaled step function.
class SmoothSubCdf {
public:
  SmoothSubCdf();  // the zero function (empty cell)
  SmoothSubCdf(StepCdf base, double scale, double epsilon, KernelSpec kernel_tilde);

  double operator()(double t) const;
  //! Pseudo-inverse inf{t in [0, T-bar] : F(t) >= u}; u <= 0 gives 0,
  //! u above the total mass gives T-bar with the saturation flag set.
  InvertResult invert(double u) const;
  //! Sub-density scale * sum_j dF_j K~((t-u_j)/eps)/eps; 0 when epsilon = 0.
  double density(double t) const;

  double scale() const { return scale_; }
  double epsilon() const { return epsilon_; }
  double total_mass() const;
  double upper_limit() const { return base_.upper_limit; }
  const StepCdf& base() const { return base_; }
  //! Largest single step of the underlying scaled step function.
  double max_jump_size() const { return scale_ * base_.max_jump_size(); }

private:
  StepCdf base_;
  double scale_ = 0.0;
  double epsilon_ = 0.0;
  KernelSpec kernel_tilde_;
};

//! Two-column (t, value) diagnostic dump, one row per jump plus the cap.
void write_cdf_csv(const SmoothSubCdf& f, const std::string& path);

}  // namespace ivph
