#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ivph/data.hpp"

namespace ivph {

enum class KernelFamily { epanechnikov, constructed_order4, polynomial };

//! A compactly supported kernel on [-1,1], stored as a polynomial in u.
//! Construction verifies, by adaptive quadrature, that the kernel
//! integrates to one and that moments 1..order-1 vanish (tol 1e-6);
//! it throws InvalidKernelError otherwise.
class KernelSpec {
public:
  static KernelSpec epanechnikov();
  //! Order-4 kernel (3/2)Kb(u) + (1/2) u Kb'(u) built from
  //! Kb(u) = (693/512)(1-u^2)^5; its moments 1..3 vanish.
  static KernelSpec constructed_order4();
  //! Custom polynomial kernel with a claimed order; validated like the rest.
  static KernelSpec polynomial(std::vector<double> coefficients, int order);

  static KernelSpec from_name(const std::string& name);

  double operator()(double u) const;
  //! Integrated kernel H(t) = integral of K over [-1, t], H(t >= 1) = H(1).
  double integrated(double t) const;

  int order() const { return order_; }
  KernelFamily family() const { return family_; }
  const std::vector<double>& coefficients() const { return coef_; }

  //! j-th moment by quadrature (test/diagnostic hook).
  double moment(int j) const;

private:
  KernelSpec(KernelFamily family, int order, std::vector<double> coef);
  void validate() const;

  KernelFamily family_;
  int order_;
  std::vector<double> coef_;       // c0 + c1 u + c2 u^2 + ...
  std::vector<double> anticoef_;   // antiderivative coefficients, constant 0
  double h_at_support_end_ = 1.0;  // antiderivative(1) - antiderivative(-1)
};

enum class BandwidthMethod { fixed, rule_of_thumb, plug_in };

//! Which covariate sample a cell bandwidth is computed from: all rows with
//! the cell's instrument level (keeps sum_z p-hat = 1 exactly), or only the
//! rows matching both levels.
enum class BandwidthScope { instrument_cell, treatment_cell };

struct BandwidthPlan {
  BandwidthMethod method = BandwidthMethod::rule_of_thumb;
  double fixed_value = 0.0;
  BandwidthScope scope = BandwidthScope::instrument_cell;
  //! Enlarge the resolved bandwidth so at least this many in-scope
  //! observations fall in the window at the query point (0 disables).
  int min_neighbors = 2;
  //! Optional per-(z,w) overrides, keyed by (z_index, w_index).
  std::map<std::pair<int, int>, double> overrides;

  static BandwidthPlan fixed(double h);
};

//! Resolved bandwidth for estimating at covariate value x in cell (z,w).
//! Scale statistics come from the plan's scope sample; the min-neighbor
//! floor is applied around x. Throws EmptyCellError / InsufficientDataError.
double select_bandwidth(const Dataset& data, int z_index, int w_index, double x,
                        const BandwidthPlan& plan);

}  // namespace ivph
