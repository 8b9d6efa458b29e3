#include "ivph/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "ivph/errors.hpp"
#include "ivph/mathutil.hpp"

namespace ivph {

namespace {

double poly_eval(const std::vector<double>& c, double u) {
  double v = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) v = v * u + c[j];
  return v;
}

std::vector<double> antiderivative(const std::vector<double>& c) {
  std::vector<double> a(c.size() + 1, 0.0);
  for (std::size_t j = 0; j < c.size(); ++j) a[j + 1] = c[j] / static_cast<double>(j + 1);
  return a;
}

}  // namespace

KernelSpec::KernelSpec(KernelFamily family, int order, std::vector<double> coef)
  : family_(family), order_(order), coef_(std::move(coef)) {
  anticoef_ = antiderivative(coef_);
  h_at_support_end_ = poly_eval(anticoef_, 1.0) - poly_eval(anticoef_, -1.0);
  validate();
}

KernelSpec KernelSpec::epanechnikov() {
  return KernelSpec(KernelFamily::epanechnikov, 2, {0.75, 0.0, -0.75});
}

KernelSpec KernelSpec::constructed_order4() {
  // (3/2)Kb + (1/2) u Kb' with Kb = (693/512)(1-u^2)^5 expands to
  // (693/1024)(1-u^2)^4 (3 - 13u^2).
  const double s = 693.0 / 1024.0;
  return KernelSpec(KernelFamily::constructed_order4, 4,
                    {3.0 * s, 0.0, -25.0 * s, 0.0, 70.0 * s, 0.0, -90.0 * s, 0.0, 55.0 * s, 0.0,
                     -13.0 * s});
}

KernelSpec KernelSpec::polynomial(std::vector<double> coefficients, int order) {
  if (order < 2) throw InvalidKernelError("kernel order must be >= 2");
  return KernelSpec(KernelFamily::polynomial, order, std::move(coefficients));
}

KernelSpec KernelSpec::from_name(const std::string& name) {
  if (name == "epanechnikov") return epanechnikov();
  if (name == "order4" || name == "constructed-order4") return constructed_order4();
  throw ConfigError("unknown kernel family: " + name);
}

double KernelSpec::operator()(double u) const {
  if (u < -1.0 || u > 1.0) return 0.0;
  return poly_eval(coef_, u);
}

double KernelSpec::integrated(double t) const {
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return h_at_support_end_;
  return poly_eval(anticoef_, t) - poly_eval(anticoef_, -1.0);
}

double KernelSpec::moment(int j) const {
  return integrate([this, j](double u) { return std::pow(u, j) * (*this)(u); }, -1.0, 1.0, 1e-12);
}

void KernelSpec::validate() const {
  const double mass = moment(0);
  if (std::fabs(mass - 1.0) > 1e-6)
    throw InvalidKernelError("kernel does not integrate to 1 (got " + std::to_string(mass) + ")");
  for (int j = 1; j < order_; ++j) {
    const double m = moment(j);
    if (std::fabs(m) > 1e-6)
      throw InvalidKernelError("kernel moment " + std::to_string(j) + " does not vanish (got " +
                               std::to_string(m) + ")");
  }
}

BandwidthPlan BandwidthPlan::fixed(double h) {
  BandwidthPlan p;
  p.method = BandwidthMethod::fixed;
  p.fixed_value = h;
  p.min_neighbors = 0;
  return p;
}

namespace {

double scale_estimate(std::vector<double> xs) {
  double sd = sample_sd(xs);
  double iqr = quantile(xs, 0.75) - quantile(xs, 0.25);
  double s = sd;
  if (iqr > 0.0) s = std::min(sd, iqr / 1.349);
  return s;
}

double rule_of_thumb(const std::vector<double>& xs) {
  const double m = static_cast<double>(xs.size());
  double s = scale_estimate(xs);
  if (s <= 0.0) s = 1.0;  // degenerate cell covariate, any window works
  return 1.06 * s * std::pow(m, -0.2);
}

// One-stage direct plug-in for the IMSE-optimal bandwidth: the curvature
// functional psi4 = int f''^2 is estimated with a Gaussian kernel at a
// normal-reference pilot bandwidth; Epanechnikov constants R(K) = 3/5 and
// mu2(K) = 1/5 close the formula.
double direct_plug_in(const std::vector<double>& xs) {
  const double m = static_cast<double>(xs.size());
  double s = scale_estimate(xs);
  if (s <= 0.0) return rule_of_thumb(xs);
  const double g = 1.2407009817988 * s * std::pow(m, -1.0 / 7.0);
  const double inv_sqrt2pi = 0.3989422804014327;
  double acc = 0.0;
  for (double xi : xs) {
    for (double xj : xs) {
      double u = (xi - xj) / g;
      acc += (u * u * u * u - 6.0 * u * u + 3.0) * inv_sqrt2pi * std::exp(-0.5 * u * u);
    }
  }
  const double psi4 = acc / (m * m * std::pow(g, 5));
  if (!(psi4 > 0.0)) return rule_of_thumb(xs);
  const double rk = 0.6, mu2 = 0.2;
  return std::pow(rk / (mu2 * mu2 * psi4 * m), 0.2);
}

}  // namespace

double select_bandwidth(const Dataset& data, int z_index, int w_index, double x,
                        const BandwidthPlan& plan) {
  std::vector<double> xs;
  xs.reserve(data.n());
  for (const Observation& o : data.obs) {
    if (o.w_index != w_index) continue;
    if (plan.scope == BandwidthScope::treatment_cell && o.z_index != z_index) continue;
    xs.push_back(o.x);
  }
  if (xs.empty())
    throw EmptyCellError("no observations in cell (z=" + std::to_string(z_index) +
                         ", w=" + std::to_string(w_index) + ")");

  double h = 0.0;
  auto it = plan.overrides.find({z_index, w_index});
  if (it != plan.overrides.end()) {
    h = it->second;
  } else {
    switch (plan.method) {
      case BandwidthMethod::fixed:
        h = plan.fixed_value;
        break;
      case BandwidthMethod::rule_of_thumb:
        if (xs.size() < 2)
          throw InsufficientDataError("rule-of-thumb bandwidth needs >= 2 observations in cell");
        h = rule_of_thumb(xs);
        break;
      case BandwidthMethod::plug_in:
        if (xs.size() < 2)
          throw InsufficientDataError("plug-in bandwidth needs >= 2 observations in cell");
        h = direct_plug_in(xs);
        break;
    }
  }
  if (!(h > 0.0) || !std::isfinite(h))
    throw ConfigError("resolved bandwidth must be positive and finite");

  if (plan.min_neighbors > 0 && xs.size() >= static_cast<std::size_t>(plan.min_neighbors)) {
    std::vector<double> dist;
    dist.reserve(xs.size());
    for (double xi : xs) dist.push_back(std::fabs(xi - x));
    std::nth_element(dist.begin(), dist.begin() + (plan.min_neighbors - 1), dist.end());
    h = std::max(h, 1.1 * dist[static_cast<std::size_t>(plan.min_neighbors - 1)]);
  }
  return h;
}

}  // namespace ivph
