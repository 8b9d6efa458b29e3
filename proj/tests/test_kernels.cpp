#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ivph/errors.hpp"
#include "ivph/kernels.hpp"
#include "ivph/rng.hpp"
#include "oracles.hpp"

using namespace ivph;

namespace {

// Hand-rolled scale pieces so the rule-of-thumb check does not reuse the
// library's helpers.
double hand_sd(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= v.size();
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

double hand_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double f = h - lo;
  return lo + 1 < v.size() ? v[lo] * (1 - f) + v[lo + 1] * f : v.back();
}

Dataset one_cell_dataset(const std::vector<double>& xs) {
  std::vector<double> y(xs.size(), 1.0);
  std::vector<int> delta(xs.size(), 1), z(xs.size(), 0), w(xs.size(), 0);
  return make_binary_dataset(y, delta, z, xs, w);
}

}  // namespace

TEST_CASE("epanechnikov evaluation") {
  KernelSpec k = KernelSpec::epanechnikov();
  CHECK(k(0.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(k(0.5) == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(k(1.5) == 0.0);
  CHECK(k(-1.5) == 0.0);
  CHECK(k(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(k.order() == 2);
}

TEST_CASE("constructed order-4 kernel") {
  KernelSpec k = KernelSpec::constructed_order4();
  CHECK(k.order() == 4);
  CHECK(k(0.0) == doctest::Approx(2079.0 / 1024.0).epsilon(1e-14));
  CHECK(k(1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(k(-1.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("kernel moments vanish up to order, checked by independent Simpson") {
  for (const KernelSpec& k : {KernelSpec::epanechnikov(), KernelSpec::constructed_order4()}) {
    CHECK(oracles::simpson_11([&](double u) { return k(u); }) == doctest::Approx(1.0).epsilon(1e-6));
    for (int j = 1; j < k.order(); ++j) {
      const double m = oracles::simpson_11([&](double u) { return std::pow(u, j) * k(u); });
      CHECK(std::fabs(m) < 1e-6);
    }
    // The order-th moment must not vanish, otherwise the order tag is wrong.
    const double m_order =
        oracles::simpson_11([&](double u) { return std::pow(u, k.order()) * k(u); });
    CHECK(std::fabs(m_order) > 1e-3);
  }
}

TEST_CASE("invalid kernels fail construction") {
  CHECK_THROWS_AS(KernelSpec::polynomial({0.6}, 2), InvalidKernelError);  // mass 1.2
  // Epanechnikov coefficients claimed as order 4: moment 2 is 1/5, not 0.
  CHECK_THROWS_AS(KernelSpec::polynomial({0.75, 0.0, -0.75}, 4), InvalidKernelError);
  // The uniform kernel on [-1,1] is a legitimate order-2 kernel.
  CHECK_NOTHROW(KernelSpec::polynomial({0.5}, 2));
}

TEST_CASE("integrated kernel H") {
  KernelSpec epa = KernelSpec::epanechnikov();
  CHECK(epa.integrated(-1.0) == 0.0);
  CHECK(epa.integrated(-2.0) == 0.0);
  CHECK(epa.integrated(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(epa.integrated(0.5) == doctest::Approx(0.84375).epsilon(1e-15));
  CHECK(epa.integrated(1.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(epa.integrated(3.0) == epa.integrated(1.0));
  // Nondecreasing for a second-order kernel.
  double prev = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double h = epa.integrated(-1.0 + 2.0 * i / 200.0);
    CHECK(h >= prev - 1e-15);
    prev = h;
  }

  KernelSpec k4 = KernelSpec::constructed_order4();
  CHECK(k4.integrated(-1.0) == 0.0);
  CHECK(k4.integrated(1.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fixed bandwidth plan is a passthrough") {
  Dataset d = one_cell_dataset({0.0, 0.1, 0.2, 0.5});
  CHECK(select_bandwidth(d, 0, 0, 0.1, BandwidthPlan::fixed(0.2)) == 0.2);
}

TEST_CASE("rule-of-thumb bandwidth matches the stated rule") {
  SplitRng rng(99);
  std::vector<double> xs(400);
  for (double& x : xs) x = rng.normal();
  Dataset d = one_cell_dataset(xs);
  BandwidthPlan plan;
  plan.min_neighbors = 0;
  const double h = select_bandwidth(d, 0, 0, 0.0, plan);
  const double sigma =
      std::min(hand_sd(xs), (hand_quantile(xs, 0.75) - hand_quantile(xs, 0.25)) / 1.349);
  CHECK(h == doctest::Approx(1.06 * sigma * std::pow(400.0, -0.2)).epsilon(1e-12));
  // n^{-1/5} at n=400 is about 0.302, so h sits near 1.06 * sigma * 0.302.
  CHECK(h > 0.2);
  CHECK(h < 0.4);
}

TEST_CASE("direct plug-in bandwidth lands in a sane range on normal data") {
  SplitRng rng(100);
  std::vector<double> xs(400);
  for (double& x : xs) x = rng.normal();
  Dataset d = one_cell_dataset(xs);
  BandwidthPlan plan;
  plan.method = BandwidthMethod::plug_in;
  plan.min_neighbors = 0;
  const double h = select_bandwidth(d, 0, 0, 0.0, plan);
  // The AMISE-optimal Epanechnikov bandwidth for a standard normal at
  // n=400 is about 2.34 * 400^{-1/5} ~ 0.7; allow slack for estimation.
  CHECK(h > 0.3);
  CHECK(h < 1.2);
}

TEST_CASE("bandwidth errors on empty and degenerate cells") {
  Dataset d = make_binary_dataset({1.0, 2.0}, {1, 1}, {0, 0}, {0.0, 1.0}, {0, 0});
  BandwidthPlan plan;
  plan.scope = BandwidthScope::treatment_cell;
  CHECK_THROWS_AS(select_bandwidth(d, 1, 1, 0.0, plan), EmptyCellError);

  Dataset single = make_binary_dataset({1.0, 2.0}, {1, 1}, {0, 1}, {0.0, 1.0}, {0, 1});
  plan.method = BandwidthMethod::plug_in;
  CHECK_THROWS_AS(select_bandwidth(single, 1, 1, 1.0, plan), InsufficientDataError);
  plan.method = BandwidthMethod::rule_of_thumb;
  CHECK_THROWS_AS(select_bandwidth(single, 1, 1, 1.0, plan), InsufficientDataError);
}

TEST_CASE("rule-of-thumb and plug-in bandwidths are scale equivariant") {
  SplitRng rng(5);
  std::vector<double> xs(120);
  for (double& x : xs) x = rng.uniform() + 0.3 * rng.normal();
  const double c = 3.7;
  std::vector<double> scaled(xs);
  for (double& x : scaled) x *= c;
  Dataset d1 = one_cell_dataset(xs), d2 = one_cell_dataset(scaled);
  for (BandwidthMethod method : {BandwidthMethod::rule_of_thumb, BandwidthMethod::plug_in}) {
    BandwidthPlan plan;
    plan.method = method;
    plan.min_neighbors = 0;
    const double h1 = select_bandwidth(d1, 0, 0, 0.2, plan);
    const double h2 = select_bandwidth(d2, 0, 0, 0.2 * c, plan);
    CHECK(h2 == doctest::Approx(c * h1).epsilon(1e-9));
  }
}

TEST_CASE("per-cell bandwidth overrides and the neighbor floor") {
  Dataset d = one_cell_dataset({0.0, 0.05, 1.0, 1.1});
  BandwidthPlan plan = BandwidthPlan::fixed(0.01);
  plan.overrides[{0, 0}] = 0.3;
  CHECK(select_bandwidth(d, 0, 0, 0.0, plan) == 0.3);

  // A tiny fixed bandwidth is enlarged to cover two neighbors at x = 0.5.
  BandwidthPlan floor_plan = BandwidthPlan::fixed(0.01);
  floor_plan.min_neighbors = 2;
  const double h = select_bandwidth(d, 0, 0, 0.5, floor_plan);
  CHECK(h >= 0.45);  // second-nearest distance is 0.45
}
