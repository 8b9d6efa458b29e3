#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "ivph/errors.hpp"
#include "ivph/proxy.hpp"
#include "ivph/rng.hpp"
#include "ivph/simharness.hpp"
#include "oracles.hpp"

using namespace ivph;

namespace {

ProxyConfig config(double u_bar, double tau, std::uint64_t seed = 1) {
  ProxyConfig cfg;
  cfg.u_bar = u_bar;
  cfg.tau = tau;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("u_tilde mapping with degenerate censoring") {
  ProxyConfig cfg = config(0.9, 0.0);
  UTildeDraw capped = u_tilde_from_uniforms(cfg, 0.95, 0.0);
  CHECK(capped.u_tilde == 0.9);
  CHECK(capped.delta == 0);
  UTildeDraw low = u_tilde_from_uniforms(cfg, 0.3, 0.0);
  CHECK(low.u_tilde == 0.3);
  CHECK(low.delta == 1);
}

TEST_CASE("u_tilde mapping with a censoring window") {
  ProxyConfig cfg = config(0.9, 0.2);
  // U_g^c = 0.7 + 0.2 * raw.
  UTildeDraw d1 = u_tilde_from_uniforms(cfg, 0.75, 0.5);  // censor at 0.8
  CHECK(d1.u_tilde == 0.75);
  CHECK(d1.delta == 1);
  UTildeDraw d2 = u_tilde_from_uniforms(cfg, 0.85, 0.25);  // censor at 0.75
  CHECK(d2.u_tilde == 0.75);
  CHECK(d2.delta == 0);
}

TEST_CASE("u_tilde_cdf piecewise branches") {
  ProxyConfig cfg = config(0.9, 0.2);
  CHECK(u_tilde_cdf(-0.1, cfg) == std::pair<double, double>{0.0, 0.0});
  auto mid = u_tilde_cdf(0.3, cfg);
  CHECK(mid.first == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(mid.second == doctest::Approx(0.3).epsilon(1e-15));
  auto top = u_tilde_cdf(0.9, cfg);
  CHECK(top.first == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(top.second == doctest::Approx((0.81 - 0.49) / 0.4).epsilon(1e-12));

  // Continuity at the start of the quadratic branch.
  auto a = u_tilde_cdf(0.7 - 1e-12, cfg);
  auto b = u_tilde_cdf(0.7 + 1e-12, cfg);
  CHECK(a.first == doctest::Approx(b.first).epsilon(1e-9));
  CHECK(a.second == doctest::Approx(b.second).epsilon(1e-9));

  // Monotone, coherent, saturating at u_bar (coherence checked with a tiny
  // slack: the joint and sub branches agree only to rounding on [0, ub-tau]).
  ProxyConfig deg = config(0.9, 0.0);
  for (const ProxyConfig& c : {cfg, deg}) {
    double prev1 = -1.0, prev2 = -1.0;
    for (int i = 0; i <= 110; ++i) {
      auto v = u_tilde_cdf(-0.05 + 0.01 * i, c);
      CHECK(v.first >= prev1 - 1e-15);
      CHECK(v.second >= prev2 - 1e-15);
      CHECK(v.first >= v.second - 1e-12);
      prev1 = v.first;
      prev2 = v.second;
    }
    CHECK(u_tilde_cdf(c.u_bar, c).first == 1.0);
  }
}

TEST_CASE("empirical law of the generated pair matches the closed form") {
  for (double tau : {0.0, 0.2}) {
    ProxyConfig cfg = config(0.9, tau, 99);
    const std::size_t n = 100000;
    std::vector<double> all, events;
    for (std::size_t i = 0; i < n; ++i) {
      SplitRng rng(cfg.seed, 0x7eaU, i);
      UTildeDraw d = draw_u_tilde(cfg, rng);
      all.push_back(d.u_tilde);
      if (d.delta == 1) events.push_back(d.u_tilde);
    }
    const double ub = cfg.u_bar, tw = cfg.tau;
    const double ks_joint = oracles::ks_distance(
        all, [&](double u) { return oracles::u_tilde_law(u, ub, tw).first; });
    const double ks_sub = oracles::ks_distance(
        events, [&](double u) { return oracles::u_tilde_law(u, ub, tw).second; }, n);
    CHECK(ks_joint < 0.01);
    CHECK(ks_sub < 0.01);
  }
}

TEST_CASE("make_proxies produces one row per input row and is reproducible") {
  auto data = std::make_shared<Dataset>(
      generate_design(design_by_name("discrete-bernoulli"), 400, 20, 31));
  EstimatorConfig ecfg;
  QuantileMap map = build_quantile_map(data, ecfg);
  ProxyConfig cfg = config(0.9, 0.0, 555);

  ProxyDataset a = make_proxies(*data, map, cfg);
  ProxyDataset b = make_proxies(*data, map, cfg);
  CHECK(a.n() + a.dropped_saturated == data->n());
  REQUIRE(a.n() == b.n());
  CHECK(std::memcmp(a.y.data(), b.y.data(), a.n() * sizeof(double)) == 0);
  CHECK(a.delta == b.delta);
  CHECK(a.v == b.v);

  // Different seeds give different draws.
  ProxyDataset c = make_proxies(*data, map, config(0.9, 0.0, 556));
  CHECK(std::memcmp(a.y.data(), c.y.data(), std::min(a.n(), c.n()) * sizeof(double)) != 0);

  // Rows carry (z dummies, x) and delta mirrors the generated indicator.
  CHECK(a.d_v() == 2);
  for (std::size_t i = 0; i < a.n(); ++i) {
    CHECK(a.y[i] >= 0.0);
    CHECK(a.y[i] <= map.t_bar() + 1e-12);
    CHECK((a.delta[i] == 0 || a.delta[i] == 1));
  }
}

TEST_CASE("forced draws: rank zero maps every proxy duration to zero") {
  auto data = std::make_shared<Dataset>(
      generate_design(design_by_name("discrete-bernoulli"), 100, 20, 32));
  EstimatorConfig ecfg;
  QuantileMap map = build_quantile_map(data, ecfg);
  std::vector<UTildeDraw> draws(data->n(), UTildeDraw{0.0, 1});
  ProxyDataset p = make_proxies_from_draws(*data, map, config(0.9, 0.0), draws);
  REQUIRE(p.n() == data->n());
  for (double y : p.y) CHECK(y == 0.0);
}

TEST_CASE("saturated rows are dropped with a count or raise per policy") {
  // A single-level dataset whose reachable mass is 1/4: most draws saturate.
  Dataset d = make_binary_dataset({1.0, 2.0, 3.0, 4.0}, {1, 0, 0, 0}, {0, 0, 0, 0},
                                  {0.0, 0.0, 0.0, 0.0}, {0, 0, 0, 0});
  d.z_codebook = {{0}};
  d.z_labels = {"0"};
  d.w_labels = {"0"};
  d.validate();
  auto data = std::make_shared<Dataset>(d);
  EstimatorConfig ecfg;
  QuantileMap map = build_quantile_map(data, ecfg);

  ProxyConfig cfg = config(0.9, 0.0, 7);
  cfg.max_drop_fraction = 0.95;
  std::vector<UTildeDraw> draws{{0.1, 1}, {0.85, 1}, {0.9, 0}, {0.2, 1}};
  ProxyDataset p = make_proxies_from_draws(*data, map, cfg, draws);
  CHECK(p.n() == 2);
  CHECK(p.dropped_saturated == 2);

  cfg.max_drop_fraction = 0.25;
  CHECK_THROWS_AS(make_proxies_from_draws(*data, map, cfg, draws), SaturationBudgetError);

  cfg.on_saturation = SaturationPolicy::error;
  CHECK_THROWS_AS(make_proxies_from_draws(*data, map, cfg, draws), SaturatedError);
}

TEST_CASE("generated indicator is independent of the treatment level") {
  auto data = std::make_shared<Dataset>(
      generate_design(design_by_name("discrete-bernoulli"), 10000, 20, 41));
  EstimatorConfig ecfg;
  QuantileMap map = build_quantile_map(data, ecfg);
  ProxyDataset p = make_proxies(*data, map, config(0.9, 0.0, 42));

  // 2x2 chi-square between delta and the treatment dummy.
  double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
  for (std::size_t i = 0; i < p.n(); ++i) {
    const bool treated = p.v[i][0] == 1.0;
    if (p.delta[i] == 1) (treated ? n11 : n01) += 1.0;
    else (treated ? n10 : n00) += 1.0;
  }
  const double n = n11 + n10 + n01 + n00;
  const double r1 = n11 + n01, r0 = n10 + n00, c1 = n11 + n10, c0 = n01 + n00;
  double stat = 0.0;
  const double e11 = r1 * c1 / n, e10 = r0 * c1 / n, e01 = r1 * c0 / n, e00 = r0 * c0 / n;
  stat += (n11 - e11) * (n11 - e11) / e11;
  stat += (n10 - e10) * (n10 - e10) / e10;
  stat += (n01 - e01) * (n01 - e01) / e01;
  stat += (n00 - e00) * (n00 - e00) / e00;
  // 0.1% critical value of chi-square with one degree of freedom.
  CHECK(stat < 10.828);
}

TEST_CASE("proxy csv dump") {
  auto data = std::make_shared<Dataset>(
      generate_design(design_by_name("discrete-bernoulli"), 50, 20, 51));
  EstimatorConfig ecfg;
  QuantileMap map = build_quantile_map(data, ecfg);
  ProxyDataset p = make_proxies(*data, map, config(0.9, 0.0, 5));
  const std::string path = "proxy_dump_test.csv";
  write_proxies_csv(p, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "y_g,delta_g,v0,v1");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == p.n());
  std::remove(path.c_str());
}

TEST_CASE("proxy config validation") {
  CHECK_THROWS_AS(config(1.2, 0.0).validate(), ConfigError);
  CHECK_THROWS_AS(config(0.9, 0.95).validate(), ConfigError);
  CHECK_NOTHROW(config(0.9, 0.9).validate());
}
