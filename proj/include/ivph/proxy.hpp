#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ivph/data.hpp"
#include "ivph/phi_solver.hpp"
#include "ivph/rng.hpp"

namespace ivph {

//! How rows whose phi query saturates are handled.
enum class SaturationPolicy { drop_with_count, error };

struct ProxyConfig {
  double u_bar = 0.9;
  //! Width of the generated-censoring support [u_bar - tau, u_bar];
  //! tau = 0 is a point mass at u_bar.
  double tau = 0.0;
  std::uint64_t seed = 1;
  SaturationPolicy on_saturation = SaturationPolicy::drop_with_count;
  //! Maximum tolerated dropped fraction before SaturationBudgetError.
  double max_drop_fraction = 0.05;

  void validate() const;
};

struct UTildeDraw {
  double u_tilde = 0.0;
  int delta = 0;  // 1 iff U_g <= U_g^c
};

//! Map raw uniform draws to (U-tilde, Delta); the deterministic core of
//! draw_u_tilde.
UTildeDraw u_tilde_from_uniforms(const ProxyConfig& cfg, double u_g_raw, double u_c_raw);

//! Draw (U-tilde, Delta): U_g uniform on (0,1), U_g^c uniform on
//! [u_bar - tau, u_bar] (point mass at u_bar when tau = 0).
UTildeDraw draw_u_tilde(const ProxyConfig& cfg, SplitRng& rng);

//! Joint law of the generated pair: P(U-tilde <= u) and
//! P(U-tilde <= u, Delta = 1), piecewise closed form.
std::pair<double, double> u_tilde_cdf(double u, const ProxyConfig& cfg);

//! Censored observations on which treatment is exogenous by construction:
//! durations phi(V, U-tilde), indicator Delta, design vector V = (z dummies, x).
struct ProxyDataset {
  std::vector<double> y;
  std::vector<int> delta;
  std::vector<std::vector<double>> v;  // n rows of length d_v
  std::uint64_t seed = 0;
  std::size_t source_rows = 0;
  std::size_t dropped_saturated = 0;

  std::size_t n() const { return y.size(); }
  std::size_t d_v() const { return v.empty() ? 0 : v[0].size(); }
};

//! One proxy row per input row, drawn with a per-row RNG stream keyed by
//! (seed, row), so generation order does not matter. Saturated rows are
//! dropped and counted (or raise, per policy); exceeding the drop budget
//! raises SaturationBudgetError.
ProxyDataset make_proxies(const Dataset& data, const QuantileMap& map, const ProxyConfig& cfg);

//! Same mapping with caller-supplied (U-tilde, Delta) pairs, one per row.
ProxyDataset make_proxies_from_draws(const Dataset& data, const QuantileMap& map,
                                     const ProxyConfig& cfg, const std::vector<UTildeDraw>& draws);

void write_proxies_csv(const ProxyDataset& p, const std::string& path);

}  // namespace ivph
