#include "ivph/proxy.hpp"

#include <cmath>
#include <fstream>

#include "ivph/errors.hpp"

namespace ivph {

void ProxyConfig::validate() const {
  if (!(u_bar > 0.0 && u_bar < 1.0)) throw ConfigError("u_bar must lie in (0,1)");
  if (tau < 0.0 || tau > u_bar) throw ConfigError("tau must lie in [0, u_bar]");
  if (max_drop_fraction < 0.0 || max_drop_fraction > 1.0)
    throw ConfigError("saturation drop budget must lie in [0,1]");
}

UTildeDraw u_tilde_from_uniforms(const ProxyConfig& cfg, double u_g_raw, double u_c_raw) {
  const double u_g = u_g_raw;
  const double u_c = cfg.tau > 0.0 ? cfg.u_bar - cfg.tau + cfg.tau * u_c_raw : cfg.u_bar;
  UTildeDraw d;
  d.delta = u_g <= u_c ? 1 : 0;
  d.u_tilde = std::min(u_g, u_c);
  return d;
}

UTildeDraw draw_u_tilde(const ProxyConfig& cfg, SplitRng& rng) {
  const double u_g = rng.uniform();
  const double u_c = cfg.tau > 0.0 ? rng.uniform() : 0.0;
  return u_tilde_from_uniforms(cfg, u_g, u_c);
}

std::pair<double, double> u_tilde_cdf(double u, const ProxyConfig& cfg) {
  const double ub = cfg.u_bar, tau = cfg.tau;
  if (u < 0.0) return {0.0, 0.0};
  if (tau == 0.0) {
    // Degenerate censoring at u_bar: an atom of size 1 - u_bar sits there.
    if (u < ub) return {u, u};
    return {1.0, ub};
  }
  if (u < ub - tau) return {u, u};
  if (u < ub) {
    // Factored forms of the piecewise-quadratic branch; algebraically equal
    // to the expanded polynomials but free of their cancellation.
    const double joint = 1.0 - (1.0 - u) * (ub - u) / tau;
    const double sub = (ub * ub - (ub - u) * (ub - u) - (ub - tau) * (ub - tau)) / (2.0 * tau);
    return {joint, sub};
  }
  return {1.0, (ub * ub - (ub - tau) * (ub - tau)) / (2.0 * tau)};
}

namespace {

ProxyDataset build_proxies(const Dataset& data, const QuantileMap& map, const ProxyConfig& cfg,
                           const std::vector<UTildeDraw>& draws) {
  const std::size_t n = data.n();
  ProxyDataset out;
  out.seed = cfg.seed;
  out.source_rows = n;
  out.y.reserve(n);
  out.delta.reserve(n);
  out.v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Observation& o = data.obs[i];
    PhiResult phi = map.phi_hat(o.z_index, o.x, draws[i].u_tilde);
    if (phi.saturated) {
      if (cfg.on_saturation == SaturationPolicy::error)
        throw SaturatedError(o.z_index, "saturated phi query for row " + std::to_string(i));
      out.dropped_saturated++;
      continue;
    }
    out.y.push_back(phi.value);
    out.delta.push_back(draws[i].delta);
    out.v.push_back(data.v_row(i));
  }
  if (n > 0 &&
      static_cast<double>(out.dropped_saturated) > cfg.max_drop_fraction * static_cast<double>(n))
    throw SaturationBudgetError("dropped " + std::to_string(out.dropped_saturated) + " of " +
                                std::to_string(n) + " rows to saturation (budget " +
                                std::to_string(cfg.max_drop_fraction) + ")");
  return out;
}

}  // namespace

ProxyDataset make_proxies(const Dataset& data, const QuantileMap& map, const ProxyConfig& cfg) {
  cfg.validate();
  std::vector<UTildeDraw> draws(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    SplitRng rng(cfg.seed, 0x9d2cu, static_cast<std::uint64_t>(i));
    draws[i] = draw_u_tilde(cfg, rng);
  }
  return build_proxies(data, map, cfg, draws);
}

ProxyDataset make_proxies_from_draws(const Dataset& data, const QuantileMap& map,
                                     const ProxyConfig& cfg,
                                     const std::vector<UTildeDraw>& draws) {
  cfg.validate();
  if (draws.size() != data.n()) throw ConfigError("one (U-tilde, Delta) draw per row required");
  return build_proxies(data, map, cfg, draws);
}

void write_proxies_csv(const ProxyDataset& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::data, "cannot open " + path + " for writing");
  out << "y_g,delta_g";
  for (std::size_t j = 0; j < p.d_v(); ++j) out << ",v" << j;
  out << "\n";
  out.precision(17);
  for (std::size_t i = 0; i < p.n(); ++i) {
    out << p.y[i] << "," << p.delta[i];
    for (double vj : p.v[i]) out << "," << vj;
    out << "\n";
  }
}

}  // namespace ivph
