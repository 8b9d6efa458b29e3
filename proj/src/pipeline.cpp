#include "ivph/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "ivph/errors.hpp"
#include "ivph/mathutil.hpp"

namespace ivph {

void EstimatorConfig::validate() const {
  if (!(u_bar > 0.0 && u_bar < 1.0)) throw ConfigError("u_bar must lie in (0,1)");
  if (tau < 0.0 || tau > u_bar) throw ConfigError("tau must lie in [0, u_bar]");
  if (epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
  if (grid_size < 2) throw ConfigError("grid_size must be >= 2");
  if (restarts < 1) throw ConfigError("restarts must be >= 1");
  if (proxy_replicates < 1) throw ConfigError("proxy.replicates must be >= 1");
  if (max_drop_fraction < 0.0 || max_drop_fraction > 1.0)
    throw ConfigError("saturation drop budget must lie in [0,1]");
  KernelSpec::from_name(kernel_family);
  KernelSpec::from_name(kernel_tilde_family);
}

QuantileMap build_quantile_map(std::shared_ptr<const Dataset> data, const EstimatorConfig& cfg) {
  cfg.validate();
  BundleFactory::Options fopts;
  fopts.kernel = KernelSpec::from_name(cfg.kernel_family);
  fopts.kernel_tilde = KernelSpec::from_name(cfg.kernel_tilde_family);
  fopts.plan = cfg.bandwidth;
  fopts.epsilon = cfg.epsilon;
  fopts.u_bar = cfg.u_bar;
  fopts.t_bar = cfg.t_bar;
  BundleFactory factory(std::move(data), std::move(fopts));

  QuantileMap::Options mopts;
  mopts.grid_size = cfg.grid_size;
  mopts.mode = cfg.solver_mode;
  mopts.restarts = cfg.restarts;
  mopts.triangular_tol = cfg.triangular_tol;
  return QuantileMap(std::move(factory), mopts);
}

EstimateResult estimate_with_map(const Dataset& data, const QuantileMap& map,
                                 const EstimatorConfig& cfg, std::uint64_t proxy_seed) {
  ProxyConfig pcfg;
  pcfg.u_bar = cfg.u_bar;
  pcfg.tau = cfg.tau;
  pcfg.on_saturation = cfg.on_saturation;
  pcfg.max_drop_fraction = cfg.max_drop_fraction;

  EstimateResult out;
  out.audit.solver_mode = map.effective_mode();
  out.audit.triangular_found = map.effective_mode() == SolverMode::triangular;
  out.audit.t_bar = map.t_bar();

  const std::size_t d = static_cast<std::size_t>(data.d_v());
  std::vector<double> beta_sum(d, 0.0);
  CoxFit last_fit;
  for (int rep = 0; rep < cfg.proxy_replicates; ++rep) {
    pcfg.seed = proxy_seed + static_cast<std::uint64_t>(rep) * 0x9e3779b97f4a7c15ULL;
    ProxyDataset proxies = make_proxies(data, map, pcfg);
    out.audit.dropped_saturated += proxies.dropped_saturated;
    out.audit.proxy_rows += proxies.n();
    last_fit = fit_cox(proxies, std::vector<double>(d, 0.0), cfg.cox);
    for (std::size_t a = 0; a < d; ++a) beta_sum[a] += last_fit.beta[a];
  }
  out.fit = last_fit;
  if (cfg.proxy_replicates > 1) {
    for (std::size_t a = 0; a < d; ++a)
      out.fit.beta[a] = beta_sum[a] / static_cast<double>(cfg.proxy_replicates);
  }

  std::vector<double> xs;
  xs.reserve(data.n());
  for (const Observation& o : data.obs) xs.push_back(o.x);
  out.audit.bandwidths = map.factory().resolved_bandwidths(quantile(std::move(xs), 0.5));
  out.audit.rank_warning = map.any_rank_warning();
  return out;
}

EstimateResult estimate_proposed(std::shared_ptr<const Dataset> data, const EstimatorConfig& cfg,
                                 std::uint64_t proxy_seed) {
  QuantileMap map = build_quantile_map(data, cfg);
  return estimate_with_map(*data, map, cfg, proxy_seed);
}

}  // namespace ivph
