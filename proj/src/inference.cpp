#include "ivph/inference.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <thread>

#include "ivph/errors.hpp"
#include "ivph/mathutil.hpp"
#include "ivph/rng.hpp"

namespace ivph {

std::vector<double> run_pipeline_on_resample(const Dataset& data,
                                             const std::vector<std::size_t>& rows,
                                             const EstimatorConfig& cfg,
                                             std::uint64_t resample_seed) {
  auto resampled = std::make_shared<Dataset>(data.subset(rows));
  return estimate_proposed(resampled, cfg, resample_seed).fit.beta;
}

BootstrapSd bootstrap_sd(const Dataset& data, const EstimatorConfig& cfg,
                         const BootstrapOptions& opts) {
  if (opts.resamples < 2) throw ConfigError("bootstrap needs at least 2 resamples");
  const std::size_t n = data.n();
  const std::size_t d = static_cast<std::size_t>(data.d_v());

  struct Draw {
    bool ok = false;
    std::vector<double> beta;
  };
  std::vector<Draw> draws(static_cast<std::size_t>(opts.resamples));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= draws.size()) return;
      try {
        SplitRng idx_rng(opts.seed, 0xb5b5u, b);
        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = idx_rng.index(n);
        draws[b].beta =
            run_pipeline_on_resample(data, rows, cfg, detail::derive_seed(opts.seed, 0x6bU, b));
        draws[b].ok = true;
      } catch (const Error&) {
        draws[b].ok = false;
      }
    }
  };
  if (opts.threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < opts.threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  BootstrapSd out;
  std::vector<std::vector<double>> per_comp(d);
  for (const Draw& dr : draws) {
    if (!dr.ok) {
      out.failed++;
      continue;
    }
    for (std::size_t c = 0; c < d; ++c) per_comp[c].push_back(dr.beta[c]);
  }
  out.used = opts.resamples - out.failed;
  if (out.failed > opts.failure_budget * opts.resamples)
    throw FailureBudgetError(std::to_string(out.failed) + " of " +
                             std::to_string(opts.resamples) + " bootstrap resamples failed");
  if (out.used < 2) throw FailureBudgetError("fewer than 2 usable bootstrap resamples");
  out.sd.resize(d);
  for (std::size_t c = 0; c < d; ++c) out.sd[c] = sample_sd(per_comp[c]);
  return out;
}

CiReport normal_ci(const std::vector<double>& beta_hat, const std::vector<double>& sd,
                   double level) {
  if (beta_hat.size() != sd.size()) throw ConfigError("beta and sd length mismatch");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must lie in (0,1)");
  for (double s : sd)
    if (!(s > 0.0)) throw DegenerateSdError("standard deviation must be strictly positive");
  const double z = normal_quantile(0.5 + level / 2.0);
  CiReport r;
  r.beta_hat = beta_hat;
  r.sd = sd;
  r.level = level;
  r.lower.resize(beta_hat.size());
  r.upper.resize(beta_hat.size());
  for (std::size_t c = 0; c < beta_hat.size(); ++c) {
    r.lower[c] = beta_hat[c] - z * sd[c];
    r.upper[c] = beta_hat[c] + z * sd[c];
  }
  return r;
}

std::vector<double> warp_speed_coverage(const SimDesign& design, std::size_t n,
                                        int censoring_percent, int reps, double level,
                                        std::uint64_t seed, const EstimatorConfig& estimator,
                                        int threads) {
  if (reps < 50) throw ConfigError("warp-speed coverage needs at least 50 replications");
  MonteCarloOptions opts;
  opts.seed = seed;
  opts.threads = threads;
  opts.run_naive = false;
  opts.coverage = true;
  opts.level = level;
  opts.estimator = estimator;
  SimReport report = run_monte_carlo(design, n, censoring_percent, reps, opts);
  return report.proposed.cp95;
}

}  // namespace ivph
