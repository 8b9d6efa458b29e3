#include "ivph/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <thread>

#include "ivph/errors.hpp"
#include "ivph/mathutil.hpp"
#include "ivph/rng.hpp"

namespace ivph {

double SimDesign::censoring_rate(int percent) const {
  if (percent == 20) return lambda_20;
  if (percent == 40) return lambda_40;
  throw ConfigError("censoring level must be 20 or 40, got " + std::to_string(percent));
}

SimDesign design_by_name(const std::string& name) {
  SimDesign d;
  d.name = name;
  if (name == "continuous-beta") {
    d.x_law = CovariateLaw::beta_2_5;
    d.z_intercept = 0.45;
    d.z_x_coef = 1.0;
    d.beta_z = 0.7;
    d.beta_x = 0.3;
    d.lambda_20 = 0.33;
    d.lambda_40 = 0.87;
  } else if (name == "continuous-uniform") {
    d.x_law = CovariateLaw::uniform_half;
    d.z_intercept = 0.8;
    d.z_x_coef = 1.0;
    d.beta_z = 0.7;
    d.beta_x = 0.3;
    d.lambda_20 = 0.30;
    d.lambda_40 = 0.82;
  } else if (name == "discrete-bernoulli") {
    d.x_law = CovariateLaw::bernoulli_half;
    d.z_intercept = 0.65;
    d.z_x_coef = 0.3;
    d.beta_z = 0.7;
    d.beta_x = 0.7;
    d.lambda_20 = 0.43;
    d.lambda_40 = 1.15;
  } else if (name == "exogenous-bernoulli") {
    // Full compliance (Z = W): both estimators target the same limit.
    d.x_law = CovariateLaw::bernoulli_half;
    d.beta_z = 0.7;
    d.beta_x = 0.7;
    d.lambda_20 = 0.43;
    d.lambda_40 = 1.15;
    d.full_compliance = true;
  } else {
    throw ConfigError("unknown design: " + name);
  }
  return d;
}

namespace {

double draw_covariate(CovariateLaw law, SplitRng& rng) {
  switch (law) {
    case CovariateLaw::bernoulli_half:
      return static_cast<double>(rng.bernoulli(0.5));
    case CovariateLaw::uniform_half:
      return rng.uniform() - 0.5;
    case CovariateLaw::beta_2_5: {
      // Beta(2,5) as the 2nd order statistic of 6 uniforms.
      double lo1 = 2.0, lo2 = 2.0;
      for (int k = 0; k < 6; ++k) {
        double u = rng.uniform();
        if (u < lo1) {
          lo2 = lo1;
          lo1 = u;
        } else if (u < lo2) {
          lo2 = u;
        }
      }
      return lo2;
    }
  }
  return 0.0;
}

}  // namespace

Dataset generate_design(const SimDesign& design, std::size_t n, int censoring_percent,
                        std::uint64_t seed) {
  const double lambda = design.censoring_rate(censoring_percent);
  Dataset d;
  d.z_codebook = {{0}, {1}};
  d.z_labels = {"0", "1"};
  d.w_labels = {"0", "1"};
  d.obs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    SplitRng rng(seed, 0x51f7u, static_cast<std::uint64_t>(i));
    const int w = rng.bernoulli(0.5);
    const double x = draw_covariate(design.x_law, rng);
    const double u = rng.uniform();  // common rank across potential outcomes
    const double eps = rng.normal();
    int z;
    if (design.full_compliance) {
      z = w;
    } else {
      z = (w == 1 && 0.5 * u - w + design.z_intercept + design.z_x_coef * x + 0.5 * eps >= 0.0)
              ? 1
              : 0;
    }
    const double rate = std::exp(design.beta_z * z + design.beta_x * x);
    const double t = -std::log(1.0 - u) / rate;
    const double c = rng.exponential(lambda);
    d.obs[i] = Observation{std::min(t, c), t <= c ? 1 : 0, z, x, w};
  }
  return d;
}

double rmse(const std::vector<std::vector<double>>& estimates, const std::vector<double>& beta0) {
  if (estimates.empty()) throw ConfigError("rmse of empty estimate list");
  double acc = 0.0;
  for (const auto& est : estimates) {
    for (std::size_t c = 0; c < beta0.size(); ++c) {
      const double e = est[c] - beta0[c];
      acc += e * e;
    }
  }
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

namespace {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = std::min<int>(threads, static_cast<int>(count));
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

SimMetrics summarize(const std::vector<std::vector<double>>& estimates,
                     const std::vector<double>& beta0) {
  const std::size_t d = beta0.size();
  const std::size_t N = estimates.size();
  SimMetrics m;
  m.bias.assign(d, 0.0);
  m.sd.assign(d, 0.0);
  m.mse.assign(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double> errs(N);
    for (std::size_t j = 0; j < N; ++j) errs[j] = estimates[j][c] - beta0[c];
    m.bias[c] = mean(errs);
    m.sd[c] = sample_sd(errs);
    double s2 = 0.0;
    for (double e : errs) s2 += e * e;
    m.mse[c] = s2 / static_cast<double>(N);
  }
  m.sd_defined = N >= 2;
  m.rmse = rmse(estimates, beta0);
  return m;
}

}  // namespace

SimReport run_monte_carlo(const SimDesign& design, std::size_t n, int censoring_percent, int reps,
                          const MonteCarloOptions& opts) {
  if (reps < 1) throw ConfigError("need at least one replication");
  const std::vector<double> beta0 = design.beta0();
  const std::size_t d = beta0.size();

  struct RepOut {
    bool ok = false;
    bool boot_ok = false;
    std::vector<double> prop, naive, boot;
  };
  std::vector<RepOut> rep_out(static_cast<std::size_t>(reps));

  parallel_for(static_cast<std::size_t>(reps), opts.threads, [&](std::size_t r) {
    RepOut& out = rep_out[r];
    try {
      const std::uint64_t rep_seed = detail::derive_seed(opts.seed, 0xda7aU, r);
      auto data = std::make_shared<Dataset>(
          generate_design(design, n, censoring_percent, rep_seed));
      if (opts.run_proposed) {
        EstimateResult res = estimate_proposed(data, opts.estimator,
                                               detail::derive_seed(rep_seed, 0x9cU));
        out.prop = res.fit.beta;
        if (opts.coverage) {
          // A failed bootstrap resample is dropped from the warp-speed pool
          // like any failed resample; it does not void the replication.
          try {
            SplitRng idx_rng(rep_seed, 0xb007u);
            std::vector<std::size_t> rows(n);
            for (std::size_t i = 0; i < n; ++i) rows[i] = idx_rng.index(n);
            auto resampled = std::make_shared<Dataset>(data->subset(rows));
            EstimateResult bres = estimate_proposed(resampled, opts.estimator,
                                                    detail::derive_seed(rep_seed, 0xb9U));
            out.boot = bres.fit.beta;
            out.boot_ok = true;
          } catch (const Error&) {
            out.boot_ok = false;
          }
        }
      }
      if (opts.run_naive) out.naive = naive_cox(*data, opts.estimator.cox).beta;
      out.ok = true;
    } catch (const Error&) {
      out.ok = false;
    }
  });

  std::vector<std::vector<double>> prop, naive;
  std::vector<std::vector<double>> boot_pairs_prop, boot_pairs_boot;
  int failed = 0, boot_failed = 0;
  for (const RepOut& out : rep_out) {
    if (!out.ok) {
      ++failed;
      continue;
    }
    if (opts.run_proposed) prop.push_back(out.prop);
    if (opts.run_naive) naive.push_back(out.naive);
    if (opts.coverage) {
      if (out.boot_ok) {
        boot_pairs_prop.push_back(out.prop);
        boot_pairs_boot.push_back(out.boot);
      } else {
        ++boot_failed;
      }
    }
  }
  if (failed > opts.failure_budget * reps)
    throw FailureBudgetError(std::to_string(failed) + " of " + std::to_string(reps) +
                             " replications failed");
  if (opts.coverage && boot_failed > opts.failure_budget * reps)
    throw FailureBudgetError(std::to_string(boot_failed) + " of " + std::to_string(reps) +
                             " warp-speed resamples failed");
  const int used = reps - failed;

  SimReport report;
  report.design = design.name;
  report.censoring = censoring_percent;
  report.n = n;
  report.reps_requested = reps;
  report.reps_used = used;
  report.failed = failed;
  report.components = {"z", "x"};
  if (opts.run_proposed && !prop.empty()) report.proposed = summarize(prop, beta0);
  if (opts.run_naive && !naive.empty()) report.naive = summarize(naive, beta0);

  if (opts.coverage && boot_pairs_boot.size() >= 2 && !prop.empty()) {
    // Warp-speed: pooled sd of (beta* - beta-hat) across replications, then
    // a normal interval around each replication's estimate.
    const double z = normal_quantile(0.5 + opts.level / 2.0);
    report.has_cp95 = true;
    report.proposed.cp95.assign(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
      std::vector<double> diffs(boot_pairs_boot.size());
      for (std::size_t j = 0; j < diffs.size(); ++j)
        diffs[j] = boot_pairs_boot[j][c] - boot_pairs_prop[j][c];
      const double sd_ws = sample_sd(diffs);
      double cover = 0.0;
      for (std::size_t j = 0; j < prop.size(); ++j)
        if (std::fabs(prop[j][c] - beta0[c]) <= z * sd_ws) cover += 1.0;
      report.proposed.cp95[c] = cover / static_cast<double>(prop.size());
    }
  }
  return report;
}

}  // namespace ivph
