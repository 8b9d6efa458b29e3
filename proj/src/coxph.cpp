#include "ivph/coxph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ivph/errors.hpp"
#include "ivph/mathutil.hpp"

namespace ivph {

namespace {

struct CoxWork {
  double loglik = 0.0;
  std::vector<double> score;  // d
  std::vector<double> info;   // d x d row-major
};

// One pass over the risk sets, largest duration first; ties share the risk
// set (Breslow). Everything is normalized by 1/n so the score is O(1).
CoxWork cox_pass(const ProxyDataset& data, const std::vector<double>& beta,
                 const std::vector<std::size_t>& order_desc, bool with_derivatives) {
  const std::size_t n = data.n();
  const std::size_t d = data.d_v();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<double> eta(n);
  double eta_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double e = 0.0;
    for (std::size_t j = 0; j < d; ++j) e += data.v[i][j] * beta[j];
    eta[i] = e;
    eta_max = std::max(eta_max, e);
  }

  CoxWork w;
  w.score.assign(d, 0.0);
  w.info.assign(d * d, 0.0);
  double s0 = 0.0;
  std::vector<double> s1(d, 0.0);
  std::vector<double> s2(d * d, 0.0);

  std::size_t pos = 0;
  while (pos < n) {
    const double t = data.y[order_desc[pos]];
    // Everybody tied at t enters the risk set before events at t are scored.
    std::size_t group_end = pos;
    while (group_end < n && data.y[order_desc[group_end]] == t) {
      const std::size_t i = order_desc[group_end];
      const double r = std::exp(eta[i] - eta_max);
      s0 += r;
      for (std::size_t a = 0; a < d; ++a) {
        s1[a] += r * data.v[i][a];
        if (with_derivatives)
          for (std::size_t b = 0; b < d; ++b) s2[a * d + b] += r * data.v[i][a] * data.v[i][b];
      }
      ++group_end;
    }
    const double log_s0 = std::log(s0) + eta_max;
    for (std::size_t g = pos; g < group_end; ++g) {
      const std::size_t i = order_desc[g];
      if (data.delta[i] != 1) continue;
      w.loglik += eta[i] - (log_s0 - std::log(static_cast<double>(n)));
      for (std::size_t a = 0; a < d; ++a) {
        const double m1 = s1[a] / s0;
        w.score[a] += data.v[i][a] - m1;
        if (with_derivatives)
          for (std::size_t b = 0; b < d; ++b)
            w.info[a * d + b] += s2[a * d + b] / s0 - m1 * (s1[b] / s0);
      }
    }
    pos = group_end;
  }
  w.loglik *= inv_n;
  for (double& v : w.score) v *= inv_n;
  for (double& v : w.info) v *= inv_n;
  return w;
}

std::vector<std::size_t> descending_order(const ProxyDataset& data) {
  std::vector<std::size_t> order(data.n());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return data.y[a] > data.y[b]; });
  return order;
}

std::size_t count_events(const ProxyDataset& data) {
  std::size_t e = 0;
  for (int di : data.delta) e += static_cast<std::size_t>(di == 1);
  return e;
}

}  // namespace

double log_partial_likelihood(const ProxyDataset& data, const std::vector<double>& beta) {
  if (count_events(data) == 0) throw NoEventsError("no events in dataset");
  return cox_pass(data, beta, descending_order(data), false).loglik;
}

std::vector<double> cox_score(const ProxyDataset& data, const std::vector<double>& beta) {
  if (count_events(data) == 0) throw NoEventsError("no events in dataset");
  return cox_pass(data, beta, descending_order(data), false).score;
}

CoxFit fit_cox(const ProxyDataset& data, const std::vector<double>& init, const CoxOptions& opts) {
  const std::size_t d = data.d_v();
  const std::size_t n_events = count_events(data);
  if (n_events == 0) throw NoEventsError("no events in dataset");

  std::vector<double> beta(init);
  beta.resize(d, 0.0);
  const std::vector<std::size_t> order = descending_order(data);

  CoxWork cur = cox_pass(data, beta, order, true);
  {
    // A singular information matrix at the start means a collinear design
    // even when the score happens to vanish there.
    std::vector<double> probe;
    if (!cholesky_solve(cur.info, std::vector<double>(d, 0.0), d, probe, 1e-12))
      throw CollinearError("observed information is singular: collinear design");
  }
  CoxFit fit;
  fit.n_events = n_events;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    double gnorm = 0.0;
    for (double g : cur.score) gnorm = std::max(gnorm, std::fabs(g));
    if (gnorm <= opts.score_tol) {
      fit.converged = true;
      break;
    }
    std::vector<double> step;
    if (!cholesky_solve(cur.info, cur.score, d, step, 1e-12)) {
      if (iter == 0) throw CollinearError("observed information is singular: collinear design");
      throw CollinearError("observed information became singular at iteration " +
                           std::to_string(iter));
    }
    double t = 1.0;
    bool improved = false;
    CoxWork next;
    for (int half = 0; half < 40; ++half) {
      std::vector<double> trial(beta);
      for (std::size_t a = 0; a < d; ++a) trial[a] += t * step[a];
      next = cox_pass(data, trial, order, true);
      if (std::isfinite(next.loglik) && next.loglik >= cur.loglik - 1e-14) {
        beta = std::move(trial);
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;  // flat to line-search resolution
    const double rel_change = std::fabs(next.loglik - cur.loglik) / (1.0 + std::fabs(cur.loglik));
    cur = std::move(next);
    if (rel_change <= opts.loglik_tol) {
      fit.converged = true;
      ++iter;
      break;
    }
  }

  double gnorm = 0.0;
  for (double g : cur.score) gnorm = std::max(gnorm, std::fabs(g));
  if (gnorm <= opts.score_tol) fit.converged = true;
  if (!fit.converged)
    throw NoConvergenceError("partial likelihood did not converge in " +
                             std::to_string(opts.max_iter) + " iterations (score norm " +
                             std::to_string(gnorm) + ")");
  fit.beta = beta;
  fit.score_norm = gnorm;
  fit.observed_information = cur.info;
  fit.iterations = iter;
  return fit;
}

ProxyDataset as_proxy_rows(const Dataset& data) {
  ProxyDataset p;
  p.source_rows = data.n();
  p.y.reserve(data.n());
  p.delta.reserve(data.n());
  p.v.reserve(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    p.y.push_back(data.obs[i].y);
    p.delta.push_back(data.obs[i].delta);
    p.v.push_back(data.v_row(i));
  }
  return p;
}

CoxFit naive_cox(const Dataset& data, const CoxOptions& opts) {
  return fit_cox(as_proxy_rows(data), std::vector<double>(static_cast<std::size_t>(data.d_v()), 0.0),
                 opts);
}

}  // namespace ivph
