#pragma once

#include <vector>

#include "ivph/data.hpp"
#include "ivph/proxy.hpp"

namespace ivph {

struct CoxFit {
  std::vector<double> beta;
  double score_norm = 0.0;                    // ||score||_inf at beta
  std::vector<double> observed_information;   // d x d, row-major, at beta
  int iterations = 0;
  bool converged = false;
  std::size_t n_events = 0;
};

struct CoxOptions {
  double score_tol = 1e-8;
  double loglik_tol = 1e-12;
  int max_iter = 100;
};

//! Normalized Cox log partial likelihood with Breslow tie handling:
//! (1/n) sum_{events} [ eta_i - log( (1/n) sum_{y_j >= y_i} exp(eta_j) ) ].
//! Throws NoEventsError.
double log_partial_likelihood(const ProxyDataset& data, const std::vector<double>& beta);

//! Gradient of log_partial_likelihood; zero at the fitted beta.
std::vector<double> cox_score(const ProxyDataset& data, const std::vector<double>& beta);

//! Newton-Raphson with step-halving. Throws CollinearError (singular
//! information), NoEventsError, NoConvergenceError.
CoxFit fit_cox(const ProxyDataset& data, const std::vector<double>& init, const CoxOptions& opts = {});

//! The comparison estimator: partial likelihood on the raw observables
//! (Y, delta, (z dummies, x)) ignoring endogeneity.
CoxFit naive_cox(const Dataset& data, const CoxOptions& opts = {});

//! View of a raw dataset as proxy-shaped rows (used by naive_cox and tests).
ProxyDataset as_proxy_rows(const Dataset& data);

}  // namespace ivph
