#include "ivph/phi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "ivph/errors.hpp"
#include "ivph/mathutil.hpp"
#include "ivph/rng.hpp"

namespace ivph {

double CellCdfBundle::row_mass(int k) const {
  double m = 0.0;
  for (int l = 0; l < levels; ++l) m += at(l, k).total_mass();
  return m;
}

std::vector<double> eval_A(const std::vector<double>& theta, const CellCdfBundle& bundle,
                           double u) {
  const int L = bundle.levels;
  std::vector<double> a(static_cast<std::size_t>(L), -u);
  for (int k = 0; k < L; ++k)
    for (int l = 0; l < L; ++l) a[static_cast<std::size_t>(k)] += bundle.at(l, k)(theta[static_cast<std::size_t>(l)]);
  return a;
}

LevelPermutations identity_permutations(int levels) {
  LevelPermutations p;
  p.z_order.resize(static_cast<std::size_t>(levels));
  p.w_order.resize(static_cast<std::size_t>(levels));
  std::iota(p.z_order.begin(), p.z_order.end(), 0);
  std::iota(p.w_order.begin(), p.w_order.end(), 0);
  return p;
}

std::optional<LevelPermutations> detect_triangular(const Dataset& data, double tol) {
  const int L = data.n_levels();
  if (L > 6) return std::nullopt;
  auto counts = data.cell_counts();
  std::vector<double> w_total(static_cast<std::size_t>(L), 0.0);
  for (int w = 0; w < L; ++w)
    for (int z = 0; z < L; ++z) w_total[static_cast<std::size_t>(w)] += static_cast<double>(counts[static_cast<std::size_t>(z)][static_cast<std::size_t>(w)]);

  auto cond_prob = [&](int z, int w) {
    double tot = w_total[static_cast<std::size_t>(w)];
    if (tot == 0.0) return 0.0;
    return static_cast<double>(counts[static_cast<std::size_t>(z)][static_cast<std::size_t>(w)]) / tot;
  };

  std::vector<int> zp(static_cast<std::size_t>(L));
  std::iota(zp.begin(), zp.end(), 0);
  do {
    std::vector<int> wp(static_cast<std::size_t>(L));
    std::iota(wp.begin(), wp.end(), 0);
    do {
      bool ok = true;
      for (int k = 0; ok && k < L; ++k)
        for (int l = k + 1; ok && l < L; ++l)
          if (cond_prob(zp[static_cast<std::size_t>(l)], wp[static_cast<std::size_t>(k)]) > tol) ok = false;
      if (ok) return LevelPermutations{zp, wp};
    } while (std::next_permutation(wp.begin(), wp.end()));
  } while (std::next_permutation(zp.begin(), zp.end()));
  return std::nullopt;
}

std::size_t solve_triangular_prefix(const CellCdfBundle& bundle, double u,
                                    const LevelPermutations& perm, std::vector<double>& theta) {
  const int L = bundle.levels;
  theta.assign(static_cast<std::size_t>(L), 0.0);
  for (int pos = 0; pos < L; ++pos) {
    const int zk = perm.z_order[static_cast<std::size_t>(pos)];
    const int wk = perm.w_order[static_cast<std::size_t>(pos)];
    double target = u;
    for (int prev = 0; prev < pos; ++prev) {
      const int zl = perm.z_order[static_cast<std::size_t>(prev)];
      target -= bundle.at(zl, wk)(theta[static_cast<std::size_t>(zl)]);
    }
    InvertResult inv = bundle.at(zk, wk).invert(target);
    if (inv.saturated) return static_cast<std::size_t>(pos);
    theta[static_cast<std::size_t>(zk)] = inv.t;
  }
  return static_cast<std::size_t>(L);
}

std::vector<double> solve_triangular(const CellCdfBundle& bundle, double u,
                                     const LevelPermutations& perm) {
  std::vector<double> theta;
  const std::size_t solved = solve_triangular_prefix(bundle, u, perm, theta);
  if (solved < static_cast<std::size_t>(bundle.levels)) {
    const int level = perm.z_order[solved];
    throw SaturatedError(level, "pseudo-inverse saturated at level " + std::to_string(level) +
                                    " (u=" + std::to_string(u) + ")");
  }
  return theta;
}

namespace {

double objective(const CellCdfBundle& bundle, const std::vector<double>& theta, double u) {
  double s = 0.0;
  for (double a : eval_A(theta, bundle, u)) s += a * a;
  return s;
}

// Exact cyclic coordinate minimization over jump-time candidates; only for
// step inputs. Ties in the objective break toward the smaller coordinate, so
// every plateau is represented by its infimum. Single-coordinate passes can
// stall in joint minima, so stalls escalate to exact pair sweeps.
bool coordinate_descent(const CellCdfBundle& bundle, double u,
                        const std::vector<std::vector<double>>& candidates,
                        std::vector<double>& theta) {
  const int L = bundle.levels;

  auto single_pass = [&]() {
    bool changed = false;
    for (int l = 0; l < L; ++l) {
      std::vector<double> partial(static_cast<std::size_t>(L), -u);
      for (int k = 0; k < L; ++k)
        for (int m = 0; m < L; ++m)
          if (m != l) partial[static_cast<std::size_t>(k)] += bundle.at(m, k)(theta[static_cast<std::size_t>(m)]);
      double best_t = theta[static_cast<std::size_t>(l)];
      double best_obj = 0.0;
      for (int k = 0; k < L; ++k) {
        const double a = partial[static_cast<std::size_t>(k)] + bundle.at(l, k)(best_t);
        best_obj += a * a;
      }
      for (double t : candidates[static_cast<std::size_t>(l)]) {
        double obj = 0.0;
        for (int k = 0; k < L; ++k) {
          const double a = partial[static_cast<std::size_t>(k)] + bundle.at(l, k)(t);
          obj += a * a;
        }
        if (obj < best_obj - 1e-15 || (obj <= best_obj + 1e-15 && t < best_t)) {
          best_obj = obj;
          best_t = t;
        }
      }
      if (best_t != theta[static_cast<std::size_t>(l)]) {
        theta[static_cast<std::size_t>(l)] = best_t;
        changed = true;
      }
    }
    return changed;
  };

  auto pair_pass = [&]() {
    bool changed = false;
    for (int l = 0; l < L; ++l) {
      for (int m = l + 1; m < L; ++m) {
        std::vector<double> partial(static_cast<std::size_t>(L), -u);
        for (int k = 0; k < L; ++k)
          for (int q = 0; q < L; ++q)
            if (q != l && q != m)
              partial[static_cast<std::size_t>(k)] += bundle.at(q, k)(theta[static_cast<std::size_t>(q)]);
        double best_tl = theta[static_cast<std::size_t>(l)], best_tm = theta[static_cast<std::size_t>(m)];
        double best_obj = 0.0;
        for (int k = 0; k < L; ++k) {
          const double a =
              partial[static_cast<std::size_t>(k)] + bundle.at(l, k)(best_tl) + bundle.at(m, k)(best_tm);
          best_obj += a * a;
        }
        for (double tl : candidates[static_cast<std::size_t>(l)]) {
          for (double tm : candidates[static_cast<std::size_t>(m)]) {
            double obj = 0.0;
            for (int k = 0; k < L; ++k) {
              const double a =
                  partial[static_cast<std::size_t>(k)] + bundle.at(l, k)(tl) + bundle.at(m, k)(tm);
              obj += a * a;
            }
            const bool better = obj < best_obj - 1e-15;
            const bool tie_lower = obj <= best_obj + 1e-15 &&
                                   (tl < best_tl || (tl == best_tl && tm < best_tm));
            if (better || tie_lower) {
              best_obj = obj;
              best_tl = tl;
              best_tm = tm;
            }
          }
        }
        if (best_tl != theta[static_cast<std::size_t>(l)] || best_tm != theta[static_cast<std::size_t>(m)]) {
          theta[static_cast<std::size_t>(l)] = best_tl;
          theta[static_cast<std::size_t>(m)] = best_tm;
          changed = true;
        }
      }
    }
    return changed;
  };

  for (int round = 0; round < 50; ++round) {
    int pass = 0;
    for (; pass < 200; ++pass)
      if (!single_pass()) break;
    if (pass == 200) return false;
    if (!pair_pass()) return true;
  }
  return false;
}

// Projected Gauss-Newton for smoothed (epsilon > 0) bundles. The Jacobian
// entry (k,l) is the sub-density of cell (l,k) at theta_l.
bool gauss_newton(const CellCdfBundle& bundle, double u, std::vector<double>& theta) {
  const int L = bundle.levels;
  const double tbar = bundle.t_bar;
  auto density = [&](int l, int k, double t) {
    const SmoothSubCdf& f = bundle.at(l, k);
    if (f.epsilon() <= 0.0) {  // fall back to a wide finite difference
      const double d = std::max(1e-4 * tbar, 1e-8);
      return (f(std::min(t + d, tbar)) - f(std::max(t - d, 0.0))) / (2.0 * d);
    }
    return f.density(t);
  };
  double obj = objective(bundle, theta, u);
  for (int it = 0; it < 200; ++it) {
    std::vector<double> a = eval_A(theta, bundle, u);
    std::vector<double> jac(static_cast<std::size_t>(L * L), 0.0);
    for (int k = 0; k < L; ++k)
      for (int l = 0; l < L; ++l)
        jac[static_cast<std::size_t>(k * L + l)] = density(l, k, theta[static_cast<std::size_t>(l)]);
    // Normal equations with Levenberg damping.
    std::vector<double> jtj(static_cast<std::size_t>(L * L), 0.0), jta(static_cast<std::size_t>(L), 0.0);
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) {
        double s = 0.0;
        for (int k = 0; k < L; ++k) s += jac[static_cast<std::size_t>(k * L + i)] * jac[static_cast<std::size_t>(k * L + j)];
        jtj[static_cast<std::size_t>(i * L + j)] = s;
      }
      double s = 0.0;
      for (int k = 0; k < L; ++k) s += jac[static_cast<std::size_t>(k * L + i)] * a[static_cast<std::size_t>(k)];
      jta[static_cast<std::size_t>(i)] = s;
    }
    double damp = 1e-10;
    for (int i = 0; i < L; ++i) damp = std::max(damp, 1e-8 * jtj[static_cast<std::size_t>(i * L + i)]);
    for (int i = 0; i < L; ++i) jtj[static_cast<std::size_t>(i * L + i)] += damp;
    std::vector<double> step;
    if (!cholesky_solve(jtj, jta, static_cast<std::size_t>(L), step)) return obj < 1e-16;
    // Backtracking on the squared residual, projecting onto [0, tbar]^L.
    double t_ls = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half) {
      std::vector<double> trial(theta);
      for (int l = 0; l < L; ++l)
        trial[static_cast<std::size_t>(l)] =
            std::clamp(trial[static_cast<std::size_t>(l)] - t_ls * step[static_cast<std::size_t>(l)], 0.0, tbar);
      double trial_obj = objective(bundle, trial, u);
      if (trial_obj < obj - 1e-16) {
        theta = std::move(trial);
        obj = trial_obj;
        improved = true;
        break;
      }
      t_ls *= 0.5;
    }
    if (!improved) return true;  // stationary within line-search resolution
    if (obj < 1e-20) return true;
  }
  return false;
}

}  // namespace

GeneralSolveResult solve_general(const CellCdfBundle& bundle, double u, int restarts,
                                 std::uint64_t seed, const std::vector<double>* warm_start) {
  if (restarts < 1) throw ConfigError("solve_general needs at least one restart");
  const int L = bundle.levels;
  const double tbar = bundle.t_bar;

  bool stepwise = true;
  for (const auto& c : bundle.cells)
    if (c.epsilon() > 0.0 && c.total_mass() > 0.0) stepwise = false;

  std::vector<std::vector<double>> candidates;
  if (stepwise) {
    candidates.resize(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
      std::vector<double>& cand = candidates[static_cast<std::size_t>(l)];
      cand.push_back(0.0);
      for (int k = 0; k < L; ++k)
        for (double t : bundle.at(l, k).base().jump_times)
          if (t <= tbar) cand.push_back(t);
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    }
  }

  // Latin hypercube starts plus the origin and the caller's warm start.
  std::vector<std::vector<double>> starts;
  if (warm_start != nullptr) starts.push_back(*warm_start);
  starts.push_back(std::vector<double>(static_cast<std::size_t>(L), 0.0));
  SplitRng rng(seed, 0x1b5u);
  std::vector<std::vector<int>> strata(static_cast<std::size_t>(L), std::vector<int>(static_cast<std::size_t>(restarts)));
  for (int l = 0; l < L; ++l) {
    std::iota(strata[static_cast<std::size_t>(l)].begin(), strata[static_cast<std::size_t>(l)].end(), 0);
    for (int r = restarts - 1; r > 0; --r) {
      int j = static_cast<int>(rng.index(static_cast<std::size_t>(r + 1)));
      std::swap(strata[static_cast<std::size_t>(l)][static_cast<std::size_t>(r)], strata[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)]);
    }
  }
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> s(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l)
      s[static_cast<std::size_t>(l)] = tbar * (static_cast<double>(strata[static_cast<std::size_t>(l)][static_cast<std::size_t>(r)]) + rng.uniform()) /
                                       static_cast<double>(restarts);
    starts.push_back(std::move(s));
  }

  GeneralSolveResult best;
  bool any_converged = false;
  double best_obj = std::numeric_limits<double>::infinity();
  for (auto& start : starts) {
    std::vector<double> theta = start;
    for (double& t : theta) t = std::clamp(t, 0.0, tbar);
    bool ok = stepwise ? coordinate_descent(bundle, u, candidates, theta)
                       : gauss_newton(bundle, u, theta);
    double obj = objective(bundle, theta, u);
    bool better = obj < best_obj - 1e-15 ||
                  (obj <= best_obj + 1e-15 &&
                   std::lexicographical_compare(theta.begin(), theta.end(), best.theta.begin(),
                                                best.theta.end()));
    if (best.theta.empty() || better) {
      best_obj = obj;
      best.theta = theta;
    }
    any_converged = any_converged || ok;
  }
  if (!any_converged) throw NoConvergenceError("no restart of the general solver converged");
  best.converged = true;
  best.residual_norm = std::sqrt(best_obj);

  // Conditioning diagnostic: finite-difference Jacobian at the solution over
  // a span wider than the typical jump spacing.
  const double span = std::max(tbar / 50.0, 1e-6);
  std::vector<double> jac(static_cast<std::size_t>(L * L), 0.0);
  for (int l = 0; l < L; ++l) {
    std::vector<double> up(best.theta), down(best.theta);
    up[static_cast<std::size_t>(l)] = std::min(up[static_cast<std::size_t>(l)] + span, tbar);
    down[static_cast<std::size_t>(l)] = std::max(down[static_cast<std::size_t>(l)] - span, 0.0);
    const double width = up[static_cast<std::size_t>(l)] - down[static_cast<std::size_t>(l)];
    std::vector<double> au = eval_A(up, bundle, u), ad = eval_A(down, bundle, u);
    for (int k = 0; k < L; ++k)
      jac[static_cast<std::size_t>(k * L + l)] = width > 0.0 ? (au[static_cast<std::size_t>(k)] - ad[static_cast<std::size_t>(k)]) / width : 0.0;
  }
  best.rank_deficient = min_singular_value(jac, static_cast<std::size_t>(L)) < 1e-3;
  return best;
}

BundleFactory::BundleFactory(std::shared_ptr<const Dataset> data, Options opts)
  : data_(std::move(data)), opts_(std::move(opts)), index_(*data_) {
  if (!(opts_.u_bar > 0.0 && opts_.u_bar < 1.0)) throw ConfigError("u_bar must lie in (0,1)");
  t_bar_ = opts_.t_bar > 0.0 ? opts_.t_bar : data_->max_uncensored_y();
  if (!(t_bar_ > 0.0)) throw ConfigError("time cap is zero: dataset has no uncensored rows");
}

std::vector<double> BundleFactory::resolved_bandwidths(double x) const {
  const int L = data_->n_levels();
  std::vector<double> hs;
  if (opts_.plan.scope == BandwidthScope::instrument_cell) {
    for (int w = 0; w < L; ++w) hs.push_back(select_bandwidth(*data_, 0, w, x, opts_.plan));
  } else {
    for (int z = 0; z < L; ++z)
      for (int w = 0; w < L; ++w) hs.push_back(select_bandwidth(*data_, z, w, x, opts_.plan));
  }
  return hs;
}

CellCdfBundle BundleFactory::build(double x) const {
  const int L = data_->n_levels();
  CellCdfBundle bundle;
  bundle.levels = L;
  bundle.u_bar = opts_.u_bar;
  bundle.t_bar = t_bar_;
  bundle.cells.assign(static_cast<std::size_t>(L * L), SmoothSubCdf());

  for (int w = 0; w < L; ++w) {
    for (int z = 0; z < L; ++z) {
      // Under instrument-cell scope every z shares the bandwidth of w, so
      // the p-hats sum to one across treatment levels.
      const double h = select_bandwidth(*data_, z, w, x, opts_.plan);
      const auto& wmembers = index_.instrument_cell(w);
      double den = 0.0;
      for (const auto& m : wmembers) den += opts_.kernel((x - m.x) / h);
      if (den <= 0.0)
        throw ZeroMassError("no kernel mass at instrument level w=" + std::to_string(w) +
                            " at x=" + std::to_string(x));
      const auto& members = index_.cell(z, w);
      std::vector<double> weights(members.size(), 0.0);
      double num = 0.0;
      for (std::size_t j = 0; j < members.size(); ++j) {
        weights[j] = opts_.kernel((x - members[j].x) / h);
        num += weights[j];
      }
      if (num <= 0.0) continue;  // empty cell: F-hat is the zero function
      StepCdf step = detail::beran_core(members, weights, t_bar_);
      bundle.cells[static_cast<std::size_t>(z * L + w)] =
          SmoothSubCdf(std::move(step), num / den, opts_.epsilon, opts_.kernel_tilde);
    }
  }
  return bundle;
}

QuantileMap::QuantileMap(BundleFactory factory, Options opts,
                         std::optional<LevelPermutations> perms)
  : factory_(std::move(factory)), opts_(opts), perms_(std::move(perms)) {
  if (opts_.grid_size < 2) throw ConfigError("phi grid needs at least 2 points");
  if (opts_.mode == SolverMode::triangular && !perms_)
    perms_ = identity_permutations(factory_.data().n_levels());
  if (opts_.mode == SolverMode::automatic) {
    if (!perms_) perms_ = detect_triangular(factory_.data(), opts_.triangular_tol);
    mode_ = perms_ ? SolverMode::triangular : SolverMode::general;
  } else {
    mode_ = opts_.mode;
  }
}

std::shared_ptr<const PhiCurve> QuantileMap::solve_curve(double x) const {
  const int L = factory_.data().n_levels();
  const double ubar = factory_.u_bar();
  const CellCdfBundle bundle = factory_.build(x);

  auto curve = std::make_shared<PhiCurve>();
  const int M = opts_.grid_size;
  curve->grid.resize(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j)
    curve->grid[static_cast<std::size_t>(j)] = ubar * static_cast<double>(j) / static_cast<double>(M - 1);
  curve->theta_raw.assign(static_cast<std::size_t>(L),
                          std::vector<double>(static_cast<std::size_t>(M), 0.0));
  curve->valid_per_level.assign(static_cast<std::size_t>(L), 0);
  std::vector<double> warm;
  std::size_t solved_positions_prev = static_cast<std::size_t>(L);

  for (int j = 0; j < M; ++j) {
    const double u = curve->grid[static_cast<std::size_t>(j)];
    std::vector<double> theta;
    std::size_t solved_positions = 0;
    if (mode_ == SolverMode::triangular) {
      // A level is usable at this u if every row up to its position solved.
      solved_positions = solve_triangular_prefix(bundle, u, *perms_, theta);
    } else {
      bool reachable = true;
      for (int k = 0; k < L; ++k)
        if (bundle.row_mass(k) < u) reachable = false;
      if (reachable) {
        GeneralSolveResult res =
            solve_general(bundle, u, opts_.restarts, opts_.seed, warm.empty() ? nullptr : &warm);
        theta = res.theta;
        warm = res.theta;
        curve->rank_warning = curve->rank_warning || res.rank_deficient;
        solved_positions = static_cast<std::size_t>(L);
      }
    }
    // Saturation is treated as absorbing per level: once a level's row
    // chain breaks, later grid points do not revive it.
    solved_positions = std::min(solved_positions, solved_positions_prev);
    solved_positions_prev = solved_positions;
    if (solved_positions == 0) break;

    const LevelPermutations& perm =
        mode_ == SolverMode::triangular ? *perms_ : identity_permutations(L);
    double r = 0.0;
    for (std::size_t pos = 0; pos < solved_positions; ++pos) {
      const int wk = perm.w_order[pos];
      double row = -u;
      for (std::size_t prev = 0; prev <= pos; ++prev) {
        const int zl = perm.z_order[prev];
        row += bundle.at(zl, wk)(theta[static_cast<std::size_t>(zl)]);
      }
      r = std::max(r, std::fabs(row));
    }
    curve->residual_inf.push_back(r);

    for (std::size_t pos = 0; pos < solved_positions; ++pos) {
      const int level = perm.z_order[pos];
      curve->theta_raw[static_cast<std::size_t>(level)][static_cast<std::size_t>(j)] =
          theta[static_cast<std::size_t>(level)];
      curve->valid_per_level[static_cast<std::size_t>(level)] = static_cast<std::size_t>(j) + 1;
    }
    if (solved_positions == static_cast<std::size_t>(L)) curve->valid_points = static_cast<std::size_t>(j) + 1;
  }

  curve->theta = curve->theta_raw;
  for (int l = 0; l < L; ++l) {
    auto& slice = curve->theta[static_cast<std::size_t>(l)];
    slice.resize(curve->valid_per_level[static_cast<std::size_t>(l)]);
    isotonic_fit(slice);
    curve->theta_raw[static_cast<std::size_t>(l)].resize(slice.size());
  }
  return curve;
}

bool QuantileMap::any_rank_warning() const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  for (const auto& [x, c] : cache_)
    if (c->rank_warning) return true;
  return false;
}

const PhiCurve& QuantileMap::curve(double x) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(x);
    if (it != cache_.end()) return *it->second;
  }
  auto solved = solve_curve(x);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto [it, inserted] = cache_.emplace(x, std::move(solved));
  return *it->second;
}

PhiResult QuantileMap::phi_hat(int z_index, double x, double u) const {
  const double ubar = factory_.u_bar();
  if (u < -1e-12 || u > ubar + 1e-12)
    throw ConfigError("phi query u=" + std::to_string(u) + " outside [0, u_bar]");
  u = std::clamp(u, 0.0, ubar);
  const PhiCurve& c = curve(x);
  const std::size_t valid = c.valid_per_level[static_cast<std::size_t>(z_index)];
  if (valid == 0) return {factory_.t_bar(), true};
  const std::size_t last = valid - 1;
  if (u > c.grid[last] + 1e-15) return {factory_.t_bar(), true};
  const auto& slice = c.theta[static_cast<std::size_t>(z_index)];
  auto hi = std::lower_bound(c.grid.begin(), c.grid.begin() + static_cast<std::ptrdiff_t>(valid), u);
  std::size_t j = static_cast<std::size_t>(hi - c.grid.begin());
  if (j == 0) return {slice[0], false};
  if (j > last) j = last;
  const double u0 = c.grid[j - 1], u1 = c.grid[j];
  const double frac = u1 > u0 ? (u - u0) / (u1 - u0) : 0.0;
  // a + frac * (b - a) cannot dip below a in floating point, which keeps
  // interpolated queries monotone along flat segments.
  return {slice[j - 1] + frac * (slice[j] - slice[j - 1]), false};
}

void write_phi_csv(const QuantileMap& map, const std::vector<double>& xs,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::data, "cannot open " + path + " for writing");
  out << "x,u,level,phi,residual\n";
  out.precision(17);
  const int L = map.factory().data().n_levels();
  for (double x : xs) {
    const PhiCurve& c = map.curve(x);
    for (int l = 0; l < L; ++l)
      for (std::size_t j = 0; j < c.valid_per_level[static_cast<std::size_t>(l)]; ++j)
        out << x << "," << c.grid[j] << "," << l << "," << c.theta[static_cast<std::size_t>(l)][j]
            << "," << (j < c.residual_inf.size() ? c.residual_inf[j] : 0.0) << "\n";
  }
}

}  // namespace ivph
