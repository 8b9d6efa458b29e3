#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "ivph/beran.hpp"
#include "ivph/data.hpp"
#include "ivph/kernels.hpp"
#include "ivph/stepcdf.hpp"

namespace ivph {

//! All estimated sub-CDFs F(., z_l | x, w_k) for one covariate value x,
//! indexed by (treatment level l, instrument level k).
struct CellCdfBundle {
  int levels = 0;
  std::vector<SmoothSubCdf> cells;  // row-major, entry l * levels + k
  double u_bar = 0.0;
  double t_bar = 0.0;

  const SmoothSubCdf& at(int l, int k) const {
    return cells[static_cast<std::size_t>(l * levels + k)];
  }
  //! Reachable mass of row k: sum over l of total cell mass.
  double row_mass(int k) const;
};

//! A(theta)(u), component k = sum_l F(theta_l, z_l | w_k) - u.
std::vector<double> eval_A(const std::vector<double>& theta, const CellCdfBundle& bundle, double u);

//! Level orderings under which the system is (empirically) triangular:
//! position p of z_order / w_order holds the level index placed p-th.
struct LevelPermutations {
  std::vector<int> z_order;
  std::vector<int> w_order;
};

//! Search for orderings with P(Z = z_l | W = w_k) <= tol for every l > k
//! (exhaustive, L <= 6). Returns the lexicographically first match.
std::optional<LevelPermutations> detect_triangular(const Dataset& data, double tol = 0.0);

//! Closed-form inductive solution of the triangular system at rank u.
//! Returns theta indexed by original treatment level. Throws SaturatedError
//! when a pseudo-inverse query exceeds the estimable range.
std::vector<double> solve_triangular(const CellCdfBundle& bundle, double u,
                                     const LevelPermutations& perm);

//! Non-throwing variant: solves positions until a pseudo-inverse saturates
//! and returns how many leading positions were solved (theta entries for
//! unsolved levels are left at zero).
std::size_t solve_triangular_prefix(const CellCdfBundle& bundle, double u,
                                    const LevelPermutations& perm, std::vector<double>& theta);

//! Identity orderings 0..L-1.
LevelPermutations identity_permutations(int levels);

struct GeneralSolveResult {
  std::vector<double> theta;
  double residual_norm = 0.0;  // Euclidean norm of A at the solution
  bool rank_deficient = false;
  bool converged = false;
};

//! Multi-start minimizer of ||A(theta)(u)|| over [0, t_bar]^L.
//! Step inputs (epsilon = 0) use exact cyclic coordinate minimization over
//! the jump-time candidates with plateau-infimum canonicalization; smooth
//! inputs use projected Gauss-Newton with the analytic Jacobian. Restarts
//! are drawn from a Latin hypercube. Throws NoConvergenceError if no
//! restart converges.
GeneralSolveResult solve_general(const CellCdfBundle& bundle, double u, int restarts,
                                 std::uint64_t seed = 0,
                                 const std::vector<double>* warm_start = nullptr);

//! Builds CellCdfBundles from a dataset: per instrument level a bandwidth is
//! resolved from the plan, p-hat and the Beran estimator are formed for each
//! treatment level, and empty cells become zero functions.
class BundleFactory {
public:
  struct Options {
    KernelSpec kernel = KernelSpec::epanechnikov();
    KernelSpec kernel_tilde = KernelSpec::epanechnikov();
    BandwidthPlan plan;
    double epsilon = 0.0;
    double u_bar = 0.9;
    double t_bar = 0.0;  // <= 0: use the dataset's largest uncensored y
  };

  BundleFactory(std::shared_ptr<const Dataset> data, Options opts);

  CellCdfBundle build(double x) const;
  //! Bandwidths the last-configured plan resolves at x, one per instrument
  //! level (or per (z,w) cell under treatment-cell scope, flattened row-major).
  std::vector<double> resolved_bandwidths(double x) const;

  double u_bar() const { return opts_.u_bar; }
  double t_bar() const { return t_bar_; }
  const Dataset& data() const { return *data_; }

private:
  std::shared_ptr<const Dataset> data_;
  Options opts_;
  double t_bar_;
  detail::CellIndex index_;
};

enum class SolverMode { automatic, triangular, general };

//! Solution curve u -> theta at one covariate value: raw solver output and
//! the monotone (pool-adjacent-violators) projection per treatment level on
//! the u grid. Saturation truncates per level: in triangular mode level k
//! only needs rows up to its position, so levels placed before a saturated
//! row keep their grid prefix.
struct PhiCurve {
  std::vector<double> grid;                     // u values
  std::vector<std::vector<double>> theta;       // [level][grid], monotone
  std::vector<std::vector<double>> theta_raw;   // [level][grid], solver output
  std::vector<double> residual_inf;             // ||A||_inf over solved rows
  std::vector<std::size_t> valid_per_level;     // usable prefix per level
  std::size_t valid_points = 0;                 // prefix where all levels hold
  bool rank_warning = false;
};

struct PhiResult {
  double value = 0.0;
  bool saturated = false;
};

//! The estimated causal quantile function phi(z, x, u): solves the system on
//! an equispaced u grid per covariate value (with warm-started continuation
//! in general mode), projects each z-slice to be nondecreasing, interpolates
//! queries linearly, and caches per-x curves. Concurrent reads share one
//! mutex-guarded cache.
class QuantileMap {
public:
  struct Options {
    int grid_size = 101;
    SolverMode mode = SolverMode::automatic;
    int restarts = 8;
    double triangular_tol = 0.0;
    std::uint64_t seed = 0;
  };

  QuantileMap(BundleFactory factory, Options opts,
              std::optional<LevelPermutations> perms = std::nullopt);

  PhiResult phi_hat(int z_index, double x, double u) const;
  const PhiCurve& curve(double x) const;
  //! True if any solved curve hit the rank-deficiency diagnostic.
  bool any_rank_warning() const;
  SolverMode effective_mode() const { return mode_; }
  double u_bar() const { return factory_.u_bar(); }
  double t_bar() const { return factory_.t_bar(); }
  const BundleFactory& factory() const { return factory_; }

private:
  std::shared_ptr<const PhiCurve> solve_curve(double x) const;

  BundleFactory factory_;
  Options opts_;
  std::optional<LevelPermutations> perms_;
  SolverMode mode_;
  mutable std::mutex cache_mutex_;
  mutable std::map<double, std::shared_ptr<const PhiCurve>> cache_;
};

//! Diagnostic dump of phi curves at the given covariate values:
//! columns x, u, level, phi, residual.
void write_phi_csv(const QuantileMap& map, const std::vector<double>& xs, const std::string& path);

}  // namespace ivph
