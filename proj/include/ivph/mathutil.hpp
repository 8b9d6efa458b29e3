#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ivph {

//! Adaptive Simpson quadrature of f on [a, b] to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

//! Standard normal CDF.
double normal_cdf(double x);

//! Standard normal quantile (Acklam's algorithm, |rel err| < 1.2e-9).
double normal_quantile(double p);

//! Pool-adjacent-violators projection: least-squares nondecreasing fit,
//! in place, equal weights.
void isotonic_fit(std::vector<double>& y);

double mean(const std::vector<double>& v);
//! Sample standard deviation (n-1 denominator); 0 for n < 2.
double sample_sd(const std::vector<double>& v);
//! Type-7 (linear interpolation) quantile of unsorted data, q in [0,1].
double quantile(std::vector<double> v, double q);

//! Symmetric positive definite solve via Cholesky, dimension d, row-major a.
//! Returns false if a pivot falls below rel_tol * max diagonal.
bool cholesky_solve(std::vector<double> a, std::vector<double> b, std::size_t d,
                    std::vector<double>& x, double rel_tol = 1e-12);

//! Smallest singular value of a row-major d x d matrix (Jacobi eigenvalues
//! of a^T a); used only as a conditioning diagnostic.
double min_singular_value(const std::vector<double>& a, std::size_t d);

}  // namespace ivph
