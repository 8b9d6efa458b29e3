#include "ivph/mathutil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ivph {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b, double fb,
                double m, double fm, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = simpson(a, fa, b, fb, fm);
  return adaptive(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
  // Acklam's rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double q, r, x;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= phigh) {
    q = p - 0.5;
    r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley refinement step.
  double e = normal_cdf(x) - p;
  double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

void isotonic_fit(std::vector<double>& y) {
  const std::size_t n = y.size();
  if (n < 2) return;
  std::vector<double> level(n), weight(n);
  std::vector<std::size_t> len(n);
  std::size_t top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    level[top] = y[i];
    weight[top] = 1.0;
    len[top] = 1;
    ++top;
    while (top > 1 && level[top - 2] > level[top - 1]) {
      double w = weight[top - 2] + weight[top - 1];
      level[top - 2] = (weight[top - 2] * level[top - 2] + weight[top - 1] * level[top - 1]) / w;
      weight[top - 2] = w;
      len[top - 2] += len[top - 1];
      --top;
    }
  }
  std::size_t pos = 0;
  for (std::size_t blk = 0; blk < top; ++blk) {
    for (std::size_t k = 0; k < len[blk]; ++k) y[pos++] = level[blk];
  }
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(n - 1));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::domain_error("quantile of empty sample");
  std::sort(v.begin(), v.end());
  if (q <= 0.0) return v.front();
  if (q >= 1.0) return v.back();
  double h = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(h);
  double frac = h - static_cast<double>(lo);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

bool cholesky_solve(std::vector<double> a, std::vector<double> b, std::size_t d,
                    std::vector<double>& x, double rel_tol) {
  double max_diag = 0.0;
  for (std::size_t i = 0; i < d; ++i) max_diag = std::max(max_diag, std::fabs(a[i * d + i]));
  if (max_diag == 0.0) return false;
  // In-place lower Cholesky.
  for (std::size_t j = 0; j < d; ++j) {
    double diag = a[j * d + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * d + k] * a[j * d + k];
    if (diag <= rel_tol * max_diag) return false;
    diag = std::sqrt(diag);
    a[j * d + j] = diag;
    for (std::size_t i = j + 1; i < d; ++i) {
      double s = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * d + k] * a[j * d + k];
      a[i * d + j] = s / diag;
    }
  }
  // Forward then backward substitution.
  for (std::size_t i = 0; i < d; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * d + k] * b[k];
    b[i] = s / a[i * d + i];
  }
  for (std::size_t ii = d; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < d; ++k) s -= a[k * d + ii] * b[k];
    b[ii] = s / a[ii * d + ii];
  }
  x = std::move(b);
  return true;
}

double min_singular_value(const std::vector<double>& a, std::size_t d) {
  // Form g = a^T a and run cyclic Jacobi.
  std::vector<double> g(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += a[k * d + i] * a[k * d + j];
      g[i * d + j] = s;
    }
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += g[p * d + q] * g[p * d + q];
    if (off < 1e-28) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        double apq = g[p * d + q];
        if (std::fabs(apq) < 1e-300) continue;
        double theta = 0.5 * (g[q * d + q] - g[p * d + p]) / apq;
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          double gkp = g[k * d + p], gkq = g[k * d + q];
          g[k * d + p] = c * gkp - s * gkq;
          g[k * d + q] = s * gkp + c * gkq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          double gpk = g[p * d + k], gqk = g[q * d + k];
          g[p * d + k] = c * gpk - s * gqk;
          g[q * d + k] = s * gpk + c * gqk;
        }
      }
    }
  }
  double lam_min = g[0];
  for (std::size_t i = 1; i < d; ++i) lam_min = std::min(lam_min, g[i * d + i]);
  return std::sqrt(std::max(0.0, lam_min));
}

}  // namespace ivph
