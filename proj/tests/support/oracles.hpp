#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's normal/distances code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace mclt::oracle {

/// Phi(x) = 1/2 + phi(x) * sum_k x^{2k+1} / (2k+1)!!, summed in long double.
/// All terms share the sign of x, so there is no cancellation inside the sum.
inline long double normal_cdf_series(long double x) {
  const long double pdf = std::exp(-0.5L * x * x) / std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
  long double term = x, sum = x;
  for (int k = 0; k < 2000; ++k) {
    term *= x * x / (2.0L * k + 3.0L);
    sum += term;
    if (std::fabs(term) < 1e-30L * std::fabs(sum)) break;
  }
  return 0.5L + pdf * sum;
}

inline double simpson_adaptive(const std::function<double(double)>& f, double a, double b, double fa,
                               double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson quadrature of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-11) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_adaptive(f, a, b, fa, fm, fb, whole, tol, 50);
}

/// Quadrature of |F - Phi| for a step CDF given by sorted atoms, split at the
/// atoms and the level crossings and truncated to [-12, 12] (the tails beyond contribute < 1e-30).
inline double w1_by_quadrature(const std::vector<double>& values, const std::vector<double>& probs) {
  auto F = [&](double x) {
    double c = 0.0;
    for (std::size_t i = 0; i < values.size() && values[i] <= x; ++i) c += probs[i];
    return c;
  };
  auto integrand = [&](double x) {
    return std::fabs(F(x) - static_cast<double>(normal_cdf_series(x)));
  };
  std::vector<double> cuts{-12.0};
  for (double v : values) cuts.push_back(v);
  // |F - Phi| has a kink wherever Phi crosses a step level; bisect for those.
  double level = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    level += probs[i];
    double lo = -12.0, hi = 12.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (normal_cdf_series(mid) < level ? lo : hi) = mid;
    }
    cuts.push_back(0.5 * (lo + hi));
  }
  cuts.push_back(12.0);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b <= a) continue;
    // F is constant on the open interval; keep quadrature nodes off the jumps.
    const double lo = std::nextafter(a, b), hi = std::nextafter(b, a);
    total += integrate(integrand, lo, hi, 1e-12);
  }
  return total;
}

}  // namespace mclt::oracle
