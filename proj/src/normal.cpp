#include "mclt/normal.hpp"

#include <cmath>
#include <string>

#include "mclt/error.hpp"

namespace mclt::normal {

namespace {

constexpr double kInvSqrt2 = 0.707106781186547524400844362104849039;
constexpr double kSqrt2Pi = 2.50662827463100050241576528481104525;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x))
    throw InvalidArgument(std::string(what) + ": argument must be finite");
}

// Upper tail 1 - cdf(t).
double upper_tail(double t) { return 0.5 * std::erfc(t * kInvSqrt2); }

// Acklam's rational approximation (relative error ~1.15e-9), used only as a
// starting point for refinement.
double quantile_initial(double u) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  constexpr double high = 1.0 - low;

  if (u < low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (u <= high) {
    const double q = u - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-u));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double pdf(double x) {
  require_finite(x, "normal::pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double cdf(double x) {
  require_finite(x, "normal::cdf");
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double antiderivative(double x) {
  require_finite(x, "normal::antiderivative");
  const double dens = kInvSqrt2Pi * std::exp(-0.5 * x * x);
  if (x >= 0.0) return x * (1.0 - upper_tail(x)) + dens;
  // x < 0: pdf(x) - |x| * cdf(x), both factors computed from the left tail.
  return dens - (-x) * upper_tail(-x);
}

double quantile(double u) {
  if (!(u > 0.0 && u < 1.0))
    throw InvalidArgument("normal::quantile: probability must lie in (0, 1)");
  double x = quantile_initial(u);
  // Halley refinement; the error term is taken from whichever tail keeps
  // relative precision.
  for (int iter = 0; iter < 2; ++iter) {
    const double e = (u < 0.5) ? (0.5 * std::erfc(-x * kInvSqrt2) - u)
                               : ((1.0 - u) - upper_tail(x));
    const double w = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x = x - w / (1.0 + 0.5 * x * w);
  }
  return x;
}

NormalEval evaluate(double x) {
  return {x, cdf(x), pdf(x), antiderivative(x)};
}

}  // namespace mclt::normal
