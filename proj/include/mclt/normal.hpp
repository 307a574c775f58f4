#pragma once

namespace mclt::normal {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
inline constexpr double kSqrt2OverPi = 0.797884560802865355879892119868763737;

struct NormalEval {
  double x;
  double cdf;
  double pdf;
  double antiderivative;
};

/// Standard normal density.
double pdf(double x);

/// Standard normal CDF, evaluated through erfc so that both tails keep full
/// relative accuracy. Throws InvalidArgument for non-finite x.
double cdf(double x);

/// I(x) = x * cdf(x) + pdf(x), the antiderivative of the CDF with I(-inf) = 0.
/// Left tail is computed without cancellation; I(x) - I(-x) = x holds exactly
/// up to rounding.
double antiderivative(double x);

/// Inverse CDF on the open interval (0, 1). Rational initial guess refined by
/// a Halley step against cdf(), giving |cdf(q(u)) - u| near machine precision.
double quantile(double u);

NormalEval evaluate(double x);

}  // namespace mclt::normal
