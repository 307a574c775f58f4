#include "mclt/completion.hpp"

#include <cmath>
#include <sstream>

#include "mclt/error.hpp"

namespace mclt {

CompletedPath complete_path(const Path& path, double epsilon, const StreamKey& key) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidArgument("complete_path: epsilon must be positive");
  if (!(path.sn2 > 0.0)) throw InvalidArgument("complete_path: sn2 must be positive");

  const std::size_t n = path.x.size();
  const double sn2 = path.sn2;
  const double eps2 = epsilon * epsilon;

  // tau: largest k with sum_{i<=k} sigma2 <= sn2 (0 when even sigma2[0] exceeds it).
  std::size_t tau = 0;
  double spent = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double next = spent + path.sigma2[k];
    if (next > sn2) break;
    spent = next;
    tau = k + 1;
  }
  const double remainder = sn2 - spent;
  if (remainder < 0.0) throw InvalidArgument("complete_path: negative variance remainder");

  const auto cap = static_cast<std::size_t>(std::floor(sn2 / eps2));
  std::size_t r = static_cast<std::size_t>(std::floor(remainder / eps2));
  // remainder <= sn2, so r <= cap up to the rounding of the two divisions.
  if (r > cap) r = cap;
  if (r < cap && remainder - static_cast<double>(r + 1) * eps2 >= 0.0) ++r;
  double last2 = remainder - static_cast<double>(r) * eps2;
  if (last2 < 0.0) {
    if (last2 < -kAuditRelTol * sn2)
      throw InternalError("complete_path: fill-in overshoots the variance budget");
    last2 = 0.0;
  }

  CompletedPath out;
  out.N = n + cap + 1;
  out.tau = tau;
  out.r = r;
  out.epsilon = epsilon;
  out.remainder = remainder;
  out.base = &path;
  if (tau + r + 1 > out.N) throw InternalError("complete_path: fill-in exceeds N");

  out.xhat.assign(out.N, 0.0);
  out.sigma2hat.assign(out.N, 0.0);
  for (std::size_t i = 0; i < tau; ++i) {
    out.xhat[i] = path.x[i];
    out.sigma2hat[i] = path.sigma2[i];
  }
  Stream signs(key);
  for (std::size_t i = tau; i < tau + r; ++i) {
    out.xhat[i] = epsilon * signs.sign();
    out.sigma2hat[i] = eps2;
  }
  if (last2 > 0.0) {
    out.xhat[tau + r] = std::sqrt(last2) * signs.sign();
    out.sigma2hat[tau + r] = last2;
  }
  return out;
}

CompletionAudit audit_completion(const CompletedPath& c) {
  CompletionAudit audit;
  if (c.base == nullptr) {
    audit.details.push_back("no base path attached");
    return audit;
  }
  const Path& base = *c.base;
  const std::size_t n = base.x.size();
  const double sn2 = base.sn2;
  const double tol = kAuditRelTol * sn2;
  auto note = [&](const std::string& s) { audit.details.push_back(s); };

  // Variance-sum identity.
  double total = 0.0;
  for (double s : c.sigma2hat) total += s;
  audit.variance_sum_err = std::fabs(total - sn2);
  audit.variance_sum_ok = audit.variance_sum_err <= tol;
  if (!audit.variance_sum_ok) note("variance sum off by " + std::to_string(audit.variance_sum_err));

  // Prefix preservation, exact.
  audit.prefix_ok = c.tau <= n && c.xhat.size() == c.N && c.sigma2hat.size() == c.N;
  for (std::size_t i = 0; audit.prefix_ok && i < c.tau; ++i)
    audit.prefix_ok = c.xhat[i] == base.x[i] && c.sigma2hat[i] == base.sigma2[i];
  if (!audit.prefix_ok) {
    note("prefix differs from base path");
    return audit;
  }

  // Fill-in block: magnitude epsilon, then the fractional step, then zeros.
  const double eps = c.epsilon;
  audit.fill_ok = c.tau + c.r + 1 <= c.N;
  for (std::size_t i = c.tau; audit.fill_ok && i < c.N; ++i) {
    const double ax = std::fabs(c.xhat[i]);
    if (i < c.tau + c.r)
      audit.fill_ok = ax == eps && c.sigma2hat[i] == eps * eps;
    else if (i == c.tau + c.r)
      audit.fill_ok = ax < eps && std::fabs(ax * ax - c.sigma2hat[i]) <= tol;
    else
      audit.fill_ok = c.xhat[i] == 0.0 && c.sigma2hat[i] == 0.0;
    if (!audit.fill_ok) note("fill-in step " + std::to_string(i) + " inconsistent");
  }

  // Pathwise third-moment cap on the post-tau part.
  double tail3 = 0.0;
  for (std::size_t i = c.tau; i < c.N; ++i) tail3 += std::pow(std::fabs(c.xhat[i]), 3.0);
  const double cap = (1.0 + sn2 / (eps * eps)) * eps * eps * eps;
  audit.thirdmoment_cap_ok = tail3 <= cap * (1.0 + 1e-12);
  if (!audit.thirdmoment_cap_ok) note("third-moment cap exceeded");

  // Variance bookkeeping identity, pathwise, with sigma2 padded by zeros past n.
  double prefix_var = 0.0, total_var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total_var += base.sigma2[i];
    if (i < c.tau) prefix_var += base.sigma2[i];
  }
  double lhs = 0.0;
  for (std::size_t i = c.tau; i < c.N; ++i)
    lhs += (i < n ? base.sigma2[i] : 0.0) + c.sigma2hat[i];
  const double vn2 = total_var / sn2;
  const double rhs16 = sn2 * vn2 + sn2 - 2.0 * prefix_var;
  audit.eq16_err = std::fabs(lhs - rhs16);
  audit.eq16_ok = audit.eq16_err <= tol;
  if (!audit.eq16_ok) note("eq16 residual " + std::to_string(audit.eq16_err));

  // The one-step overshoot bound only applies when the stopping time is interior.
  if (c.tau < n) {
    const double rhs17 = sn2 * vn2 - sn2 + 2.0 * base.sigma2[c.tau];
    audit.eq17_ok = lhs <= rhs17 + tol;
    if (!*audit.eq17_ok) note("eq17 violated");
  }
  return audit;
}

double completed_abs3(const CompletedPath& c) {
  double s = 0.0;
  for (double x : c.xhat) s += std::fabs(x) * x * x;
  return s;
}

double completed_sum(const CompletedPath& c) {
  double s = 0.0;
  for (double x : c.xhat) s += x;
  return s;
}

}  // namespace mclt
