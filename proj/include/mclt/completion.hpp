#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mclt/martingale.hpp"
#include "mclt/rng.hpp"

namespace mclt {

/// A path extended by Rademacher fill-in steps of size epsilon (plus one
/// fractional step) so that the conditional variances of the extended
/// sequence sum to exactly s_n^2 on every path.
///
/// Indices below are 0-based: xhat[0, tau) is the preserved prefix,
/// xhat[tau, tau + r) the +-epsilon block, xhat[tau + r] the fractional step,
/// and everything after it is zero.
struct CompletedPath {
  std::vector<double> xhat;
  std::vector<double> sigma2hat;
  std::size_t tau = 0;
  std::size_t r = 0;
  double epsilon = 0.0;
  std::size_t N = 0;
  double remainder = 0.0;  // s_n^2 - sum_{i <= tau} sigma_i^2
  const Path* base = nullptr;
};

struct CompletionAudit {
  double variance_sum_err = 0.0;
  bool variance_sum_ok = false;
  bool prefix_ok = false;
  bool fill_ok = false;  // |xhat|^2 == sigma2hat on the fill-in block
  bool thirdmoment_cap_ok = false;
  double eq16_err = 0.0;
  bool eq16_ok = false;
  std::optional<bool> eq17_ok;  // empty when tau == n
  std::vector<std::string> details;

  bool all_pass() const {
    return variance_sum_ok && prefix_ok && fill_ok && thirdmoment_cap_ok && eq16_ok &&
           eq17_ok.value_or(true);
  }
};

/// Relative tolerance (times s_n^2) for the variance identities.
inline constexpr double kAuditRelTol = 1e-9;

/// Builds the completed path. `path` must outlive the result (it is
/// referenced as `base`). Fill-in signs come from `key`; a zero-size
/// fractional step consumes no sign.
CompletedPath complete_path(const Path& path, double epsilon, const StreamKey& key);

CompletionAudit audit_completion(const CompletedPath& completed);

/// Sum of |xhat_i|^3 over the whole completed path.
double completed_abs3(const CompletedPath& completed);

/// Sum of xhat_i over the whole completed path.
double completed_sum(const CompletedPath& completed);

}  // namespace mclt
