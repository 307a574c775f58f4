#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mclt/martingale.hpp"

namespace mclt {

struct LawAtom {
  double value;
  double prob;
};

/// Finite law with strictly increasing atoms and positive probabilities that
/// sum to one (within 1e-12).
class DiscreteLaw {
 public:
  /// Validates and adopts `atoms` as given; throws InvalidArgument when empty,
  /// unsorted, non-finite, or not a probability vector.
  explicit DiscreteLaw(std::vector<LawAtom> atoms);

  /// Sorts outcomes and merges exactly equal values.
  static DiscreteLaw from_outcomes(std::vector<WeightedOutcome> outcomes);

  /// Empirical law of `samples` with ties merged.
  static DiscreteLaw from_samples(std::span<const double> samples);

  std::span<const LawAtom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

 private:
  std::vector<LawAtom> atoms_;
};

struct DistanceReport {
  double w1 = 0.0;
  double kolmogorov = 0.0;
  std::size_t m = 0;
  // Batch-means standard error of w1 (10 batches); empty when m < 1000.
  std::optional<double> w1_se;
};

inline constexpr std::size_t kW1Batches = 10;
inline constexpr std::size_t kMinSamplesForSe = 1000;

/// Exact integral of |F_law - Phi| over the real line: tails through the
/// antiderivative of Phi, and each flat stretch of F_law split at the point
/// where Phi crosses its level.
double w1_discrete_vs_normal(const DiscreteLaw& law);

double kolmogorov_discrete_vs_normal(const DiscreteLaw& law);

/// W1 and Kolmogorov distance of the empirical law of `samples`. The batch
/// standard error uses the samples in the order given.
DistanceReport w1_empirical_vs_normal(std::span<const double> samples);

double kolmogorov_empirical_vs_normal(std::span<const double> samples);

}  // namespace mclt
