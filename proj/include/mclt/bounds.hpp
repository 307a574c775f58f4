#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mclt/martingale.hpp"

namespace mclt {

// Bound kernels are the computable brackets of each rate bound, reported
// without their unspecified leading constants. log is the natural logarithm.

enum class KernelId {
  HeydeBrown1,
  Bolthausen2,
  MourratTerm,
  Fan5,
  VanDung6,
  Roellin7,
  Theorem8,
  Corollary9,
  Lemma10PaperA,
  Lemma10OptimalA,
};

std::string_view to_string(KernelId id);

struct KernelParams {
  double p = 1.5;
  std::optional<double> rho;          // exponent in the conditional ratio condition
  std::optional<double> ratio_gamma;  // gamma paired with rho (check_conditional_ratio)
  std::optional<double> gamma_inf;    // essential-sup bound on |X_i|
  double a = 0.0;
  std::size_t n = 0;
};

/// s_n^{-rho} for rho in (0, 1), otherwise log(s_n) / s_n with log clamped at 0.
double alpha_n(double sn, double rho);

struct KernelValue {
  KernelId id = KernelId::Theorem8;
  double value = 0.0;
  double se = 0.0;            // Monte Carlo standard error, when the kernel is itself estimated
  bool lower_bound = false;   // true when an input is a sampled lower bound (vdev_inf)
  MomentEstimates inputs;
  KernelParams params;
};

/// Either a value or the reason the kernel's precondition does not hold.
struct KernelOutcome {
  KernelId id = KernelId::Theorem8;
  std::optional<KernelValue> value;
  std::string inapplicable;
};

struct TheoremKernels {
  KernelValue theorem;
  std::optional<KernelValue> corollary;  // only at p = 3/2
};

/// (1/s_n) (sum E|X_i|^3)^{1/3} + (||V_n^2-1||_p^p + s_n^{-2p} E max|X_i|^{2p})^{1/(2p)},
/// and at p = 3/2 the corollary form with the max term dropped.
TheoremKernels theorem_kernel(const MomentEstimates& est, double p);

/// Per-path accumulator of sum_i E[|X_i|^3 / (rho_i^2 + a^2)] over a grid of a.
/// Under V_n^2 = 1 the tail variance rho_i^2 is F_{i-1}-measurable, so |X_i|^3
/// is replaced by its conditional expectation m3[i].
class RoellinAccumulator {
 public:
  RoellinAccumulator() = default;
  explicit RoellinAccumulator(std::span<const double> a_grid);

  void add(const Path& path);
  RoellinAccumulator& merge(const RoellinAccumulator& other);

  std::size_t count() const { return count_; }
  double mean(std::size_t k) const { return mean_[k]; }
  double se(std::size_t k) const;

 private:
  std::vector<double> a2_;
  std::vector<double> mean_, m2_;
  std::size_t count_ = 0;
  std::vector<double> scratch_;
};

/// Roellin kernel (3/s_n) sum_i E|X_i|^3/(rho_i^2 + a^2) + 2a/s_n, one
/// value per entry of a_grid. Requires V_n^2 = 1 a.s. (analytic, or verified on
/// a pilot batch of 1000 paths).
std::vector<KernelValue> roellin_kernel_grid(const FamilySpec& spec, std::span<const double> a_grid,
                                             std::size_t m, std::uint64_t master_seed,
                                             unsigned workers = 1);
KernelValue roellin_kernel(const FamilySpec& spec, double a, std::size_t m,
                           std::uint64_t master_seed, unsigned workers = 1);

/// Turns accumulated Roellin sums into kernel values (shared by the harness).
std::vector<KernelValue> roellin_values(const RoellinAccumulator& acc, std::span<const double> a_grid,
                                        double sn2);

enum class LemmaMode { PaperA, OptimalA, ExplicitA };

/// g(a) = (3T/a^2 + 2a)/s_n. PaperA evaluates at a = T^{1/3}, OptimalA at the
/// true minimiser a = (3T)^{1/3}, ExplicitA at the given a.
KernelValue lemma_kernel(double sum_e_abs3, double sn2, LemmaMode mode, double a = 0.0);

/// Heyde-Brown (1), Bolthausen (2), Mourrat's term, Fan (5), Van Dung (6).
/// A kernel whose precondition fails is returned with `inapplicable` set.
std::vector<KernelOutcome> legacy_kernels(const MomentEstimates& est, const KernelParams& params);

}  // namespace mclt
