#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mclt/rng.hpp"

namespace mclt {

enum class FamilyId { Rademacher, SignModulated, Uniform, TwoPoint };

std::string_view to_string(FamilyId id);
FamilyId parse_family_id(std::string_view name);

using ParamMap = std::map<std::string, double, std::less<>>;

/// A martingale difference family. Every built-in family has the
/// location-free scale form X_i = b_i * Z_i, where Z_i are i.i.d. zero-mean,
/// unit-variance innovations and the scale b_i is a function of the path
/// prefix (F_{i-1}-measurable). Conditional moments follow directly:
/// E[|X_i|^q | F_{i-1}] = b_i^q * E|Z|^q.
struct FamilySpec {
  FamilyId id = FamilyId::Rademacher;
  std::size_t n = 1;
  double delta = 0.0;  // sign_modulated: b_i = 1 + delta * Z_{i-1}
  double skew = 0.0;   // two_point: skewness of the innovation
  double atom_hi = 1.0;  // two_point: Z takes +atom_hi ...
  double atom_lo = 1.0;  // ... or -atom_lo, with atom_hi * atom_lo = 1
  std::optional<double> analytic_sn2;
  std::optional<double> analytic_gamma_inf;

  /// E|Z|^q for the innovation law.
  double innovation_abs_moment(double q) const;

  /// Every value b_i can take along any path.
  std::vector<double> reachable_scales() const;

  /// True when V_n^2 = 1 almost surely follows from the family definition.
  bool unit_quadratic_variation() const;

  /// True when the innovation has finitely many atoms (exact enumeration possible).
  bool finite_support() const;

  /// e.g. "sign_modulated(delta=0.5)"; used as the family column in reports.
  std::string label() const;
};

FamilySpec build_family(FamilyId id, std::size_t n, const ParamMap& params = {});
FamilySpec build_family(std::string_view family_id, std::size_t n, const ParamMap& params = {});

struct Path {
  std::vector<double> x;
  std::vector<double> sigma2;  // E[X_i^2 | F_{i-1}] along the path
  std::vector<double> m3;      // E[|X_i|^3 | F_{i-1}] along the path
  double sn2 = 0.0;
};

struct PathStats {
  double s_n_over_sn = 0.0;
  double vn2 = 0.0;
  double max_abs_x = 0.0;
  double sum_abs3 = 0.0;
};

/// Draws one trajectory from the stream identified by `key`. Identical keys
/// give bit-identical paths. `sn2` overrides the normalisation and is
/// required when the family has no analytic s_n^2.
Path sample_path(const FamilySpec& spec, const StreamKey& key,
                 std::optional<double> sn2 = std::nullopt);
void sample_path_into(const FamilySpec& spec, const StreamKey& key, Path& out,
                      std::optional<double> sn2 = std::nullopt);

PathStats path_stats(const Path& path);

struct MomentErrors {
  double sn2 = 0.0;
  double vdev_p = 0.0;
  double vdev_1 = 0.0;
  double emax_2p = 0.0;
  double sum_e_abs3 = 0.0;
  double sum_e_abs2p = 0.0;
};

struct MomentEstimates {
  std::size_t n = 0;
  double p = 1.0;
  std::size_t m = 0;
  double sn2 = 0.0;
  bool sn2_analytic = false;
  double vdev_p = 0.0;   // ||V_n^2 - 1||_p^p
  double vdev_1 = 0.0;   // ||V_n^2 - 1||_1
  double vdev_inf = 0.0; // sampled max |V_n^2 - 1|; a lower bound on the ess sup
  double emax_2p = 0.0;  // E max_i |X_i|^{2p}
  double sum_e_abs3 = 0.0;
  double sum_e_abs2p = 0.0;
  MomentErrors se;
};

/// Streaming accumulator behind estimate_moments. Mergeable so that chunked
/// parallel runs reduce to the same bits regardless of worker count.
class MomentAccumulator {
 public:
  MomentAccumulator() = default;
  MomentAccumulator(double p, double sn2);

  void add(const Path& path, double weight = 1.0);
  MomentAccumulator& merge(const MomentAccumulator& other);
  MomentEstimates finish(const FamilySpec& spec, bool sn2_analytic) const;

 private:
  // Weighted mean/M2 (West's update; Chan's merge).
  struct Stat {
    double w = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
    void add(double x, double weight);
    void merge(const Stat& o);
    double se(bool weighted_exact) const;
  };
  double p_ = 1.0;
  double sn2_ = 1.0;
  std::size_t count_ = 0;
  bool exact_ = false;
  Stat sigma_sum_, vdev_p_, vdev_1_, emax_, abs3_, abs2p_;
  double vdev_inf_ = 0.0;

  friend MomentEstimates enumerate_moments(const FamilySpec&, double);
};

/// Monte Carlo moment estimates over m paths with keys (master_seed, 0..m-1).
MomentEstimates estimate_moments(const FamilySpec& spec, double p, std::size_t m,
                                 std::uint64_t master_seed, unsigned workers = 1);

/// Exact expectations by enumerating every innovation sequence of a
/// finite-support family (n <= 24). Standard errors are zero.
MomentEstimates enumerate_moments(const FamilySpec& spec, double p);

struct WeightedOutcome {
  double value;   // S_n / s_n
  double weight;  // probability
};

/// Exact law of S_n/s_n for finite-support families (n <= 24), unmerged.
std::vector<WeightedOutcome> enumerate_normalized_sums(const FamilySpec& spec);

/// Smallest gamma with E[|X_i|^{2+rho} | F_{i-1}] <= gamma^rho E[X_i^2 | F_{i-1}]
/// over every reachable conditional state.
double check_conditional_ratio(const FamilySpec& spec, double rho);

}  // namespace mclt
