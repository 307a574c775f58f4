#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mclt/bounds.hpp"
#include "mclt/distances.hpp"
#include "mclt/martingale.hpp"

namespace mclt {

struct FamilyDescriptor {
  FamilyId id = FamilyId::Rademacher;
  ParamMap params;
};

struct ExperimentConfig {
  std::vector<FamilyDescriptor> families;
  std::vector<std::size_t> n_grid;
  std::size_t m = 0;
  double p = 1.5;
  double epsilon = 0.25;
  std::vector<double> a_grid = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  std::uint64_t master_seed = 1;
  std::string out_dir;
  unsigned workers = 1;
};

/// Parses the flat `key = value` config format. Lines starting with '#' are
/// comments. Lists are comma separated; families take optional parameters in
/// parentheses, e.g. `families = rademacher, sign_modulated(delta=0.5)`.
/// Unknown or duplicate keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Throws InvalidArgument if the config violates an invariant.
void validate_config(const ExperimentConfig& config);

/// Completion-audit tallies for one (family, n) cell.
struct AuditTally {
  std::size_t paths = 0;
  std::size_t failures = 0;
  std::size_t variance_sum_fail = 0;
  std::size_t prefix_fail = 0;
  std::size_t fill_fail = 0;
  std::size_t thirdmoment_fail = 0;
  std::size_t eq16_fail = 0;
  std::size_t eq17_fail = 0;
  std::size_t eq17_not_applicable = 0;  // tau == n
  std::size_t tau_interior = 0;         // tau < n
  double max_variance_sum_err = 0.0;
  double max_eq16_err = 0.0;
  double mean_N = 0.0;

  AuditTally& merge(const AuditTally& o);
};

/// One row of results.csv; kernels absent from `kernels` are inapplicable.
struct ResultRow {
  std::string family;
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  DistanceReport distance;
  MomentEstimates moments;
  std::map<KernelId, double> kernels;
  std::map<KernelId, std::string> inapplicable;
  double roellin_best_a = 0.0;
  AuditTally audit;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

struct FittedKernel {
  std::string family;
  std::string kernel;  // a kernel id, or "w1" / "kolmogorov" for the distances themselves
  std::optional<RateFit> fit;
  std::optional<double> c_hat;  // max over the grid of w1 / kernel
  std::optional<double> ratio_spread;  // max/min of w1 / kernel over the grid
};

enum class CheckKind { ExplicitConstant, Audit, Property };
std::string_view to_string(CheckKind kind);

struct CheckResult {
  std::string name;
  std::string family;
  std::optional<std::size_t> n;
  CheckKind kind = CheckKind::ExplicitConstant;
  bool pass = false;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string detail;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
  std::vector<FittedKernel> fitted;
  std::vector<CheckResult> checks;

  /// True iff every explicit-constant and audit check passes (property checks
  /// are informational).
  bool all_gating_pass() const;
};

/// OLS of log(value) on log(n). Needs >= 3 points with positive n and value.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes results.csv, summary.json and audits.json into out_dir (created if
/// missing). Numbers carry 12 significant digits.
void write_outputs(const ExperimentReport& report, const std::string& out_dir);

// Serialisers used by write_outputs; exposed for tests.
std::string results_csv(const ExperimentReport& report);
std::string summary_json(const ExperimentReport& report);
std::string audits_json(const ExperimentReport& report);

/// Rounds to 12 significant digits (the on-disk precision).
double round12(double x);

}  // namespace mclt
