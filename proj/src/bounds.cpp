#include "mclt/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "mclt/error.hpp"
#include "mclt/parallel.hpp"

namespace mclt {

namespace {

constexpr std::size_t kPilotPaths = 1000;

void require_nonnegative(const MomentEstimates& est) {
  const double fields[] = {est.sn2,     est.vdev_p,     est.vdev_1,     est.vdev_inf,
                           est.emax_2p, est.sum_e_abs3, est.sum_e_abs2p};
  for (double f : fields)
    if (!(f >= 0.0) || !std::isfinite(f))
      throw InvalidArgument("bound kernel: moment inputs must be finite and nonnegative");
  if (!(est.sn2 > 0.0)) throw InvalidArgument("bound kernel: sn2 must be positive");
}

double n_log_n(std::size_t n) {
  const double nd = static_cast<double>(n);
  return n >= 2 ? nd * std::log(nd) : 0.0;
}

KernelValue make(KernelId id, double value, const MomentEstimates& est, const KernelParams& params) {
  KernelValue v;
  v.id = id;
  v.value = value;
  v.inputs = est;
  v.params = params;
  return v;
}

}  // namespace

std::string_view to_string(KernelId id) {
  switch (id) {
    case KernelId::HeydeBrown1: return "heyde_brown_1";
    case KernelId::Bolthausen2: return "bolthausen_2";
    case KernelId::MourratTerm: return "mourrat_term";
    case KernelId::Fan5: return "fan_5";
    case KernelId::VanDung6: return "van_dung_6";
    case KernelId::Roellin7: return "roellin_7";
    case KernelId::Theorem8: return "theorem_8";
    case KernelId::Corollary9: return "corollary_9";
    case KernelId::Lemma10PaperA: return "lemma_10_paper_a";
    case KernelId::Lemma10OptimalA: return "lemma_10_optimal_a";
  }
  return "unknown";
}

double alpha_n(double sn, double rho) {
  if (!(sn > 0.0) || !(rho > 0.0)) throw InvalidArgument("alpha_n: sn and rho must be positive");
  if (rho < 1.0) return std::pow(sn, -rho);
  return std::max(0.0, std::log(sn)) / sn;
}

TheoremKernels theorem_kernel(const MomentEstimates& est, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("theorem_kernel: p must be >= 1");
  require_nonnegative(est);
  const double sn = std::sqrt(est.sn2);
  const double first = std::cbrt(est.sum_e_abs3) / sn;
  const double second =
      std::pow(est.vdev_p + std::pow(sn, -2.0 * p) * est.emax_2p, 1.0 / (2.0 * p));
  KernelParams params;
  params.p = p;
  params.n = est.n;
  TheoremKernels out{make(KernelId::Theorem8, first + second, est, params), std::nullopt};
  if (std::fabs(p - 1.5) < 1e-12)
    out.corollary = make(KernelId::Corollary9, first + std::pow(est.vdev_p, 1.0 / 3.0), est, params);
  return out;
}

// ---------------------------------------------------------------------------

RoellinAccumulator::RoellinAccumulator(std::span<const double> a_grid)
    : mean_(a_grid.size(), 0.0), m2_(a_grid.size(), 0.0) {
  a2_.reserve(a_grid.size());
  for (double a : a_grid) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("roellin_kernel: a must be >= 0");
    a2_.push_back(a * a);
  }
}

void RoellinAccumulator::add(const Path& path) {
  const std::size_t n = path.sigma2.size();
  scratch_.resize(n);
  double tail = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    tail += path.sigma2[i];
    scratch_[i] = tail;
  }
  ++count_;
  const double w = static_cast<double>(count_);
  for (std::size_t k = 0; k < a2_.size(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double denom = scratch_[i] + a2_[k];
      if (denom == 0.0) {
        if (path.m3[i] == 0.0) continue;
        throw PreconditionFailed("roellin_kernel: a = 0 with vanishing tail variance rho_i^2");
      }
      s += path.m3[i] / denom;
    }
    const double delta = s - mean_[k];
    mean_[k] += delta / w;
    m2_[k] += delta * (s - mean_[k]);
  }
}

RoellinAccumulator& RoellinAccumulator::merge(const RoellinAccumulator& o) {
  if (o.count_ == 0) return *this;
  if (count_ == 0) {
    a2_ = o.a2_;
    mean_ = o.mean_;
    m2_ = o.m2_;
    count_ = o.count_;
    return *this;
  }
  const double na = static_cast<double>(count_), nb = static_cast<double>(o.count_);
  const double total = na + nb;
  for (std::size_t k = 0; k < mean_.size(); ++k) {
    const double delta = o.mean_[k] - mean_[k];
    mean_[k] += delta * (nb / total);
    m2_[k] += o.m2_[k] + delta * delta * (na * nb / total);
  }
  count_ += o.count_;
  return *this;
}

double RoellinAccumulator::se(std::size_t k) const {
  if (count_ < 2) return 0.0;
  const double w = static_cast<double>(count_);
  return std::sqrt(std::max(0.0, m2_[k]) / (w - 1.0) / w);
}

std::vector<KernelValue> roellin_values(const RoellinAccumulator& acc, std::span<const double> a_grid,
                                        double sn2) {
  const double sn = std::sqrt(sn2);
  std::vector<KernelValue> out;
  out.reserve(a_grid.size());
  for (std::size_t k = 0; k < a_grid.size(); ++k) {
    KernelValue v;
    v.id = KernelId::Roellin7;
    v.value = 3.0 / sn * acc.mean(k) + 2.0 * a_grid[k] / sn;
    v.se = 3.0 / sn * acc.se(k);
    v.params.a = a_grid[k];
    v.inputs.sn2 = sn2;
    v.inputs.m = acc.count();
    out.push_back(v);
  }
  return out;
}

std::vector<KernelValue> roellin_kernel_grid(const FamilySpec& spec, std::span<const double> a_grid,
                                             std::size_t m, std::uint64_t master_seed,
                                             unsigned workers) {
  if (a_grid.empty()) throw InvalidArgument("roellin_kernel: empty a grid");
  if (m < 1) throw InvalidArgument("roellin_kernel: m must be >= 1");
  if (!spec.analytic_sn2) throw PreconditionFailed("roellin_kernel: family needs an analytic s_n^2");
  const double sn2 = *spec.analytic_sn2;

  if (!spec.unit_quadratic_variation()) {
    Path path;
    for (std::size_t r = 0; r < kPilotPaths; ++r) {
      sample_path_into(spec, {master_seed, r, Lane::Pilot}, path);
      double var = 0.0;
      for (double s : path.sigma2) var += s;
      if (std::fabs(var / sn2 - 1.0) > 1e-12 * static_cast<double>(spec.n))
        throw PreconditionFailed("roellin_kernel: V_n^2 = 1 a.s. fails for " + spec.label());
    }
  }

  RoellinAccumulator proto(a_grid);  // validates the grid up front
  auto parts = map_chunks(m, workers, [&](std::size_t begin, std::size_t end) {
    RoellinAccumulator acc(a_grid);
    Path path;
    for (std::size_t r = begin; r < end; ++r) {
      sample_path_into(spec, {master_seed, r, Lane::Path}, path);
      acc.add(path);
    }
    return acc;
  });
  auto total = tree_reduce(std::move(parts), [](RoellinAccumulator a, RoellinAccumulator b) {
    return std::move(a.merge(b));
  });
  auto values = roellin_values(total, a_grid, sn2);
  for (auto& v : values) v.params.n = spec.n;
  return values;
}

KernelValue roellin_kernel(const FamilySpec& spec, double a, std::size_t m, std::uint64_t master_seed,
                           unsigned workers) {
  const double grid[] = {a};
  return roellin_kernel_grid(spec, grid, m, master_seed, workers).front();
}

KernelValue lemma_kernel(double sum_e_abs3, double sn2, LemmaMode mode, double a) {
  if (!(sum_e_abs3 >= 0.0) || !std::isfinite(sum_e_abs3))
    throw InvalidArgument("lemma_kernel: sum E|X|^3 must be finite and >= 0");
  if (!(sn2 > 0.0)) throw InvalidArgument("lemma_kernel: sn2 must be positive");
  const double sn = std::sqrt(sn2);
  const double T = sum_e_abs3;

  KernelValue v;
  v.inputs.sn2 = sn2;
  v.inputs.sum_e_abs3 = T;
  switch (mode) {
    case LemmaMode::PaperA:
      v.id = KernelId::Lemma10PaperA;
      a = std::cbrt(T);
      break;
    case LemmaMode::OptimalA:
      v.id = KernelId::Lemma10OptimalA;
      a = std::cbrt(3.0 * T);
      break;
    case LemmaMode::ExplicitA:
      v.id = KernelId::Lemma10OptimalA;
      if (!(a > 0.0) && T > 0.0) throw InvalidArgument("lemma_kernel: a must be positive");
      break;
  }
  v.params.a = a;
  // a = 0 only arises with T = 0, where g -> 0.
  v.value = a > 0.0 ? (3.0 * T / (a * a) + 2.0 * a) / sn : 0.0;
  return v;
}

std::vector<KernelOutcome> legacy_kernels(const MomentEstimates& est, const KernelParams& params) {
  require_nonnegative(est);
  const double p = params.p;
  const double sn = std::sqrt(est.sn2);
  const double s2p = std::pow(sn, -2.0 * p);
  std::vector<KernelOutcome> out;

  auto emit = [&](KernelId id, double value, bool lower = false) {
    KernelOutcome o;
    o.id = id;
    o.value = make(id, value, est, params);
    o.value->lower_bound = lower;
    out.push_back(std::move(o));
  };
  auto skip = [&](KernelId id, std::string why) {
    out.push_back({id, std::nullopt, std::move(why)});
  };

  if (p > 1.0 && p <= 2.0)
    emit(KernelId::HeydeBrown1,
         std::pow(std::pow(sn, -4.0 * p) * est.vdev_p + s2p * est.sum_e_abs2p, 1.0 / (2.0 * p + 1.0)));
  else
    skip(KernelId::HeydeBrown1, "requires p in (1, 2]");

  if (params.gamma_inf)
    emit(KernelId::Bolthausen2,
         n_log_n(est.n) / (sn * sn * sn) +
             std::min(std::sqrt(est.vdev_inf), std::cbrt(est.vdev_1)),
         true);
  else
    skip(KernelId::Bolthausen2, "requires an essential-sup bound gamma on |X_i|");

  if (p >= 1.0)
    emit(KernelId::MourratTerm, std::pow(est.vdev_p + s2p, 1.0 / (2.0 * p + 1.0)));
  else
    skip(KernelId::MourratTerm, "requires p >= 1");

  if (params.rho && params.ratio_gamma && p >= 1.0)
    emit(KernelId::Fan5, alpha_n(sn, *params.rho) +
                             std::pow(est.vdev_p + s2p * est.emax_2p, 1.0 / (2.0 * p + 1.0)));
  else
    skip(KernelId::Fan5, "requires (rho, gamma) from the conditional ratio condition and p >= 1");

  if (params.gamma_inf && p > 0.5)
    emit(KernelId::VanDung6,
         n_log_n(est.n) / (sn * sn * sn) + std::pow(est.vdev_p + s2p, 1.0 / (2.0 * p)));
  else
    skip(KernelId::VanDung6, "requires an essential-sup bound gamma on |X_i| and p > 1/2");

  return out;
}

}  // namespace mclt
