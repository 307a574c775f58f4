#include "mclt/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mclt/error.hpp"
#include "mclt/parallel.hpp"

namespace mclt {

namespace {

constexpr double kSqrt3 = 1.732050807568877293527446341505872367;
constexpr std::size_t kMaxEnumerationLength = 24;

struct Atom {
  double z;
  double prob;
};

std::vector<Atom> innovation_atoms(const FamilySpec& spec) {
  switch (spec.id) {
    case FamilyId::Rademacher:
    case FamilyId::SignModulated:
      return {{-1.0, 0.5}, {1.0, 0.5}};
    case FamilyId::TwoPoint: {
      const double a = spec.atom_hi, b = spec.atom_lo;
      return {{-b, a / (a + b)}, {a, b / (a + b)}};
    }
    case FamilyId::Uniform:
      break;
  }
  throw PreconditionFailed(std::string(to_string(spec.id)) +
                           ": innovation law has no finite support");
}

// b_i given the previous innovation (ignored for i == 0).
inline double scale_at(const FamilySpec& spec, std::size_t i, double prev_z) {
  if (spec.id == FamilyId::SignModulated && i > 0) return 1.0 + spec.delta * prev_z;
  return 1.0;
}

double double_param(const ParamMap& params, std::string_view key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void reject_unknown(const ParamMap& params, std::initializer_list<std::string_view> allowed,
                    FamilyId id) {
  for (const auto& [key, value] : params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw InvalidArgument(std::string(to_string(id)) + ": unknown parameter '" + key + "'");
    if (!std::isfinite(value))
      throw InvalidArgument(std::string(to_string(id)) + ": parameter '" + key +
                            "' must be finite");
  }
}

}  // namespace

std::string_view to_string(FamilyId id) {
  switch (id) {
    case FamilyId::Rademacher: return "rademacher";
    case FamilyId::SignModulated: return "sign_modulated";
    case FamilyId::Uniform: return "uniform";
    case FamilyId::TwoPoint: return "two_point";
  }
  return "unknown";
}

FamilyId parse_family_id(std::string_view name) {
  for (FamilyId id : {FamilyId::Rademacher, FamilyId::SignModulated, FamilyId::Uniform,
                      FamilyId::TwoPoint})
    if (to_string(id) == name) return id;
  throw InvalidArgument("unknown family '" + std::string(name) + "'");
}

double FamilySpec::innovation_abs_moment(double q) const {
  switch (id) {
    case FamilyId::Rademacher:
    case FamilyId::SignModulated:
      return 1.0;
    case FamilyId::Uniform:
      // (1 / (2 sqrt3)) * integral of |z|^q over [-sqrt3, sqrt3]
      return std::pow(3.0, 0.5 * q) / (q + 1.0);
    case FamilyId::TwoPoint: {
      const double a = atom_hi, b = atom_lo;
      return (b * std::pow(a, q) + a * std::pow(b, q)) / (a + b);
    }
  }
  return 0.0;
}

std::vector<double> FamilySpec::reachable_scales() const {
  if (id == FamilyId::SignModulated && n >= 2) return {1.0, 1.0 + delta, 1.0 - delta};
  return {1.0};
}

bool FamilySpec::unit_quadratic_variation() const {
  if (id == FamilyId::SignModulated) return delta == 0.0 || n == 1;
  return true;
}

bool FamilySpec::finite_support() const { return id != FamilyId::Uniform; }

std::string FamilySpec::label() const {
  std::ostringstream os;
  os << to_string(id);
  if (id == FamilyId::SignModulated) os << "(delta=" << delta << ")";
  if (id == FamilyId::TwoPoint) os << "(skew=" << skew << ")";
  return os.str();
}

FamilySpec build_family(FamilyId id, std::size_t n, const ParamMap& params) {
  if (n < 1) throw InvalidArgument("family length n must be >= 1");
  FamilySpec spec;
  spec.id = id;
  spec.n = n;
  const double nd = static_cast<double>(n);
  switch (id) {
    case FamilyId::Rademacher:
      reject_unknown(params, {}, id);
      spec.analytic_sn2 = nd;
      spec.analytic_gamma_inf = 1.0;
      break;
    case FamilyId::SignModulated: {
      reject_unknown(params, {"delta"}, id);
      const double delta = double_param(params, "delta", 0.0);
      if (!(delta >= 0.0 && delta < 1.0))
        throw InvalidArgument("sign_modulated: delta must lie in [0, 1)");
      spec.delta = delta;
      spec.analytic_sn2 = 1.0 + (nd - 1.0) * (1.0 + delta * delta);
      spec.analytic_gamma_inf = 1.0 + delta;
      break;
    }
    case FamilyId::Uniform:
      reject_unknown(params, {}, id);
      spec.analytic_sn2 = nd;
      spec.analytic_gamma_inf = kSqrt3;
      break;
    case FamilyId::TwoPoint: {
      reject_unknown(params, {"skew"}, id);
      // Atoms a and -1/a carry skewness a - 1/a; solve for a > 0.
      const double skew = double_param(params, "skew", 0.0);
      const double a = 0.5 * (skew + std::sqrt(skew * skew + 4.0));
      const double b = 1.0 / a;
      if (!(a > 0.0 && b > 0.0 && std::isfinite(b)))
        throw InvalidArgument("two_point: skew yields a degenerate atom");
      spec.skew = skew;
      spec.atom_hi = a;
      spec.atom_lo = b;
      spec.analytic_sn2 = nd;
      spec.analytic_gamma_inf = std::max(a, b);
      break;
    }
  }
  return spec;
}

FamilySpec build_family(std::string_view family_id, std::size_t n, const ParamMap& params) {
  return build_family(parse_family_id(family_id), n, params);
}

void sample_path_into(const FamilySpec& spec, const StreamKey& key, Path& out,
                      std::optional<double> sn2) {
  const double norm = sn2 ? *sn2 : spec.analytic_sn2.value_or(0.0);
  if (!(norm > 0.0))
    throw PreconditionFailed("sample_path: family has no analytic s_n^2; pass sn2 explicitly");

  const std::size_t n = spec.n;
  out.x.resize(n);
  out.sigma2.resize(n);
  out.m3.resize(n);
  out.sn2 = norm;

  Stream rng(key);
  const double c3 = spec.innovation_abs_moment(3.0);
  const double hi_prob = spec.atom_lo / (spec.atom_hi + spec.atom_lo);
  double prev_z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = scale_at(spec, i, prev_z);
    double z = 0.0;
    switch (spec.id) {
      case FamilyId::Rademacher:
      case FamilyId::SignModulated:
        z = static_cast<double>(rng.sign());
        break;
      case FamilyId::Uniform:
        z = kSqrt3 * (2.0 * rng.uniform() - 1.0);
        break;
      case FamilyId::TwoPoint:
        z = rng.uniform() < hi_prob ? spec.atom_hi : -spec.atom_lo;
        break;
    }
    out.x[i] = b * z;
    out.sigma2[i] = b * b;
    out.m3[i] = b * b * b * c3;
    prev_z = z;
  }
}

Path sample_path(const FamilySpec& spec, const StreamKey& key, std::optional<double> sn2) {
  Path p;
  sample_path_into(spec, key, p, sn2);
  return p;
}

PathStats path_stats(const Path& path) {
  if (!(path.sn2 > 0.0)) throw InvalidArgument("path_stats: sn2 must be positive");
  PathStats st;
  double sum = 0.0, var = 0.0;
  for (double x : path.x) {
    const double ax = std::fabs(x);
    sum += x;
    st.max_abs_x = std::max(st.max_abs_x, ax);
    st.sum_abs3 += ax * ax * ax;
  }
  for (double s : path.sigma2) var += s;
  st.s_n_over_sn = sum / std::sqrt(path.sn2);
  st.vn2 = var / path.sn2;
  return st;
}

// ---------------------------------------------------------------------------
// Moment accumulation

void MomentAccumulator::Stat::add(double x, double weight) {
  w += weight;
  const double delta = x - mean;
  mean += delta * (weight / w);
  m2 += weight * delta * (x - mean);
}

void MomentAccumulator::Stat::merge(const Stat& o) {
  if (o.w == 0.0) return;
  if (w == 0.0) {
    *this = o;
    return;
  }
  const double total = w + o.w;
  const double delta = o.mean - mean;
  mean += delta * (o.w / total);
  m2 += o.m2 + delta * delta * (w * o.w / total);
  w = total;
}

double MomentAccumulator::Stat::se(bool exact) const {
  if (exact || w < 2.0) return 0.0;
  return std::sqrt(std::max(0.0, m2) / (w - 1.0) / w);
}

MomentAccumulator::MomentAccumulator(double p, double sn2) : p_(p), sn2_(sn2) {}

void MomentAccumulator::add(const Path& path, double weight) {
  double var = 0.0, max_abs = 0.0, abs3 = 0.0, abs2p = 0.0;
  for (std::size_t i = 0; i < path.x.size(); ++i) {
    const double ax = std::fabs(path.x[i]);
    var += path.sigma2[i];
    max_abs = std::max(max_abs, ax);
    abs3 += path.m3[i];
    abs2p += std::pow(ax, 2.0 * p_);
  }
  const double dev = std::fabs(var / sn2_ - 1.0);
  const double dev_p = std::pow(dev, p_);
  const double emax = std::pow(max_abs, 2.0 * p_);
  if (!std::isfinite(dev_p) || !std::isfinite(emax) || !std::isfinite(abs2p) ||
      !std::isfinite(abs3))
    throw NumericError("estimate_moments: moment of order 2p overflows double precision");

  sigma_sum_.add(var, weight);
  vdev_p_.add(dev_p, weight);
  vdev_1_.add(dev, weight);
  emax_.add(emax, weight);
  abs3_.add(abs3, weight);
  abs2p_.add(abs2p, weight);
  vdev_inf_ = std::max(vdev_inf_, dev);
  ++count_;
}

MomentAccumulator& MomentAccumulator::merge(const MomentAccumulator& o) {
  sigma_sum_.merge(o.sigma_sum_);
  vdev_p_.merge(o.vdev_p_);
  vdev_1_.merge(o.vdev_1_);
  emax_.merge(o.emax_);
  abs3_.merge(o.abs3_);
  abs2p_.merge(o.abs2p_);
  vdev_inf_ = std::max(vdev_inf_, o.vdev_inf_);
  count_ += o.count_;
  return *this;
}

MomentEstimates MomentAccumulator::finish(const FamilySpec& spec, bool sn2_analytic) const {
  MomentEstimates e;
  e.n = spec.n;
  e.p = p_;
  e.m = count_;
  e.sn2 = sn2_analytic ? sn2_ : sigma_sum_.mean;
  e.sn2_analytic = sn2_analytic;
  e.vdev_p = vdev_p_.mean;
  e.vdev_1 = vdev_1_.mean;
  e.vdev_inf = vdev_inf_;
  e.emax_2p = emax_.mean;
  e.sum_e_abs3 = abs3_.mean;
  e.sum_e_abs2p = abs2p_.mean;
  e.se.sn2 = sn2_analytic ? 0.0 : sigma_sum_.se(exact_);
  e.se.vdev_p = vdev_p_.se(exact_);
  e.se.vdev_1 = vdev_1_.se(exact_);
  e.se.emax_2p = emax_.se(exact_);
  e.se.sum_e_abs3 = abs3_.se(exact_);
  e.se.sum_e_abs2p = abs2p_.se(exact_);
  return e;
}

MomentEstimates estimate_moments(const FamilySpec& spec, double p, std::size_t m,
                                 std::uint64_t master_seed, unsigned workers) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("estimate_moments: p must be >= 1");
  if (m < 2) throw InvalidArgument("estimate_moments: m must be >= 2 for standard errors");

  const bool analytic = spec.analytic_sn2.has_value();
  double sn2 = analytic ? *spec.analytic_sn2 : 0.0;
  double sn2_se = 0.0;
  if (!analytic) {
    // Pilot pass over the same streams: s_n^2 = sum_i mean(sigma2[i]).
    auto parts = map_chunks(m, workers, [&](std::size_t begin, std::size_t end) {
      MomentAccumulator acc(p, 1.0);
      Path path;
      for (std::size_t r = begin; r < end; ++r) {
        sample_path_into(spec, {master_seed, r, Lane::Path}, path, 1.0);
        acc.add(path);
      }
      return acc;
    });
    auto total = tree_reduce(std::move(parts), [](MomentAccumulator a, MomentAccumulator b) {
      return std::move(a.merge(b));
    });
    const auto pilot = total.finish(spec, false);
    sn2 = pilot.sn2;
    sn2_se = pilot.se.sn2;
    if (!(sn2 > 0.0)) throw NumericError("estimate_moments: estimated s_n^2 is not positive");
  }

  auto parts = map_chunks(m, workers, [&](std::size_t begin, std::size_t end) {
    MomentAccumulator acc(p, sn2);
    Path path;
    for (std::size_t r = begin; r < end; ++r) {
      sample_path_into(spec, {master_seed, r, Lane::Path}, path, sn2);
      acc.add(path);
    }
    return acc;
  });
  auto total = tree_reduce(std::move(parts), [](MomentAccumulator a, MomentAccumulator b) {
    return std::move(a.merge(b));
  });
  auto est = total.finish(spec, true);
  est.sn2_analytic = analytic;
  est.se.sn2 = sn2_se;
  return est;
}

// ---------------------------------------------------------------------------
// Exact enumeration

namespace {

template <class Visit>
void enumerate_paths(const FamilySpec& spec, Visit&& visit) {
  if (!spec.finite_support())
    throw PreconditionFailed(std::string(to_string(spec.id)) +
                             ": exact enumeration needs a finite-support innovation");
  if (spec.n > kMaxEnumerationLength)
    throw InvalidArgument("exact enumeration limited to n <= 24");
  const auto atoms = innovation_atoms(spec);
  const double c3 = spec.innovation_abs_moment(3.0);
  const double norm = spec.analytic_sn2.value_or(0.0);
  if (!(norm > 0.0)) throw PreconditionFailed("exact enumeration needs an analytic s_n^2");

  Path path;
  path.x.resize(spec.n);
  path.sigma2.resize(spec.n);
  path.m3.resize(spec.n);
  path.sn2 = norm;

  // Depth-first over innovation sequences; weight is the product of atom probabilities.
  auto recurse = [&](auto&& self, std::size_t i, double prev_z, double weight) -> void {
    if (i == spec.n) {
      visit(static_cast<const Path&>(path), weight);
      return;
    }
    const double b = scale_at(spec, i, prev_z);
    for (const Atom& a : atoms) {
      path.x[i] = b * a.z;
      path.sigma2[i] = b * b;
      path.m3[i] = b * b * b * c3;
      self(self, i + 1, a.z, weight * a.prob);
    }
  };
  recurse(recurse, 0, 0.0, 1.0);
}

}  // namespace

MomentEstimates enumerate_moments(const FamilySpec& spec, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("enumerate_moments: p must be >= 1");
  MomentAccumulator acc(p, spec.analytic_sn2.value_or(0.0));
  acc.exact_ = true;
  enumerate_paths(spec, [&](const Path& path, double weight) { acc.add(path, weight); });
  return acc.finish(spec, true);
}

std::vector<WeightedOutcome> enumerate_normalized_sums(const FamilySpec& spec) {
  std::vector<WeightedOutcome> out;
  enumerate_paths(spec, [&](const Path& path, double weight) {
    double sum = 0.0;
    for (double x : path.x) sum += x;
    out.push_back({sum / std::sqrt(path.sn2), weight});
  });
  return out;
}

double check_conditional_ratio(const FamilySpec& spec, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw InvalidArgument("check_conditional_ratio: rho must be positive and finite");
  // E[|X|^{2+rho}|F] / E[X^2|F] = b^rho * E|Z|^{2+rho} (E Z^2 = 1).
  const double factor = std::pow(spec.innovation_abs_moment(2.0 + rho), 1.0 / rho);
  if (!std::isfinite(factor))
    throw PreconditionFailed("check_conditional_ratio: conditional moment of order 2+rho is not finite");
  double gamma = 0.0;
  for (double b : spec.reachable_scales()) gamma = std::max(gamma, b * factor);
  return gamma;
}

}  // namespace mclt
