#include "mclt/distances.hpp"

#include <algorithm>
#include <cmath>

#include "mclt/error.hpp"
#include "mclt/normal.hpp"

namespace mclt {

namespace {

// Integral over [a, b] of |level - Phi(x)|, where upper = 1 - level is passed
// separately so that levels close to one keep their precision.
double flat_segment(double a, double b, double level, double upper) {
  if (!(b > a)) return 0.0;
  if (level > 0.5) {
    // |level - Phi(x)| = |upper - Phi(-x)|; reflect onto [-b, -a].
    return flat_segment(-b, -a, upper, level);
  }
  const auto I = normal::antiderivative;
  if (level <= 0.0) return std::max(0.0, I(b) - I(a));
  const double q = normal::quantile(level);
  double out;
  if (q <= a) {
    out = (I(b) - I(a)) - level * (b - a);
  } else if (q >= b) {
    out = level * (b - a) - (I(b) - I(a));
  } else {
    const double Iq = I(q);
    out = std::max(0.0, level * (q - a) - (Iq - I(a))) +
          std::max(0.0, (I(b) - Iq) - level * (b - q));
  }
  return std::max(0.0, out);
}

// values[j] strictly increasing; below[j] = F just below values[j+1] (i.e. the
// level on (values[j], values[j+1])), above[j] = 1 - below[j].
double integrate_steps(std::span<const double> values, std::span<const double> below,
                       std::span<const double> above) {
  const std::size_t k = values.size();
  double total = normal::antiderivative(values.front());     // left tail, F = 0
  total += normal::antiderivative(-values.back());            // right tail, F = 1
  for (std::size_t j = 0; j + 1 < k; ++j)
    total += flat_segment(values[j], values[j + 1], below[j], above[j]);
  return total;
}

double kolmogorov_steps(std::span<const double> values, std::span<const double> below,
                        std::span<const double> above) {
  // At values[j]: F jumps from (j == 0 ? 0 : below[j-1]) to below[j] (1 at the end).
  double d = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double phi = normal::cdf(values[j]);
    const double before = j == 0 ? 0.0 : below[j - 1];
    const double after_upper = j + 1 == values.size() ? 0.0 : above[j];
    d = std::max(d, std::fabs(phi - before));
    d = std::max(d, std::fabs((1.0 - phi) - after_upper));
  }
  return std::min(1.0, d);
}

struct Steps {
  std::vector<double> values, below, above;
};

Steps law_steps(const DiscreteLaw& law) {
  const auto atoms = law.atoms();
  const std::size_t k = atoms.size();
  Steps s;
  s.values.resize(k);
  s.below.resize(k);
  s.above.resize(k);
  double cum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    s.values[j] = atoms[j].value;
    cum += atoms[j].prob;
    s.below[j] = cum;
  }
  double tail = 0.0;
  for (std::size_t j = k; j-- > 0;) {
    s.above[j] = tail;
    tail += atoms[j].prob;
  }
  return s;
}

Steps sample_steps(std::span<const double> samples) {
  if (samples.empty()) throw InvalidArgument("empirical distance: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double x : sorted)
    if (!std::isfinite(x)) throw InvalidArgument("empirical distance: non-finite sample");
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  Steps s;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    s.values.push_back(sorted[i]);
    s.below.push_back(static_cast<double>(j) / m);
    s.above.push_back(static_cast<double>(sorted.size() - j) / m);
    i = j;
  }
  return s;
}

}  // namespace

DiscreteLaw::DiscreteLaw(std::vector<LawAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw InvalidArgument("DiscreteLaw: empty atom list");
  double total = 0.0;
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    const auto& a = atoms_[j];
    if (!std::isfinite(a.value)) throw InvalidArgument("DiscreteLaw: non-finite atom");
    if (!(a.prob > 0.0)) throw InvalidArgument("DiscreteLaw: probabilities must be positive");
    if (j > 0 && !(atoms_[j - 1].value < a.value))
      throw InvalidArgument("DiscreteLaw: atoms must be strictly increasing");
    total += a.prob;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw InvalidArgument("DiscreteLaw: probabilities must sum to 1");
}

DiscreteLaw DiscreteLaw::from_outcomes(std::vector<WeightedOutcome> outcomes) {
  std::sort(outcomes.begin(), outcomes.end(),
            [](const auto& l, const auto& r) { return l.value < r.value; });
  std::vector<LawAtom> atoms;
  for (const auto& o : outcomes) {
    if (!atoms.empty() && atoms.back().value == o.value)
      atoms.back().prob += o.weight;
    else
      atoms.push_back({o.value, o.weight});
  }
  return DiscreteLaw(std::move(atoms));
}

DiscreteLaw DiscreteLaw::from_samples(std::span<const double> samples) {
  const Steps s = sample_steps(samples);
  const double m = static_cast<double>(samples.size());
  std::vector<LawAtom> atoms(s.values.size());
  double prev = 0.0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const double count = std::round(s.below[j] * m);
    atoms[j] = {s.values[j], (count - prev) / m};
    prev = count;
  }
  return DiscreteLaw(std::move(atoms));
}

double w1_discrete_vs_normal(const DiscreteLaw& law) {
  const Steps s = law_steps(law);
  return integrate_steps(s.values, s.below, s.above);
}

double kolmogorov_discrete_vs_normal(const DiscreteLaw& law) {
  const Steps s = law_steps(law);
  return kolmogorov_steps(s.values, s.below, s.above);
}

double kolmogorov_empirical_vs_normal(std::span<const double> samples) {
  const Steps s = sample_steps(samples);
  return kolmogorov_steps(s.values, s.below, s.above);
}

DistanceReport w1_empirical_vs_normal(std::span<const double> samples) {
  const Steps s = sample_steps(samples);
  DistanceReport rep;
  rep.m = samples.size();
  rep.w1 = integrate_steps(s.values, s.below, s.above);
  rep.kolmogorov = kolmogorov_steps(s.values, s.below, s.above);

  if (rep.m >= kMinSamplesForSe) {
    double batch_w1[kW1Batches];
    double mean = 0.0;
    for (std::size_t b = 0; b < kW1Batches; ++b) {
      const std::size_t lo = rep.m * b / kW1Batches;
      const std::size_t hi = rep.m * (b + 1) / kW1Batches;
      const Steps bs = sample_steps(samples.subspan(lo, hi - lo));
      batch_w1[b] = integrate_steps(bs.values, bs.below, bs.above);
      mean += batch_w1[b];
    }
    mean /= static_cast<double>(kW1Batches);
    double ss = 0.0;
    for (double v : batch_w1) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(kW1Batches - 1));
    rep.w1_se = sd / std::sqrt(static_cast<double>(kW1Batches));
  }
  return rep;
}

}  // namespace mclt
