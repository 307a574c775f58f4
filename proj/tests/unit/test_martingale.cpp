#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mclt/error.hpp"
#include "mclt/martingale.hpp"

namespace mclt {
namespace {

constexpr double kC3Uniform = 1.299038105676657970145584756129404275207;  // 3 sqrt3 / 4

TEST(BuildFamily, AnalyticFields) {
  auto r = build_family("rademacher", 10);
  EXPECT_EQ(*r.analytic_sn2, 10.0);
  EXPECT_EQ(*r.analytic_gamma_inf, 1.0);

  auto s = build_family("sign_modulated", 2, {{"delta", 0.5}});
  EXPECT_DOUBLE_EQ(*s.analytic_sn2, 2.25);
  EXPECT_DOUBLE_EQ(*s.analytic_gamma_inf, 1.5);

  auto u = build_family("uniform", 7);
  EXPECT_EQ(*u.analytic_sn2, 7.0);
  EXPECT_DOUBLE_EQ(*u.analytic_gamma_inf, std::sqrt(3.0));

  auto t = build_family("two_point", 5, {{"skew", 1.5}});
  EXPECT_EQ(*t.analytic_sn2, 5.0);
  EXPECT_NEAR(t.atom_hi * t.atom_lo, 1.0, 1e-15);
  EXPECT_NEAR(t.atom_hi - t.atom_lo, 1.5, 1e-14);  // skewness of the {a, -1/a} law
  EXPECT_DOUBLE_EQ(*t.analytic_gamma_inf, t.atom_hi);
}

TEST(BuildFamily, Errors) {
  EXPECT_THROW(build_family("sign_modulated", 3, {{"delta", 1.2}}), InvalidArgument);
  EXPECT_THROW(build_family("sign_modulated", 3, {{"delta", -0.1}}), InvalidArgument);
  EXPECT_THROW(build_family("sign_modulated", 3, {{"delta", 1.0}}), InvalidArgument);
  EXPECT_THROW(build_family("gaussian", 3), InvalidArgument);
  EXPECT_THROW(build_family("rademacher", 0), InvalidArgument);
  EXPECT_THROW(build_family("rademacher", 3, {{"delta", 0.1}}), InvalidArgument);
  EXPECT_THROW(build_family("two_point", 3, {{"skew", INFINITY}}), InvalidArgument);
}

TEST(BuildFamily, TwoPointHasMeanZeroUnitVariance) {
  for (double skew : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
    auto t = build_family("two_point", 1, {{"skew", skew}});
    const double a = t.atom_hi, b = t.atom_lo;
    const double qa = b / (a + b), qb = a / (a + b);
    EXPECT_NEAR(qa * a - qb * b, 0.0, 1e-14);
    EXPECT_NEAR(qa * a * a + qb * b * b, 1.0, 1e-13);
    EXPECT_NEAR(t.innovation_abs_moment(2.0), 1.0, 1e-13);
  }
}

TEST(SamplePath, RademacherExample) {
  auto spec = build_family("rademacher", 3);
  auto p = sample_path(spec, {1, 0});
  ASSERT_EQ(p.x.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(p.x[i] == 1.0 || p.x[i] == -1.0);
    EXPECT_EQ(p.sigma2[i], 1.0);
    EXPECT_EQ(p.m3[i], 1.0);
  }
  EXPECT_EQ(p.sn2, 3.0);
}

TEST(SamplePath, SignModulatedConditionalVariances) {
  auto spec = build_family("sign_modulated", 50, {{"delta", 0.5}});
  for (std::uint64_t r = 0; r < 200; ++r) {
    auto p = sample_path(spec, {9, r});
    EXPECT_EQ(p.sigma2[0], 1.0);
    for (std::size_t i = 1; i < p.x.size(); ++i) {
      EXPECT_TRUE(p.sigma2[i] == 0.25 || p.sigma2[i] == 2.25);
      // b_i = 1 + delta * sign(x_{i-1}) and |x_i| = b_i.
      const double b = 1.0 + 0.5 * (p.x[i - 1] > 0 ? 1.0 : -1.0);
      EXPECT_EQ(p.sigma2[i], b * b);
      EXPECT_EQ(std::fabs(p.x[i]), b);
      EXPECT_DOUBLE_EQ(p.m3[i], b * b * b);
    }
  }
}

TEST(SamplePath, Deterministic) {
  for (const char* fam : {"rademacher", "sign_modulated", "uniform", "two_point"}) {
    auto spec = build_family(fam, 64, std::string(fam) == "sign_modulated" ? ParamMap{{"delta", 0.3}}
                                                                          : ParamMap{});
    auto a = sample_path(spec, {77, 5});
    auto b = sample_path(spec, {77, 5});
    auto c = sample_path(spec, {77, 6});
    EXPECT_EQ(a.x, b.x) << fam;
    EXPECT_EQ(a.sigma2, b.sigma2) << fam;
    EXPECT_NE(a.x, c.x) << fam;
  }
}

TEST(SamplePath, BoundedByGamma) {
  for (const char* fam : {"rademacher", "uniform", "two_point"}) {
    auto spec = build_family(fam, 100);
    for (std::uint64_t r = 0; r < 100; ++r) {
      auto p = sample_path(spec, {1, r});
      for (double x : p.x) ASSERT_LE(std::fabs(x), *spec.analytic_gamma_inf) << fam;
    }
  }
}

TEST(SamplePath, MissingSn2NeedsOverride) {
  auto spec = build_family("uniform", 4);
  spec.analytic_sn2.reset();
  EXPECT_THROW(sample_path(spec, {1, 0}), PreconditionFailed);
  EXPECT_EQ(sample_path(spec, {1, 0}, 4.0).sn2, 4.0);
}

TEST(PathStats, Examples) {
  Path p{{1.0, -1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, 3.0};
  auto st = path_stats(p);
  EXPECT_DOUBLE_EQ(st.s_n_over_sn, 1.0 / std::sqrt(3.0));
  EXPECT_EQ(st.vn2, 1.0);
  EXPECT_EQ(st.max_abs_x, 1.0);
  EXPECT_EQ(st.sum_abs3, 3.0);

  Path zero{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, 1.0};
  auto z = path_stats(zero);
  EXPECT_EQ(z.s_n_over_sn, 0.0);
  EXPECT_EQ(z.vn2, 0.0);

  // sign_modulated, delta = 0.5, eps = (+1, +1): x = (1, 1.5), sigma2 = (1, 2.25).
  Path sm{{1.0, 1.5}, {1.0, 2.25}, {1.0, 3.375}, 2.25};
  EXPECT_NEAR(path_stats(sm).vn2, 3.25 / 2.25, 1e-15);

  Path bad{{1.0}, {1.0}, {1.0}, 0.0};
  EXPECT_THROW(path_stats(bad), InvalidArgument);
}

TEST(PathStats, InvariantsOnSampledPaths) {
  auto spec = build_family("sign_modulated", 40, {{"delta", 0.8}});
  for (std::uint64_t r = 0; r < 500; ++r) {
    auto st = path_stats(sample_path(spec, {2, r}));
    EXPECT_GE(st.vn2, 0.0);
    EXPECT_GE(st.max_abs_x, 0.0);
    EXPECT_GE(st.sum_abs3, st.max_abs_x * st.max_abs_x * st.max_abs_x);
  }
}

TEST(PathStats, UnitVarianceFamiliesHaveVn2One) {
  for (const char* fam : {"rademacher", "uniform"}) {
    for (std::size_t n : {1u, 17u, 1000u}) {
      auto spec = build_family(fam, n);
      for (std::uint64_t r = 0; r < 50; ++r)
        ASSERT_NEAR(path_stats(sample_path(spec, {4, r})).vn2, 1.0, 1e-12 * n);
    }
  }
}

// --- statistical properties at m = 1e5 ------------------------------------

struct FamilyCase {
  const char* name;
  ParamMap params;
};

std::vector<FamilyCase> all_families() {
  return {{"rademacher", {}},
          {"sign_modulated", {{"delta", 0.5}}},
          {"uniform", {}},
          {"two_point", {{"skew", 1.0}}}};
}

TEST(Properties, MartingaleAndConditionalVarianceConsistency) {
  const std::size_t n = 8, m = 100000;
  for (const auto& fc : all_families()) {
    auto spec = build_family(fc.name, n, fc.params);
    std::vector<double> sx(n), sxx(n), sx2(n), sx4(n), ss(n), ss2(n), sd(n), sd2(n);
    Path p;
    for (std::size_t r = 0; r < m; ++r) {
      sample_path_into(spec, {11, r}, p);
      for (std::size_t i = 0; i < n; ++i) {
        const double x2 = p.x[i] * p.x[i];
        sx[i] += p.x[i];
        sxx[i] += x2;
        const double d = x2 - p.sigma2[i];
        sd[i] += d;
        sd2[i] += d * d;
      }
    }
    const double md = static_cast<double>(m);
    double total_var = 0.0, total_var_se2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mean = sx[i] / md;
      const double sdv = std::sqrt(sxx[i] / md - mean * mean);
      EXPECT_LT(std::fabs(mean), 4.0 * sdv / std::sqrt(md)) << fc.name << " i=" << i;

      const double dmean = sd[i] / md;
      const double dse = std::sqrt(std::max(0.0, sd2[i] / md - dmean * dmean) / md);
      if (dse == 0.0)
        EXPECT_EQ(dmean, 0.0) << fc.name;
      else
        EXPECT_LT(std::fabs(dmean), 4.0 * dse) << fc.name << " i=" << i;

      const double m2 = sxx[i] / md;
      total_var += m2;
      total_var_se2 += 0.0;
    }
    (void)total_var_se2;
    // Analytic s_n^2 agreement (per-path sum of x_i^2 as the estimator).
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      sample_path_into(spec, {11, r}, p);
      double q = 0.0;
      for (double x : p.x) q += x * x;
      acc += q;
      acc2 += q * q;
    }
    const double mean_q = acc / md;
    const double se_q = std::sqrt(std::max(0.0, acc2 / md - mean_q * mean_q) / md);
    EXPECT_LE(std::fabs(mean_q - *spec.analytic_sn2), std::max(4.0 * se_q, 1e-12)) << fc.name;
  }
}

TEST(Properties, ReplicationStreamsLookIndependent) {
  auto spec = build_family("sign_modulated", 16, {{"delta", 0.5}});
  const std::size_t m = 100000;
  std::vector<double> s(m);
  for (std::size_t r = 0; r < m; ++r) s[r] = path_stats(sample_path(spec, {5, r})).s_n_over_sn;
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= m;
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    den += (s[r] - mean) * (s[r] - mean);
    if (r + 1 < m) num += (s[r] - mean) * (s[r + 1] - mean);
  }
  EXPECT_LT(std::fabs(num / den), 0.01);
}

// --- estimate_moments -------------------------------------------------------

TEST(EstimateMoments, RademacherExact) {
  for (std::size_t n : {1u, 10u, 64u}) {
    auto e = estimate_moments(build_family("rademacher", n), 1.5, 5000, 3);
    EXPECT_EQ(e.vdev_p, 0.0);
    EXPECT_EQ(e.vdev_inf, 0.0);
    EXPECT_EQ(e.emax_2p, 1.0);
    EXPECT_EQ(e.sum_e_abs3, static_cast<double>(n));
    EXPECT_EQ(e.se.sum_e_abs3, 0.0);
    EXPECT_EQ(e.se.vdev_p, 0.0);
    EXPECT_TRUE(e.sn2_analytic);
  }
}

TEST(EstimateMoments, UniformThirdMoment) {
  auto e = estimate_moments(build_family("uniform", 10), 1.5, 20000, 8);
  // Conditional moments are constant, so this is exact.
  EXPECT_NEAR(e.sum_e_abs3, 10.0 * kC3Uniform, 1e-12);
  EXPECT_LE(std::fabs(e.sum_e_abs3 - 12.990381056766580), std::max(3.0 * e.se.sum_e_abs3, 1e-12));
  EXPECT_EQ(e.vdev_p, 0.0);
  // E|X|^3 pathwise has E = c3; with p = 3/2 the 2p moment is the 3rd moment.
  EXPECT_NEAR(e.sum_e_abs2p, 10.0 * kC3Uniform, 4.0 * e.se.sum_e_abs2p);
}

TEST(EstimateMoments, SignModulatedExhaustiveN2) {
  // eps_1 = +1: V^2 = 3.25/2.25; eps_1 = -1: V^2 = 1.25/2.25 (each w.p. 1/2).
  auto spec = build_family("sign_modulated", 2, {{"delta", 0.5}});
  const double expected = 0.5 * std::fabs(3.25 / 2.25 - 1.0) + 0.5 * std::fabs(1.25 / 2.25 - 1.0);
  EXPECT_NEAR(expected, 0.4444444444444444, 1e-15);
  auto exact = enumerate_moments(spec, 1.0);
  EXPECT_NEAR(exact.vdev_p, expected, 1e-15);
  EXPECT_NEAR(exact.vdev_1, expected, 1e-15);
  EXPECT_EQ(exact.se.vdev_p, 0.0);

  auto mc = estimate_moments(spec, 1.0, 100000, 1);
  EXPECT_NEAR(mc.vdev_p, expected, 4.0 * mc.se.vdev_p);
}

TEST(EstimateMoments, Invariants) {
  for (const auto& fc : all_families()) {
    for (double p : {1.0, 1.5, 2.0}) {
      auto e = estimate_moments(build_family(fc.name, 20, fc.params), p, 4000, 12);
      EXPECT_GE(e.vdev_p, 0.0);
      EXPECT_GE(e.vdev_inf, 0.0);
      EXPECT_GE(e.sum_e_abs3, 0.0);
      EXPECT_LE(e.emax_2p, e.sum_e_abs2p) << fc.name << " p=" << p;
      EXPECT_EQ(e.m, 4000u);
    }
  }
}

TEST(EstimateMoments, WorkerCountDoesNotChangeBits) {
  auto spec = build_family("sign_modulated", 30, {{"delta", 0.4}});
  auto a = estimate_moments(spec, 1.5, 9000, 21, 1);
  auto b = estimate_moments(spec, 1.5, 9000, 21, 4);
  EXPECT_EQ(a.vdev_p, b.vdev_p);
  EXPECT_EQ(a.emax_2p, b.emax_2p);
  EXPECT_EQ(a.sum_e_abs3, b.sum_e_abs3);
  EXPECT_EQ(a.se.vdev_p, b.se.vdev_p);
}

TEST(EstimateMoments, EstimatesSn2WhenNotAnalytic) {
  auto spec = build_family("sign_modulated", 12, {{"delta", 0.5}});
  const double truth = *spec.analytic_sn2;
  spec.analytic_sn2.reset();
  auto e = estimate_moments(spec, 1.0, 50000, 2);
  EXPECT_FALSE(e.sn2_analytic);
  EXPECT_GT(e.se.sn2, 0.0);
  EXPECT_NEAR(e.sn2, truth, 4.0 * e.se.sn2);
}

TEST(EstimateMoments, Errors) {
  auto spec = build_family("uniform", 4);
  EXPECT_THROW(estimate_moments(spec, 1.5, 1, 0), InvalidArgument);
  EXPECT_THROW(estimate_moments(spec, 0.5, 100, 0), InvalidArgument);
  // |X|^{2p} overflows for huge p on values above one.
  EXPECT_THROW(estimate_moments(spec, 1000.0, 100, 0), NumericError);
}

TEST(EnumerateMoments, MatchesHandEnumerationN3) {
  // Independent brute force over the 8 sign patterns.
  const double d = 0.5, sn2 = 1.0 + 2.0 * (1.0 + d * d);
  double vdev = 0.0, emax = 0.0, abs3 = 0.0;
  for (int mask = 0; mask < 8; ++mask) {
    double e[3];
    for (int i = 0; i < 3; ++i) e[i] = (mask >> i) & 1 ? 1.0 : -1.0;
    const double b2 = 1.0 + d * e[0], b3 = 1.0 + d * e[1];
    const double v = (1.0 + b2 * b2 + b3 * b3) / sn2;
    vdev += std::fabs(v - 1.0) / 8.0;
    emax += std::pow(std::max({1.0, b2, b3}), 2.0) / 8.0;
    abs3 += (1.0 + b2 * b2 * b2 + b3 * b3 * b3) / 8.0;
  }
  auto e = enumerate_moments(build_family("sign_modulated", 3, {{"delta", d}}), 1.0);
  EXPECT_NEAR(e.vdev_p, vdev, 1e-15);
  EXPECT_NEAR(e.emax_2p, emax, 1e-15);
  EXPECT_NEAR(e.sum_e_abs3, abs3, 1e-15);
  EXPECT_NEAR(e.sum_e_abs2p, 1.0 + 2.0 * (1.0 + d * d), 1e-15);
}

TEST(EnumerateMoments, RejectsContinuousAndLongFamilies) {
  EXPECT_THROW(enumerate_moments(build_family("uniform", 3), 1.0), PreconditionFailed);
  EXPECT_THROW(enumerate_moments(build_family("rademacher", 30), 1.0), InvalidArgument);
}

TEST(EnumerateSums, TwoPointWeightsSumToOne) {
  auto out = enumerate_normalized_sums(build_family("two_point", 6, {{"skew", 2.0}}));
  ASSERT_EQ(out.size(), 64u);
  double w = 0.0, mean = 0.0, var = 0.0;
  for (const auto& o : out) {
    w += o.weight;
    mean += o.weight * o.value;
    var += o.weight * o.value * o.value;
  }
  EXPECT_NEAR(w, 1.0, 1e-14);
  EXPECT_NEAR(mean, 0.0, 1e-14);
  EXPECT_NEAR(var, 1.0, 1e-13);
}

TEST(ConditionalRatio, Examples) {
  EXPECT_DOUBLE_EQ(check_conditional_ratio(build_family("rademacher", 5), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(check_conditional_ratio(build_family("sign_modulated", 5, {{"delta", 0.5}}), 1.0), 1.5);
  EXPECT_NEAR(check_conditional_ratio(build_family("uniform", 5), 1.0), kC3Uniform, 1e-15);
  // n = 1 never reaches the modulated scales.
  EXPECT_DOUBLE_EQ(check_conditional_ratio(build_family("sign_modulated", 1, {{"delta", 0.5}}), 1.0), 1.0);
  EXPECT_THROW(check_conditional_ratio(build_family("uniform", 5), 0.0), InvalidArgument);
}

TEST(ConditionalRatio, BoundHoldsForEveryState) {
  // gamma^rho * E[X^2|F] >= E[|X|^{2+rho}|F], with equality at the worst state.
  for (double rho : {0.5, 1.0, 2.0}) {
    auto spec = build_family("two_point", 3, {{"skew", 1.3}});
    const double g = check_conditional_ratio(spec, rho);
    const double lhs = spec.innovation_abs_moment(2.0 + rho);
    EXPECT_NEAR(std::pow(g, rho), lhs, 1e-12 * lhs);
  }
}

}  // namespace
}  // namespace mclt
