#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "mclt/mclt.h"

namespace {

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STRNE(mclt_version(), "");
  EXPECT_STREQ(mclt_status_name(MCLT_OK), "ok");
  EXPECT_STRNE(mclt_status_name(MCLT_ERR_PARSE), mclt_status_name(MCLT_ERR_IO));
}

TEST(CApi, NormalPrimitives) {
  double v = 0.0;
  ASSERT_EQ(mclt_normal_cdf(1.0, &v), MCLT_OK);
  EXPECT_NEAR(v, 0.8413447460685429, 1e-12);
  ASSERT_EQ(mclt_normal_antiderivative(1.0, &v), MCLT_OK);
  EXPECT_NEAR(v, 1.0833154705876863, 1e-12);
  ASSERT_EQ(mclt_normal_quantile(0.975, &v), MCLT_OK);
  EXPECT_NEAR(v, 1.959963984540054, 1e-12);

  EXPECT_EQ(mclt_normal_quantile(0.0, &v), MCLT_ERR_INVALID_ARGUMENT);
  EXPECT_STRNE(mclt_last_error(), "");
  EXPECT_EQ(mclt_normal_cdf(NAN, &v), MCLT_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(mclt_normal_cdf(0.0, nullptr), MCLT_ERR_INVALID_ARGUMENT);
  ASSERT_EQ(mclt_normal_cdf(0.0, &v), MCLT_OK);
  EXPECT_STREQ(mclt_last_error(), "");
}

TEST(CApi, FamiliesAndPaths) {
  const char* names[] = {"delta"};
  const double values[] = {0.5};
  mclt_family* fam = nullptr;
  ASSERT_EQ(mclt_family_create("sign_modulated", 3, names, values, 1, &fam), MCLT_OK);
  double sn2 = 0.0, gamma = 0.0, ratio = 0.0;
  ASSERT_EQ(mclt_family_sn2(fam, &sn2), MCLT_OK);
  EXPECT_DOUBLE_EQ(sn2, 3.5);
  ASSERT_EQ(mclt_family_gamma_inf(fam, &gamma), MCLT_OK);
  EXPECT_DOUBLE_EQ(gamma, 1.5);
  ASSERT_EQ(mclt_family_conditional_ratio(fam, 1.0, &ratio), MCLT_OK);
  EXPECT_DOUBLE_EQ(ratio, 1.5);

  mclt_path* a = nullptr;
  mclt_path* b = nullptr;
  ASSERT_EQ(mclt_path_sample(fam, 4, 2, &a), MCLT_OK);
  ASSERT_EQ(mclt_path_sample(fam, 4, 2, &b), MCLT_OK);
  ASSERT_EQ(mclt_path_length(a), 3u);
  std::vector<double> xa(3), xb(3), s2(3);
  ASSERT_EQ(mclt_path_copy(a, xa.data(), s2.data(), nullptr), MCLT_OK);
  ASSERT_EQ(mclt_path_copy(b, xb.data(), nullptr, nullptr), MCLT_OK);
  EXPECT_EQ(xa, xb);
  EXPECT_EQ(s2[0], 1.0);

  double s = 0, vn2 = 0, mx = 0, a3 = 0;
  ASSERT_EQ(mclt_path_stats(a, &s, &vn2, &mx, &a3), MCLT_OK);
  EXPECT_NEAR(vn2, (s2[0] + s2[1] + s2[2]) / 3.5, 1e-15);
  EXPECT_NEAR(s, (xa[0] + xa[1] + xa[2]) / std::sqrt(3.5), 1e-15);

  mclt_path_free(a);
  mclt_path_free(b);
  mclt_family_free(fam);
  mclt_family_free(nullptr);
  mclt_path_free(nullptr);
}

TEST(CApi, FamilyErrors) {
  mclt_family* fam = nullptr;
  const char* names[] = {"delta"};
  const double bad[] = {1.2};
  EXPECT_EQ(mclt_family_create("sign_modulated", 3, names, bad, 1, &fam), MCLT_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(fam, nullptr);
  EXPECT_EQ(mclt_family_create("nope", 3, nullptr, nullptr, 0, &fam), MCLT_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(mclt_family_create(nullptr, 3, nullptr, nullptr, 0, &fam), MCLT_ERR_INVALID_ARGUMENT);

  const double good[] = {0.5};
  ASSERT_EQ(mclt_family_create("sign_modulated", 8, names, good, 1, &fam), MCLT_OK);
  double out = 0.0;
  EXPECT_EQ(mclt_roellin_kernel(fam, 0.5, 100, 1, 1, &out), MCLT_ERR_PRECONDITION);
  mclt_family_free(fam);
}

TEST(CApi, DistancesAndKernels) {
  std::vector<double> samples(1000);
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = i % 2 ? 1.0 : -1.0;
  double w1 = 0, se = 0, k = 0;
  ASSERT_EQ(mclt_w1_empirical(samples.data(), samples.size(), &w1, &se, &k), MCLT_OK);
  EXPECT_NEAR(w1, 0.5353773215478798, 1e-12);
  EXPECT_GE(se, 0.0);
  ASSERT_EQ(mclt_w1_empirical(samples.data(), 10, &w1, &se, nullptr), MCLT_OK);
  EXPECT_LT(se, 0.0);

  const double vals[] = {-1.0, 1.0}, probs[] = {0.5, 0.5};
  ASSERT_EQ(mclt_w1_discrete(vals, probs, 2, &w1), MCLT_OK);
  EXPECT_NEAR(w1, 0.5353773215478798, 1e-12);
  const double unsorted[] = {1.0, -1.0};
  EXPECT_EQ(mclt_w1_discrete(unsorted, probs, 2, &w1), MCLT_ERR_INVALID_ARGUMENT);

  double v = 0;
  ASSERT_EQ(mclt_lemma_kernel(8.0, 8.0, 0, 0.0, &v), MCLT_OK);
  EXPECT_NEAR(v, 3.5355339059327376, 1e-12);
  ASSERT_EQ(mclt_lemma_kernel(8.0, 8.0, 1, 0.0, &v), MCLT_OK);
  EXPECT_NEAR(v, 3.0594733539832584, 1e-12);
  EXPECT_EQ(mclt_lemma_kernel(8.0, 8.0, 2, 0.0, &v), MCLT_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(mclt_lemma_kernel(8.0, 8.0, 7, 1.0, &v), MCLT_ERR_INVALID_ARGUMENT);

  mclt_family* fam = nullptr;
  ASSERT_EQ(mclt_family_create("rademacher", 4, nullptr, nullptr, 0, &fam), MCLT_OK);
  ASSERT_EQ(mclt_roellin_kernel(fam, 0.0, 10, 1, 1, &v), MCLT_OK);
  EXPECT_NEAR(v, 3.125, 1e-14);
  mclt_family_free(fam);
}

TEST(CApi, ConfigRunAndWrite) {
  mclt_config* cfg = nullptr;
  ASSERT_EQ(mclt_config_parse("families = rademacher, uniform\nn_grid = 8, 16, 32\nm = 1000\n", &cfg), MCLT_OK);
  EXPECT_STREQ(mclt_config_out_dir(cfg), "");
  ASSERT_EQ(mclt_config_set_seed(cfg, 11), MCLT_OK);
  ASSERT_EQ(mclt_config_set_workers(cfg, 2), MCLT_OK);
  EXPECT_EQ(mclt_config_set_workers(cfg, 0), MCLT_ERR_INVALID_ARGUMENT);

  mclt_report* report = nullptr;
  ASSERT_EQ(mclt_run(cfg, &report), MCLT_OK);
  EXPECT_EQ(mclt_report_row_count(report), 6u);
  const std::size_t checks = mclt_report_check_count(report);
  EXPECT_GT(checks, 0u);
  for (std::size_t i = 0; i < checks; ++i) {
    const char *name = nullptr, *family = nullptr, *kind = nullptr;
    int pass = 0;
    ASSERT_EQ(mclt_report_check(report, i, &name, &family, &kind, &pass), MCLT_OK);
    EXPECT_NE(std::string(name), "");
    EXPECT_NE(std::string(kind), "");
  }
  EXPECT_EQ(mclt_report_check(report, checks, nullptr, nullptr, nullptr, nullptr), MCLT_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(mclt_report_all_pass(report), 1);

  const auto dir = std::filesystem::temp_directory_path() / "mclt_capi_write";
  std::filesystem::remove_all(dir);
  ASSERT_EQ(mclt_report_write(report, dir.string().c_str()), MCLT_OK);
  EXPECT_TRUE(std::filesystem::exists(dir / "results.csv"));
  std::filesystem::remove_all(dir);

  mclt_report_free(report);
  mclt_config_free(cfg);
}

TEST(CApi, ConfigErrors) {
  mclt_config* cfg = nullptr;
  EXPECT_EQ(mclt_config_parse("families = rademacher\nn_grid = 8\nm = 1000\nbogus = 1\n", &cfg), MCLT_ERR_PARSE);
  EXPECT_NE(std::string(mclt_last_error()).find("bogus"), std::string::npos);
  EXPECT_EQ(mclt_config_load("/nonexistent/file.cfg", &cfg), MCLT_ERR_IO);
  EXPECT_EQ(cfg, nullptr);
}

}  // namespace
