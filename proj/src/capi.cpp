#include "mclt/mclt.h"

#include <cmath>
#include <new>
#include <string>
#include <vector>

#include "mclt/bounds.hpp"
#include "mclt/distances.hpp"
#include "mclt/error.hpp"
#include "mclt/experiment.hpp"
#include "mclt/martingale.hpp"
#include "mclt/normal.hpp"

struct mclt_family {
  mclt::FamilySpec spec;
};

struct mclt_path {
  mclt::Path path;
};

struct mclt_config {
  mclt::ExperimentConfig config;
};

struct mclt_report {
  mclt::ExperimentReport report;
  std::vector<std::string> kinds;
};

namespace {

thread_local std::string g_last_error;

mclt_status to_status(mclt::ErrorCode code) {
  switch (code) {
    case mclt::ErrorCode::InvalidArgument: return MCLT_ERR_INVALID_ARGUMENT;
    case mclt::ErrorCode::Precondition: return MCLT_ERR_PRECONDITION;
    case mclt::ErrorCode::Numeric: return MCLT_ERR_NUMERIC;
    case mclt::ErrorCode::Parse: return MCLT_ERR_PARSE;
    case mclt::ErrorCode::Io: return MCLT_ERR_IO;
    case mclt::ErrorCode::Internal: return MCLT_ERR_INTERNAL;
  }
  return MCLT_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes and the thread's last error.
template <class Fn>
mclt_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return MCLT_OK;
  } catch (const mclt::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return MCLT_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw mclt::InvalidArgument(std::string(what) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* mclt_version(void) { return "1.0.0"; }

const char* mclt_last_error(void) { return g_last_error.c_str(); }

const char* mclt_status_name(mclt_status status) {
  switch (status) {
    case MCLT_OK: return "ok";
    case MCLT_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case MCLT_ERR_PRECONDITION: return "precondition";
    case MCLT_ERR_NUMERIC: return "numeric";
    case MCLT_ERR_PARSE: return "parse";
    case MCLT_ERR_IO: return "io";
    case MCLT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

mclt_status mclt_normal_cdf(double x, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = mclt::normal::cdf(x);
  });
}

mclt_status mclt_normal_antiderivative(double x, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = mclt::normal::antiderivative(x);
  });
}

mclt_status mclt_normal_quantile(double u, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = mclt::normal::quantile(u);
  });
}

mclt_status mclt_family_create(const char* family_id, size_t n, const char* const* param_names,
                               const double* param_values, size_t n_params, mclt_family** out) {
  return guarded([&] {
    require(family_id, "family_id");
    require(out, "out");
    if (n_params > 0) {
      require(param_names, "param_names");
      require(param_values, "param_values");
    }
    mclt::ParamMap params;
    for (size_t i = 0; i < n_params; ++i) {
      require(param_names[i], "param name");
      params[param_names[i]] = param_values[i];
    }
    *out = new mclt_family{mclt::build_family(family_id, n, params)};
  });
}

void mclt_family_free(mclt_family* family) { delete family; }

mclt_status mclt_family_sn2(const mclt_family* family, double* out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    if (!family->spec.analytic_sn2) throw mclt::PreconditionFailed("family has no analytic s_n^2");
    *out = *family->spec.analytic_sn2;
  });
}

mclt_status mclt_family_gamma_inf(const mclt_family* family, double* out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    if (!family->spec.analytic_gamma_inf) throw mclt::PreconditionFailed("family has no sup bound");
    *out = *family->spec.analytic_gamma_inf;
  });
}

mclt_status mclt_family_conditional_ratio(const mclt_family* family, double rho, double* gamma_out) {
  return guarded([&] {
    require(family, "family");
    require(gamma_out, "gamma_out");
    *gamma_out = mclt::check_conditional_ratio(family->spec, rho);
  });
}

mclt_status mclt_path_sample(const mclt_family* family, uint64_t seed, uint64_t index, mclt_path** out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    *out = new mclt_path{mclt::sample_path(family->spec, {seed, index, mclt::Lane::Path})};
  });
}

void mclt_path_free(mclt_path* path) { delete path; }

size_t mclt_path_length(const mclt_path* path) { return path ? path->path.x.size() : 0; }

mclt_status mclt_path_copy(const mclt_path* path, double* x, double* sigma2, double* m3) {
  return guarded([&] {
    require(path, "path");
    const auto& p = path->path;
    for (size_t i = 0; i < p.x.size(); ++i) {
      if (x) x[i] = p.x[i];
      if (sigma2) sigma2[i] = p.sigma2[i];
      if (m3) m3[i] = p.m3[i];
    }
  });
}

mclt_status mclt_path_stats(const mclt_path* path, double* s_n_over_sn, double* vn2, double* max_abs_x,
                            double* sum_abs3) {
  return guarded([&] {
    require(path, "path");
    const auto st = mclt::path_stats(path->path);
    if (s_n_over_sn) *s_n_over_sn = st.s_n_over_sn;
    if (vn2) *vn2 = st.vn2;
    if (max_abs_x) *max_abs_x = st.max_abs_x;
    if (sum_abs3) *sum_abs3 = st.sum_abs3;
  });
}

mclt_status mclt_w1_empirical(const double* samples, size_t m, double* w1, double* w1_se,
                              double* kolmogorov) {
  return guarded([&] {
    if (m > 0) require(samples, "samples");
    const auto rep = mclt::w1_empirical_vs_normal({samples, m});
    if (w1) *w1 = rep.w1;
    if (w1_se) *w1_se = rep.w1_se.value_or(-1.0);
    if (kolmogorov) *kolmogorov = rep.kolmogorov;
  });
}

mclt_status mclt_w1_discrete(const double* values, const double* probs, size_t k, double* w1) {
  return guarded([&] {
    require(w1, "w1");
    if (k > 0) {
      require(values, "values");
      require(probs, "probs");
    }
    std::vector<mclt::LawAtom> atoms(k);
    for (size_t i = 0; i < k; ++i) atoms[i] = {values[i], probs[i]};
    *w1 = mclt::w1_discrete_vs_normal(mclt::DiscreteLaw(std::move(atoms)));
  });
}

mclt_status mclt_lemma_kernel(double sum_e_abs3, double sn2, int mode, double a, double* out) {
  return guarded([&] {
    require(out, "out");
    if (mode < 0 || mode > 2) throw mclt::InvalidArgument("lemma mode must be 0, 1 or 2");
    *out = mclt::lemma_kernel(sum_e_abs3, sn2, static_cast<mclt::LemmaMode>(mode), a).value;
  });
}

mclt_status mclt_roellin_kernel(const mclt_family* family, double a, size_t m, uint64_t seed,
                                unsigned workers, double* out) {
  return guarded([&] {
    require(family, "family");
    require(out, "out");
    *out = mclt::roellin_kernel(family->spec, a, m, seed, workers).value;
  });
}

mclt_status mclt_config_load(const char* path, mclt_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new mclt_config{mclt::load_config(path)};
  });
}

mclt_status mclt_config_parse(const char* text, mclt_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new mclt_config{mclt::parse_config(text)};
  });
}

void mclt_config_free(mclt_config* config) { delete config; }

mclt_status mclt_config_set_seed(mclt_config* config, uint64_t seed) {
  return guarded([&] {
    require(config, "config");
    config->config.master_seed = seed;
  });
}

mclt_status mclt_config_set_workers(mclt_config* config, unsigned workers) {
  return guarded([&] {
    require(config, "config");
    if (workers < 1) throw mclt::InvalidArgument("workers must be >= 1");
    config->config.workers = workers;
  });
}

mclt_status mclt_config_set_out_dir(mclt_config* config, const char* out_dir) {
  return guarded([&] {
    require(config, "config");
    require(out_dir, "out_dir");
    config->config.out_dir = out_dir;
  });
}

const char* mclt_config_out_dir(const mclt_config* config) {
  return config ? config->config.out_dir.c_str() : "";
}

mclt_status mclt_run(const mclt_config* config, mclt_report** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    auto* r = new mclt_report{mclt::run_experiment(config->config), {}};
    for (const auto& c : r->report.checks) r->kinds.emplace_back(mclt::to_string(c.kind));
    *out = r;
  });
}

void mclt_report_free(mclt_report* report) { delete report; }

mclt_status mclt_report_write(const mclt_report* report, const char* out_dir) {
  return guarded([&] {
    require(report, "report");
    require(out_dir, "out_dir");
    mclt::write_outputs(report->report, out_dir);
  });
}

size_t mclt_report_row_count(const mclt_report* report) { return report ? report->report.rows.size() : 0; }

size_t mclt_report_check_count(const mclt_report* report) {
  return report ? report->report.checks.size() : 0;
}

mclt_status mclt_report_check(const mclt_report* report, size_t index, const char** name,
                              const char** family, const char** kind, int* pass) {
  return guarded([&] {
    require(report, "report");
    if (index >= report->report.checks.size()) throw mclt::InvalidArgument("check index out of range");
    const auto& c = report->report.checks[index];
    if (name) *name = c.name.c_str();
    if (family) *family = c.family.c_str();
    if (kind) *kind = report->kinds[index].c_str();
    if (pass) *pass = c.pass ? 1 : 0;
  });
}

int mclt_report_all_pass(const mclt_report* report) {
  return report && report->report.all_gating_pass() ? 1 : 0;
}

}  // extern "C"
