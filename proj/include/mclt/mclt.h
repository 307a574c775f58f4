/*
 * mclt.h - C interface to the martingale CLT rate laboratory.
 *
 * All objects are opaque handles created and released through this API.
 * Every fallible call returns an mclt_status; on failure a description is
 * available from mclt_last_error() on the calling thread until the next call.
 */
#ifndef MCLT_H
#define MCLT_H

#include <stddef.h>
#include <stdint.h>

#if defined(MCLT_BUILDING_LIBRARY)
#define MCLT_API __attribute__((visibility("default")))
#else
#define MCLT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mclt_status {
  MCLT_OK = 0,
  MCLT_ERR_INVALID_ARGUMENT = 1,
  MCLT_ERR_PRECONDITION = 2,
  MCLT_ERR_NUMERIC = 3,
  MCLT_ERR_PARSE = 4,
  MCLT_ERR_IO = 5,
  MCLT_ERR_INTERNAL = 6
} mclt_status;

typedef struct mclt_family mclt_family;
typedef struct mclt_path mclt_path;
typedef struct mclt_config mclt_config;
typedef struct mclt_report mclt_report;

MCLT_API const char* mclt_version(void);
MCLT_API const char* mclt_last_error(void);
MCLT_API const char* mclt_status_name(mclt_status status);

/* ---- normal primitives ------------------------------------------------ */

MCLT_API mclt_status mclt_normal_cdf(double x, double* out);
MCLT_API mclt_status mclt_normal_antiderivative(double x, double* out);
MCLT_API mclt_status mclt_normal_quantile(double u, double* out);

/* ---- families and paths ----------------------------------------------- */

/* param_names/param_values hold n_params entries (e.g. "delta" = 0.5). */
MCLT_API mclt_status mclt_family_create(const char* family_id, size_t n, const char* const* param_names,
                                        const double* param_values, size_t n_params, mclt_family** out);
MCLT_API void mclt_family_free(mclt_family* family);
MCLT_API mclt_status mclt_family_sn2(const mclt_family* family, double* out);
MCLT_API mclt_status mclt_family_gamma_inf(const mclt_family* family, double* out);
MCLT_API mclt_status mclt_family_conditional_ratio(const mclt_family* family, double rho, double* gamma_out);

MCLT_API mclt_status mclt_path_sample(const mclt_family* family, uint64_t seed, uint64_t index, mclt_path** out);
MCLT_API void mclt_path_free(mclt_path* path);
MCLT_API size_t mclt_path_length(const mclt_path* path);
/* Copies path arrays into caller buffers of length mclt_path_length(). Any pointer may be NULL. */
MCLT_API mclt_status mclt_path_copy(const mclt_path* path, double* x, double* sigma2, double* m3);
MCLT_API mclt_status mclt_path_stats(const mclt_path* path, double* s_n_over_sn, double* vn2,
                                     double* max_abs_x, double* sum_abs3);

/* ---- distances -------------------------------------------------------- */

/* w1_se is set to a negative value when unavailable (fewer than 1000 samples). */
MCLT_API mclt_status mclt_w1_empirical(const double* samples, size_t m, double* w1, double* w1_se,
                                       double* kolmogorov);
MCLT_API mclt_status mclt_w1_discrete(const double* values, const double* probs, size_t k, double* w1);

/* ---- bound kernels ---------------------------------------------------- */

/* mode: 0 = a = T^(1/3), 1 = optimal a = (3T)^(1/3), 2 = explicit a. */
MCLT_API mclt_status mclt_lemma_kernel(double sum_e_abs3, double sn2, int mode, double a, double* out);
MCLT_API mclt_status mclt_roellin_kernel(const mclt_family* family, double a, size_t m, uint64_t seed,
                                         unsigned workers, double* out);

/* ---- experiments ------------------------------------------------------ */

MCLT_API mclt_status mclt_config_load(const char* path, mclt_config** out);
MCLT_API mclt_status mclt_config_parse(const char* text, mclt_config** out);
MCLT_API void mclt_config_free(mclt_config* config);
MCLT_API mclt_status mclt_config_set_seed(mclt_config* config, uint64_t seed);
MCLT_API mclt_status mclt_config_set_workers(mclt_config* config, unsigned workers);
MCLT_API mclt_status mclt_config_set_out_dir(mclt_config* config, const char* out_dir);
/* Returns the config's out_dir (empty string when unset); owned by the config. */
MCLT_API const char* mclt_config_out_dir(const mclt_config* config);

MCLT_API mclt_status mclt_run(const mclt_config* config, mclt_report** out);
MCLT_API void mclt_report_free(mclt_report* report);
MCLT_API mclt_status mclt_report_write(const mclt_report* report, const char* out_dir);
MCLT_API size_t mclt_report_row_count(const mclt_report* report);
MCLT_API size_t mclt_report_check_count(const mclt_report* report);
/* name and kind stay valid while the report lives. */
MCLT_API mclt_status mclt_report_check(const mclt_report* report, size_t index, const char** name,
                                       const char** family, const char** kind, int* pass);
/* 1 iff all explicit-constant checks and completion audits pass. */
MCLT_API int mclt_report_all_pass(const mclt_report* report);

#ifdef __cplusplus
}
#endif

#endif /* MCLT_H */
