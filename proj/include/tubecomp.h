/* tubecomp C API: scenario-driven comparison-geometry batteries behind a
 * shared library. Handles are opaque; every fallible call returns a status
 * code and writes results through out-pointers. Strings returned from result
 * or scenario handles stay owned by the handle. */
#ifndef TUBECOMP_H
#define TUBECOMP_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tc_status {
  TC_OK = 0,
  TC_CHECK_FAILURE = 1, /* battery ran, at least one inequality failed */
  TC_ERROR = 2          /* bad input, certification failure, runtime error */
} tc_status;

typedef struct tc_scenario tc_scenario;
typedef struct tc_result tc_result;

typedef struct tc_run_options {
  int threads;              /* worker threads; never changes reported numbers */
  double tol_scale;         /* uniform tolerance multiplier */
  int dump_distance_field;  /* nonzero: include the debug distance matrix */
  unsigned seed;            /* reserved for trial-function sampling */
} tc_run_options;

void tc_run_options_init(tc_run_options* options);

/* Scenario loading. On failure returns NULL and, when errbuf is non-NULL,
 * writes a NUL-terminated diagnostic into errbuf (truncated to errlen). */
tc_scenario* tc_scenario_load(const char* path, char* errbuf, size_t errlen);
tc_scenario* tc_scenario_parse(const char* json_text, char* errbuf, size_t errlen);
const char* tc_scenario_name(const tc_scenario* scenario);
/* 0 = csv, 1 = json, 2 = both */
int tc_scenario_format(const tc_scenario* scenario);
void tc_scenario_free(tc_scenario* scenario);

/* Runs the battery. Never returns NULL for a non-NULL scenario; inspect the
 * exit code (matches tc_status semantics). */
tc_result* tc_run(const tc_scenario* scenario, const tc_run_options* options);
int tc_result_exit_code(const tc_result* result);
const char* tc_result_error(const tc_result* result); /* "" when none */
const char* tc_result_report_json(const tc_result* result);
const char* tc_result_report_csv(const tc_result* result);
const char* tc_result_distance_dump(const tc_result* result);
int tc_result_check_count(const tc_result* result);
const char* tc_result_check_name(const tc_result* result, int index);
double tc_result_check_margin(const tc_result* result, int index);
double tc_result_check_tolerance(const tc_result* result, int index);
/* 1 = pass, 0 = fail, 2 = skipped */
int tc_result_check_status(const tc_result* result, int index);
const char* tc_result_rigidity(const tc_result* result);
void tc_result_free(tc_result* result);

/* Direct kernel evaluations. d may be INFINITY where the defining formula
 * admits it. Returns TC_OK or TC_ERROR. */
int tc_ball_condition(double kappa, double lambda);
tc_status tc_cut_radius(double kappa, double lambda, double* out);
tc_status tc_s_boundary(double kappa, double lambda, double t, double* value,
                        double* deriv);
tc_status tc_f_profile(int n, double kappa, double lambda, double r, double* out);
tc_status tc_collar_offset(double kappa, double lambda, double* out);
tc_status tc_dirichlet_constant(int n, double kappa, double lambda, double d,
                                double* out);
tc_status tc_segment_constant(int n, double kappa, double lambda, double d,
                              double* out);
tc_status tc_kasue_bar_mu(int n, double kappa, double lambda, double d, double* out);
/* variant: "dirichlet", "segment" or "rigid" */
tc_status tc_eigen_lower_bound(int n, double kappa, double lambda, double d,
                               double p, const char* variant, double* out);
tc_status tc_phi_profile(int n, double lambda, double t, double* out);
tc_status tc_model_ratio(int n, double kappa, double lambda, double r, double big_r,
                         double* out);

const char* tc_version(void);

#ifdef __cplusplus
}
#endif

#endif /* TUBECOMP_H */
