// Copyright 2026 The smalldev Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SMALLDEV_SMALLDEV_H_
#define SMALLDEV_SMALLDEV_H_

/* C interface to the smalldev library. Every call returns an sdb_status;
 * on failure sdb_last_error() holds a message for the calling thread.
 * Strings handed out through char** parameters are released with
 * sdb_string_free. */

#include <stdint.h>

#if defined(_WIN32)
#  if defined(SMALLDEV_BUILDING_LIBRARY)
#    define SDB_API __declspec(dllexport)
#  else
#    define SDB_API __declspec(dllimport)
#  endif
#else
#  define SDB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sdb_status {
  SDB_OK = 0,
  SDB_ERR_ARGUMENT = 1,
  SDB_ERR_DOMAIN = 2,
  SDB_ERR_NO_INTERSECTION = 3,
  SDB_ERR_NUMERICAL = 4,
  SDB_ERR_CERTIFICATE_DEGRADED = 5,
  SDB_ERR_SIZE = 6,
  SDB_ERR_IO = 7,
  SDB_ERR_VERIFICATION = 8,
  SDB_ERR_INTERNAL = 99
} sdb_status;

typedef struct sdb_instance sdb_instance;
typedef struct sdb_report sdb_report;

SDB_API const char* sdb_version(void);
SDB_API const char* sdb_status_name(sdb_status status);
/* Message of the last failed call on this thread; "" if none. */
SDB_API const char* sdb_last_error(void);
SDB_API void sdb_string_free(char* s);

/* ---- scalar bounds ---- */
SDB_API sdb_status sdb_normal_cdf(double x, double* out);
SDB_API sdb_status sdb_f1(double xi, double d, double* out);
SDB_API sdb_status sdb_f1_hat(double xi, double d, double t_b, double* out);
SDB_API sdb_status sdb_f3(double xi, double d, double* out);
SDB_API sdb_status sdb_closed_form_f2(double xi, double d, double* value, double* v_star);

typedef struct sdb_moment_result {
  double opt_upper;          /* certified upper bound on the moment problem */
  double probability_lower;  /* 1 - opt_upper, floored to 6 decimals */
  double objective_inflation;
  int solver_iterations;
} sdb_moment_result;

/* moment_set is 124 or 1234. refined_s > 0 selects the refined third-moment
 * bound with T_B = s * D (1234 only); refined_s <= 0 uses the basic one.
 * certificate_json may be NULL. */
SDB_API sdb_status sdb_moment_bound(double xi, double d, int moment_set, double refined_s,
                                    sdb_moment_result* out, char** certificate_json);

/* Re-verifies a certificate document as written by sdb_moment_bound. */
SDB_API sdb_status sdb_verify_certificate_json(const char* json, int* ok, char** message);

/* ---- combined bounds ---- */
SDB_API int sdb_variant_count(void);
/* Name of variant i ("thmA1_f3", ...); NULL when out of range. */
SDB_API const char* sdb_variant_name(int i);
SDB_API sdb_status sdb_variant_describe(const char* variant, char** out);

typedef struct sdb_bound_summary {
  double xi;
  double d_star;
  double s_star;  /* < 0 when the variant has no s parameter */
  double moment_side;
  double be_side;
  double raw_value;    /* e^{-xi} * common value at d_star */
  double bound_value;  /* raw_value floored to 4 decimals */
  int crossed;         /* 0 when no crossing was found and an endpoint was used */
  int certificate_count;
} sdb_bound_summary;

SDB_API sdb_status sdb_feige_bound(const char* variant, double xi, sdb_report** out);
SDB_API sdb_status sdb_report_summary(const sdb_report* report, sdb_bound_summary* out);
SDB_API sdb_status sdb_report_to_json(const sdb_report* report, char** out);
SDB_API void sdb_report_free(sdb_report* report);

/* which: fig1, fig2, fig3, figA1, fig_interplay. */
SDB_API sdb_status sdb_figure_csv(const char* which, double xi, double d_lo, double d_hi, double d_step,
                                  char** out);

/* ---- instances ---- */
SDB_API sdb_status sdb_instance_from_json(const char* json, sdb_instance** out);
SDB_API sdb_status sdb_instance_stats(const sdb_instance* instance, double* d, double* t_b, double* t_m);
/* Exact Prob[sum Y <= t] by enumeration. */
SDB_API sdb_status sdb_instance_prob_le(const sdb_instance* instance, double t, double* out);
SDB_API void sdb_instance_free(sdb_instance* instance);

/* ---- verification ---- */
typedef struct sdb_verify_options {
  uint64_t seed;
  int trials;
  int n_max;
  double xi;
  int moment_trials;  /* moment-formula instances; 0 skips the check */
  int gap_restarts;   /* primal-search restarts per operating point; 0 skips */
} sdb_verify_options;

typedef struct sdb_verify_summary {
  int violations;
  int instances_checked;
  int moment_formula_ok;
  double moment_formula_max_error;
  double max_gap;  /* < 0 when not measured */
} sdb_verify_summary;

SDB_API sdb_verify_options sdb_verify_defaults(void);
/* Runs the bound check against every pipeline claim. report_json may be NULL. */
SDB_API sdb_status sdb_verify(const sdb_verify_options* options, sdb_verify_summary* out, char** report_json);

#ifdef __cplusplus
}
#endif

#endif  /* SMALLDEV_SMALLDEV_H_ */
