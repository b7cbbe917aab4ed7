/* restricted mean durations in a three-state promotion/retirement model.
 *
 * plain C surface over the C++ core: opaque handles, integer status codes,
 * thread-local error text. every create call has a matching free; handles are
 * not thread-safe individually but independent handles may be used from
 * different threads.
 */
#ifndef RMDUR_H
#define RMDUR_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rmdur_status {
  RMDUR_OK = 0,
  RMDUR_ERR_IO = 1,             /* file missing or unreadable/unwritable */
  RMDUR_ERR_PARSE = 2,          /* malformed csv/json */
  RMDUR_ERR_VALIDATION = 3,     /* well-formed but inconsistent inputs */
  RMDUR_ERR_DOMAIN = 4,         /* request outside what the data supports */
  RMDUR_ERR_NONCONVERGENCE = 5, /* Newton hit the iteration cap */
  RMDUR_ERR_SINGULAR = 6,       /* observed information not invertible */
  RMDUR_ERR_MONOTONE = 7,       /* partial likelihood monotone in a coefficient */
  RMDUR_ERR_INTERNAL = 8
} rmdur_status;

/* message for the most recent failing call on this thread */
const char* rmdur_last_error(void);

const char* rmdur_version(void);

typedef struct rmdur_dataset rmdur_dataset;
typedef struct rmdur_model rmdur_model;
typedef struct rmdur_prediction rmdur_prediction;
typedef struct rmdur_simreport rmdur_simreport;

/* ------------------------------------------------------------------ data */

rmdur_status rmdur_dataset_load(const char* data_csv_path, const char* sidecar_json_path,
                                rmdur_dataset** out);
/* diagnostics, one per line; empty string when clean. caller frees with
 * rmdur_string_free. */
rmdur_status rmdur_dataset_validate(const rmdur_dataset* ds, char** out_report);
int rmdur_dataset_n(const rmdur_dataset* ds);
void rmdur_dataset_free(rmdur_dataset* ds);

/* ------------------------------------------------------------------ model */

rmdur_status rmdur_model_fit(const rmdur_dataset* ds, rmdur_model** out);
rmdur_status rmdur_model_save(const rmdur_model* m, const char* path);
/* loading re-derives residuals from ds and refuses a dataset the artifact was
 * not fitted on */
rmdur_status rmdur_model_load(const char* path, const rmdur_dataset* ds, rmdur_model** out);
/* coefficient table; format is "csv" or "json" */
rmdur_status rmdur_model_summary(const rmdur_model* m, const char* format, char** out_text);
/* process: 0 promotion, 1 retirement */
int rmdur_model_ncoef(const rmdur_model* m, int process);
rmdur_status rmdur_model_coef(const rmdur_model* m, int process, double* beta, size_t len);
rmdur_status rmdur_model_se(const rmdur_model* m, int process, double* se, size_t len);
void rmdur_model_free(rmdur_model* m);

/* -------------------------------------------------------------- predict */

/* counterfactual means and standard errors for every subject observed at risk
 * of promotion. policy_column may be NULL to use the dataset's protected
 * column; policy_value is the value it is forced to (0 for the usual
 * "treat as unexposed"). threads <= 0 picks a default. */
rmdur_status rmdur_predict(const rmdur_model* m, const rmdur_dataset* ds,
                           const char* policy_column, double policy_value, int threads,
                           rmdur_prediction** out);
int rmdur_prediction_rows(const rmdur_prediction* p);
rmdur_status rmdur_prediction_row(const rmdur_prediction* p, int i, const char** id,
                                  double mean[3], double se[3]);
/* means table (subject_id,E_lt,se_lt,...) and occupancy curves
 * (subject_id,time,p_lt,p_cap,p_rt) */
rmdur_status rmdur_prediction_means_csv(const rmdur_prediction* p, char** out_text);
rmdur_status rmdur_prediction_curves_csv(const rmdur_prediction* p, char** out_text);
void rmdur_prediction_free(rmdur_prediction* p);

/* ----------------------------------------------------------- compensate */

/* price a prediction against a pay schedule and observed earnings; writes the
 * damages table. curves_csv_path may be NULL for flat schedules. */
rmdur_status rmdur_compensate(const char* schedule_json_path, const char* means_csv_path,
                              const char* curves_csv_path, const char* earnings_csv_path,
                              char** out_damages_csv);

/* ------------------------------------------------------------- simulate */

/* run the synthetic-study harness from a config json (NULL: defaults), with
 * optional seed override (use_seed != 0). */
rmdur_status rmdur_simulate(const char* config_json_path, int use_seed, unsigned long long seed,
                            int threads, rmdur_simreport** out);
rmdur_status rmdur_simreport_json(const rmdur_simreport* r, char** out_text);
rmdur_status rmdur_simreport_csv(const rmdur_simreport* r, char** out_text);
/* bias/esd/ase/cp for one tracked quantity by name, e.g. "E_lt" or "beta1" */
rmdur_status rmdur_simreport_quantity(const rmdur_simreport* r, const char* name, double* truth,
                                      double* mean, double* bias, double* esd, double* ase,
                                      double* cp);
void rmdur_simreport_free(rmdur_simreport* r);

void rmdur_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* RMDUR_H */
