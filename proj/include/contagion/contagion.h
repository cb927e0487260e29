/* Public C interface of the contagion toolkit.
 *
 * Conventions:
 *   - Every function returns a ctg_status; CTG_OK means success.
 *   - On failure, ctg_last_error() returns a thread-local message describing
 *     the most recent error on the calling thread.
 *   - Objects are opaque handles created and destroyed by matching
 *     create/free pairs; free functions accept NULL.
 *   - Functions returning text allocate with ctg-owned malloc; release the
 *     pointer with ctg_string_free().
 */
#ifndef CONTAGION_CONTAGION_H
#define CONTAGION_CONTAGION_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CTG_API __declspec(dllexport)
#else
#define CTG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ctg_status {
    CTG_OK = 0,
    CTG_ERROR_INVALID_ARGUMENT = 1,
    CTG_ERROR_PARSE = 2,
    CTG_ERROR_VALIDATION = 3,
    CTG_ERROR_NUMERIC = 4,
    CTG_ERROR_NOT_FOUND = 5,
    CTG_ERROR_IO = 6,
    CTG_ERROR_INTERNAL = 7
} ctg_status;

/* Library version as "major.minor.patch". Never fails. */
CTG_API const char* ctg_version(void);

/* Message of the last failure on this thread; empty string when none. The
 * pointer stays valid until the next failing ctg_* call on the thread. */
CTG_API const char* ctg_last_error(void);

/* Frees any char* produced by this library. NULL is allowed. */
CTG_API void ctg_string_free(char* text);

/* ------------------------------------------------------------------ */
/* Dataset: parsed measurements, article counts, and reference tables. */

typedef struct ctg_dataset ctg_dataset;

CTG_API ctg_status ctg_dataset_create(ctg_dataset** out);
CTG_API void ctg_dataset_free(ctg_dataset* dataset);

/* Each loader parses one CSV document (see the README for the column
 * layouts) and replaces that slot of the dataset. */
CTG_API ctg_status ctg_dataset_load_measurements(ctg_dataset* dataset, const char* csv_text);
CTG_API ctg_status ctg_dataset_load_articles(ctg_dataset* dataset, const char* csv_text);
CTG_API ctg_status ctg_dataset_load_country_meta(ctg_dataset* dataset, const char* csv_text);
CTG_API ctg_status ctg_dataset_load_fitted_params(ctg_dataset* dataset, const char* csv_text);
CTG_API ctg_status ctg_dataset_load_peak_years(ctg_dataset* dataset, const char* csv_text);

/* Distinct country ids present in the measurements. Call with ids = NULL to
 * query the count, then with a buffer of at least *count entries. */
CTG_API ctg_status ctg_dataset_country_ids(const ctg_dataset* dataset, int* ids, size_t* count);

/* Abbreviation from the metadata table ("USA"); falls back to the numeric id
 * when the country is not listed. */
CTG_API ctg_status ctg_dataset_country_abbrev(const ctg_dataset* dataset, int country_id,
                                              char** out);

/* Observation-count table (one row per country in the measurements). */
CTG_API ctg_status ctg_dataset_counts_csv(const ctg_dataset* dataset, char** out);

/* Looks up the loaded fitted-parameter table. b and delta always come from
 * its universal row. country selects a local row by abbreviation or numeric
 * id and fills country_id/a/x0/u0/u_inf; pass NULL to read only the
 * universal pair. Any output pointer may be NULL. */
CTG_API ctg_status ctg_dataset_fitted_params(const ctg_dataset* dataset, const char* country,
                                             int* country_id, double* a, double* x0, double* u0,
                                             double* u_inf, double* b, double* delta);

/* Cumulative article count at a (possibly fractional) year. */
CTG_API ctg_status ctg_dataset_articles_at(const ctg_dataset* dataset, double year, double* out);

/* ------------------------------------------------------------------ */
/* Model primitives.                                                   */

/* Right-hand side of the prevalence equation at state x with individual
 * utility u_x, conformity a, and rate b. */
CTG_API ctg_status ctg_rhs(double x, double u_x, double a, double b, double* out);

/* Utility law selector shared by the run options below. */
typedef enum ctg_utility_law {
    CTG_UTILITY_DISCOUNTED = 0,
    CTG_UTILITY_CONSTANT = 1,
    CTG_UTILITY_STEP = 2
} ctg_utility_law;

/* ------------------------------------------------------------------ */
/* Forward simulation.                                                 */

typedef struct ctg_simulate_options {
    double a;
    double x0;
    double u0;
    double u_inf; /* ignored by the constant law */
    double b;
    double delta;  /* discounted law only */
    int law;       /* ctg_utility_law */
    double t_star; /* step law switch year */
    double t0;     /* first year */
    double t1;     /* last year, > t0 */
    double output_step; /* spacing of output rows, > 0 */
    /* Integrator overrides; values <= 0 select the defaults. */
    double rtol;
    double atol;
    double h_init;
    double h_max;
} ctg_simulate_options;

/* Fills the options with defaults (USA-like parameters, 1920-2010, annual
 * output, discounted law). */
CTG_API void ctg_simulate_options_init(ctg_simulate_options* options);

typedef struct ctg_estimates ctg_estimates; /* forward declared, see below */

/* Integrates the model and renders year,x CSV plus an SVG chart. Either
 * output pointer may be NULL when not wanted. The dataset supplies the
 * article series for the discounted law (pass NULL otherwise). overlay may
 * name a reconstruction to draw alongside (NULL: none). */
CTG_API ctg_status ctg_simulate(const ctg_dataset* dataset, const ctg_simulate_options* options,
                                const ctg_estimates* overlay, int overlay_country_id,
                                char** out_csv, char** out_svg);

/* ------------------------------------------------------------------ */
/* Prevalence reconstruction from consumption.                         */

CTG_API ctg_status ctg_estimate_run(const ctg_dataset* dataset, const int* country_ids,
                                    size_t n_country_ids, /* NULL, 0: every country */
                                    const char* screen_abbrevs, /* comma list; NULL: none */
                                    double grubbs_alpha, ctg_estimates** out);
CTG_API void ctg_estimates_free(ctg_estimates* estimates);

CTG_API ctg_status ctg_estimates_count(const ctg_estimates* estimates, size_t* out);
CTG_API ctg_status ctg_estimates_info(const ctg_estimates* estimates, size_t index,
                                      int* country_id, int* passed_gate, int* n_obs, double* r2,
                                      double* p);
CTG_API ctg_status ctg_estimates_table_csv(const ctg_estimates* estimates, char** out);
CTG_API ctg_status ctg_estimates_xhat_csv(const ctg_estimates* estimates, int country_id,
                                          char** out);

/* ------------------------------------------------------------------ */
/* Calibration.                                                        */

typedef struct ctg_fit_options {
    int law;     /* ctg_utility_law */
    double tol;  /* <= 0: default 1e-6 */
    int max_itn; /* <= 0: default 150 */
    int gated_only; /* nonzero: fit only countries that passed the gate */
    /* Integrator overrides; values <= 0 select the defaults. */
    double rtol;
    double atol;
    double h_init;
    double h_max;
    int max_fevals; /* inner solver budget; <= 0: default */
} ctg_fit_options;

CTG_API void ctg_fit_options_init(ctg_fit_options* options);

typedef struct ctg_fit_result ctg_fit_result;

/* Alternating calibration over the reconstructions. The dataset supplies
 * the article series (discounted law) and abbreviations for reporting. */
CTG_API ctg_status ctg_fit_run(const ctg_dataset* dataset, const ctg_estimates* estimates,
                               const ctg_fit_options* options, ctg_fit_result** out);
CTG_API void ctg_fit_result_free(ctg_fit_result* fit);

CTG_API ctg_status ctg_fit_universal(const ctg_fit_result* fit, double* b, double* delta,
                                     double* total_error);
CTG_API ctg_status ctg_fit_country_count(const ctg_fit_result* fit, size_t* out);
CTG_API ctg_status ctg_fit_local(const ctg_fit_result* fit, size_t index, int* country_id,
                                 double* a, double* x0, double* u0, double* u_inf,
                                 double* error);
CTG_API ctg_status ctg_fit_convergence(const ctg_fit_result* fit, int* outer_iterations,
                                       int* converged);
CTG_API ctg_status ctg_fit_table_csv(const ctg_fit_result* fit, char** out);
CTG_API ctg_status ctg_fit_iterations_csv(const ctg_fit_result* fit, char** out);
CTG_API ctg_status ctg_fit_manifest_json(const ctg_fit_result* fit, char** out);
CTG_API ctg_status ctg_fit_curve_svg(const ctg_fit_result* fit, int country_id, char** out);

/* ------------------------------------------------------------------ */
/* Slope / peak-year / correlation study.                              */

typedef struct ctg_report ctg_report;

/* tables_only nonzero: work from the bundled fitted-parameter and peak-year
 * tables alone (no measurements needed; slope cells are omitted).
 * Otherwise estimates and fit supply slopes and conformity values, and peak
 * years are recomputed from consumption data where present. */
CTG_API ctg_status ctg_analyze_run(const ctg_dataset* dataset, const ctg_estimates* estimates,
                                   const ctg_fit_result* fit, int tables_only, ctg_report** out);
CTG_API void ctg_report_free(ctg_report* report);

/* pair is one of: "idv_a", "idv_sx", "idv_tmax7", "idv_tmax25", "a_sx",
 * "a_tmax". Cells omitted from the run report n = 0. */
CTG_API ctg_status ctg_report_correlation(const ctg_report* report, const char* pair,
                                          double* rho, double* p, int* n);
CTG_API ctg_status ctg_report_correlations_csv(const ctg_report* report, char** out);
CTG_API ctg_status ctg_report_analysis_csv(const ctg_report* report, char** out);
CTG_API ctg_status ctg_report_scatter_svg(const ctg_report* report, const char* pair,
                                          char** out);
CTG_API ctg_status ctg_report_notes(const ctg_report* report, char** out);

/* ------------------------------------------------------------------ */
/* Synthetic data generation.                                          */

typedef struct ctg_synth_options {
    int law;       /* ctg_utility_law */
    double b;      /* shared rate */
    double delta;  /* discounted law only */
    int first_year;
    int n_years;
    int survey_first_year; /* first year with prevalence surveys */
    double noise_sd;       /* Gaussian sd on surveyed prevalence */
    uint64_t seed;
} ctg_synth_options;

CTG_API void ctg_synth_options_init(ctg_synth_options* options);

/* Ground truth comes from the dataset's fitted-parameter table (local
 * parameters) and metadata (names, ids, individualism); the article series
 * is required for the discounted law. Outputs: measurement CSV, metadata
 * CSV, and the ground-truth manifest. Any output pointer may be NULL. */
CTG_API ctg_status ctg_synth_run(const ctg_dataset* dataset, const ctg_synth_options* options,
                                 char** out_measurements_csv, char** out_meta_csv,
                                 char** out_manifest_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CONTAGION_CONTAGION_H */
