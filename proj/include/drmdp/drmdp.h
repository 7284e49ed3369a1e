#ifndef DRMDP_H
#define DRMDP_H

#include <stdint.h>

#if defined(DRMDP_BUILDING_LIBRARY)
#define DRMDP_API __attribute__((visibility("default")))
#else
#define DRMDP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct drmdp_model drmdp_model;
typedef struct drmdp_solution drmdp_solution;

typedef enum drmdp_status {
    DRMDP_OK = 0,
    DRMDP_ERR_PARSE = 1,
    DRMDP_ERR_VALIDATION = 2,
    DRMDP_ERR_SOLVER = 3,
    DRMDP_ERR_CONVERGENCE = 4,
    DRMDP_ERR_ARGUMENT = 5,
    DRMDP_ERR_IO = 6,
    DRMDP_ERR_INTERNAL = 7
} drmdp_status;

/* Message of the last failed call on this thread; empty after success. */
DRMDP_API const char* drmdp_last_error(void);
DRMDP_API const char* drmdp_status_name(drmdp_status status);

/* Strings returned through char** are owned by the caller. */
DRMDP_API void drmdp_string_free(char* s);

DRMDP_API drmdp_status drmdp_model_load_file(const char* path, drmdp_model** out);
DRMDP_API drmdp_status drmdp_model_load_string(const char* text, drmdp_model** out);
DRMDP_API void drmdp_model_free(drmdp_model* model);

DRMDP_API int drmdp_model_num_states(const drmdp_model* model);
DRMDP_API int drmdp_model_is_infinite(const drmdp_model* model);
DRMDP_API int drmdp_model_initial_state(const drmdp_model* model);
/* Borrowed pointer, valid while the model lives. */
DRMDP_API const char* drmdp_model_state_name(const drmdp_model* model, int state);

/* report: one "PASS|FAIL name: detail" line per check.
 * all_passed: every check, including interiority surrogates.
 * structurally_valid: every hard check. Either output may be NULL. */
DRMDP_API drmdp_status drmdp_model_validate(const drmdp_model* model, char** report, int* all_passed,
                                            int* structurally_valid);

DRMDP_API drmdp_status drmdp_model_serialize(const drmdp_model* model, char** text);

typedef struct drmdp_solve_options {
    double epsilon;          /* value-iteration tolerance, infinite horizons only */
    int threads;
    const char* dump_lp_dir; /* NULL or a directory for MPS dumps */
} drmdp_solve_options;

DRMDP_API void drmdp_solve_options_init(drmdp_solve_options* opts);

/* Backward induction for finite models, value iteration otherwise. */
DRMDP_API drmdp_status drmdp_solve(const drmdp_model* model, const drmdp_solve_options* opts,
                                   drmdp_solution** out);
DRMDP_API void drmdp_solution_free(drmdp_solution* sol);

DRMDP_API double drmdp_solution_initial_value(const drmdp_solution* sol);
DRMDP_API drmdp_status drmdp_solution_value(const drmdp_solution* sol, int state, double* value);
/* Borrowed array of action probabilities; count 0 for terminal states. */
DRMDP_API drmdp_status drmdp_solution_policy(const drmdp_solution* sol, int state, const double** probs,
                                             int* count);
DRMDP_API double drmdp_solution_saddle_residual(const drmdp_solution* sol);
DRMDP_API long drmdp_solution_iterations(const drmdp_solution* sol);
DRMDP_API double drmdp_solution_stationarity_residual(const drmdp_solution* sol);
DRMDP_API double drmdp_solution_bellman_residual(const drmdp_solution* sol);
DRMDP_API drmdp_status drmdp_solution_summary_json(const drmdp_solution* sol, char** json);
/* values.csv, policy.csv and summary.json. */
DRMDP_API drmdp_status drmdp_solution_write(const drmdp_solution* sol, const char* dir);

typedef struct drmdp_newsvendor_options {
    const double* radii;
    int num_radii;
    const int* train_sizes;
    int num_train_sizes;
    int repetitions;
    int test_runs;
    int draws_per_sample;
    uint64_t seed;
    int threads;
    int keep_going;
} drmdp_newsvendor_options;

/* Desk-scale defaults; radii and train_sizes NULL select the default grids. */
DRMDP_API void drmdp_newsvendor_options_init(drmdp_newsvendor_options* opts);

typedef struct drmdp_newsvendor_result {
    int failures;        /* failed (repetition, N, theta) cells */
    int trends_checked;  /* trend checks that were applicable */
    int trends_passed;
} drmdp_newsvendor_result;

/* Writes records.csv and aggregate.csv into out_dir (when not NULL) and a
 * human-readable report of aggregates and trend outcomes. */
DRMDP_API drmdp_status drmdp_newsvendor_run(const drmdp_newsvendor_options* opts, const char* out_dir,
                                            char** report, drmdp_newsvendor_result* result);

#ifdef __cplusplus
}
#endif

#endif
