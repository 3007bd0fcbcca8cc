/* C interface to the dhard library: decomposition-hardness estimation,
 * backdoor search, decomposed solving and proof bundles.
 *
 * All objects are opaque handles released with their *_free function.
 * Functions return a dh_status; on failure dh_last_error() describes the
 * problem (thread-local, valid until the next call on the same thread). */
#ifndef DHARD_DHARD_H
#define DHARD_DHARD_H

#include <stddef.h>
#include <stdint.h>

#if defined(DHARD_BUILDING_LIBRARY)
#define DH_API __attribute__((visibility("default")))
#else
#define DH_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dh_status {
  DH_OK = 0,
  DH_ERROR_INVALID_ARGUMENT = 1,
  DH_ERROR_PARSE = 2,
  DH_ERROR_IO = 3,
  DH_ERROR_CAP_EXCEEDED = 4,
  DH_ERROR_SAT_FOUND = 5,
  DH_ERROR_INTERNAL = 6
} dh_status;

typedef enum dh_measure {
  DH_MEASURE_PROPAGATIONS = 0,
  DH_MEASURE_CONFLICTS = 1,
  DH_MEASURE_TIME = 2
} dh_measure;

typedef enum dh_verdict {
  DH_VERDICT_SAT = 10,
  DH_VERDICT_UNSAT = 20,
  DH_VERDICT_UNKNOWN = 0
} dh_verdict;

typedef struct dh_formula dh_formula;
typedef struct dh_search_result dh_search_result;
typedef struct dh_solve_result dh_solve_result;
typedef struct dh_check_result dh_check_result;

/* Shared knobs; dh_options_init fills in the documented defaults. */
typedef struct dh_options {
  double epsilon;             /* 0.1 */
  double delta;               /* 0.05 */
  uint64_t sample_size;       /* initial N, 1000 */
  uint64_t max_sample_size;   /* 65536 */
  dh_measure measure;         /* propagations */
  uint64_t seed;              /* 1 */
  unsigned workers;           /* 1; 0 = hardware concurrency */
  int exhaustive;             /* nonzero: enumerate all 2^|B| branches */
  /* search */
  int b0_size;                /* 200, clamped to the variable count */
  int init_size;              /* 30 */
  int elite;                  /* 2 */
  int crossover;              /* 8 */
  int mutation;               /* 6; population R = elite + crossover + mutation */
  double time_limit_s;        /* 60 */
  uint64_t max_generations;   /* 0 = unlimited */
  /* proofs */
  int k_groups;               /* 20 */
} dh_options;

DH_API void dh_options_init(dh_options *options);
DH_API const char *dh_last_error(void);
DH_API const char *dh_version(void);

/* Formulas */
DH_API dh_status dh_formula_read_file(const char *path, dh_formula **out);
DH_API dh_status dh_formula_parse(const char *text, size_t length,
                                  dh_formula **out);
DH_API int dh_formula_num_vars(const dh_formula *formula);
DH_API size_t dh_formula_num_clauses(const dh_formula *formula);
DH_API void dh_formula_free(dh_formula *formula);

/* Estimation. Writes a key=value report (NUL-terminated, allocated with
 * malloc; release with dh_string_free). When a sampled branch is
 * satisfiable the report is still written and DH_ERROR_SAT_FOUND returned. */
DH_API dh_status dh_estimate_run(const dh_formula *formula, const int *vars,
                                 size_t num_vars, const dh_options *options,
                                 char **report);
DH_API void dh_string_free(char *text);

/* Backdoor search: search-space reduction followed by the genetic
 * algorithm. DH_ERROR_SAT_FOUND is returned (with the result still set) when
 * a satisfiable branch ends the search. */
DH_API dh_status dh_find_backdoor(const dh_formula *formula,
                                  const dh_options *options,
                                  dh_search_result **out);
DH_API size_t dh_search_result_size(const dh_search_result *result);
/* Copies up to capacity variables; returns the backdoor size. */
DH_API size_t dh_search_result_vars(const dh_search_result *result, int *vars,
                                    size_t capacity);
DH_API double dh_search_result_log2_fitness(const dh_search_result *result);
DH_API int dh_search_result_sat_found(const dh_search_result *result);
DH_API char *dh_search_result_report(const dh_search_result *result);
DH_API dh_status dh_search_result_write_history(const dh_search_result *result,
                                                const char *path);
DH_API void dh_search_result_free(dh_search_result *result);

/* Decomposed solving. `backdoors` lists the variables of each backdoor,
 * every backdoor terminated by 0 (e.g. {1,2,0,3,4,0}). One backdoor gives
 * the single-backdoor mode, several the hard-set product mode. */
DH_API dh_status dh_solve_decomposed(const dh_formula *formula,
                                     const int *backdoors, size_t length,
                                     const dh_options *options,
                                     dh_solve_result **out);
DH_API dh_verdict dh_solve_result_verdict(const dh_solve_result *result);
DH_API size_t dh_solve_result_branches(const dh_solve_result *result);
DH_API uint64_t dh_solve_result_propagations(const dh_solve_result *result);
DH_API uint64_t dh_solve_result_conflicts(const dh_solve_result *result);
DH_API char *dh_solve_result_report(const dh_solve_result *result);
DH_API dh_status dh_solve_result_write_ledger(const dh_solve_result *result,
                                              const char *path);
DH_API void dh_solve_result_free(dh_solve_result *result);

/* Proof bundles */
/* Same SAT convention as dh_estimate_run; no report is written then. */
DH_API dh_status dh_prove(const dh_formula *formula, const int *vars,
                          size_t num_vars, const char *out_dir,
                          const dh_options *options, char **report);
DH_API dh_status dh_check_bundle(const char *manifest, unsigned workers,
                                 dh_check_result **out);
DH_API int dh_check_result_ok(const dh_check_result *result);
DH_API int dh_check_result_coverage_ok(const dh_check_result *result);
DH_API size_t dh_check_result_units(const dh_check_result *result);
DH_API int dh_check_result_unit_ok(const dh_check_result *result, size_t i);
DH_API const char *dh_check_result_unit_id(const dh_check_result *result,
                                           size_t i);
DH_API const char *dh_check_result_unit_message(const dh_check_result *result,
                                                size_t i);
DH_API char *dh_check_result_report(const dh_check_result *result);
DH_API void dh_check_result_free(dh_check_result *result);

/* Makespan of greedy list scheduling over `costs`. */
DH_API dh_status dh_simulate_parallel(const double *costs, size_t count,
                                      unsigned workers, double *makespan);

#ifdef __cplusplus
}
#endif

#endif /* DHARD_DHARD_H */
