/* C interface to the pencilkit core: load a problem file, run its checks,
 * read the reports.  All objects are opaque handles created and destroyed
 * here; every function that can fail returns a pk_status, with a detailed
 * message available from pk_last_error(). */
#ifndef PENCILKIT_H
#define PENCILKIT_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pk_status {
  PK_OK = 0,
  PK_ERROR_NULL_ARGUMENT = 1,
  PK_ERROR_IO = 2,
  PK_ERROR_CONFIG = 3,
  PK_ERROR_EVALUATION = 4,
  PK_ERROR_RUN = 5,
  PK_ERROR_OUT_OF_RANGE = 6,
  PK_ERROR_INTERNAL = 7
} pk_status;

typedef struct pk_problem pk_problem;
typedef struct pk_report pk_report;

const char* pk_version(void);

/* Message for the most recent failure on this thread. */
const char* pk_last_error(void);

/* -- problems ----------------------------------------------------------- */

pk_status pk_problem_from_file(const char* path, pk_problem** out);
pk_status pk_problem_from_string(const char* text, const char* name,
                                 pk_problem** out);
void pk_problem_free(pk_problem* problem);

/* Sampling overrides; applied on top of the file's own [sampling] block. */
pk_status pk_problem_set_points(pk_problem* problem, int points);
pk_status pk_problem_set_seed(pk_problem* problem, unsigned long long seed);
pk_status pk_problem_set_tolerance(pk_problem* problem, double tolerance);
pk_status pk_problem_set_lambdas(pk_problem* problem, const double* values,
                                 int count);

pk_status pk_problem_run(const pk_problem* problem, pk_report** out);

/* -- reports ------------------------------------------------------------ */

void pk_report_free(pk_report* report);
int pk_report_count(const pk_report* report);
const char* pk_report_check_name(const pk_report* report, int index);
/* "pass", "fail", "precondition-failed" or "skipped". */
const char* pk_report_check_verdict(const pk_report* report, int index);
double pk_report_check_residual(const pk_report* report, int index);
int pk_report_all_requested_passed(const pk_report* report);
/* Nonzero when equivalent sub-verdicts disagreed (a library defect). */
int pk_report_inconsistent(const pk_report* report);
/* 0 = requested checks pass, 1 = a requested check failed, 3 = internal
 * disagreement. */
int pk_report_exit_code(const pk_report* report);
/* Deterministic machine-readable report; free with pk_string_free. */
pk_status pk_report_json(const pk_report* report, char** out);
/* Human-readable report with timings; free with pk_string_free. */
pk_status pk_report_text(const pk_report* report, char** out);

/* -- bundled corpus ------------------------------------------------------ */

int pk_corpus_count(void);
const char* pk_corpus_name(int index);
const char* pk_corpus_brief(int index);
/* The entry's complete problem file text. */
const char* pk_corpus_problem(int index);
pk_status pk_corpus_catalog(char** out);
/* 1 when the run's verdicts match the entry's expectations, 0 otherwise,
 * negative on bad arguments. */
int pk_corpus_entry_matches(int index, const pk_report* report);

void pk_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* PENCILKIT_H */
