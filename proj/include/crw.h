/* crw: ruin probabilities and absorption times for correlated random walks.
 *
 * C API of the shared library. All functions return a crw_status; out-values
 * are written through pointers. On failure, crw_last_error() returns a
 * thread-local description of what went wrong. Strings returned through
 * char** are heap-allocated and must be released with crw_string_free();
 * chains are opaque handles released with crw_chain_free().
 */
#ifndef CRW_H
#define CRW_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum crw_status {
  CRW_OK = 0,
  CRW_ERR_DOMAIN = 1,
  CRW_ERR_PARSE = 2,
  CRW_ERR_DEGENERATE_LAMBDA = 3,
  CRW_ERR_DEGENERATE_DRIFT = 4,
  CRW_ERR_NO_CONVERGENCE = 5,
  CRW_ERR_SINGULAR = 6,
  CRW_ERR_NON_ABSORBING = 7,
  CRW_ERR_BUDGET_EXCEEDED = 8,
  CRW_ERR_REDUCIBLE = 9,
  CRW_ERR_NOT_MARKOV = 10,
  CRW_ERR_INTERNAL = 11
} crw_status;

const char* crw_status_name(crw_status status);
const char* crw_last_error(void);
const char* crw_version(void);
void crw_string_free(char* text);

/* ---- chains ------------------------------------------------------------ */

typedef struct crw_chain crw_chain;

/* Chain JSON forms (states ordered (1, 0, -1); two-state uses (1, -1)):
 *   {"type":"two_state","p":..,"q":..,"initial":[..,..]}
 *   {"type":"symmetric_delay","p":..,"q":..,"r":..}
 *   {"type":"general","matrix":[[..],[..],[..]],"initial":[..,..,..]}
 * "initial" may be omitted where the stationary start is well defined. */
crw_chain* crw_chain_from_json(const char* json_text);
crw_chain* crw_chain_two_state(double p, double q);
crw_chain* crw_chain_symmetric_delay(double p, double q, double r);
crw_chain* crw_chain_general(const double matrix[9], const double initial[3]);
void crw_chain_free(crw_chain* chain);

char* crw_chain_to_json(const crw_chain* chain);
int crw_chain_num_states(const crw_chain* chain);
/* Writes CRW_OK and no JSON when valid; CRW_ERR_DOMAIN plus a JSON array of
 * violation strings otherwise. */
crw_status crw_chain_validate(const crw_chain* chain, char** violations_json);
crw_status crw_chain_stationary(const crw_chain* chain, double out[3]);

/* ---- closed forms (stationary start) ------------------------------------ */

crw_status crw_ruin_symmetric(double p, int A, int B, double* alpha);
crw_status crw_etau_symmetric(double p, int A, int B, double* etau);
crw_status crw_ruin_asymmetric(double p, double q, int A, int B, double* alpha);
crw_status crw_etau_asymmetric(double p, double q, int A, int B, double* etau);
crw_status crw_ruin_symmetric_delays(double p, double r, int A, int B, double* alpha);
crw_status crw_etau_symmetric_delays(double p, double q, double r, int A, int B,
                                     double* etau);
crw_status crw_ruin_two_pattern(int A, int B, double* alpha);

/* ---- martingale solver --------------------------------------------------- */

/* Solves the general ruin problem by optional stopping; two-state and
 * symmetric-delay chains are embedded automatically. The solution JSON holds
 * alpha, beta, method and solver diagnostics. */
crw_status crw_solve_ruin(const crw_chain* chain, int A, int B, char** solution_json);

/* ---- oracle -------------------------------------------------------------- */

crw_status crw_first_step_alpha(const crw_chain* chain, int A, int B, double* alpha);
crw_status crw_first_step_etau(const crw_chain* chain, int A, int B, double* etau);
crw_status crw_enumerate_paths(const crw_chain* chain, int A, int B, long horizon,
                               double* alpha_lower, double* alpha_upper,
                               double* mass_unresolved);

typedef struct crw_mc_result {
  double alpha_hat;
  double tau_hat;
  double stderr_alpha;
  double stderr_tau;
  uint64_t n_paths;
  uint64_t seed;
  uint64_t truncated_paths;
  uint32_t partitions;
} crw_mc_result;

crw_status crw_simulate(const crw_chain* chain, int A, int B, uint64_t n_paths,
                        uint64_t seed, uint64_t step_cap, uint32_t partitions,
                        crw_mc_result* out);

/* ---- coin-flip patterns -------------------------------------------------- */

crw_status crw_pattern_expected_count(const char* pattern, long flips, double coin_bias,
                                      double* out);
crw_status crw_pattern_waiting_time(const char* pattern, double coin_bias, double* out);
crw_status crw_pattern_waiting_time_either(const char* const* patterns, int count,
                                           double coin_bias, double* out);
crw_status crw_pattern_prob_first(const char* win, const char* lose, double coin_bias,
                                  double* out);
crw_status crw_pattern_payoff_chain(const char* win, const char* lose, double coin_bias,
                                    crw_chain** out);
crw_status crw_pattern_markov_check(const char* win, const char* lose, double coin_bias,
                                    int* is_markov, char** detail_json);

/* ---- job runner (the CLI surface) ---------------------------------------- */

/* Runs a JSON job specification; always produces a report (an error object on
 * failure). Formats: "json" (stable key order) or "text" (fixed-width table,
 * 12 significant digits). */
crw_status crw_run_job(const char* jobspec_json, char** report_json);
crw_status crw_render_report(const char* report_json, const char* format, char** out);
/* Exit code for a report: 0 ok, 1 failed verify checks, 2 invalid request,
 * 3 solver failure. */
int crw_report_exit_code(const char* report_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CRW_H */
