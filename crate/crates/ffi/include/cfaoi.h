#ifndef CFAOI_H
#define CFAOI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define CFAOI_OK 0

#define CFAOI_ERR_CONFIG 2

#define CFAOI_ERR_NUMERICAL 3

#define CFAOI_ERR_INFEASIBLE 4

/**
 * Null pointer or invalid argument at the ABI boundary.
 */
#define CFAOI_ERR_ARGUMENT 5

/**
 * Opaque handle to a normalized parameter set.
 */
typedef struct CfaoiParams CfaoiParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread, or null when no error occurred.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *cfaoi_last_error(void);

/**
 * Parse a JSON parameter document (UTF-8, `{value, unit}` pairs) into a
 * handle. Returns null on failure; see `cfaoi_last_error`.
 *
 * # Safety
 * `json` must point to a valid NUL-terminated string.
 */
struct CfaoiParams *cfaoi_params_from_json(const char *json);

/**
 * Release a parameter handle. Null is ignored.
 *
 * # Safety
 * `p` must be a pointer returned by `cfaoi_params_from_json`, freed once.
 */
void cfaoi_params_free(struct CfaoiParams *p);

/**
 * Network sensing coverage probability.
 *
 * # Safety
 * `p` must be a live handle; `out` must point to writable memory.
 */
int32_t cfaoi_sensing_coverage(const struct CfaoiParams *p, double *out);

/**
 * Closed-form communication coverage lower bound at threshold `gamma_th`
 * (linear). `saturated` reports the psi <= 0 degenerate case and may be null.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable; `saturated` writable or null.
 */
int32_t cfaoi_comm_coverage(const struct CfaoiParams *p,
                            double gamma_th,
                            double *out,
                            int32_t *saturated);

/**
 * Network-wide PAVP bound minimized over theta. `zeta` in seconds,
 * `gamma_th` linear. Outputs may individually be null.
 *
 * # Safety
 * `p` must be a live handle; non-null outputs must be writable.
 */
int32_t cfaoi_pavp_networkwide(const struct CfaoiParams *p,
                               double zeta,
                               double gamma_th,
                               double *out_upsilon_nw,
                               double *out_theta_star,
                               int32_t *out_stable);

/**
 * Partition-factor line search. Returns `CFAOI_ERR_INFEASIBLE` when no
 * stable theta exists anywhere on the beta grid.
 *
 * # Safety
 * `p` must be a live handle; non-null outputs must be writable.
 */
int32_t cfaoi_solve_partition(const struct CfaoiParams *p,
                              double zeta,
                              double gamma_th,
                              uintptr_t grid_points,
                              double *out_beta_star,
                              double *out_upsilon_nw_star);

/**
 * Empirical PAVP over `realizations` spatial realizations with `packets`
 * packets each, seeded deterministically.
 *
 * # Safety
 * `p` must be a live handle; non-null outputs must be writable.
 */
int32_t cfaoi_simulate_pavp(const struct CfaoiParams *p,
                            double zeta,
                            double gamma_th,
                            uintptr_t realizations,
                            uintptr_t packets,
                            uint64_t seed,
                            double *out_mean,
                            double *out_std_err);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CFAOI_H */
