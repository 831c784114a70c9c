/* C interface to the p-adic hard-core engine. */

#ifndef PADIC_HC_H
#define PADIC_HC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes; the numeric values match the CLI exit-code contract.
typedef enum PhcStatus {
  PHC_STATUS_OK = 0,
  // A gate/ball condition failed, existence is undecided, or no solution
  // of the requested class exists.
  PHC_STATUS_GATE_FAILED = 2,
  PHC_STATUS_NUMERICAL_FAILURE = 3,
  PHC_STATUS_BAD_INPUT = 4,
  PHC_STATUS_CAP_EXCEEDED = 5,
  PHC_STATUS_NULL_POINTER = 6,
  PHC_STATUS_PANIC = 7,
} PhcStatus;

// Opaque handle: an element of Q_p at finite precision.
typedef struct PhcPadic PhcPadic;

// Opaque handle: validated model parameters (p, k, J, lambda).
typedef struct PhcParams PhcParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Release a string allocated by this library.
//
// # Safety
// `s` must have been returned by a `phc_*` function and not yet freed.
void phc_string_free(char *s);

// Build num/den as an element of Q_p with `precision` unit digits.
//
// # Safety
// `out` must be a valid pointer.
enum PhcStatus phc_padic_from_rational(uint64_t prime,
                                       uint32_t precision,
                                       int64_t num,
                                       int64_t den,
                                       struct PhcPadic **out);

// # Safety
// `x` must be a live handle from this library or null.
void phc_padic_free(struct PhcPadic *x);

// Canonical rendering "p^v * (d0 + d1*p + ...) + O(p^m)".
//
// # Safety
// `x` must be a live handle; `out` a valid pointer.
enum PhcStatus phc_padic_render(const struct PhcPadic *x, char **out);

// JSON form {prime, valuation, digits, precision}.
//
// # Safety
// `x` must be a live handle; `out` a valid pointer.
enum PhcStatus phc_padic_to_json(const struct PhcPadic *x, char **out);

// Valuation; `is_infinite` marks a value that is zero at precision.
//
// # Safety
// All pointers must be valid.
enum PhcStatus phc_padic_valuation(const struct PhcPadic *x, int64_t *valuation, bool *is_infinite);

// Parameters from the fugacity lambda = num/den (must lie in E_p).
//
// # Safety
// `out` must be a valid pointer.
enum PhcStatus phc_params_from_fugacity(uint64_t p,
                                        uint32_t k,
                                        int64_t num,
                                        int64_t den,
                                        uint32_t precision,
                                        struct PhcParams **out);

// Parameters from the coupling J = num/den (|J|_p <= 1/p required);
// lambda is computed as exp_p(J).
//
// # Safety
// `out` must be a valid pointer.
enum PhcStatus phc_params_from_coupling(uint64_t p,
                                        uint32_t k,
                                        int64_t num,
                                        int64_t den,
                                        uint32_t precision,
                                        struct PhcParams **out);

// # Safety
// `params` must be a live handle from this library or null.
void phc_params_free(struct PhcParams *params);

// # Safety
// `holds` must be a valid pointer.
enum PhcStatus phc_existence_gate(uint64_t p, uint32_t k, bool *holds);

// # Safety
// `holds` must be a valid pointer.
enum PhcStatus phc_periodic_gate(uint64_t p, uint32_t k, bool *holds);

// JSON table {k: [primes p <= pmax with p | 2^k - 1]}.
//
// # Safety
// `out` must be a valid pointer.
enum PhcStatus phc_existence_table_json(uint32_t kmax, uint64_t pmax, char **out);

// JSON table for the period-2 gate (p | 2^k - 1 and p | k - 2).
//
// # Safety
// `out` must be a valid pointer.
enum PhcStatus phc_periodic_table_json(uint32_t kmax, uint64_t pmax, char **out);

// Run the TI solver; writes the full report JSON (also on gate failure) and
// returns the report's status.
//
// # Safety
// `params` must be a live handle; `out` a valid pointer.
enum PhcStatus phc_ti_solve_json(const struct PhcParams *params, uint32_t precision, char **out);

// Run the period-2 solver (closed form at (k, p) = (2, 3), general route
// otherwise); same report/status convention as `phc_ti_solve_json`.
//
// # Safety
// `params` must be a live handle; `out` a valid pointer.
enum PhcStatus phc_periodic_solve_json(const struct PhcParams *params,
                                       uint32_t precision,
                                       char **out);

// Exhaustive residue scan of the constant boundary law in the E_p window,
// as a JSON array of residues mod p^modulus_exponent.
//
// # Safety
// `params` must be a live handle; `out` a valid pointer.
enum PhcStatus phc_uniqueness_scan_json(const struct PhcParams *params,
                                        uint32_t modulus_exponent,
                                        char **out);

// Admissible-configuration counting report (full tree); `p` = 0 omits the
// norm field. Exact DP count plus the closed form and their match flag.
//
// # Safety
// `out` must be a valid pointer.
enum PhcStatus phc_oracle_count_json(uint32_t k, uint32_t n, uint64_t p, char **out);

// Compatibility of the finite-volume measures across one level on the
// k-branch, under the TI boundary law. Returns `Ok` iff compatible.
//
// # Safety
// `params` must be a live handle; `out` a valid pointer.
enum PhcStatus phc_oracle_compat_json(const struct PhcParams *params,
                                      uint32_t n,
                                      uintptr_t cap,
                                      uint32_t precision,
                                      char **out);

// Measure-norm report on the full tree under the TI boundary law:
// normalization, |mu| range, and the |Omega| norm.
//
// # Safety
// `params` must be a live handle; `out` a valid pointer.
enum PhcStatus phc_oracle_norms_json(const struct PhcParams *params,
                                     uint32_t n,
                                     uintptr_t cap,
                                     uint32_t precision,
                                     char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PADIC_HC_H */
