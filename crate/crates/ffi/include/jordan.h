#ifndef JORDAN_H
#define JORDAN_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum JordanStatus {
  JORDAN_STATUS_OK = 0,
  JORDAN_STATUS_NULL_ARGUMENT = 1,
  JORDAN_STATUS_INVALID_INPUT = 2,
  JORDAN_STATUS_NUMERIC = 3,
  JORDAN_STATUS_PRECONDITION = 4,
  JORDAN_STATUS_BUFFER_TOO_SMALL = 5,
  JORDAN_STATUS_BREAKING = 6,
  JORDAN_STATUS_OUT_OF_SUPPORT = 7,
  JORDAN_STATUS_PANIC = 8,
} JordanStatus;

// Characteristic variant of a solution family.
typedef enum JordanVariant {
  JORDAN_VARIANT_PAPER = 0,
  JORDAN_VARIANT_REDERIVED = 1,
} JordanVariant;

// Opaque exact-solution family with its initial data.
typedef struct JordanFamily JordanFamily;

// Opaque quasilinear system.
typedef struct JordanSystem JordanSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
//
// The pointer stays valid until the next call on the same thread.
const char *jordan_last_error(void);

// Parse a system descriptor (JSON).
//
// # Safety
// `json` must be a NUL-terminated string and the output pointer valid.
enum JordanStatus jordan_system_from_json(const char *json, struct JordanSystem **out_sys);

// Look up a catalog system: `canonical`, `wdvv-t`, `wdvv-s`, `hard-rod`, `counterexample`.
//
// # Safety
// `name` must be a NUL-terminated string and the output pointer valid.
enum JordanStatus jordan_system_catalog(const char *name, struct JordanSystem **out_sys);

// # Safety
// `sys` must come from this library and not be used afterwards. Null is ignored.
void jordan_system_free(struct JordanSystem *sys);

// Number of field components.
//
// # Safety
// `sys` must be a live handle and `n` a valid pointer.
enum JordanStatus jordan_system_dim(const struct JordanSystem *sys, uintptr_t *n);

// Linear-degeneracy row at `u` (length `n`), written to `row`.
//
// # Safety
// `u` must hold `len` values and `row` at least `cap`.
enum JordanStatus jordan_system_lindeg(const struct JordanSystem *sys,
                                       const double *u,
                                       uintptr_t len,
                                       double *row,
                                       uintptr_t cap);

// Characteristic polynomial coefficients `c₁..cₙ` of `det(λ − A) = λⁿ + c₁λⁿ⁻¹ + … + cₙ`.
//
// # Safety
// `u` must hold `len` values and `coeffs` at least `cap`.
enum JordanStatus jordan_system_char_poly(const struct JordanSystem *sys,
                                          const double *u,
                                          uintptr_t len,
                                          double *coeffs,
                                          uintptr_t cap);

// Block eigenvalues at `u`, one per Jordan block.
//
// # Safety
// `u` must hold `len` values and `values` at least `cap`.
enum JordanStatus jordan_system_eigenvalues(const struct JordanSystem *sys,
                                            const double *u,
                                            uintptr_t len,
                                            double *values,
                                            uintptr_t cap);

// Parse a family descriptor (JSON), integrating its closure ODE if present.
//
// # Safety
// `json` must be a NUL-terminated string and the output pointer valid.
enum JordanStatus jordan_family_from_json(const char *json, struct JordanFamily **out_fam);

// Built-in fixture: `canonical2`, `wdvv-t`, `wdvv-s`, `hardrod1`, `hardrod2`.
//
// # Safety
// `name` must be a NUL-terminated string and the output pointer valid.
enum JordanStatus jordan_family_fixture(const char *name,
                                        enum JordanVariant variant,
                                        struct JordanFamily **out_fam);

// # Safety
// `fam` must come from this library and not be used afterwards. Null is ignored.
void jordan_family_free(struct JordanFamily *fam);

// Number of field components.
//
// # Safety
// `fam` must be a live handle and `n` a valid pointer.
enum JordanStatus jordan_family_dim(const struct JordanFamily *fam, uintptr_t *n);

// Characteristic label σ through `(x, t)`.
//
// # Safety
// `fam` must be a live handle and `sigma` a valid pointer.
enum JordanStatus jordan_family_solve_sigma(const struct JordanFamily *fam,
                                            double x,
                                            double t,
                                            double *sigma);

// Exact solution `u(x, t)`.
//
// # Safety
// `fam` must be a live handle and `u` must hold at least `cap` values.
enum JordanStatus jordan_family_eval(const struct JordanFamily *fam,
                                     double x,
                                     double t,
                                     double *u,
                                     uintptr_t cap);

// Finite-difference verification report as JSON; release with [`jordan_string_free`].
//
// The step ladder is `h, h/2, …` with `levels` entries.
//
// # Safety
// `fam` must be a live handle and `json` a valid pointer.
enum JordanStatus jordan_family_verify(const struct JordanFamily *fam,
                                       double x0,
                                       double x1,
                                       uintptr_t nx,
                                       double t0,
                                       double t1,
                                       uintptr_t nt,
                                       double h,
                                       uintptr_t levels,
                                       char **json);

// # Safety
// `s` must come from this library and not be used afterwards. Null is ignored.
void jordan_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JORDAN_H */
