#ifndef BGK_NDG_H
#define BGK_NDG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call.
typedef enum BgkStatus {
  BGK_STATUS_OK = 0,
  BGK_STATUS_NULL_POINTER = 1,
  BGK_STATUS_INVALID_ARGUMENT = 2,
  BGK_STATUS_REALIZABILITY = 3,
  BGK_STATUS_BOUNDARY = 4,
  BGK_STATUS_CONFIG = 5,
  BGK_STATUS_IO = 6,
  BGK_STATUS_MESH_MISMATCH = 7,
  BGK_STATUS_BUFFER_TOO_SMALL = 8,
  BGK_STATUS_PANIC = 9,
} BgkStatus;

// Opaque solver handle.
typedef struct BgkSolver BgkSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a solver for the built-in case `case_name` with optional `key = value`
// overrides in `config` (may be null). Writes the handle to `*out`.
//
// # Safety
// `case_name` and `config` must be null or NUL-terminated strings; `out` must be
// valid for a pointer write.
enum BgkStatus bgk_solver_new(const char *case_name, const char *config, struct BgkSolver **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `s` must come from [`bgk_solver_new`] and not be used afterwards.
void bgk_solver_free(struct BgkSolver *s);

// One stable step, clamped to the final time. `dt_taken` may be null.
//
// # Safety
// `s` must be a live handle; `dt_taken` null or writable.
enum BgkStatus bgk_solver_step(struct BgkSolver *s, double *dt_taken);

// Steps until `t` (or the final time of the case, if earlier).
//
// # Safety
// `s` must be a live handle.
enum BgkStatus bgk_solver_advance_to(struct BgkSolver *s, double t);

// # Safety
// `s` must be a live handle; `t` writable.
enum BgkStatus bgk_solver_time(struct BgkSolver *s, double *t);

// Number of spatial nodes, the length of each profile array.
//
// # Safety
// `s` must be a live handle; `n` writable.
enum BgkStatus bgk_solver_node_count(struct BgkSolver *s, size_t *n);

// Copies nodal x, ρ, u and T into caller buffers of length `len`
// (at least the node count). Any buffer may be null to skip it.
//
// # Safety
// `s` must be a live handle; each non-null buffer must hold `len` doubles.
enum BgkStatus bgk_solver_profile(struct BgkSolver *s,
                                  double *x,
                                  double *rho,
                                  double *u,
                                  double *temperature,
                                  size_t len);

// Current `max_x |ε⟨m g⟩|` per moment, written to `out[0..3]`.
//
// # Safety
// `s` must be a live handle; `out` must hold 3 doubles.
enum BgkStatus bgk_solver_conservation_defect(struct BgkSolver *s, double *out);

// Message of the last failed call on this thread, or null. Valid until the
// next call on the same thread.
const char *bgk_last_error(void);

// Library version as a static string.
const char *bgk_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BGK_NDG_H */
