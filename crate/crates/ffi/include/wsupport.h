#ifndef WSUPPORT_H
#define WSUPPORT_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum WsStatus {
  WS_STATUS_OK = 0,
  WS_STATUS_NULL_POINTER = 1,
  WS_STATUS_INVALID_ARGUMENT = 2,
  WS_STATUS_UTF8 = 3,
  WS_STATUS_GROUP_TOO_LARGE = 4,
  WS_STATUS_SINGULAR_POINT = 5,
  /**
   * Any other library error; see `ws_last_error`.
   */
  WS_STATUS_DOMAIN = 6,
  WS_STATUS_PANIC = 7,
} WsStatus;

/**
 * A finite reflection group stored as an explicit element list.
 */
typedef struct WsGroup WsGroup;

/**
 * A catalog operator together with its regularization.
 */
typedef struct WsOperator WsOperator;

/**
 * A root system with its chosen simple system.
 */
typedef struct WsRootSystem WsRootSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *ws_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ws_version(void);

/**
 * Release a string returned by the library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library.
 */
void ws_string_free(char *s);

/**
 * Build the root system of `family` ("A", "B", "C", "D", "BC", "I2") and
 * `rank` (for I2 the dihedral order).
 *
 * # Safety
 * `family` must be a NUL-terminated string; `out` must be writable.
 */
enum WsStatus ws_root_system_new(const char *family, size_t rank, struct WsRootSystem **out);

/**
 * Build a root system from a label such as "A2", "BC1" or "I2(5)".
 *
 * # Safety
 * `label` must be a NUL-terminated string; `out` must be writable.
 */
enum WsStatus ws_root_system_from_label(const char *label, struct WsRootSystem **out);

/**
 * # Safety
 * `rs` must be null or a handle from `ws_root_system_new`.
 */
void ws_root_system_free(struct WsRootSystem *rs);

/**
 * Dimension of the ambient space; 0 for a null handle.
 *
 * # Safety
 * `rs` must be null or a live handle.
 */
size_t ws_root_system_ambient_dim(const struct WsRootSystem *rs);

/**
 * Number of roots; 0 for a null handle.
 *
 * # Safety
 * `rs` must be null or a live handle.
 */
size_t ws_root_system_len(const struct WsRootSystem *rs);

/**
 * Copy root `index` into `out`, which holds `len` doubles (at least the
 * ambient dimension).
 *
 * # Safety
 * `rs` must be a live handle; `out` must point to `len` writable doubles.
 */
enum WsStatus ws_root_system_root(const struct WsRootSystem *rs,
                                  size_t index,
                                  double *out,
                                  size_t len);

/**
 * Enumerate the reflection group of `rs`, failing with
 * `GroupTooLarge` beyond `cap` elements.
 *
 * # Safety
 * `rs` must be a live handle; `out` must be writable.
 */
enum WsStatus ws_group_new(const struct WsRootSystem *rs, size_t cap, struct WsGroup **out);

/**
 * # Safety
 * `g` must be null or a handle from `ws_group_new`.
 */
void ws_group_free(struct WsGroup *g);

/**
 * Group order; 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t ws_group_order(const struct WsGroup *g);

/**
 * Build catalog operator `name` on the root system labelled `label` (null
 * for the operator's default), with `nparams` named parameters.
 *
 * # Safety
 * Strings must be NUL-terminated; `keys` and `values` must hold `nparams`
 * entries; `out` must be writable.
 */
enum WsStatus ws_operator_new(const char *name,
                              const char *label,
                              const char *const *keys,
                              const double *values,
                              size_t nparams,
                              struct WsOperator **out);

/**
 * # Safety
 * `op` must be null or a handle from `ws_operator_new`.
 */
void ws_operator_free(struct WsOperator *op);

/**
 * Number of variables the operator acts on; 0 for a null handle.
 *
 * # Safety
 * `op` must be null or a live handle.
 */
size_t ws_operator_dim(const struct WsOperator *op);

/**
 * Principal symbol at `(x, lambda)`, both of length `n`. With
 * `regularized` nonzero the canonical regularization is used.
 *
 * # Safety
 * `op` must be a live handle; `x` and `lambda` must hold `n` doubles;
 * `out` must be writable.
 */
enum WsStatus ws_operator_symbol(const struct WsOperator *op,
                                 bool regularized,
                                 const double *x,
                                 const double *lambda,
                                 size_t n,
                                 double *out);

/**
 * Run the factorization check of the regularized operator; writes
 * `min |P|` and returns `Domain` if the check fails.
 *
 * # Safety
 * `op` must be a live handle; `min_abs_p` must be writable.
 */
enum WsStatus ws_operator_check_factorization(const struct WsOperator *op,
                                              size_t samples,
                                              uint64_t seed,
                                              double *min_abs_p);

/**
 * Run a verification scenario with default settings and `seed`. The JSON
 * report is written to `*json` (free with `ws_string_free`) and `*passed`
 * receives the verdict.
 *
 * # Safety
 * `name` must be NUL-terminated; `json` and `passed` must be writable.
 */
enum WsStatus ws_verify_scenario(const char *name, uint64_t seed, char **json, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WSUPPORT_H */
