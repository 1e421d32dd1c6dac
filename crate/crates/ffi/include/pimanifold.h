#ifndef PIMANIFOLD_H
#define PIMANIFOLD_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes of every fallible call.
 */
typedef enum PimStatus {
  PIM_STATUS_OK = 0,
  PIM_STATUS_NULL_POINTER = 1,
  PIM_STATUS_INVALID_UTF8 = 2,
  PIM_STATUS_PARSE_ERROR = 3,
  PIM_STATUS_VALIDATION_ERROR = 4,
  PIM_STATUS_INVARIANT_VIOLATION = 5,
  PIM_STATUS_INVALID_ARGUMENT = 6,
  PIM_STATUS_INTERNAL = 7,
} PimStatus;

typedef enum PimClass {
  PIM_CLASS_F0 = 0,
  PIM_CLASS_F1 = 1,
  PIM_CLASS_F4 = 4,
  PIM_CLASS_F5 = 5,
  PIM_CLASS_F11 = 11,
  PIM_CLASS_UNRESOLVED = -1,
} PimClass;

typedef enum PimSuite {
  PIM_SUITE_CORE = 0,
  PIM_SUITE_PAPER = 1,
  PIM_SUITE_ALL = 2,
} PimSuite;

/**
 * Opaque instance handle.
 */
typedef struct PimInstance PimInstance;

/**
 * Classification summary. `theta_xi` is exact only when it fits `i64/i64`,
 * which `theta_xi_exact` reports.
 */
typedef struct PimClassification {
  enum PimClass label;
  int64_t theta_xi_num;
  int64_t theta_xi_den;
  bool theta_xi_exact;
  bool f4_prime;
  bool para_sasaki;
  bool paracontact;
} PimClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a spec file given as NUL-terminated UTF-8.
 *
 * # Safety
 * `text` must be a valid C string and `out` a writable pointer.
 */
enum PimStatus pim_instance_from_spec(const char *text, struct PimInstance **out);

/**
 * The five-dimensional example with `λ = lambda_num/lambda_den`, `μ = mu_num/mu_den`.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum PimStatus pim_instance_example(int64_t lambda_num,
                                    int64_t lambda_den,
                                    int64_t mu_num,
                                    int64_t mu_den,
                                    struct PimInstance **out);

/**
 * Releases an instance; null is ignored.
 *
 * # Safety
 * `instance` must come from this library and not be freed twice.
 */
void pim_instance_free(struct PimInstance *instance);

/**
 * Frame dimension, or 0 for null.
 *
 * # Safety
 * `instance` must be null or a live handle.
 */
size_t pim_instance_dim(const struct PimInstance *instance);

/**
 * # Safety
 * `instance` must be a live handle and `out` a writable pointer.
 */
enum PimStatus pim_classify(const struct PimInstance *instance, struct PimClassification *out);

/**
 * Runs the selected suites and writes the JSON report. `fatal_count`, when
 * not null, receives the number of hard invariants with a residual.
 *
 * # Safety
 * `instance` must be a live handle; `out_json` must be writable;
 * `fatal_count` must be null or writable.
 */
enum PimStatus pim_verify_json(const struct PimInstance *instance,
                               enum PimSuite suite,
                               char **out_json,
                               size_t *fatal_count);

/**
 * Writes the instance as spec-file text.
 *
 * # Safety
 * `instance` must be a live handle and `out` writable.
 */
enum PimStatus pim_emit_spec(const struct PimInstance *instance, char **out);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void pim_string_free(char *s);

/**
 * Message of the last failed call on this thread, empty after a success.
 * Valid until the next call into the library on the same thread.
 */
const char *pim_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PIMANIFOLD_H */
