#ifndef MOMENT_INVARIANTS_H
#define MOMENT_INVARIANTS_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MiStatus {
  MI_STATUS_OK = 0,
  MI_STATUS_NULL_POINTER = 1,
  MI_STATUS_INVALID_UTF8 = 2,
  MI_STATUS_PARSE_ERROR = 3,
  MI_STATUS_MODEL_ERROR = 4,
  MI_STATUS_ANALYSIS_ERROR = 5,
  MI_STATUS_NOT_FOUND = 6,
  MI_STATUS_EVAL_ERROR = 7,
  MI_STATUS_VALIDATION_FAILED = 8,
  MI_STATUS_PANIC = 9,
} MiStatus;

/**
 * A parsed and validated program.
 */
typedef struct MiProgram MiProgram;

/**
 * Closed forms computed for one program.
 */
typedef struct MiReport MiReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string.
 */
const char *mi_version(void);

/**
 * Message for the last failed call on this thread, empty after success.
 * Valid until the next call on the same thread.
 */
const char *mi_last_error(void);

/**
 * # Safety
 * `source` must be a NUL-terminated string and `out` writable.
 */
enum MiStatus mi_program_parse(const char *source, struct MiProgram **out);

/**
 * Loads a bundled benchmark program, with its default parameter values.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` writable.
 */
enum MiStatus mi_program_from_corpus(const char *name, struct MiProgram **out);

/**
 * # Safety
 * `prog` must come from this library and not be used afterwards.
 */
void mi_program_free(struct MiProgram *prog);

/**
 * Raw moments up to order `k`, plus central moments and variances when
 * the flags are set.
 *
 * # Safety
 * `prog` must be a live handle and `out` writable.
 */
enum MiStatus mi_analyze(const struct MiProgram *prog,
                         uint32_t k,
                         bool central,
                         bool variance,
                         struct MiReport **out);

/**
 * # Safety
 * `rep` must come from this library and not be used afterwards.
 */
void mi_report_free(struct MiReport *rep);

/**
 * # Safety
 * `rep` must be a live handle and `out` writable.
 */
enum MiStatus mi_report_to_json(const struct MiReport *rep, char **out);

/**
 * # Safety
 * `rep` must be a live handle and `out` writable.
 */
enum MiStatus mi_report_to_text(const struct MiReport *rep, char **out);

/**
 * # Safety
 * `rep` must be a live handle and `out` writable.
 */
enum MiStatus mi_report_moment_count(const struct MiReport *rep, size_t *out);

/**
 * Label of moment `index`, such as `E[x^2(n)]`.
 *
 * # Safety
 * `rep` must be a live handle and `out` writable.
 */
enum MiStatus mi_report_moment_label(const struct MiReport *rep, size_t index, char **out);

/**
 * Exact value of moment `index` at iteration `n`, written as a rational
 * string. `bindings` is `name=value` pairs separated by commas, or null.
 *
 * # Safety
 * `rep` must be a live handle, `bindings` null or NUL-terminated, and
 * `out` writable.
 */
enum MiStatus mi_report_eval(const struct MiReport *rep,
                             size_t index,
                             uint64_t n,
                             const char *bindings,
                             char **out);

/**
 * Confirms the report by exact enumeration or simulation. The JSON
 * validation report is written to `out` either way; the status is
 * `VALIDATION_FAILED` when some comparison fails. Null `bindings` uses
 * the program's defaults.
 *
 * # Safety
 * Handles must be live, `bindings` null or NUL-terminated, `out` writable.
 */
enum MiStatus mi_check(const struct MiProgram *prog,
                       const struct MiReport *rep,
                       const char *bindings,
                       size_t runs,
                       uint64_t seed,
                       char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void mi_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOMENT_INVARIANTS_H */
