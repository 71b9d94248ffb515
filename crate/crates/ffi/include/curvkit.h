#ifndef CURVKIT_H
#define CURVKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum CkStatus {
  CK_STATUS_OK = 0,
  CK_STATUS_NULL_POINTER = 1,
  CK_STATUS_INVALID_UTF8 = 2,
  CK_STATUS_PARSE = 3,
  CK_STATUS_INVALID_ARGUMENT = 4,
  CK_STATUS_NUMERIC = 5,
  CK_STATUS_UNKNOWN_ENTRY = 6,
  CK_STATUS_PANIC = 7,
} CkStatus;

/**
 * A parsed metric definition.
 */
typedef struct CkMetric CkMetric;

/**
 * A classification report with its JSON rendering.
 */
typedef struct CkReport CkReport;

/**
 * Sampling options. `k = 0` means `order − 2`.
 */
typedef struct CkConfig {
  size_t points;
  uint64_t seed;
  size_t order;
  size_t k;
  double tol_rel;
  double tol_abs;
} CkConfig;

/**
 * Aggregate verdicts; each field is 1 when the condition holds at every
 * evaluated point.
 */
typedef struct CkVerdicts {
  uint8_t constant_curvature;
  uint8_t symmetric;
  uint8_t two_symmetric;
  uint8_t semisymmetric;
  uint8_t ricci_flat;
  uint8_t generic;
  uint8_t lorentzian;
  uint8_t findings_pass;
  size_t points_evaluated;
  size_t points_skipped;
} CkVerdicts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Defaults: 20 points, seed 42, order 4, tolerances 1e-8 / 1e-10.
 */
struct CkConfig ck_config_default(void);

/**
 * Parses a metric file held in `text`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum CkStatus ck_metric_parse(const char *text, struct CkMetric **out);

/**
 * Looks up a built-in metric by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum CkStatus ck_metric_from_catalog(const char *name, struct CkMetric **out);

/**
 * Spacetime dimension, or 0 for a null handle.
 *
 * # Safety
 * `metric` must be null or a live handle.
 */
size_t ck_metric_dim(const struct CkMetric *metric);

/**
 * # Safety
 * `metric` must be null or a handle not yet freed.
 */
void ck_metric_free(struct CkMetric *metric);

/**
 * Samples and classifies `metric`. A null `config` uses the defaults.
 *
 * # Safety
 * `metric` must be a live handle, `config` null or valid, `out` writable.
 */
enum CkStatus ck_classify(const struct CkMetric *metric,
                          const struct CkConfig *config,
                          struct CkReport **out);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum CkStatus ck_report_verdicts(const struct CkReport *report, struct CkVerdicts *out);

/**
 * The report as JSON. The string is owned by the report and lives until
 * [`ck_report_free`].
 *
 * # Safety
 * `report` must be null or a live handle.
 */
const char *ck_report_json(const struct CkReport *report);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void ck_report_free(struct CkReport *report);

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next `ck_*` call on the same thread.
 */
const char *ck_last_error(void);

/**
 * Static name of a status code.
 */
const char *ck_status_name(enum CkStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CURVKIT_H */
