#ifndef IPSCORE_H
#define IPSCORE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum IpsStatus {
  IPS_STATUS_OK = 0,
  IPS_STATUS_NULL_POINTER = 1,
  IPS_STATUS_INVALID_UTF8 = 2,
  IPS_STATUS_INVALID_ARGUMENT = 3,
  IPS_STATUS_SPACE_MISMATCH = 4,
  IPS_STATUS_TOO_MANY_GENERATORS = 5,
  IPS_STATUS_IO = 6,
  IPS_STATUS_JSON = 7,
  IPS_STATUS_BUFFER_TOO_SMALL = 8,
  IPS_STATUS_PANIC = 9,
} IpsStatus;

// A credal set.
typedef struct IpsCredalSet IpsCredalSet;

// A scoring rule built from a run configuration.
typedef struct IpsRule IpsRule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *ips_last_error(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void ips_string_free(char *s);

// Parses `{"outcomes": [...], "generators": [[...], ...]}`.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum IpsStatus ips_credal_set_from_json(const char *json, struct IpsCredalSet **out);

// Binary interval `{Bern(lo), Bern(hi)}`.
//
// # Safety
// `out` must be writable.
enum IpsStatus ips_credal_set_interval(double lo, double hi, struct IpsCredalSet **out);

// # Safety
// `set` must come from this library and not have been freed.
void ips_credal_set_free(struct IpsCredalSet *set);

// Number of outcomes and extreme points.
//
// # Safety
// `set` must be a live handle; outputs must be writable.
enum IpsStatus ips_credal_set_shape(const struct IpsCredalSet *set,
                                    size_t *n_outcomes,
                                    size_t *n_extremes);

// Copies the extreme points, row-major, into `buf` of `len` doubles.
//
// # Safety
// `set` must be a live handle; `buf` must hold `len` doubles.
enum IpsStatus ips_credal_set_extreme_points(const struct IpsCredalSet *set,
                                             double *buf,
                                             size_t len);

// Whether the two sets have the same convex hull.
//
// # Safety
// Handles must be live; `out` must be writable.
enum IpsStatus ips_credal_equivalent(const struct IpsCredalSet *a,
                                     const struct IpsCredalSet *b,
                                     bool *out);

// Builds the rule a run configuration describes (JSON; `{}` gives the
// defaults). The problem is sized to the configured belief.
//
// # Safety
// `config_json` must be a nul-terminated string; `out` must be writable.
enum IpsStatus ips_rule_from_config(const char *config_json, struct IpsRule **out);

// # Safety
// `rule` must come from this library and not have been freed.
void ips_rule_free(struct IpsRule *rule);

// Forecaster value of `report` under `belief`.
//
// # Safety
// Handles must be live; `out` must be writable.
enum IpsStatus ips_rule_value(const struct IpsRule *rule,
                              const struct IpsCredalSet *belief,
                              const struct IpsCredalSet *report,
                              double *out);

// Score paid for `report` when `outcome` occurs. In randomized mode the
// weights are drawn with the configured seed.
//
// # Safety
// Handles must be live; `out` must be writable.
enum IpsStatus ips_rule_score(const struct IpsRule *rule,
                              const struct IpsCredalSet *report,
                              size_t outcome,
                              double *out);

// Runs properness verification for a run configuration and returns the
// verdict JSON in `out_json`. `verdict_met` receives whether the mode's
// expected verdict holds.
//
// # Safety
// `config_json` must be a nul-terminated string; outputs must be writable.
enum IpsStatus ips_verify(const char *config_json, bool *verdict_met, char **out_json);

// Score landscape as CSV text (`q1,q2,value`). Also written to the
// configured `out` path when one is set.
//
// # Safety
// `config_json` must be a nul-terminated string; `out_csv` must be writable.
enum IpsStatus ips_landscape_csv(const char *config_json, char **out_csv);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IPSCORE_H */
