#ifndef DETCAL_H
#define DETCAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum DetcalStatus {
  DETCAL_STATUS_OK = 0,
  DETCAL_STATUS_NULL_POINTER = 1,
  DETCAL_STATUS_INVALID_ARGUMENT = 2,
  DETCAL_STATUS_DOMAIN = 3,
  DETCAL_STATUS_SINGULAR_OUTCOME = 4,
  DETCAL_STATUS_ZERO_INFORMATION = 5,
  DETCAL_STATUS_DIVERGENT = 6,
  DETCAL_STATUS_CONVERGENCE_FAILURE = 7,
  DETCAL_STATUS_BRACKET_ERROR = 8,
  DETCAL_STATUS_NO_THRESHOLD = 9,
  DETCAL_STATUS_BOUNDARY_ESTIMATE = 10,
  DETCAL_STATUS_PANIC = 11,
} DetcalStatus;

typedef enum DetcalMethod {
  DETCAL_METHOD_CLOSED_FORM = 0,
  DETCAL_METHOD_QUADRATURE = 1,
  DETCAL_METHOD_FINITE_DIFFERENCE = 2,
} DetcalMethod;

/**
 * Opaque detector model.
 */
typedef struct DetcalDetector DetcalDetector;

/**
 * Opaque probe state.
 */
typedef struct DetcalProbe DetcalProbe;

/**
 * A Fisher value. When `divergent` is true, `value` is +∞.
 */
typedef struct DetcalFisher {
  double value;
  bool divergent;
  enum DetcalMethod method;
  double error_estimate;
} DetcalFisher;

/**
 * Summary of a simulated calibration campaign.
 */
typedef struct DetcalCrbReport {
  double mean_estimate;
  double empirical_variance;
  double crb;
  double ratio;
  double ratio_floor;
  uint32_t boundary_count;
  bool bound_respected;
} DetcalCrbReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *detcal_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *detcal_version(void);

/**
 * Fock state |n⟩.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DetcalStatus detcal_probe_fock(uint32_t n, struct DetcalProbe **out);

/**
 * Coherent state of mean photon number `mean_photons`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DetcalStatus detcal_probe_coherent(double mean_photons, struct DetcalProbe **out);

/**
 * Heralded single photon with heralding efficiency `xi`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DetcalStatus detcal_probe_heralded(double xi, struct DetcalProbe **out);

/**
 * Fock mixture `Σ weights[i] |photons[i]⟩⟨photons[i]|`; weights sum to 1.
 *
 * # Safety
 * `photons` and `weights` must point to `len` readable elements; `out`
 * must be valid for writes.
 */
enum DetcalStatus detcal_probe_mixture(const uint32_t *photons,
                                       const double *weights,
                                       size_t len,
                                       struct DetcalProbe **out);

/**
 * Parses `fock:N`, `coherent:NBAR` or `heralded:XI`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum DetcalStatus detcal_probe_parse(const char *spec, struct DetcalProbe **out);

/**
 * Mean photon number of a probe; NaN for a null handle.
 *
 * # Safety
 * `probe` must be NULL or a live handle.
 */
double detcal_probe_mean_photons(const struct DetcalProbe *probe);

/**
 * Releases a probe. NULL is ignored.
 *
 * # Safety
 * `probe` must be NULL or a handle not yet freed.
 */
void detcal_probe_free(struct DetcalProbe *probe);

/**
 * On/off detector with dark-count exponent `delta ≥ 0`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DetcalStatus detcal_detector_onoff(double delta, struct DetcalDetector **out);

/**
 * K-outcome photon-number-resolving detector, `k ≥ 2`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DetcalStatus detcal_detector_koutcome(uint32_t k, struct DetcalDetector **out);

/**
 * Homodyne detector with default quadrature settings.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DetcalStatus detcal_detector_homodyne(struct DetcalDetector **out);

/**
 * Releases a detector. NULL is ignored.
 *
 * # Safety
 * `detector` must be NULL or a handle not yet freed.
 */
void detcal_detector_free(struct DetcalDetector *detector);

/**
 * Fisher information of `probe` through `detector` at efficiency `eta`.
 *
 * # Safety
 * Handles must be live; `out` must be valid for writes.
 */
enum DetcalStatus detcal_fisher(const struct DetcalProbe *probe,
                                const struct DetcalDetector *detector,
                                double eta,
                                struct DetcalFisher *out);

/**
 * Cramér–Rao variance bound `1/(trials·F)`.
 *
 * # Safety
 * Handles must be live; `out` must be valid for writes.
 */
enum DetcalStatus detcal_crb_variance(const struct DetcalProbe *probe,
                                      const struct DetcalDetector *detector,
                                      double eta,
                                      uint64_t trials,
                                      double *out);

/**
 * Heralding efficiency ξ* at which a heralded photon matches `reference`.
 * A NaN `eta` selects the default evaluation efficiency for the detector.
 *
 * # Safety
 * Handles must be live; `out` must be valid for writes.
 */
enum DetcalStatus detcal_heralding_threshold(const struct DetcalDetector *detector,
                                             const struct DetcalProbe *reference,
                                             double eta,
                                             double *out);

/**
 * Simulates `replicates` experiments of `trials` shots and compares the
 * spread of the maximum-likelihood estimates with the Cramér–Rao bound.
 *
 * # Safety
 * Handles must be live; `out` must be valid for writes.
 */
enum DetcalStatus detcal_simulate_crb(const struct DetcalProbe *probe,
                                      const struct DetcalDetector *detector,
                                      double eta,
                                      uint64_t trials,
                                      uint32_t replicates,
                                      uint64_t seed,
                                      struct DetcalCrbReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DETCAL_H */
