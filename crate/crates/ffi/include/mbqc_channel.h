#ifndef MBQC_CHANNEL_H
#define MBQC_CHANNEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MbqcMode {
  MBQC_MODE_AMPLITUDE = 0,
  MBQC_MODE_PHASE = 1,
  MBQC_MODE_BETA = 2,
} MbqcMode;

typedef enum MbqcEngine {
  MBQC_ENGINE_KRAUS = 0,
  MBQC_ENGINE_CIRCUIT = 1,
  MBQC_ENGINE_MBQC = 2,
} MbqcEngine;

typedef enum MbqcStatus {
  MBQC_STATUS_OK = 0,
  MBQC_STATUS_NULL_POINTER = 1,
  MBQC_STATUS_INVALID_ARGUMENT = 2,
  MBQC_STATUS_NUMERICAL_FAILURE = 3,
  MBQC_STATUS_PANIC = 4,
} MbqcStatus;

/**
 * Opaque result of one channel run.
 */
typedef struct MbqcChannel MbqcChannel;

/**
 * Channel run settings. Start from [`mbqc_channel_config_default`].
 */
typedef struct MbqcChannelConfig {
  enum MbqcMode mode;
  enum MbqcEngine engine;
  /**
   * Take the damping from `gamma`; otherwise from `alpha` and `beta`.
   */
  bool use_gamma;
  double gamma;
  double alpha;
  double beta;
  /**
   * Keep only runs whose first two outcomes are `s1`, `s2`.
   */
  bool postselect;
  uint8_t s1;
  uint8_t s2;
  double noise_v;
  double visibility;
  /**
   * Shots per measurement setting; 0 for exact expectations.
   */
  uint64_t shots;
  uint64_t seed;
} MbqcChannelConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Exact, ideal, mbqc-engine amplitude damping at Γ = 0.
 */
struct MbqcChannelConfig mbqc_channel_config_default(void);

/**
 * Realises a channel and reconstructs its process matrix. On success
 * `*out` owns a handle to free with [`mbqc_channel_free`].
 *
 * # Safety
 * `config` must point to a valid config and `out` to writable storage.
 */
enum MbqcStatus mbqc_channel_new(const struct MbqcChannelConfig *config, struct MbqcChannel **out);

/**
 * Releases a handle. Null is accepted.
 *
 * # Safety
 * `handle` must come from [`mbqc_channel_new`] and not be used afterwards.
 */
void mbqc_channel_free(struct MbqcChannel *handle);

/**
 * Reconstructed χ as row-major real and imaginary parts, 16 doubles each,
 * in the Pauli order I, X, Y, Z.
 *
 * # Safety
 * `re` and `im` must each hold 16 doubles.
 */
enum MbqcStatus mbqc_channel_chi(const struct MbqcChannel *handle, double *re, double *im);

/**
 * χ of the ideal Kraus channel for the same parameters.
 *
 * # Safety
 * `re` and `im` must each hold 16 doubles.
 */
enum MbqcStatus mbqc_channel_ideal_chi(const struct MbqcChannel *handle, double *re, double *im);

/**
 * Process fidelity against the ideal channel, and the bootstrap σ (NaN for
 * exact runs). `sigma` may be null.
 *
 * # Safety
 * `fidelity` must be writable; `sigma` writable or null.
 */
enum MbqcStatus mbqc_channel_fidelity(const struct MbqcChannel *handle,
                                      double *fidelity,
                                      double *sigma);

/**
 * Local-Pauli fidelity estimate of the noisy cluster resource, its exact
 * value, and the entanglement verdict. `shots` = 0 uses exact
 * expectations. `exact` and `gme` may be null.
 *
 * # Safety
 * `estimate` must be writable; `exact` and `gme` writable or null.
 */
enum MbqcStatus mbqc_cluster_fidelity(double noise_v,
                                      double visibility,
                                      uint64_t shots,
                                      uint64_t seed,
                                      double *estimate,
                                      double *exact,
                                      bool *gme);

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next call into this library from the same thread.
 */
const char *mbqc_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MBQC_CHANNEL_H */
