#ifndef FOCKBLOCH_H
#define FOCKBLOCH_H

/* generated by cbindgen from src/lib.rs; do not edit */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FbStatus {
  FB_STATUS_OK = 0,
  FB_STATUS_NULL_POINTER = 1,
  FB_STATUS_INVALID_PARAMETER = 2,
  FB_STATUS_DEGENERATE_TRUNCATION = 3,
  FB_STATUS_TRUNCATION_INSUFFICIENT = 4,
  FB_STATUS_NORM_DRIFT = 5,
  FB_STATUS_STEP_SIZE_UNDERFLOW = 6,
  FB_STATUS_NO_DISCRETE_LADDER = 7,
  FB_STATUS_CONTINUUM_SPECTRUM = 8,
  FB_STATUS_SHORT_SERIES = 9,
  FB_STATUS_BOUNDARY_MAXIMUM = 10,
  FB_STATUS_INSUFFICIENT_SPAN = 11,
  FB_STATUS_TOO_FEW_CONVERGED = 12,
  FB_STATUS_INDEX_OUT_OF_RANGE = 13,
  FB_STATUS_BUFFER_TOO_SMALL = 14,
  FB_STATUS_PANIC = 99,
} FbStatus;

typedef enum FbRevivalVerdict {
  FB_REVIVAL_VERDICT_CONFIRMED = 0,
  FB_REVIVAL_VERDICT_NONE = 1,
  FB_REVIVAL_VERDICT_INCONCLUSIVE = 2,
} FbRevivalVerdict;

typedef enum FbSpectralVerdict {
  FB_SPECTRAL_VERDICT_DISCRETE = 0,
  FB_SPECTRAL_VERDICT_CONTINUUM_LIKE = 1,
  FB_SPECTRAL_VERDICT_WITHHELD = 2,
} FbSpectralVerdict;

/**
 * Opaque model handle.
 */
typedef struct FbModel FbModel;

/**
 * Opaque propagation result.
 */
typedef struct FbPropagation FbPropagation;

/**
 * Opaque truncated spectrum.
 */
typedef struct FbSpectrum FbSpectrum;

typedef struct FbIntegratorConfig {
  double rel_tol;
  double abs_tol;
  double leak_tol;
  size_t max_cutoff;
} FbIntegratorConfig;

typedef struct FbRevivalSummary {
  enum FbRevivalVerdict verdict;
  /**
   * NaN when the model predicts no revival.
   */
  double predicted_period;
  /**
   * NaN with fewer than two detections.
   */
  double detected_period;
  /**
   * NaN unless both prediction and detections exist.
   */
  double max_discrepancy;
  size_t detections;
} FbRevivalSummary;

typedef struct FbRamanParams {
  double omega1;
  double omega2;
  double nu;
  double e1_re;
  double e1_im;
  double e2_re;
  double e2_im;
  double kappa;
} FbRamanParams;

typedef struct FbEffectiveDrive {
  double eps_re;
  double eps_im;
  double delta;
  /**
   * `2π/|Δ|`, or infinity for a resonant drive.
   */
  double period;
  bool resonant;
} FbEffectiveDrive;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message, NUL-terminated and
 * truncated to `len` bytes. Returns the full message length in bytes
 * (excluding the NUL); 0 means no error was recorded.
 */
size_t fb_last_error_message(char *buf, size_t len);

/**
 * NUL-terminated library version, static storage.
 */
const char *fb_version(void);

/**
 * Two-mode parametric amplifier with pump `G = g_re + i g_im`.
 */
enum FbStatus fb_model_parametric(double g_re,
                                  double g_im,
                                  double delta,
                                  struct FbModel **out_model);

/**
 * Linearly driven oscillator with drive `ε = eps_re + i eps_im`.
 */
enum FbStatus fb_model_driven(double eps_re,
                              double eps_im,
                              double delta,
                              struct FbModel **out_model);

/**
 * Biased tight-binding chain; `two_sided` keeps negative sites.
 */
enum FbStatus fb_model_chain(double beta, double delta, bool two_sided, struct FbModel **out_model);

void fb_model_free(struct FbModel *model);

/**
 * Ladder detuning of the model.
 */
double fb_model_delta(const struct FbModel *model);

struct FbIntegratorConfig fb_integrator_defaults(void);

/**
 * Propagates the vacuum to `samples` equally spaced times on `[0, t_max]`
 * with an adaptive truncation. `config` may be NULL for the defaults.
 */
enum FbStatus fb_propagate_vacuum(const struct FbModel *model,
                                  double t_max,
                                  size_t samples,
                                  const struct FbIntegratorConfig *config,
                                  struct FbPropagation **out_result);

void fb_propagation_free(struct FbPropagation *result);

size_t fb_propagation_samples(const struct FbPropagation *result);

size_t fb_propagation_cutoff(const struct FbPropagation *result);

/**
 * `|1 − Σp|` at the final sample.
 */
double fb_propagation_final_drift(const struct FbPropagation *result);

enum FbStatus fb_propagation_times(const struct FbPropagation *result,
                                   double *buf,
                                   size_t len,
                                   size_t *written);

/**
 * `p_index(t)` at every sample; zero outside the retained window.
 */
enum FbStatus fb_propagation_series(const struct FbPropagation *result,
                                    int64_t index,
                                    double *buf,
                                    size_t len,
                                    size_t *written);

/**
 * Revival detection on the survival probability of `result`.
 */
enum FbStatus fb_revival_report(const struct FbModel *model,
                                const struct FbPropagation *result,
                                double threshold,
                                struct FbRevivalSummary *out_summary);

enum FbStatus fb_diagonalize(const struct FbModel *model,
                             size_t cutoff,
                             struct FbSpectrum **out_spectrum);

void fb_spectrum_free(struct FbSpectrum *spectrum);

size_t fb_spectrum_len(const struct FbSpectrum *spectrum);

/**
 * Eigenvalues in ascending order.
 */
enum FbStatus fb_spectrum_eigenvalues(const struct FbSpectrum *spectrum,
                                      double *buf,
                                      size_t len,
                                      size_t *written);

/**
 * 1 where the eigenvalue is stable against a larger cutoff, else 0.
 */
enum FbStatus fb_spectrum_converged(const struct FbSpectrum *spectrum,
                                    uint8_t *buf,
                                    size_t len,
                                    size_t *written);

/**
 * Tracks the lowest `levels` eigenvalues over `ncutoffs` increasing
 * cutoffs. `out_drift` (optional) receives the largest drift.
 */
enum FbStatus fb_convergence_scan(const struct FbModel *model,
                                  const size_t *cutoffs,
                                  size_t ncutoffs,
                                  size_t levels,
                                  enum FbSpectralVerdict *out_verdict,
                                  double *out_drift);

/**
 * `p_n(t)` of the parametric amplifier in any regime.
 */
enum FbStatus fb_pn_parametric(double g_re,
                               double g_im,
                               double delta,
                               uint32_t n,
                               double t,
                               double *out_p);

/**
 * Poisson `p_n(t)` of the driven oscillator.
 */
double fb_pn_driven(double eps_re, double eps_im, double delta, uint32_t n, double t);

/**
 * Peak value `n^n/(n+1)^(n+1)` of the pair distribution.
 */
double fb_peak_pn_parametric(uint32_t n);

/**
 * Revival period `π/β₀`; fails with `NoDiscreteLadder` when `|Δ| ≤ 2|G|`.
 */
enum FbStatus fb_revival_period_parametric(double g_re,
                                           double g_im,
                                           double delta,
                                           double *out_period);

/**
 * Raman-driven ion to driven oscillator.
 */
enum FbStatus fb_map_raman(const struct FbRamanParams *params, struct FbEffectiveDrive *out_drive);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOCKBLOCH_H */
