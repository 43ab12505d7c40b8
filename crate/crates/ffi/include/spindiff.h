#ifndef SPINDIFF_H
#define SPINDIFF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes. Zero is success.
 */
typedef enum SpdStatus {
  SPD_STATUS_OK = 0,
  SPD_STATUS_NULL_POINTER = 1,
  SPD_STATUS_DOMAIN = 2,
  SPD_STATUS_SOLVER = 3,
  SPD_STATUS_CONFIG = 4,
  SPD_STATUS_INTEGRATION = 5,
  SPD_STATUS_NOT_CONVERGED = 6,
  SPD_STATUS_UNDEFINED = 7,
  SPD_STATUS_PARSE = 8,
  SPD_STATUS_IO = 9,
  SPD_STATUS_INVALID_UTF8 = 10,
  SPD_STATUS_OUT_OF_RANGE = 11,
  SPD_STATUS_PANIC = 12,
} SpdStatus;

/*
 Opaque Lorentzian fit result.
 */
typedef struct SpdFit SpdFit;

/*
 Opaque validated scenario.
 */
typedef struct SpdScenario SpdScenario;

/*
 Opaque pump-sweep result.
 */
typedef struct SpdSweep SpdSweep;

/*
 One point of a pump sweep; frequencies and linewidths in Hz, power in W.
 */
typedef struct SpdSweepPoint {
  double power;
  double n[2];
  double frequency[2];
  double linewidth[2];
  double phase[2];
  double j_abs;
  double j_over_delta;
  /*
   1 when the modes are coupled (|J/Delta| > 1), else 0.
   */
  int32_t coupled;
} SpdSweepPoint;

/*
 Two coupled modes: frequencies (rad/s), decay rates (1/s), complex J (1/s).
 */
typedef struct SpdTwoMode {
  double omega[2];
  double gamma[2];
  double j_re;
  double j_im;
} SpdTwoMode;

/*
 One fitted component: A e^(i phi) Gamma / (Gamma + i (f - f0)); Gamma is the half width.
 */
typedef struct SpdLorentzian {
  double amplitude;
  double linewidth;
  double center;
  double phase;
} SpdLorentzian;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copy the last error message of this thread into `buf` (NUL-terminated,
 truncated to `len`). Returns the full message length without the NUL, or 0
 when there is none.

 # Safety
 `buf` must be null or point to `len` writable bytes.
 */
size_t spd_last_error(char *buf, size_t len);

/*
 Static description of a status code; "unknown status" for other values.
 */
const char *spd_status_str(int32_t status);

/*
 Scenario with every key at its default.

 # Safety
 `out` must be a valid pointer to a handle slot.
 */
enum SpdStatus spd_scenario_default(struct SpdScenario **out);

/*
 Scenario from `key = value` text; unknown keys and bad units are errors.

 # Safety
 `text` must be a NUL-terminated string; `out` a valid handle slot.
 */
enum SpdStatus spd_scenario_from_text(const char *text, struct SpdScenario **out);

/*
 Scenario from a file, with `SPINDIFF_` environment overrides applied.

 # Safety
 `path` must be a NUL-terminated string; `out` a valid handle slot.
 */
enum SpdStatus spd_scenario_load(const char *path, struct SpdScenario **out);

/*
 # Safety
 `s` must be null or a handle from an `spd_scenario_*` constructor, freed once.
 */
void spd_scenario_free(struct SpdScenario *s);

/*
 Copy the 64-hex-digit scenario hash and a NUL into `buf` (at least 65 bytes).

 # Safety
 `s` must be a live scenario handle; `buf` must point to `len` writable bytes.
 */
enum SpdStatus spd_scenario_hash(const struct SpdScenario *s, char *buf, size_t len);

/*
 Write the CSV tables of one figure (`fig2` ... `suppl-noneon`) into `dir`.

 # Safety
 `s` must be a live scenario handle; `tag` and `dir` NUL-terminated strings.
 */
enum SpdStatus spd_figure_write(const struct SpdScenario *s, const char *tag, const char *dir);

/*
 First `count` roots kR of the Robin condition j_l + c kR j_l' = 0, l <= 3.

 # Safety
 `out` must point to `count` writable doubles.
 */
enum SpdStatus spd_robin_roots(uint32_t l, double c, size_t count, double *out);

/*
 Run the scenario's pump sweep.

 # Safety
 `s` must be a live scenario handle; `out` a valid handle slot.
 */
enum SpdStatus spd_sweep_run(const struct SpdScenario *s, struct SpdSweep **out);

/*
 Number of points; 0 for a null handle.

 # Safety
 `w` must be null or a live sweep handle.
 */
size_t spd_sweep_len(const struct SpdSweep *w);

/*
 # Safety
 `w` must be a live sweep handle; `out` a valid pointer.
 */
enum SpdStatus spd_sweep_point(const struct SpdSweep *w, size_t i, struct SpdSweepPoint *out);

/*
 # Safety
 `w` must be null or a handle from [`spd_sweep_run`], freed once.
 */
void spd_sweep_free(struct SpdSweep *w);

/*
 Free evolution of c0 = (re0 + i im0, re1 + i im1) for time `t`, written in
 place into `c` as [re0, im0, re1, im1].

 # Safety
 `m` must be valid; `c` must point to 4 read-write doubles.
 */
enum SpdStatus spd_two_mode_evolve(const struct SpdTwoMode *m, double t, double *c);

/*
 Eigenvalues of the two-mode matrix as [re0, im0, re1, im1]; `coalesced`
 receives 1 at an exceptional point.

 # Safety
 `m` must be valid; `out` must point to 4 writable doubles; `coalesced` may be null.
 */
enum SpdStatus spd_two_mode_eigenvalues(const struct SpdTwoMode *m,
                                        double *out,
                                        int32_t *coalesced);

/*
 Spearman rank correlation with average ranks for ties.

 # Safety
 `a` and `b` must point to `n` doubles; `out` must be valid.
 */
enum SpdStatus spd_spearman(const double *a, const double *b, size_t n, double *out);

/*
 Fit `n` Lorentzians plus a complex constant to X + iY on the grid `freq`.

 # Safety
 `freq`, `x`, `y` must point to `len` doubles; `out` a valid handle slot.
 */
enum SpdStatus spd_fit_lorentzians(const double *freq,
                                   const double *x,
                                   const double *y,
                                   size_t len,
                                   size_t n,
                                   struct SpdFit **out);

/*
 # Safety
 `f` must be null or a live fit handle.
 */
size_t spd_fit_len(const struct SpdFit *f);

/*
 # Safety
 `f` must be a live fit handle; `out` a valid pointer.
 */
enum SpdStatus spd_fit_component(const struct SpdFit *f, size_t i, struct SpdLorentzian *out);

/*
 Background (re, im) and residual RMS of a fit.

 # Safety
 `f` must be a live fit handle; `background` must point to 2 doubles; `rms` may be null.
 */
enum SpdStatus spd_fit_summary(const struct SpdFit *f, double *background, double *rms);

/*
 # Safety
 `f` must be null or a handle from [`spd_fit_lorentzians`], freed once.
 */
void spd_fit_free(struct SpdFit *f);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINDIFF_H */
