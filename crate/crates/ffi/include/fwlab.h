#ifndef FWLAB_H
#define FWLAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FwStatus {
  FW_STATUS_OK = 0,
  FW_STATUS_NULL_POINTER = 1,
  FW_STATUS_INVALID_ARGUMENT = 2,
  FW_STATUS_NUMERIC = 3,
  FW_STATUS_GRID_MISMATCH = 4,
  FW_STATUS_PRECONDITION = 5,
  FW_STATUS_IO = 6,
  FW_STATUS_PANIC = 7,
} FwStatus;

/**
 * How a run ended.
 */
typedef enum FwHalt {
  FW_HALT_COMPLETED = 0,
  FW_HALT_GRADIENT_BLOWUP = 1,
  FW_HALT_RESOLUTION_LOSS = 2,
  FW_HALT_NONFINITE = 3,
} FwHalt;

/**
 * Real field handle.
 */
typedef struct FwField FwField;

/**
 * Periodic grid handle.
 */
typedef struct FwGrid FwGrid;

/**
 * Completed integration handle.
 */
typedef struct FwRunRecord FwRunRecord;

/**
 * Solver settings passed by value.
 */
typedef struct FwSolverOptions {
  double t_final;
  /**
   * Adaptive step `cfl·h/max(1, ‖u‖∞)` when `fixed_dt <= 0`.
   */
  double cfl;
  /**
   * Fixed step when positive.
   */
  double fixed_dt;
  double ux_factor;
  double tail_frac;
  size_t stride;
  /**
   * Sobolev index of the energy monitors.
   */
  double sobolev_s;
  int32_t dealias;
} FwSolverOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *fw_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fw_version(void);

/**
 * Creates a grid of `points` (a power of two >= 8) on `[-length/2, length/2)`.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum FwStatus fw_grid_new(double length, size_t points, struct FwGrid **out);

/**
 * # Safety
 * `grid` must be NULL or a pointer returned by `fw_grid_new`, freed once.
 */
void fw_grid_free(struct FwGrid *grid);

/**
 * Number of grid points, 0 for NULL.
 *
 * # Safety
 * `grid` must be NULL or a live grid handle.
 */
size_t fw_grid_points(const struct FwGrid *grid);

/**
 * Box length, NaN for NULL.
 *
 * # Safety
 * `grid` must be NULL or a live grid handle.
 */
double fw_grid_length(const struct FwGrid *grid);

/**
 * Copies `len` samples (which must equal the grid size) into a new field.
 *
 * # Safety
 * `samples` must point to `len` readable doubles; `out` must be writable.
 */
enum FwStatus fw_field_from_samples(const struct FwGrid *grid,
                                    const double *samples,
                                    size_t len,
                                    struct FwField **out);

/**
 * # Safety
 * `field` must be NULL or a live field handle, freed once.
 */
void fw_field_free(struct FwField *field);

/**
 * Number of samples, 0 for NULL.
 *
 * # Safety
 * `field` must be NULL or a live field handle.
 */
size_t fw_field_len(const struct FwField *field);

/**
 * Copies the samples into `out`, which must hold exactly `len` doubles.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum FwStatus fw_field_samples(const struct FwField *field, double *out, size_t len);

/**
 * Discrete `L^p` norm; `p` may be `INFINITY`.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum FwStatus fw_lebesgue_norm(const struct FwField *field, double p, double *out);

/**
 * `H^s` norm.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum FwStatus fw_sobolev_norm(const struct FwField *field, double s, double *out);

/**
 * Besov `B^s_{p,r}` norm; `p` and `r` may be `INFINITY`.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum FwStatus fw_besov_norm(const struct FwField *field, double s, double p, double r, double *out);

/**
 * Fraction of retained spectral energy in the top octave.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum FwStatus fw_tail_fraction(const struct FwField *field, double *out);

/**
 * Spectral derivative `∂ₓf` as a new field.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum FwStatus fw_derivative(const struct FwField *field, struct FwField **out);

/**
 * `∂ₓ(1 − ∂ₓ²)⁻¹ f` as a new field.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum FwStatus fw_nonlocal_wave(const struct FwField *field, struct FwField **out);

/**
 * Two-thirds dealiasing as a new field.
 *
 * # Safety
 * `field` must be a live handle and `out` writable.
 */
enum FwStatus fw_dealias(const struct FwField *field, struct FwField **out);

/**
 * Breaking datum `u₀ = −a x e^{−x²/2}`, `η₀ = A e^{−x²/(2w²)}` and its
 * certified time bound. An inadmissible datum is still returned, with
 * `admissible` set to 0 and `t_bound` possibly infinite.
 *
 * # Safety
 * `grid` must be a live handle; every out-pointer must be writable.
 */
enum FwStatus fw_breaking_data(const struct FwGrid *grid,
                               double a,
                               double amplitude,
                               double width,
                               struct FwField **u_out,
                               struct FwField **eta_out,
                               double *t_bound,
                               int32_t *admissible);

/**
 * Defaults of the core solver.
 */
struct FwSolverOptions fw_solver_options_default(void);

/**
 * Integrates `(u, η)` from `t = 0`, tracing characteristics from `seeds`.
 *
 * # Safety
 * `u`, `eta` must be live handles on the same grid; `seeds` must point to
 * `n_seeds` doubles (or be NULL with `n_seeds = 0`); `out` must be writable.
 */
enum FwStatus fw_integrate(const struct FwField *u,
                           const struct FwField *eta,
                           struct FwSolverOptions options,
                           const double *seeds,
                           size_t n_seeds,
                           struct FwRunRecord **out);

/**
 * # Safety
 * `record` must be NULL or a live record handle, freed once.
 */
void fw_run_record_free(struct FwRunRecord *record);

/**
 * How the run ended; `Nonfinite` for NULL.
 *
 * # Safety
 * `record` must be NULL or a live record handle.
 */
enum FwHalt fw_run_record_halt(const struct FwRunRecord *record);

/**
 * Final time reached, NaN for NULL.
 *
 * # Safety
 * `record` must be NULL or a live record handle.
 */
double fw_run_record_t_end(const struct FwRunRecord *record);

/**
 * Number of monitor samples, 0 for NULL.
 *
 * # Safety
 * `record` must be NULL or a live record handle.
 */
size_t fw_run_record_samples(const struct FwRunRecord *record);

/**
 * Final `u` of the run as a new field.
 *
 * # Safety
 * `record` must be a live handle and `out` writable.
 */
enum FwStatus fw_run_record_final_u(const struct FwRunRecord *record, struct FwField **out);

/**
 * Serialises the record as JSON into a new string released by `fw_string_free`.
 *
 * # Safety
 * `record` must be a live handle and `out` writable.
 */
enum FwStatus fw_run_record_to_json(const struct FwRunRecord *record, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed once.
 */
void fw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FWLAB_H */
