#ifndef IONX_H
#define IONX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// How the left boundary is driven.
typedef enum IonxMode {
  IONX_MODE_POTENTIOSTATIC = 0,
  IONX_MODE_GALVANOSTATIC = 1,
} IonxMode;

// Columns of a flux series.
typedef enum IonxSeriesColumn {
  IONX_SERIES_COLUMN_TAU = 0,
  IONX_SERIES_COLUMN_EXIT_FLUX = 1,
  IONX_SERIES_COLUMN_TOTAL_CURRENT = 2,
  IONX_SERIES_COLUMN_DRIVE = 3,
} IonxSeriesColumn;

// Result of every call.
typedef enum IonxStatus {
  IONX_STATUS_OK = 0,
  IONX_STATUS_NULL_POINTER = 1,
  IONX_STATUS_INVALID_ARGUMENT = 2,
  IONX_STATUS_OUT_OF_DOMAIN = 3,
  IONX_STATUS_SHAPE = 4,
  IONX_STATUS_CONVERGENCE = 5,
  IONX_STATUS_STEP_TOO_SMALL = 6,
  IONX_STATUS_PRECONDITION = 7,
  IONX_STATUS_PARSE = 8,
  IONX_STATUS_IO = 9,
  IONX_STATUS_BUFFER_TOO_SMALL = 10,
  IONX_STATUS_PANIC = 11,
} IonxStatus;

// A membrane system on a grid, with solver settings.
typedef struct IonxModel IonxModel;

// Uniformly sampled exit flux and current.
typedef struct IonxSeries IonxSeries;

// Concentrations and potentials at one instant.
typedef struct IonxState IonxState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or an empty string.
// The pointer stays valid until the next call on the same thread.
const char *ionx_last_error_message(void);

// Library version as a static string.
const char *ionx_version(void);

// Builds a model from `key=value` configuration text (see the CLI docs);
// a null or empty text gives the reference system on the 480-compartment grid.
//
// # Safety
// `config` must be null or a NUL-terminated string; `out` must be writable.
enum IonxStatus ionx_model_new(const char *config, struct IonxModel **out);

// # Safety
// `model` must be null or a handle from [`ionx_model_new`], not yet freed.
void ionx_model_free(struct IonxModel *model);

// Number of compartments.
//
// # Safety
// Pointers must be valid.
enum IonxStatus ionx_model_compartments(const struct IonxModel *model, uintptr_t *out);

// Compartment centres, `len >= compartments`.
//
// # Safety
// `buf` must hold `len` doubles.
enum IonxStatus ionx_model_centers(const struct IonxModel *model, double *buf, uintptr_t len);

// Zero-current equilibrium.
//
// # Safety
// Pointers must be valid.
enum IonxStatus ionx_equilibrium(const struct IonxModel *model, struct IonxState **out);

// Steady state under a constant boundary potential or current `value`.
//
// # Safety
// Pointers must be valid.
enum IonxStatus ionx_steady_state(const struct IonxModel *model,
                                  enum IonxMode mode,
                                  double value,
                                  struct IonxState **out);

// # Safety
// `state` must be null or a live state handle.
void ionx_state_free(struct IonxState *state);

// Concentration of `species` (0-based) in every compartment.
//
// # Safety
// `buf` must hold `len` doubles.
enum IonxStatus ionx_state_concentration(const struct IonxState *state,
                                         uintptr_t species,
                                         double *buf,
                                         uintptr_t len);

// Potential in every compartment.
//
// # Safety
// `buf` must hold `len` doubles.
enum IonxStatus ionx_state_potential(const struct IonxState *state, double *buf, uintptr_t len);

// Cation flux leaving the membrane at `state`.
//
// # Safety
// Pointers must be valid and the state must belong to the model's grid.
enum IonxStatus ionx_exit_flux(const struct IonxModel *model,
                               const struct IonxState *state,
                               double *out);

// Integrates from equilibrium under `drive` (e.g. `"step(5)"`) to `tau_end`.
//
// # Safety
// Pointers must be valid; `drive` must be NUL-terminated.
enum IonxStatus ionx_simulate(const struct IonxModel *model,
                              enum IonxMode mode,
                              const char *drive,
                              double tau_end,
                              struct IonxSeries **out);

// # Safety
// `series` must be null or a live series handle.
void ionx_series_free(struct IonxSeries *series);

// Number of samples.
//
// # Safety
// Pointers must be valid.
enum IonxStatus ionx_series_len(const struct IonxSeries *series, uintptr_t *out);

// Copies one column into `buf`.
//
// # Safety
// `buf` must hold `len` doubles.
enum IonxStatus ionx_series_column(const struct IonxSeries *series,
                                   enum IonxSeriesColumn column,
                                   double *buf,
                                   uintptr_t len);

// Netlist text linearized at equilibrium; free with [`ionx_string_free`].
//
// # Safety
// Pointers must be valid; `drive` must be NUL-terminated.
enum IonxStatus ionx_netlist(const struct IonxModel *model,
                             enum IonxMode mode,
                             const char *drive,
                             char **out);

// # Safety
// `s` must be null or a string returned by this library.
void ionx_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IONX_H */
