#ifndef POVM_ORDER_H
#define POVM_ORDER_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define POVM_OK 0

#define POVM_ERR_NULL 1

#define POVM_ERR_DIMENSION 2

#define POVM_ERR_DOMAIN 3

#define POVM_ERR_FORMAT 4

#define POVM_ERR_TOLERANCE 5

#define POVM_ERR_EMPTY_PROBES 6

#define POVM_ERR_BUFFER 7

#define POVM_ERR_CATALOG 8

#define POVM_ERR_PANIC 9

#define POVM_RELATION_FUZZY 0

#define POVM_RELATION_COARSE 1

#define POVM_RELATION_INFORMATIONAL 2

#define POVM_RELATION_DETERMINATION 3

#define POVM_DETERMINED 0

#define POVM_NOT_DETERMINED 1

#define POVM_PROBABLY_DETERMINED 2

/**
 * Opaque observable handle.
 */
typedef struct PovmObservable PovmObservable;

/**
 * Opaque density-state handle.
 */
typedef struct PovmState PovmState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 */
size_t povm_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *povm_version(void);

/**
 * Observable with diagonal effects; `diagonals` holds `outcomes * dim`
 * values, effect by effect.
 */
int32_t povm_observable_from_diagonals(const double *diagonals,
                                       size_t outcomes,
                                       size_t dim,
                                       struct PovmObservable **out);

/**
 * Observable from dense effects; `re` and `im` hold `outcomes * dim * dim`
 * values, effect by effect, each row-major. `im` may be null for real effects.
 */
int32_t povm_observable_from_matrices(const double *re,
                                      const double *im,
                                      size_t outcomes,
                                      size_t dim,
                                      struct PovmObservable **out);

/**
 * Photon counting with efficiency `eps`, truncated to `dim` Fock states.
 */
int32_t povm_photon_counting(double eps, size_t dim, struct PovmObservable **out);

/**
 * Loads observable `name` from a catalog file.
 */
int32_t povm_catalog_observable(const char *path, const char *name, struct PovmObservable **out);

void povm_observable_free(struct PovmObservable *obs);

/**
 * Hilbert space dimension, or 0 for a null handle.
 */
size_t povm_observable_dim(const struct PovmObservable *obs);

/**
 * Number of outcomes, or 0 for a null handle.
 */
size_t povm_observable_outcomes(const struct PovmObservable *obs);

/**
 * Density state from a dense matrix; `im` may be null.
 */
int32_t povm_state_from_matrix(const double *re,
                               const double *im,
                               size_t dim,
                               struct PovmState **out);

/**
 * `|k><k|` in dimension `dim`.
 */
int32_t povm_state_basis(size_t dim, size_t k, struct PovmState **out);

/**
 * `I / dim`.
 */
int32_t povm_state_maximally_mixed(size_t dim, struct PovmState **out);

void povm_state_free(struct PovmState *state);

/**
 * Writes the outcome distribution into `probs` (`len` must equal the
 * number of outcomes).
 */
int32_t povm_statistics(const struct PovmObservable *obs,
                        const struct PovmState *state,
                        double *probs,
                        size_t len);

/**
 * Decides `F ≼ E`. `probes` (length `num_probes`) is required for the
 * determination relation and ignored otherwise.
 */
int32_t povm_leq(const struct PovmObservable *f,
                 const struct PovmObservable *e,
                 int32_t kind,
                 const struct PovmState *const *probes,
                 size_t num_probes,
                 bool *holds);

/**
 * Fuzzy relation with its kernel: when it holds, `kernel` (length
 * `outcomes(E) * outcomes(F)`, row-major, rows indexed by outcomes of `E`)
 * receives the stochastic matrix. When it fails, `gap` receives the
 * phase-one residual. Either output pointer may be null.
 */
int32_t povm_leq_fuzzy_certificate(const struct PovmObservable *f,
                                   const struct PovmObservable *e,
                                   bool *holds,
                                   double *kernel,
                                   size_t kernel_len,
                                   double *gap);

/**
 * Whether `state` is the only state with its statistics under `obs`;
 * `status` receives one of the `POVM_*DETERMINED` codes.
 */
int32_t povm_is_determined(const struct PovmState *state,
                           const struct PovmObservable *obs,
                           int32_t *status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POVM_ORDER_H */
