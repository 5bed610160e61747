#ifndef BELLSWAP_H
#define BELLSWAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

#define BELLSWAP_OK 0

#define BELLSWAP_NULL_POINTER 1

#define BELLSWAP_PRECONDITION 2

#define BELLSWAP_CAPACITY 3

#define BELLSWAP_INDEX_OUT_OF_RANGE 4

#define BELLSWAP_SIZE_MISMATCH 5

#define BELLSWAP_COMPOSITION_SINGULAR 6

#define BELLSWAP_DEGENERATE_FERMI_LEVEL 7

#define BELLSWAP_DOMAIN 8

#define BELLSWAP_CONFIG 9

/**
 * The requested quantity does not exist for this result.
 */
#define BELLSWAP_UNAVAILABLE 10

#define BELLSWAP_BUFFER_TOO_SMALL 11

#define BELLSWAP_PANIC 99

#define BELLSWAP_BACKEND_ORACLE 0

#define BELLSWAP_BACKEND_GAUSSIAN 1

/**
 * `N × L` orbital matrix of a Slater determinant.
 */
typedef struct BellswapOrbitals BellswapOrbitals;

/**
 * Outcome of one post-selected measurement.
 */
typedef struct BellswapResult BellswapResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *bellswap_last_error_message(void);

/**
 * Haar-random `n`-particle Slater determinant on `l` sites.
 */
int32_t bellswap_orbitals_random(size_t l, size_t n, uint64_t seed, struct BellswapOrbitals **out);

/**
 * Half-filled ground state of the open chain with staggered mass `m0`.
 */
int32_t bellswap_orbitals_ground_state(size_t l, double m0, struct BellswapOrbitals **out);

/**
 * Orbital matrix from row-major real and imaginary parts of length `n * l`.
 * `im` may be null for a real matrix. Rows must be orthonormal.
 */
int32_t bellswap_orbitals_new(size_t n,
                              size_t l,
                              const double *re,
                              const double *im,
                              struct BellswapOrbitals **out);

void bellswap_orbitals_free(struct BellswapOrbitals *h);

/**
 * Particle number and number of sites.
 */
int32_t bellswap_orbitals_shape(const struct BellswapOrbitals *h, size_t *n, size_t *l);

/**
 * `P = |Δ_{A_L} Δ_{A_R}|²` for the uniform `|+⟩` outcome on `a_left`.
 */
int32_t bellswap_postselect_probability(const struct BellswapOrbitals *h,
                                        const size_t *a_left,
                                        size_t len,
                                        double *out);

/**
 * `log P` from the entanglement spectrum of the sites `a_left`.
 */
int32_t bellswap_log_probability_from_spectrum(const struct BellswapOrbitals *h,
                                               const size_t *a_left,
                                               size_t len,
                                               double *out);

/**
 * Post-select every rung in `measured` of `upper ⊗ lower` on the
 * single-particle rung state `(α c_i† + β c_ī†)|vac⟩`, with `|α|² + |β|² = 1`.
 */
int32_t bellswap_run_measurement(const struct BellswapOrbitals *upper,
                                 const struct BellswapOrbitals *lower,
                                 const size_t *measured,
                                 size_t len,
                                 double alpha_re,
                                 double alpha_im,
                                 double beta_re,
                                 double beta_im,
                                 int32_t backend_id,
                                 struct BellswapResult **out);

void bellswap_result_free(struct BellswapResult *h);

int32_t bellswap_result_probability(const struct BellswapResult *h, double *out);

int32_t bellswap_result_log_probability(const struct BellswapResult *h, double *out);

/**
 * Entropy in nats of the unmeasured upper-layer sites. `BELLSWAP_UNAVAILABLE`
 * for zero-probability outcomes or when every rung was measured.
 */
int32_t bellswap_result_entropy(const struct BellswapResult *h, double *out);

/**
 * Fidelity to the ideal rung product; defined only for half-system outcomes.
 */
int32_t bellswap_result_fidelity(const struct BellswapResult *h, double *out);

/**
 * Real Majorana correlation matrix `R` of the post-measurement state,
 * written row-major into `buf` (capacity `cap`). `dim` receives the side
 * length `4L` even when the buffer is too small.
 */
int32_t bellswap_result_majorana(const struct BellswapResult *h,
                                 double *buf,
                                 size_t cap,
                                 size_t *dim);

/**
 * Complete elliptic integral of the first kind, modulus `k`.
 */
int32_t bellswap_elliptic_k(double k, double *out);

/**
 * Entanglement level spacing of the half chain with staggered mass `m0`.
 */
int32_t bellswap_eisler_level_spacing(double m0, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BELLSWAP_H */
