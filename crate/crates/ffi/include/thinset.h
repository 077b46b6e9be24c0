#ifndef THINSET_H
#define THINSET_H

/* Generated at build time from the thinset-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a C-ABI call. Nonzero means the output pointers were not
// written; the detail is available from `thinset_last_error`.
enum ThinsetStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  ThinsetStatus_Ok = 0,
  // A required pointer argument was NULL.
  ThinsetStatus_NullArgument = 1,
  // Sampling grid too coarse for the requested spectrum.
  ThinsetStatus_Alias = 2,
  // Input outside the operation's domain.
  ThinsetStatus_Domain = 3,
  // Enumeration budget exhausted before the answer was certain.
  ThinsetStatus_CapExceeded = 4,
  // Input needed mean zero.
  ThinsetStatus_MeanNotZero = 5,
  // A documented precondition failed.
  ThinsetStatus_Precondition = 6,
  // The instance admits no solution.
  ThinsetStatus_Infeasible = 7,
  // An iterative solver stalled above its tolerance.
  ThinsetStatus_ToleranceNotMet = 8,
  // An internal certificate check failed.
  ThinsetStatus_CertificateFailure = 9,
  // A panic was caught at the boundary.
  ThinsetStatus_Panic = 10,
};
#ifndef __cplusplus
typedef int32_t ThinsetStatus;
#endif // __cplusplus

// Opaque handle for a finite frequency set.
typedef struct ThinsetFreqSet ThinsetFreqSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Writes the library version into `buf`; returns the needed capacity.
size_t thinset_version(char *buf, size_t cap);

// Writes the most recent error message on this thread into `buf`;
// returns the needed capacity. Empty until a call fails.
size_t thinset_last_error(char *buf, size_t cap);

// Builds a frequency set of nonzero integers. On success `*out` owns the
// handle; release it with `thinset_freqset_free`.
ThinsetStatus thinset_freqset_integers(const int64_t *elems,
                                       size_t len,
                                       struct ThinsetFreqSet **out);

// Builds a frequency set of nonzero residues modulo `modulus`.
ThinsetStatus thinset_freqset_cyclic(uint64_t modulus,
                                     const int64_t *elems,
                                     size_t len,
                                     struct ThinsetFreqSet **out);

// Number of frequencies in the set; 0 for NULL.
size_t thinset_freqset_len(const struct ThinsetFreqSet *set);

// Releases a handle. NULL is a no-op.
void thinset_freqset_free(struct ThinsetFreqSet *set);

// Exact number of signed {-1,0,1} relations summing to zero (the trivial
// one included), enumerated under `cap`. `*out_quasi_independent` (when
// non-NULL) is 1 iff the only relation is the trivial one.
ThinsetStatus thinset_relation_count(const struct ThinsetFreqSet *set,
                                     uint64_t cap,
                                     uint64_t *out_count,
                                     int32_t *out_quasi_independent);

// Orlicz psi_a norm of the discrete real distribution with the given
// atoms and weights (weights must sum to 1).
ThinsetStatus thinset_psi_norm(const double *values,
                               const double *weights,
                               size_t len,
                               double a,
                               double *out);

// Subgaussian constant of the discrete real distribution (mean zero
// required), optimized over the default lambda grid.
ThinsetStatus thinset_sg_constant(const double *values,
                                  const double *weights,
                                  size_t len,
                                  double *out);

// Certified lower bound for the Sidon constant of the set, from the
// interpolation dual over `samples` phase targets (exhaustive when the
// set has at most 16 elements).
ThinsetStatus thinset_sidon_lower(const struct ThinsetFreqSet *set,
                                  size_t samples,
                                  uint64_t seed,
                                  double tol,
                                  double *out);

// Stationary entropy integral of a cyclic-group frequency set, evaluated
// exactly as a finite sum.
ThinsetStatus thinset_entropy_integral(const struct ThinsetFreqSet *set, double *out);

// Exact maximum size of a family of m-subsets of an n-point ground set
// with pairwise intersections at most k.
ThinsetStatus thinset_codes_exact(size_t n, size_t m, size_t k, uint64_t *out);

// Size of the greedy lexicographic family for the same packing problem —
// a certified lower bound for the maximum.
ThinsetStatus thinset_codes_greedy_size(size_t n, size_t m, size_t k, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THINSET_H */
