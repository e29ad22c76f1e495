#ifndef LAPSSL_H
#define LAPSSL_H

/* Generated by cbindgen from lapssl-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every API call.
typedef enum LapsslStatus {
  LAPSSL_STATUS_OK = 0,
  LAPSSL_STATUS_NULL_POINTER = 1,
  LAPSSL_STATUS_INVALID_INPUT = 2,
  LAPSSL_STATUS_INVALID_CONFIG = 3,
  LAPSSL_STATUS_FORMAT_ERROR = 4,
  LAPSSL_STATUS_SOLVER_FAILURE = 5,
  LAPSSL_STATUS_INTERNAL_ERROR = 6,
} LapsslStatus;

// Symmetric affinity matrix (opaque).
typedef struct LapsslAffinity LapsslAffinity;

// Feature vectors with optional ground-truth labels (opaque).
typedef struct LapsslDataset LapsslDataset;

// Labeled node subsets, one per cluster (opaque).
typedef struct LapsslLabeledSet LapsslLabeledSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the latest error message of this thread into `buffer`
// (NUL-terminated, truncated to `capacity`). Returns the full message
// length in bytes, excluding the terminator.
//
// # Safety
// `buffer` must point to `capacity` writable bytes (or be null to query
// the length only).
size_t lapssl_last_error_message(char *buffer, size_t capacity);

// Builds a dataset from a row-major `n x d` array of doubles. `labels` may
// be null; otherwise it carries `n` class ids forming a contiguous range
// starting at 0.
//
// # Safety
// `points` must hold `n * d` doubles, `labels` (when non-null) `n` entries,
// and `out` must be a valid pointer.
enum LapsslStatus lapssl_dataset_from_points(const double *points,
                                             size_t n,
                                             size_t d,
                                             const uint32_t *labels,
                                             struct LapsslDataset **out);

// Generates an interleaving half-moon dataset (2 or 3 moons).
//
// # Safety
// `out` must be a valid pointer.
enum LapsslStatus lapssl_dataset_moons(size_t n_points,
                                       size_t n_moons,
                                       double noise_std,
                                       uint64_t seed,
                                       struct LapsslDataset **out);

// Number of instances in the dataset (0 for null).
//
// # Safety
// `dataset` must be a live handle or null.
size_t lapssl_dataset_len(const struct LapsslDataset *dataset);

// Copies the ground-truth labels into `out` (length `n`). Fails when the
// dataset has none.
//
// # Safety
// `out` must hold `lapssl_dataset_len` entries.
enum LapsslStatus lapssl_dataset_labels(const struct LapsslDataset *dataset, uint32_t *out);

// # Safety
// `dataset` must come from this library and not be freed twice.
void lapssl_dataset_free(struct LapsslDataset *dataset);

// Gaussian-kernel affinity graph. `k_neighbors = 0` keeps the graph dense;
// otherwise an edge survives when either endpoint ranks the other among its
// `k` nearest.
//
// # Safety
// `dataset` must be a live handle; `out` a valid pointer.
enum LapsslStatus lapssl_affinity_build(const struct LapsslDataset *dataset,
                                        double sigma,
                                        size_t k_neighbors,
                                        struct LapsslAffinity **out);

// # Safety
// `affinity` must come from this library and not be freed twice.
void lapssl_affinity_free(struct LapsslAffinity *affinity);

// Builds a labeled set over `n` nodes. `indices` holds the node ids of all
// labeled nodes, class by class; `class_sizes` gives the length of each of
// the `n_classes` segments.
//
// # Safety
// `indices` must hold `sum(class_sizes)` entries and `class_sizes`
// `n_classes` entries; `out` must be valid.
enum LapsslStatus lapssl_labeled_set_new(size_t n,
                                         const uint32_t *indices,
                                         const uint32_t *class_sizes,
                                         size_t n_classes,
                                         struct LapsslLabeledSet **out);

// # Safety
// `set` must come from this library and not be freed twice.
void lapssl_labeled_set_free(struct LapsslLabeledSet *set);

// Writes the default weighting parameters for `n` nodes of which `m` are
// labeled: `mu = n / m`, `alpha = mu - 1`.
//
// # Safety
// `mu` and `alpha` must be valid pointers.
enum LapsslStatus lapssl_default_weights(size_t n, size_t m, double *mu, double *alpha);

// The label-aware affinity `2W + alpha W_labeled` (same-cluster attraction,
// cross-cluster disconnection, labeled-unlabeled densification).
//
// # Safety
// All handles must be live; `out` must be valid.
enum LapsslStatus lapssl_affinity_ssl(const struct LapsslAffinity *affinity,
                                      const struct LapsslLabeledSet *labeled,
                                      double mu,
                                      double alpha,
                                      struct LapsslAffinity **out);

// The weighted nonlocal affinity `2W + (mu - 1) W_mixed`.
//
// # Safety
// All handles must be live; `out` must be valid.
enum LapsslStatus lapssl_affinity_wnll(const struct LapsslAffinity *affinity,
                                       const struct LapsslLabeledSet *labeled,
                                       double mu,
                                       struct LapsslAffinity **out);

// Spectral clustering: K-means over the `embed_dim` smallest non-trivial
// Laplacian eigenvectors (`embed_dim = 0` means `k_clusters - 1`). Cluster
// ids land in `out_labels` (length n).
//
// # Safety
// `affinity` must be live; `out_labels` must hold `n` entries.
enum LapsslStatus lapssl_spectral_cluster(const struct LapsslAffinity *affinity,
                                          size_t k_clusters,
                                          size_t embed_dim,
                                          uint64_t seed,
                                          size_t restarts,
                                          uint32_t *out_labels);

// Dirichlet clustering: one-vs-rest harmonic indicators with argmax
// readout. Every class needs at least one labeled node.
//
// # Safety
// Handles must be live; `out_labels` must hold `n` entries.
enum LapsslStatus lapssl_dirichlet_cluster(const struct LapsslAffinity *affinity,
                                           const struct LapsslLabeledSet *labeled,
                                           uint32_t *out_labels);

// Normalized mutual information and best-permutation accuracy between two
// label vectors of length `n`.
//
// # Safety
// `truth` and `predicted` must hold `n` entries; `nmi`/`acc` must be valid.
enum LapsslStatus lapssl_evaluate(const uint32_t *truth,
                                  const uint32_t *predicted,
                                  size_t n,
                                  double *nmi,
                                  double *acc);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAPSSL_H */
