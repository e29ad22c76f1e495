//! C ABI for the lapssl library.
//!
//! Objects cross the boundary as opaque handles; every function returns a
//! [`LapsslStatus`] and writes results through out-pointers. The most recent
//! error message per thread is available via [`lapssl_last_error_message`].
//! The generated header lands in `include/lapssl.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ndarray::Array2;

use lapssl::cluster;
use lapssl::data::{generate_moons, MoonsSpec};
use lapssl::graph::{build_affinity, Dataset, GraphConfig, Laplacian, Neighbors};
use lapssl::solvers::{
    smallest_eigenpairs, solve_multiclass_dirichlet, DirichletOptions, EigenOptions,
};
use lapssl::ssl::{ssl_affinity, weighted_nonlocal_affinity, LabeledSet, SslConfig};
use lapssl::Error;

/// Result of every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LapsslStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    InvalidConfig = 3,
    FormatError = 4,
    SolverFailure = 5,
    InternalError = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> LapsslStatus {
    match err {
        Error::Input(_) | Error::DimensionMismatch { .. } => LapsslStatus::InvalidInput,
        Error::Config(_) => LapsslStatus::InvalidConfig,
        Error::Format(_) | Error::Io(_) => LapsslStatus::FormatError,
        Error::NonConvergence { .. } | Error::Solver(_) | Error::ComponentWithoutLabel { .. } => {
            LapsslStatus::SolverFailure
        }
        Error::Internal(_) => LapsslStatus::InternalError,
    }
}

fn fail(err: Error) -> LapsslStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Runs `body` with panic containment; a panic becomes `InternalError`.
fn guarded(body: impl FnOnce() -> LapsslStatus) -> LapsslStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            LapsslStatus::InternalError
        }
    }
}

/// Feature vectors with optional ground-truth labels (opaque).
pub struct LapsslDataset {
    inner: Dataset,
}

/// Symmetric affinity matrix (opaque).
pub struct LapsslAffinity {
    inner: lapssl::SparseSymmetricMatrix,
}

/// Labeled node subsets, one per cluster (opaque).
pub struct LapsslLabeledSet {
    inner: LabeledSet,
}

/// Copies the latest error message of this thread into `buffer`
/// (NUL-terminated, truncated to `capacity`). Returns the full message
/// length in bytes, excluding the terminator.
///
/// # Safety
/// `buffer` must point to `capacity` writable bytes (or be null to query
/// the length only).
#[no_mangle]
pub unsafe extern "C" fn lapssl_last_error_message(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buffer.cast(), n);
            *buffer.add(n) = 0;
        }
        bytes.len()
    })
}

/// Builds a dataset from a row-major `n x d` array of doubles. `labels` may
/// be null; otherwise it carries `n` class ids forming a contiguous range
/// starting at 0.
///
/// # Safety
/// `points` must hold `n * d` doubles, `labels` (when non-null) `n` entries,
/// and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lapssl_dataset_from_points(
    points: *const f64,
    n: usize,
    d: usize,
    labels: *const u32,
    out: *mut *mut LapsslDataset,
) -> LapsslStatus {
    if points.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LapsslStatus::NullPointer;
    }
    guarded(|| {
        let slice = std::slice::from_raw_parts(points, n * d);
        let array = match Array2::from_shape_vec((n, d), slice.to_vec()) {
            Ok(a) => a,
            Err(e) => return fail(Error::Input(e.to_string())),
        };
        let dataset = if labels.is_null() {
            Dataset::new(array)
        } else {
            let lab = std::slice::from_raw_parts(labels, n);
            Dataset::with_labels(array, lab.iter().map(|&v| v as usize).collect())
        };
        match dataset {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(LapsslDataset { inner }));
                LapsslStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Generates an interleaving half-moon dataset (2 or 3 moons).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lapssl_dataset_moons(
    n_points: usize,
    n_moons: usize,
    noise_std: f64,
    seed: u64,
    out: *mut *mut LapsslDataset,
) -> LapsslStatus {
    if out.is_null() {
        set_error("null pointer argument");
        return LapsslStatus::NullPointer;
    }
    guarded(|| {
        match generate_moons(&MoonsSpec {
            n_points,
            n_moons,
            noise_std,
            seed,
        }) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(LapsslDataset { inner }));
                LapsslStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of instances in the dataset (0 for null).
///
/// # Safety
/// `dataset` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lapssl_dataset_len(dataset: *const LapsslDataset) -> usize {
    if dataset.is_null() {
        return 0;
    }
    (*dataset).inner.len()
}

/// Copies the ground-truth labels into `out` (length `n`). Fails when the
/// dataset has none.
///
/// # Safety
/// `out` must hold `lapssl_dataset_len` entries.
#[no_mangle]
pub unsafe extern "C" fn lapssl_dataset_labels(
    dataset: *const LapsslDataset,
    out: *mut u32,
) -> LapsslStatus {
    if dataset.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LapsslStatus::NullPointer;
    }
    guarded(|| match (*dataset).inner.labels() {
        Some(labels) => {
            for (i, &l) in labels.iter().enumerate() {
                *out.add(i) = l as u32;
            }
            LapsslStatus::Ok
        }
        None => fail(Error::Input("dataset carries no labels".into())),
    })
}

/// # Safety
/// `dataset` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lapssl_dataset_free(dataset: *mut LapsslDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Gaussian-kernel affinity graph. `k_neighbors = 0` keeps the graph dense;
/// otherwise an edge survives when either endpoint ranks the other among its
/// `k` nearest.
///
/// # Safety
/// `dataset` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lapssl_affinity_build(
    dataset: *const LapsslDataset,
    sigma: f64,
    k_neighbors: usize,
    out: *mut *mut LapsslAffinity,
) -> LapsslStatus {
    if dataset.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LapsslStatus::NullPointer;
    }
    guarded(|| {
        let neighbors = if k_neighbors == 0 {
            Neighbors::Dense
        } else {
            Neighbors::Knn(k_neighbors)
        };
        match build_affinity(&(*dataset).inner, &GraphConfig { sigma, neighbors }) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(LapsslAffinity { inner }));
                LapsslStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `affinity` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lapssl_affinity_free(affinity: *mut LapsslAffinity) {
    if !affinity.is_null() {
        drop(Box::from_raw(affinity));
    }
}

/// Builds a labeled set over `n` nodes. `indices` holds the node ids of all
/// labeled nodes, class by class; `class_sizes` gives the length of each of
/// the `n_classes` segments.
///
/// # Safety
/// `indices` must hold `sum(class_sizes)` entries and `class_sizes`
/// `n_classes` entries; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lapssl_labeled_set_new(
    n: usize,
    indices: *const u32,
    class_sizes: *const u32,
    n_classes: usize,
    out: *mut *mut LapsslLabeledSet,
) -> LapsslStatus {
    if indices.is_null() || class_sizes.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LapsslStatus::NullPointer;
    }
    guarded(|| {
        let sizes = std::slice::from_raw_parts(class_sizes, n_classes);
        let total: usize = sizes.iter().map(|&s| s as usize).sum();
        let flat = std::slice::from_raw_parts(indices, total);
        let mut classes = Vec::with_capacity(n_classes);
        let mut offset = 0usize;
        for &size in sizes {
            let size = size as usize;
            classes.push(
                flat[offset..offset + size]
                    .iter()
                    .map(|&i| i as usize)
                    .collect(),
            );
            offset += size;
        }
        match LabeledSet::new(n, classes) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(LapsslLabeledSet { inner }));
                LapsslStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `set` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lapssl_labeled_set_free(set: *mut LapsslLabeledSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Writes the default weighting parameters for `n` nodes of which `m` are
/// labeled: `mu = n / m`, `alpha = mu - 1`.
///
/// # Safety
/// `mu` and `alpha` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lapssl_default_weights(
    n: usize,
    m: usize,
    mu: *mut f64,
    alpha: *mut f64,
) -> LapsslStatus {
    if mu.is_null() || alpha.is_null() {
        set_error("null pointer argument");
        return LapsslStatus::NullPointer;
    }
    match SslConfig::from_counts(n, m) {
        Ok(cfg) => {
            *mu = cfg.mu;
            *alpha = cfg.alpha;
            LapsslStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// The label-aware affinity `2W + alpha W_labeled` (same-cluster attraction,
/// cross-cluster disconnection, labeled-unlabeled densification).
///
/// # Safety
/// All handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lapssl_affinity_ssl(
    affinity: *const LapsslAffinity,
    labeled: *const LapsslLabeledSet,
    mu: f64,
    alpha: f64,
    out: *mut *mut LapsslAffinity,
) -> LapsslStatus {
    if affinity.is_null() || labeled.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LapsslStatus::NullPointer;
    }
    guarded(|| {
        match ssl_affinity(&(*affinity).inner, &(*labeled).inner, &SslConfig { mu, alpha }) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(LapsslAffinity { inner }));
                LapsslStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// The weighted nonlocal affinity `2W + (mu - 1) W_mixed`.
///
/// # Safety
/// All handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lapssl_affinity_wnll(
    affinity: *const LapsslAffinity,
    labeled: *const LapsslLabeledSet,
    mu: f64,
    out: *mut *mut LapsslAffinity,
) -> LapsslStatus {
    if affinity.is_null() || labeled.is_null() || out.is_null() {
        set_error("null pointer argument");
        return LapsslStatus::NullPointer;
    }
    guarded(|| {
        let cfg = SslConfig {
            mu,
            alpha: mu - 1.0,
        };
        match weighted_nonlocal_affinity(&(*affinity).inner, &(*labeled).inner, &cfg) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(LapsslAffinity { inner }));
                LapsslStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Spectral clustering: K-means over the `embed_dim` smallest non-trivial
/// Laplacian eigenvectors (`embed_dim = 0` means `k_clusters - 1`). Cluster
/// ids land in `out_labels` (length n).
///
/// # Safety
/// `affinity` must be live; `out_labels` must hold `n` entries.
#[no_mangle]
pub unsafe extern "C" fn lapssl_spectral_cluster(
    affinity: *const LapsslAffinity,
    k_clusters: usize,
    embed_dim: usize,
    seed: u64,
    restarts: usize,
    out_labels: *mut u32,
) -> LapsslStatus {
    if affinity.is_null() || out_labels.is_null() {
        set_error("null pointer argument");
        return LapsslStatus::NullPointer;
    }
    guarded(|| {
        let w = (*affinity).inner.clone();
        let laplacian = match Laplacian::from_affinity(w) {
            Ok(l) => l,
            Err(e) => return fail(e),
        };
        let dim = if embed_dim == 0 {
            k_clusters.saturating_sub(1).max(1)
        } else {
            embed_dim
        };
        let embedding = match smallest_eigenpairs(&laplacian, dim, true, &EigenOptions::default())
        {
            Ok(e) => e,
            Err(e) => return fail(e),
        };
        match cluster::kmeans(embedding.coordinates.view(), k_clusters, seed, restarts.max(1)) {
            Ok(result) => {
                for (i, &l) in result.labels.iter().enumerate() {
                    *out_labels.add(i) = l as u32;
                }
                LapsslStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Dirichlet clustering: one-vs-rest harmonic indicators with argmax
/// readout. Every class needs at least one labeled node.
///
/// # Safety
/// Handles must be live; `out_labels` must hold `n` entries.
#[no_mangle]
pub unsafe extern "C" fn lapssl_dirichlet_cluster(
    affinity: *const LapsslAffinity,
    labeled: *const LapsslLabeledSet,
    out_labels: *mut u32,
) -> LapsslStatus {
    if affinity.is_null() || labeled.is_null() || out_labels.is_null() {
        set_error("null pointer argument");
        return LapsslStatus::NullPointer;
    }
    guarded(|| {
        let w = (*affinity).inner.clone();
        let laplacian = match Laplacian::from_affinity(w) {
            Ok(l) => l,
            Err(e) => return fail(e),
        };
        match solve_multiclass_dirichlet(&laplacian, &(*labeled).inner, &DirichletOptions::default())
        {
            Ok(sol) => {
                for (i, &l) in sol.labels.iter().enumerate() {
                    *out_labels.add(i) = l as u32;
                }
                LapsslStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Normalized mutual information and best-permutation accuracy between two
/// label vectors of length `n`.
///
/// # Safety
/// `truth` and `predicted` must hold `n` entries; `nmi`/`acc` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lapssl_evaluate(
    truth: *const u32,
    predicted: *const u32,
    n: usize,
    nmi: *mut f64,
    acc: *mut f64,
) -> LapsslStatus {
    if truth.is_null() || predicted.is_null() || nmi.is_null() || acc.is_null() {
        set_error("null pointer argument");
        return LapsslStatus::NullPointer;
    }
    guarded(|| {
        let a: Vec<usize> = std::slice::from_raw_parts(truth, n)
            .iter()
            .map(|&v| v as usize)
            .collect();
        let b: Vec<usize> = std::slice::from_raw_parts(predicted, n)
            .iter()
            .map(|&v| v as usize)
            .collect();
        match cluster::evaluate(&a, &b) {
            Ok(report) => {
                *nmi = report.nmi;
                *acc = report.acc;
                LapsslStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
