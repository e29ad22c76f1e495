//! Graph Laplacians for semi-supervised clustering.
//!
//! The crate builds Gaussian-kernel affinity graphs over feature vectors and
//! derives three families of Laplacians from them: the classical unsupervised
//! `L = D - W`, the weighted nonlocal variant `L_WNLL` that raises the density
//! around labeled nodes, and a label-aware variant `L_SSL` that additionally
//! ties labeled nodes of the same cluster together and disconnects labeled
//! nodes of different clusters. Both spectral clustering (K-means over the
//! smallest eigenvectors) and Dirichlet interpolation (harmonic extension of
//! labeled values) run on any of them.
//!
//! # Quick start
//!
//! ```
//! use lapssl::cluster::{evaluate, kmeans};
//! use lapssl::data::{generate_moons, sample_labeled_set, LabelBudget, MoonsSpec};
//! use lapssl::graph::{build_affinity, GraphConfig, Laplacian};
//! use lapssl::solvers::{smallest_eigenpairs, EigenOptions};
//! use lapssl::ssl::{ssl_affinity, SslConfig};
//!
//! let data = generate_moons(&MoonsSpec {
//!     n_points: 120,
//!     n_moons: 2,
//!     noise_std: 0.08,
//!     seed: 7,
//! })?;
//! let labels = sample_labeled_set(&data, &LabelBudget::per_class(3, 1))?;
//!
//! let w = build_affinity(&data, &GraphConfig::knn(0.2, 8))?;
//! let config = SslConfig::for_labels(&labels)?;
//! let laplacian = Laplacian::from_affinity(ssl_affinity(&w, &labels, &config)?)?;
//!
//! let embedding = smallest_eigenpairs(&laplacian, 1, true, &EigenOptions::default())?;
//! let clusters = kmeans(embedding.coordinates.view(), 2, 42, 10)?;
//! let report = evaluate(data.labels().unwrap(), &clusters.labels)?;
//! assert!(report.acc > 0.5);
//! # Ok::<(), lapssl::Error>(())
//! ```
//!
//! The `lapssl` binary drives the experiment harness; see the crate README.

pub mod cluster;
pub mod data;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod solvers;
pub mod ssl;

pub use error::{Error, Result};
pub use graph::{
    build_affinity, connected_components, degree_vector, median_sigma, Dataset, GraphConfig,
    Laplacian, Neighbors, SparseSymmetricMatrix,
};
pub use ssl::{LabeledSet, SslConfig};

pub(crate) mod seed {
    /// Splits one master seed into independent per-purpose streams.
    /// SplitMix64 finalizer; stable across platforms.
    pub fn mix(seed: u64, salt: u64) -> u64 {
        let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}
