//! Dataset generation, ingestion and labeled-subset sampling.
//!
//! The image loaders look for files where they are told; the experiment
//! harness resolves relative paths against the `SSL_DATA_DIR` environment
//! variable when it is set. Nothing here touches the network.

pub mod idx;
pub mod moons;
pub mod sample;

pub use idx::{load_idx, write_idx_images, write_idx_labels};
pub use moons::{generate_moons, MoonsSpec};
pub use sample::{sample_labeled_set, BudgetMode, LabelBudget, Placement};
