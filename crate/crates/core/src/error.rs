use thiserror::Error;

/// Errors produced by graph construction, solvers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid data passed to a constructor or operation.
    #[error("invalid input: {0}")]
    Input(String),

    /// Invalid configuration value or combination.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Malformed on-disk data.
    #[error("format error: {0}")]
    Format(String),

    /// Vector/matrix dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A constrained solve was attempted on a connected component that
    /// contains no constrained node, so the solution is not unique.
    #[error(
        "connected component {component} ({size} nodes, e.g. node {node}) contains no labeled node"
    )]
    ComponentWithoutLabel {
        component: usize,
        node: usize,
        size: usize,
    },

    /// An iterative solver hit its iteration cap before reaching tolerance.
    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// A solver detected an ill-posed or numerically broken problem.
    #[error("solver failure: {0}")]
    Solver(String),

    /// A "cannot happen" condition, kept as an error so release builds fail loudly.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
