//! Eigen- and linear-system solvers over graph Laplacians.

mod dense;
mod dirichlet;
mod eigen;

pub use dirichlet::{
    solve_dirichlet, solve_multiclass_dirichlet, solve_signed_dirichlet, DirichletOptions,
    DirichletSolution, MulticlassSolution,
};
pub use eigen::{smallest_eigenpairs, EigenOptions, SpectralEmbedding};
