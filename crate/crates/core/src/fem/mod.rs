//! Quadrature, local bases, the companion triangulation and assembly.

pub mod assemble;
pub mod field;
pub mod integrate;
pub mod mesh;
pub mod onb;
pub mod projection;
pub mod quadrature;
pub mod space;
pub mod sparse;

pub use assemble::{
    assemble, assemble_a, assemble_gram_astar, assemble_rhs, astar_apply, l2_error, l2_project, System,
};
pub use field::{Interface, PiecewiseFn, ScalarFn, Side, SignFn};
pub use mesh::{companion_triangulation, refine_once, CompanionMesh};
pub use onb::LocalOnb;
pub use projection::{best_affine_error, fit_cell, fit_cells, CellFit};
pub use quadrature::QuadratureRule;
pub use space::{p2_basis, TestSpace, TrialSpace};
pub use sparse::{CsrMatrix, SpdSolver};
