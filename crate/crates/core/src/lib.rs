//! Adaptive anisotropic Petrov-Galerkin discretizations of linear transport.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: cells, partitions, parabolic scaling/shearing, refinement
//!   operators, merging and the bisection split rules.
//! * [`cartoon`]: the cartoon benchmark class and two oracle partition builders.
//! * [`fem`]: quadrature, local bases, the companion triangulation and assembly.
//! * [`solver`]: Uzawa iteration, marking, the adaptive driver and stability estimates.
//! * [`parametric`]: sparse tensor combination over transport directions.
//! * [`cli`]: configuration parsing and CSV/JSON emission shared by the binary.

pub mod cartoon;
pub mod cli;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod parametric;
pub mod solver;

pub use error::{Error, Result};
