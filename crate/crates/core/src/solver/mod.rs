//! Uzawa iteration on the discrete saddle point system, residual-driven marking and
//! the adaptive loop.

mod discrete;
mod driver;
mod marking;
mod problem;

pub use discrete::{delta_of, expand_stable, Discretization};
pub use driver::{
    fit_slope, run_2dsolver, run_adaptive, run_isotropic, run_with_observer, transfer, CycleRow, SolveReport,
    SolveState, SolverConfig, StopReason,
};
pub use marking::{
    apply_marking, approx_refine, best_choices, candidates, mark_bulk, mark_max, moments, triangles_by_owner, Choice,
    Mode, Pieces, Refinement, ORIENTATION_ORDER,
};
pub use problem::{exact_solution, TransportProblem, VectorFn};
