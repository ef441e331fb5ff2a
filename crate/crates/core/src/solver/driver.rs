//! The adaptive loop: Uzawa sweeps, residual-driven refinement and the transfer of iterates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::discrete::Discretization;
use super::marking::{approx_refine, moments, triangles_by_owner, Mode, Pieces, Refinement};
use super::TransportProblem;
use crate::fem::l2_error;
use crate::geometry::{Partition, Point2};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Uzawa steps per cycle.
    pub k: usize,
    /// Marking threshold in (0, 1).
    pub theta: f64,
    /// Level of the initial uniform grid.
    pub j0: u32,
    /// Target for the error bound.
    pub eps: f64,
    pub max_cycles: usize,
    pub mode: Mode,
    /// Stop at the first cycle whose trial dimension reaches this.
    pub dof_budget: Option<usize>,
    /// Compute the stability estimate every cycle.
    pub delta: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            k: 10,
            theta: 0.5,
            j0: 2,
            eps: 0.0,
            max_cycles: 12,
            mode: Mode::Anisotropic,
            dof_budget: None,
            delta: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config { line: 0, msg });
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return bad(format!("theta = {} outside (0, 1)", self.theta));
        }
        if self.k == 0 {
            return bad("K must be at least 1".into());
        }
        if !(self.eps >= 0.0) {
            return bad(format!("eps = {} must be non-negative", self.eps));
        }
        if self.max_cycles == 0 {
            return bad("max_cycles must be at least 1".into());
        }
        if self.j0 > 8 {
            return bad(format!("J0 = {} too large (at most 8)", self.j0));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Converged,
    DofBudget,
    MaxCycles,
}

/// One row per cycle, measured after the Uzawa sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleRow {
    pub cycle: usize,
    /// Trial dimension.
    pub n: usize,
    /// `‖A* r‖` for the residual of the final iterate.
    pub errbound: f64,
    /// The bound carried by the loop: `‖Π A* r‖` from the previous transfer.
    pub loop_bound: f64,
    pub error: Option<f64>,
    pub delta: Option<f64>,
    pub cells: usize,
}

/// Live state of the loop.
pub struct SolveState {
    pub disc: Discretization,
    pub u: Vec<f64>,
    pub errbound: f64,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub problem: String,
    pub mode: Mode,
    pub rows: Vec<CycleRow>,
    pub stop: StopReason,
    pub partition: Partition,
    pub u: Vec<f64>,
}

impl SolveReport {
    /// Fails when the loop ran out of cycles before reaching its target.
    pub fn ensure_converged(&self, eps: f64) -> Result<()> {
        match self.stop {
            StopReason::MaxCycles if eps > 0.0 => Err(Error::NotConverged {
                target: eps,
                cycles: self.rows.len(),
                last: self.rows.last().map_or(f64::NAN, |r| r.errbound),
            }),
            _ => Ok(()),
        }
    }

    /// Least-squares slope of `log error` against `log n` over rows with `n` in `[lo, hi]`.
    pub fn error_slope(&self, lo: usize, hi: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.n >= lo && r.n <= hi)
            .filter_map(|r| r.error.map(|e| ((r.n as f64).ln(), e.ln())))
            .collect();
        fit_slope(&pts)
    }
}

/// Least-squares slope through `(x, y)` pairs; `None` for fewer than two distinct `x`.
pub fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Transfers `u_old + A*r` onto the refined partition by cellwise L2 projection.
///
/// Returns the new coefficients and `‖Π A*r‖` on the new partition.
pub fn transfer(problem: &TransportProblem, disc: &Discretization, u: &[f64], r: &[f64], refinement: &Refinement) -> (Vec<f64>, f64) {
    let mesh = &disc.z.mesh;
    let tris: Vec<[Point2; 3]> = (0..mesh.triangles.len()).map(|t| mesh.triangle(t)).collect();
    let by_owner = triangles_by_owner(&mesh.owner, disc.x.partition.len());
    let res = Pieces { triangles: &tris, by_owner: &by_owner, h: |t: usize, p: Point2| disc.astar_at(problem, r, t, p) };
    let old = Pieces {
        triangles: &tris,
        by_owner: &by_owner,
        h: |t: usize, p: Point2| disc.x.eval_in(u, mesh.owner[t], p),
    };
    let cells = &refinement.partition.cells;
    let parts: Vec<([f64; 3], [f64; 3])> = cells
        .par_iter()
        .zip(&refinement.parents)
        .map(|(c, ps)| (moments(&old, c, ps), moments(&res, c, ps)))
        .collect();
    let mut out = Vec::with_capacity(3 * cells.len());
    let mut bound = 0.0;
    for (mu, mr) in parts {
        for k in 0..3 {
            out.push(mu[k] + mr[k]);
            bound += mr[k] * mr[k];
        }
    }
    (out, bound.sqrt())
}

/// Anisotropic adaptive loop.
pub fn run_2dsolver(problem: &TransportProblem, config: &SolverConfig) -> Result<SolveReport> {
    run_adaptive(problem, &SolverConfig { mode: Mode::Anisotropic, ..config.clone() })
}

/// Isotropic comparison loop with bulk marking.
pub fn run_isotropic(problem: &TransportProblem, config: &SolverConfig) -> Result<SolveReport> {
    run_adaptive(problem, &SolverConfig { mode: Mode::Isotropic, ..config.clone() })
}

/// The adaptive loop in the mode of `config`.
pub fn run_adaptive(problem: &TransportProblem, config: &SolverConfig) -> Result<SolveReport> {
    run_with_observer(problem, config, |_, _| {})
}

/// As [`run_adaptive`], calling `observe` with the state and row of every cycle.
pub fn run_with_observer(
    problem: &TransportProblem,
    config: &SolverConfig,
    mut observe: impl FnMut(&SolveState, &CycleRow),
) -> Result<SolveReport> {
    config.validate()?;
    let disc = Discretization::new(Partition::uniform(config.j0), problem)?;
    let u = vec![0.0; disc.dim()];
    // bootstrap bound from the residual of the zero iterate
    let errbound = disc.astar_norm(&disc.residual(&u));
    let mut state = SolveState { disc, u, errbound };
    let mut rows = Vec::new();
    let stop = loop {
        let cycle = rows.len();
        let disc = &state.disc;
        let u = disc.uzawa_iterate(&state.u, config.k);
        let r = disc.residual(&u);
        let est = disc.astar_norm(&r);
        if !est.is_finite() || u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Factorization(format!("non-finite iterate in cycle {cycle}")));
        }
        let error = problem.exact.as_ref().map(|ex| l2_error(&disc.x, &u, ex));
        let delta = match (&problem.exact, config.delta) {
            (Some(ex), true) => Some(disc.estimate_delta(&u, ex)),
            _ => None,
        };
        let row = CycleRow {
            cycle,
            n: disc.dim(),
            errbound: est,
            loop_bound: state.errbound,
            error,
            delta,
            cells: disc.x.partition.len(),
        };
        state.u = u;
        observe(&state, &row);
        rows.push(row);
        if est <= config.eps {
            break StopReason::Converged;
        }
        if config.dof_budget.is_some_and(|b| state.disc.dim() >= b) {
            break StopReason::DofBudget;
        }
        if rows.len() >= config.max_cycles {
            break StopReason::MaxCycles;
        }
        let disc = &state.disc;
        let mesh = &disc.z.mesh;
        let tris: Vec<[Point2; 3]> = (0..mesh.triangles.len()).map(|t| mesh.triangle(t)).collect();
        let by_owner = triangles_by_owner(&mesh.owner, disc.x.partition.len());
        let src = Pieces { triangles: &tris, by_owner: &by_owner, h: |t: usize, p: Point2| disc.astar_at(problem, &r, t, p) };
        let refinement = approx_refine(&disc.x.partition, &src, config.theta, config.mode)?;
        let (u_next, bound) = transfer(problem, disc, &state.u, &r, &refinement);
        let disc_next = Discretization::new(refinement.partition, problem)?;
        state = SolveState { disc: disc_next, u: u_next, errbound: bound };
    };
    Ok(SolveReport {
        problem: problem.name.clone(),
        mode: config.mode,
        rows,
        stop,
        partition: state.disc.x.partition.clone(),
        u: state.u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64, 3.0 - 0.5 * i as f64)).collect();
        assert!((fit_slope(&pts).unwrap() + 0.5).abs() < 1e-14);
        assert!(fit_slope(&pts[..1]).is_none());
    }

    #[test]
    fn config_ranges() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig { theta: 1.5, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { k: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn cell_counts_grow() {
        let p = TransportProblem::boundary();
        let cfg = SolverConfig { max_cycles: 3, ..Default::default() };
        let rep = run_2dsolver(&p, &cfg).unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert!(rep.rows.windows(2).all(|w| w[1].n > w[0].n));
        assert_eq!(rep.rows[0].n, 48);
        assert_eq!(rep.stop, StopReason::MaxCycles);
        assert!(rep.ensure_converged(1e-3).is_err());
    }
}
