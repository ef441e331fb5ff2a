//! Sparse tensor combination over transport directions.
//!
//! Directions `θ ∈ [0, π/4]` are sampled on dyadic left-endpoint grids. Level `ℓ`
//! contributes the quadrature difference `I_ℓ − I_{ℓ−1}` applied to spatial solves
//! whose resolution shrinks as `ℓ` grows, so the total work stays close to that of
//! a single fine solve.

use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fem::quadrature::gauss_interval;
use crate::fem::TrialSpace;
use crate::geometry::{polygon, Point2, Rect};
use crate::solver::{run_adaptive, SolverConfig, TransportProblem};
use crate::{Error, Result};

/// Family of transport problems indexed by a direction `θ ∈ [0, π/4]`.
#[derive(Clone)]
pub struct ParametricProblem {
    pub name: String,
    pub at: Arc<dyn Fn(f64) -> Result<TransportProblem> + Send + Sync>,
    /// Hölder exponent of `θ ↦ G(u(·, θ))`.
    pub alpha: f64,
}

impl std::fmt::Debug for ParametricProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParametricProblem").field("name", &self.name).field("alpha", &self.alpha).finish()
    }
}

impl ParametricProblem {
    /// `b = (tan θ·x2, 1)`, `c = 1`, `f = 1`, `g = 1 − x1` on the bottom.
    pub fn sheared() -> ParametricProblem {
        ParametricProblem { name: "parametric".into(), at: Arc::new(TransportProblem::parametric), alpha: 1.0 }
    }

    /// A family that ignores `θ`.
    pub fn constant(problem: TransportProblem) -> ParametricProblem {
        ParametricProblem { name: problem.name.clone(), at: Arc::new(move |_| Ok(problem.clone())), alpha: 1.0 }
    }
}

/// `G(u) = ∫_{D0} u dx` over an axis-aligned rectangle `D0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionalG {
    pub region: Rect,
}

impl Default for FunctionalG {
    fn default() -> Self {
        FunctionalG { region: Rect::new(Point2::new(0.125, 0.25), Point2::new(0.625, 0.75)) }
    }
}

impl FunctionalG {
    /// Exact value on a piecewise affine function: every cell is clipped against `D0`.
    pub fn eval(&self, x: &TrialSpace, u: &[f64]) -> f64 {
        let rect = self.region.corners();
        let (lo, hi) = (self.region.lo, self.region.hi);
        let mut total = 0.0;
        for (q, cell) in x.partition.cells.iter().enumerate() {
            let (clo, chi) = cell.bbox();
            if clo.x1 >= hi.x1 || clo.x2 >= hi.x2 || chi.x1 <= lo.x1 || chi.x2 <= lo.x2 {
                continue;
            }
            let piece = polygon::clip_convex(cell.vertices(), &rect);
            if piece.len() < 3 {
                continue;
            }
            // an affine function integrates to area times its centroid value
            total += polygon::area(&piece) * x.eval_in(u, q, polygon::centroid(&piece));
        }
        total
    }
}

/// Levels, direction grids and per-level dof budgets of the combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseTensorPlan {
    pub max_level: usize,
    pub c_dof: usize,
    pub alpha: f64,
    /// Use the finest spatial budget on every level.
    pub full_tensor: bool,
}

impl SparseTensorPlan {
    pub fn new(max_level: usize) -> SparseTensorPlan {
        SparseTensorPlan { max_level, c_dof: 6, alpha: 1.0, full_tensor: false }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config { line: 0, msg });
        if self.max_level > 12 {
            return bad(format!("L = {} too large (at most 12)", self.max_level));
        }
        if self.c_dof == 0 {
            return bad("cdof must be positive".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 4.0) {
            return bad(format!("alpha = {} outside (0, 4]", self.alpha));
        }
        Ok(())
    }

    /// Directions `iπ/2^{ℓ+2}`, `i = 0..2^ℓ`.
    pub fn nodes(level: usize) -> Vec<f64> {
        let h = quad_weight(level);
        (0..1usize << level).map(|i| i as f64 * h).collect()
    }

    /// Spatial resolution `j(ℓ) = ⌈α(L − ℓ)⌉` (or `⌈αL⌉` for the full tensor).
    pub fn spatial_level(&self, level: usize) -> u32 {
        let d = if self.full_tensor { self.max_level } else { self.max_level - level };
        (self.alpha * d as f64 - 1e-12).ceil().max(0.0) as u32
    }

    /// Dof budget `c_dof · 2^{j(ℓ)}`.
    pub fn budget(&self, level: usize) -> usize {
        self.c_dof << self.spatial_level(level)
    }
}

fn quad_weight(level: usize) -> f64 {
    FRAC_PI_4 / (1usize << level) as f64
}

/// Left-endpoint rule on level `ℓ`: `(π/2^{ℓ+2}) Σ v_i`.
pub fn quad_level(values: &[f64], level: usize) -> f64 {
    debug_assert_eq!(values.len(), 1 << level);
    quad_weight(level) * values.iter().sum::<f64>()
}

/// One direction solve inside the combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSample {
    pub level: usize,
    pub index: usize,
    pub theta: f64,
    pub dofs: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParametricReport {
    pub max_level: usize,
    /// Total trial dofs over all direction solves.
    pub n: usize,
    pub estimate: f64,
    pub reference: f64,
    pub error: f64,
    /// Contribution `I_ℓ − I_{ℓ−1}` of every level.
    pub differences: Vec<f64>,
    pub samples: Vec<NodeSample>,
}

/// Bookkeeping columns of the rate table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkRow {
    pub n: usize,
    pub inv_n: f64,
    pub log_inv_n: f64,
    pub error: f64,
    pub error_n: f64,
    pub error_n_per_log: f64,
}

pub fn work_accounting(report: &ParametricReport) -> WorkRow {
    let n = report.n as f64;
    WorkRow {
        n: report.n,
        inv_n: 1.0 / n,
        log_inv_n: n.log2() / n,
        error: report.error,
        error_n: report.error * n,
        error_n_per_log: report.error * n / n.log2(),
    }
}

/// Combination `Σ_ℓ [I_ℓ − I_{ℓ−1}](v_ℓ)` for an arbitrary evaluator.
///
/// `evaluate(level, θ)` returns `G(u)` and the dofs spent. Evaluations run in parallel;
/// the sums are reduced in a fixed order.
pub fn combine<E>(plan: &SparseTensorPlan, evaluate: E) -> Result<(f64, Vec<f64>, Vec<NodeSample>)>
where
    E: Fn(usize, f64) -> Result<(f64, usize)> + Sync,
{
    plan.validate()?;
    let jobs: Vec<(usize, usize, f64)> = (0..=plan.max_level)
        .flat_map(|l| SparseTensorPlan::nodes(l).into_iter().enumerate().map(move |(i, t)| (l, i, t)))
        .collect();
    let samples: Vec<NodeSample> = jobs
        .par_iter()
        .map(|&(level, index, theta)| {
            let (value, dofs) = evaluate(level, theta)
                .map_err(|e| Error::Node { level, index, theta, source: Box::new(e) })?;
            Ok(NodeSample { level, index, theta, dofs, value })
        })
        .collect::<Result<_>>()?;
    let mut differences = Vec::with_capacity(plan.max_level + 1);
    let mut start = 0;
    for level in 0..=plan.max_level {
        let vals: Vec<f64> = samples[start..start + (1 << level)].iter().map(|s| s.value).collect();
        start += 1 << level;
        let fine = quad_level(&vals, level);
        // coarser nodes are the even-indexed ones, evaluated on the same solutions
        let coarse = if level == 0 {
            0.0
        } else {
            let even: Vec<f64> = vals.iter().step_by(2).cloned().collect();
            quad_level(&even, level - 1)
        };
        differences.push(fine - coarse);
    }
    let estimate = differences.iter().sum();
    Ok((estimate, differences, samples))
}

/// Sparse tensor approximation of `∫ G(u(·, θ)) dθ` with adaptive spatial solves.
///
/// Each direction runs the adaptive loop of `template` until its dof budget is reached.
pub fn run_sparse(
    problem: &ParametricProblem,
    g: &FunctionalG,
    plan: &SparseTensorPlan,
    template: &SolverConfig,
    reference: f64,
) -> Result<ParametricReport> {
    template.validate()?;
    let eval = |level: usize, theta: f64| -> Result<(f64, usize)> {
        let tp = (problem.at)(theta)?;
        let config = SolverConfig { dof_budget: Some(plan.budget(level)), eps: 0.0, ..template.clone() };
        let rep = run_adaptive(&tp, &config)?;
        if rep.stop != crate::solver::StopReason::DofBudget {
            return Err(Error::NotConverged {
                target: plan.budget(level) as f64,
                cycles: rep.rows.len(),
                last: rep.rows.last().map_or(f64::NAN, |r| r.n as f64),
            });
        }
        let x = TrialSpace::new(rep.partition);
        Ok((g.eval(&x, &rep.u), x.dim()))
    };
    let (estimate, differences, samples) = combine(plan, eval)?;
    let n = samples.iter().map(|s| s.dofs).sum();
    Ok(ParametricReport {
        max_level: plan.max_level,
        n,
        estimate,
        reference,
        error: (estimate - reference).abs(),
        differences,
        samples,
    })
}

/// Solver settings for the direction solves: a single-cell start so that small budgets bind.
pub fn default_template() -> SolverConfig {
    SolverConfig { j0: 1, max_cycles: 200, ..SolverConfig::default() }
}

/// Gauss points per x2 interval in [`g_exact`].
const X2_POINTS: usize = 24;
/// Gauss points per θ panel in [`reference_integral`].
const THETA_POINTS: usize = 8;

/// `G(u(·, θ))` for the sheared model problem, from its closed-form solution.
///
/// The x1 integrals are analytic on both sides of the parabola `x1 = tan θ·x2²/2`;
/// the x2 integral uses Gauss rules split where the parabola meets the sides of `D0`.
pub fn g_exact(g: &FunctionalG, theta: f64) -> f64 {
    let t = theta.tan();
    let (a, b) = (g.region.lo.x1, g.region.hi.x1);
    let (c, d) = (g.region.lo.x2, g.region.hi.x2);
    let slice = |x2: f64| -> f64 {
        let e = (-x2).exp();
        let kink = 0.5 * t * x2 * x2;
        // right of the parabola: u = 1 − (x1 − kink) e^{−x2}
        let (r0, r1) = (a.max(kink), b.max(kink));
        let right = (r1 - r0) - e * (0.5 * (r1 * r1 - r0 * r0) - kink * (r1 - r0));
        // left of it: u = 1 − e^{−x2} e^{s}, s = √(x2² − 2x1/t), dx1 = −t s ds
        let (l0, l1) = (a.min(kink), b.min(kink));
        let left = if l1 > l0 {
            let s = |x1: f64| (x2 * x2 - 2.0 * x1 / t).max(0.0).sqrt();
            let prim = |s: f64| t * (s - 1.0) * s.exp();
            (l1 - l0) - e * (prim(s(l0)) - prim(s(l1)))
        } else {
            0.0
        };
        right + left
    };
    let mut breaks = vec![c, d];
    if t > 0.0 {
        for x1 in [a, b] {
            let x2 = (2.0 * x1 / t).sqrt();
            if x2 > c && x2 < d {
                breaks.push(x2);
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks
        .windows(2)
        .map(|w| gauss_interval(w[0], w[1], X2_POINTS).into_iter().map(|(x, wt)| wt * slice(x)).sum::<f64>())
        .sum()
}

/// Directions where the parabola passes a corner of `D0`; `θ ↦ G` is only piecewise smooth.
fn theta_breaks(g: &FunctionalG) -> Vec<f64> {
    let mut out = vec![0.0, FRAC_PI_4];
    for p in g.region.corners() {
        if p.x2 > 0.0 {
            let th = (2.0 * p.x1 / (p.x2 * p.x2)).atan();
            if th > 0.0 && th < FRAC_PI_4 {
                out.push(th);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// `∫_0^{π/4} G(u(·, θ)) dθ` with `panels` composite Gauss panels, spread over the
/// smooth pieces in proportion to their length.
pub fn reference_integral_with(g: &FunctionalG, panels: usize) -> f64 {
    let br = theta_breaks(g);
    br.windows(2)
        .map(|w| {
            let m = ((panels as f64 * (w[1] - w[0]) / FRAC_PI_4).round() as usize).max(1);
            let h = (w[1] - w[0]) / m as f64;
            (0..m)
                .map(|k| {
                    let lo = w[0] + k as f64 * h;
                    gauss_interval(lo, lo + h, THETA_POINTS).into_iter().map(|(th, wt)| wt * g_exact(g, th)).sum::<f64>()
                })
                .sum::<f64>()
        })
        .sum()
}

/// Reference value with 2048 panels.
pub fn reference_integral(g: &FunctionalG) -> f64 {
    reference_integral_with(g, 2048)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Partition;

    #[test]
    fn quad_level_rules() {
        assert!((quad_level(&[1.0], 0) - FRAC_PI_4).abs() < 1e-15);
        assert!((quad_level(&[1.0; 8], 3) - FRAC_PI_4).abs() < 1e-15);
        let v: Vec<f64> = SparseTensorPlan::nodes(1);
        let pi = std::f64::consts::PI;
        assert!((quad_level(&v, 1) - pi * pi / 64.0).abs() < 1e-15);
    }

    #[test]
    fn quad_level_converges_at_first_order() {
        let exact = 1.0 - FRAC_PI_4.cos();
        let errs: Vec<f64> = (4..10)
            .map(|l| {
                let v: Vec<f64> = SparseTensorPlan::nodes(l).iter().map(|t| t.sin()).collect();
                (quad_level(&v, l) - exact).abs()
            })
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.8..2.2).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn nodes_are_nested() {
        for l in 1..6 {
            let fine = SparseTensorPlan::nodes(l);
            let coarse = SparseTensorPlan::nodes(l - 1);
            for (i, t) in coarse.iter().enumerate() {
                assert_eq!(fine[2 * i], *t);
            }
        }
    }

    #[test]
    fn budgets_shrink_with_level() {
        let p = SparseTensorPlan::new(3);
        assert_eq!((0..4).map(|l| p.budget(l)).collect::<Vec<_>>(), vec![48, 24, 12, 6]);
        let f = SparseTensorPlan { full_tensor: true, ..p };
        assert!((0..4).all(|l| f.budget(l) == 48));
    }

    #[test]
    fn functional_on_affine_data() {
        let g = FunctionalG::default();
        let x = TrialSpace::new(Partition::uniform(3));
        let one = crate::fem::l2_project(&crate::fem::PiecewiseFn::constant(1.0), &x);
        let x1 = crate::fem::l2_project(&crate::fem::PiecewiseFn::smooth(Arc::new(|p: Point2| p.x1)), &x);
        assert!((g.eval(&x, &one) - 0.25).abs() < 1e-14);
        assert!((g.eval(&x, &x1) - 3.0 / 32.0).abs() < 1e-14);
        // a cell outside D0 contributes nothing
        let mut far = vec![0.0; x.dim()];
        far[..3].copy_from_slice(&[1.0, 2.0, 3.0]);
        assert_eq!(g.eval(&x, &far), 0.0);
    }

    #[test]
    fn closed_form_at_zero_direction() {
        let g = FunctionalG::default();
        let want = 0.25 - (3.0 / 16.0) * ((-0.25f64).exp() - (-0.75f64).exp());
        assert!((g_exact(&g, 0.0) - want).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_cellwise_quadrature() {
        let g = FunctionalG::default();
        let rule = crate::fem::QuadratureRule::degree5();
        let rect = g.region.corners();
        for theta in [0.3, 0.6, FRAC_PI_4] {
            let ex = TransportProblem::parametric(theta).unwrap().exact.unwrap();
            let exact = g_exact(&g, theta);
            // the left state has an unbounded gradient at the parabola, so convergence is slow but monotone
            let errs: Vec<f64> = [3, 5, 7]
                .iter()
                .map(|&j| {
                    let q: f64 = Partition::uniform(j)
                        .cells
                        .iter()
                        .map(|c| {
                            let piece = polygon::clip_convex(c.vertices(), &rect);
                            if piece.len() < 3 {
                                0.0
                            } else {
                                crate::fem::integrate::integrate(&piece, &ex, |_| 1.0, &rule)
                            }
                        })
                        .sum();
                    (q - exact).abs()
                })
                .collect();
            assert!(errs[2] < 2e-7, "{theta}: {errs:?}");
            assert!(errs[2] <= errs[1] && errs[1] <= errs[0] + 1e-15, "{theta}: {errs:?}");
        }
    }

    #[test]
    fn reference_is_self_converged() {
        let g = FunctionalG::default();
        let a = reference_integral_with(&g, 1024);
        let b = reference_integral(&g);
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn telescoping_with_level_free_evaluator() {
        let plan = SparseTensorPlan::new(4);
        let (est, _, samples) = combine(&plan, |_, t| Ok((t.cos(), 1))).unwrap();
        let fine: Vec<f64> = SparseTensorPlan::nodes(4).iter().map(|t| t.cos()).collect();
        assert!((est - quad_level(&fine, 4)).abs() < 1e-14);
        assert_eq!(samples.len(), 31);
    }

    #[test]
    fn base_level_is_a_single_solve() {
        let plan = SparseTensorPlan::new(0);
        let (est, d, s) = combine(&plan, |_, t| Ok((2.0 + t, 5))).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(d.len(), 1);
        assert!((est - FRAC_PI_4 * 2.0).abs() < 1e-15);
    }
}
