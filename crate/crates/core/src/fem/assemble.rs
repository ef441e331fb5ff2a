//! Assembly of the adjoint Gram matrix, the transport bilinear form and the load vector.
//!
//! Local contributions are computed in parallel per companion triangle and scattered
//! sequentially in triangle order, so the assembled values are bit-reproducible.

use rayon::prelude::*;

use super::integrate::quad_points;
use super::quadrature::{gauss_interval, map_rule, QuadratureRule};
use super::space::{p2_basis, TestSpace, TrialSpace};
use super::sparse::CsrMatrix;
use super::{PiecewiseFn, Side};
use crate::geometry::Point2;
use crate::solver::TransportProblem;

/// The blocks of the discrete saddle point system.
#[derive(Clone, Debug)]
pub struct System {
    /// `(A* ψ_i, A* ψ_j)` over free test dofs.
    pub g: CsrMatrix,
    /// `a(φ_c, ψ_i)`, rows test dofs, columns trial dofs.
    pub b: CsrMatrix,
    /// `f(ψ_i)`.
    pub f: Vec<f64>,
}

/// `x ↦ −b·∇v + (c − div b) v` for `v` given with its gradient.
pub fn astar_apply<'a>(
    problem: &'a TransportProblem,
    v: impl Fn(Point2) -> (f64, Point2) + 'a,
) -> impl Fn(Point2) -> f64 + 'a {
    move |p| {
        let (val, grad) = v(p);
        problem.astar(p, val, grad)
    }
}

fn astar_basis(problem: &TransportProblem, tri: &[Point2; 3], p: Point2) -> [f64; 6] {
    let (v, g) = p2_basis(tri, p);
    std::array::from_fn(|k| problem.astar(p, v[k], g[k]))
}

struct Local {
    g: [[f64; 6]; 6],
    b: [[f64; 3]; 6],
    f: [f64; 6],
}

fn local(x: &TrialSpace, z: &TestSpace, problem: &TransportProblem, t: usize, rule: &QuadratureRule) -> Local {
    let tri = z.mesh.triangle(t);
    let onb = &x.onb[z.mesh.owner[t]];
    let mut g = [[0.0; 6]; 6];
    let mut b = [[0.0; 3]; 6];
    for (p, w) in map_rule(&tri, rule) {
        let a = astar_basis(problem, &tri, p);
        let phi = onb.eval(p);
        for i in 0..6 {
            for j in 0..6 {
                g[i][j] += w * a[i] * a[j];
            }
            for c in 0..3 {
                b[i][c] += w * a[i] * phi[c];
            }
        }
    }
    let mut f = [0.0; 6];
    for (p, w, side) in quad_points(&tri, &problem.f0.interface, rule) {
        let fv = problem.f0.eval_side(p, side);
        let (v, _) = p2_basis(&tri, p);
        for i in 0..6 {
            f[i] += w * fv * v[i];
        }
    }
    Local { g, b, f }
}

/// Sub-intervals of `[0,1]` on which `h` has one strict sign, split at a bisected zero.
fn sign_pieces(h: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let (h0, h1) = (h(0.0), h(1.0));
    if h0 * h1 >= 0.0 {
        return vec![(0.0, 1.0)];
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if h(mid) * h0 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    vec![(0.0, s), (s, 1.0)]
}

/// `∫_{∂D₋} g ψ_i |b·n| ds` added into `f`.
fn add_inflow(z: &TestSpace, problem: &TransportProblem, f: &mut [f64]) {
    for &(a, c, t) in &z.boundary_edges {
        let (p, q) = (z.nodes[a], z.nodes[c]);
        let d = q - p;
        let len = d.norm();
        let n = (1.0 / len) * Point2::new(d.x2, -d.x1);
        let bn = |s: f64| (problem.b)(p.lerp(q, s)).dot(n);
        let tri = z.mesh.triangle(t);
        let dofs = z.local_dofs(t);
        for (s0, s1) in sign_pieces(bn) {
            if bn(0.5 * (s0 + s1)) >= -1e-14 {
                continue;
            }
            for (s, w) in gauss_interval(s0, s1, 3) {
                let x = p.lerp(q, s);
                let (v, _) = p2_basis(&tri, x);
                let weight = w * len * (problem.g)(x) * bn(s).abs();
                for k in 0..6 {
                    if let Some(i) = dofs[k] {
                        f[i] += weight * v[k];
                    }
                }
            }
        }
    }
}

/// Assembles `G`, `B` and `F` in one pass over the companion triangles.
pub fn assemble(x: &TrialSpace, z: &TestSpace, problem: &TransportProblem) -> System {
    let rule = QuadratureRule::degree4();
    let locals: Vec<Local> =
        (0..z.mesh.triangles.len()).into_par_iter().map(|t| local(x, z, problem, t, &rule)).collect();
    let mut gt = Vec::with_capacity(36 * locals.len());
    let mut bt = Vec::with_capacity(18 * locals.len());
    let mut f = vec![0.0; z.ndof];
    for (t, l) in locals.iter().enumerate() {
        let dofs = z.local_dofs(t);
        let cell = z.mesh.owner[t];
        for i in 0..6 {
            let Some(di) = dofs[i] else { continue };
            f[di] += l.f[i];
            for j in 0..6 {
                if let Some(dj) = dofs[j] {
                    gt.push((di, dj, l.g[i][j]));
                }
            }
            for c in 0..3 {
                bt.push((di, 3 * cell + c, l.b[i][c]));
            }
        }
    }
    add_inflow(z, problem, &mut f);
    System {
        g: CsrMatrix::from_triplets(z.ndof, z.ndof, gt),
        b: CsrMatrix::from_triplets(z.ndof, x.dim(), bt),
        f,
    }
}

pub fn assemble_gram_astar(x: &TrialSpace, z: &TestSpace, problem: &TransportProblem) -> CsrMatrix {
    assemble(x, z, problem).g
}

pub fn assemble_a(x: &TrialSpace, z: &TestSpace, problem: &TransportProblem) -> CsrMatrix {
    assemble(x, z, problem).b
}

pub fn assemble_rhs(x: &TrialSpace, z: &TestSpace, problem: &TransportProblem) -> Vec<f64> {
    assemble(x, z, problem).f
}

/// Cellwise L2 projection of `f` onto the trial space.
pub fn l2_project(f: &PiecewiseFn, x: &TrialSpace) -> Vec<f64> {
    super::fit_cells(&x.partition.cells, f).into_iter().flat_map(|c| c.coeffs).collect()
}

/// `‖u_h − reference‖_{L2(D)}` with jump-aware quadrature of degree 10 on every piece.
pub fn l2_error(x: &TrialSpace, u: &[f64], reference: &PiecewiseFn) -> f64 {
    let rule = QuadratureRule::collapsed(6);
    let parts: Vec<f64> = x
        .partition
        .cells
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            quad_points(c.vertices(), &reference.interface, &rule)
                .into_iter()
                .map(|(p, w, s): (Point2, f64, Side)| {
                    let d = x.eval_in(u, i, p) - reference.eval_side(p, s);
                    w * d * d
                })
                .sum::<f64>()
        })
        .collect();
    parts.iter().sum::<f64>().sqrt()
}
