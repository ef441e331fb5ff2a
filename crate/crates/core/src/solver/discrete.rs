//! The discrete saddle point system on a fixed pair of trial and test spaces.

use faer::prelude::*;
use faer::{Mat, Side};

use super::TransportProblem;
use crate::fem::sparse::dot;
use crate::fem::{assemble, l2_project, PiecewiseFn, SpdSolver, System, TestSpace, TrialSpace};
use crate::geometry::{Partition, Point2};
use crate::{Error, Result};

/// Trial space, test space, assembled blocks and the factorized Gram matrix.
pub struct Discretization {
    pub x: TrialSpace,
    pub z: TestSpace,
    pub system: System,
    gram: SpdSolver,
}

impl std::fmt::Debug for Discretization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Discretization").field("dim_x", &self.x.dim()).field("dim_z", &self.z.dim()).finish()
    }
}

impl Discretization {
    /// Default test space: continuous P2 on the once-refined partition.
    pub fn new(partition: Partition, problem: &TransportProblem) -> Result<Discretization> {
        let z = expand_stable(&partition, problem)?;
        Discretization::with_test_space(partition, z, problem)
    }

    pub fn with_test_space(partition: Partition, z: TestSpace, problem: &TransportProblem) -> Result<Discretization> {
        let x = TrialSpace::new(partition);
        let system = assemble(&x, &z, problem);
        let gram = SpdSolver::new(&system.g)?;
        Ok(Discretization { x, z, system, gram })
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// Lifted residual `r ∈ Z` with `(A*r, A*z) = f(z) − a(u, z)`.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let bu = self.system.b.mul(u);
        let rhs: Vec<f64> = self.system.f.iter().zip(&bu).map(|(f, b)| f - b).collect();
        self.gram.solve(&rhs)
    }

    /// `Π_X A* r` in trial coefficients.
    pub fn project_astar(&self, r: &[f64]) -> Vec<f64> {
        self.system.b.mul_t(r)
    }

    /// `‖A* r‖_{L2}`.
    pub fn astar_norm(&self, r: &[f64]) -> f64 {
        dot(r, &self.system.g.mul(r)).max(0.0).sqrt()
    }

    /// `A* r` at `p` in companion triangle `t`.
    pub fn astar_at(&self, problem: &TransportProblem, r: &[f64], t: usize, p: Point2) -> f64 {
        let (v, g) = self.z.eval_in(r, t, p);
        problem.astar(p, v, g)
    }

    /// One Uzawa step, returning the new iterate and the residual it used.
    pub fn uzawa_step(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let r = self.residual(u);
        let du = self.project_astar(&r);
        (u.iter().zip(&du).map(|(a, b)| a + b).collect(), r)
    }

    /// `k` Uzawa steps from `u0`.
    pub fn uzawa_iterate(&self, u0: &[f64], k: usize) -> Vec<f64> {
        let mut u = u0.to_vec();
        for _ in 0..k {
            u = self.uzawa_step(&u).0;
        }
        u
    }

    /// Solution of the saddle point system via the Schur complement `Bᵀ G⁻¹ B`.
    pub fn direct_solve(&self) -> Result<Vec<f64>> {
        let (nx, nz) = (self.x.dim(), self.z.dim());
        let mut y = Mat::<f64>::zeros(nz, nx);
        for i in 0..nz {
            for (c, v) in self.system.b.row(i) {
                y.write(i, c, v);
            }
        }
        self.gram.solve_many(y.as_mut());
        let mut s = Mat::<f64>::zeros(nx, nx);
        for i in 0..nz {
            for (a, v) in self.system.b.row(i) {
                for c in 0..nx {
                    s.write(a, c, s.read(a, c) + v * y.read(i, c));
                }
            }
        }
        // Bᵀ G⁻¹ F = (G⁻¹ B)ᵀ F
        let rhs = Mat::<f64>::from_fn(nx, 1, |c, _| (0..nz).map(|i| y.read(i, c) * self.system.f[i]).sum());
        let chol = s
            .cholesky(Side::Lower)
            .map_err(|e| Error::Factorization(format!("Schur complement: {e:?}")))?;
        let u = chol.solve(&rhs);
        Ok((0..nx).map(|i| u.read(i, 0)).collect())
    }

    /// Relative distance of `Π_X u − u_k` to `A* Z`.
    ///
    /// Returns 0 when the error itself is below 1e-12.
    pub fn estimate_delta(&self, u_k: &[f64], exact: &PiecewiseFn) -> f64 {
        let best = l2_project(exact, &self.x);
        let e: Vec<f64> = best.iter().zip(u_k).map(|(a, b)| a - b).collect();
        delta_of(self, &e)
    }

    pub fn gram(&self) -> &SpdSolver {
        &self.gram
    }
}

/// `min_φ ‖e − A*φ‖ / ‖e‖` for `e` in trial coefficients.
pub fn delta_of(d: &Discretization, e: &[f64]) -> f64 {
    let e2 = dot(e, e);
    if e2.sqrt() < 1e-12 {
        return 0.0;
    }
    let be = d.system.b.mul(e);
    let phi = d.gram.solve(&be);
    (1.0 - dot(&be, &phi) / e2).max(0.0).sqrt()
}

/// Continuous P2 test space on the once-refined partition, zero on the outflow boundary.
pub fn expand_stable(partition: &Partition, problem: &TransportProblem) -> Result<TestSpace> {
    TestSpace::new(partition, &problem.b)
}
