//! Transport problems `b·∇u + cu = f` with inflow data, and the built-in examples.

use std::sync::Arc;

use crate::cartoon::HorizonCurve;
use crate::fem::{Interface, PiecewiseFn, ScalarFn};
use crate::geometry::Point2;
use crate::{Error, Result};

pub type VectorFn = Arc<dyn Fn(Point2) -> Point2 + Send + Sync>;

/// Grid size of the coercivity check.
const COERCIVITY_GRID: usize = 64;

#[derive(Clone)]
pub struct TransportProblem {
    pub name: String,
    pub b: VectorFn,
    pub div_b: ScalarFn,
    pub c: ScalarFn,
    pub f0: PiecewiseFn,
    /// Inflow data; only read on the inflow boundary.
    pub g: ScalarFn,
    /// Sampled lower bound of `c − ½ div b`.
    pub c0: f64,
    /// Closed-form solution traced along characteristics.
    pub exact: Option<PiecewiseFn>,
}

impl std::fmt::Debug for TransportProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransportProblem").field("name", &self.name).field("c0", &self.c0).finish()
    }
}

impl TransportProblem {
    /// Checks `c − ½ div b >= c0 > 0` on a grid.
    pub fn new(
        name: &str,
        b: VectorFn,
        div_b: ScalarFn,
        c: ScalarFn,
        f0: PiecewiseFn,
        g: ScalarFn,
        exact: Option<PiecewiseFn>,
    ) -> Result<TransportProblem> {
        let n = COERCIVITY_GRID;
        let mut c0 = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                let p = Point2::new((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
                c0 = c0.min(c(p) - 0.5 * div_b(p));
            }
        }
        if !(c0 > 0.0) {
            return Err(Error::InadmissibleProblem(format!("{name}: c - div(b)/2 has sampled minimum {c0}")));
        }
        Ok(TransportProblem { name: name.to_string(), b, div_b, c, f0, g, c0, exact })
    }

    /// `−b·∇v + (c − div b) v` for a value and gradient at `p`.
    pub fn astar(&self, p: Point2, v: f64, grad: Point2) -> f64 {
        -(self.b)(p).dot(grad) + ((self.c)(p) - (self.div_b)(p)) * v
    }

    /// Shear layer: `b = (1,1)`, `c = 1`, `f = ½`, `g = 1 − x1` on the bottom, 0 on the left.
    pub fn boundary() -> TransportProblem {
        let exact = PiecewiseFn::split(
            Interface::Horizon(HorizonCurve::line(1.0, 0.0).expect("diagonal")),
            Arc::new(|p: Point2| 0.5 * (1.0 - (-p.x1).exp())),
            Arc::new(|p: Point2| 0.5 + (0.5 - p.x1 + p.x2) * (-p.x2).exp()),
        );
        TransportProblem::new(
            "boundary",
            Arc::new(|_| Point2::new(1.0, 1.0)),
            Arc::new(|_| 0.0),
            Arc::new(|_| 1.0),
            PiecewiseFn::constant(0.5),
            Arc::new(bottom_data),
            Some(exact),
        )
        .expect("coercive")
    }

    /// Curved layer: `b = (x2, 1)`, `c = 1`, `f = 1` right of `x1 = x2²/2` and ½ left of it, `g = 0`.
    pub fn curve() -> TransportProblem {
        let h = HorizonCurve::parabola(1.0).expect("parabola");
        let f0 = PiecewiseFn::split(Interface::Horizon(h.clone()), Arc::new(|_| 0.5), Arc::new(|_| 1.0));
        let exact = PiecewiseFn::split(
            Interface::Horizon(h),
            Arc::new(|p: Point2| {
                let entry = (p.x2 * p.x2 - 2.0 * p.x1).max(0.0).sqrt();
                0.5 * (1.0 - (-(p.x2 - entry)).exp())
            }),
            Arc::new(|p: Point2| 1.0 - (-p.x2).exp()),
        );
        TransportProblem::new(
            "curve",
            Arc::new(|p: Point2| Point2::new(p.x2, 1.0)),
            Arc::new(|_| 0.0),
            Arc::new(|_| 1.0),
            f0,
            Arc::new(|_| 0.0),
            Some(exact),
        )
        .expect("coercive")
    }

    /// Smooth solution `u = x1 x2` with `b = (1,1)`, `c = 1`.
    pub fn manufactured() -> TransportProblem {
        TransportProblem::new(
            "manufactured",
            Arc::new(|_| Point2::new(1.0, 1.0)),
            Arc::new(|_| 0.0),
            Arc::new(|_| 1.0),
            PiecewiseFn::smooth(Arc::new(|p: Point2| p.x1 + p.x2 + p.x1 * p.x2)),
            Arc::new(|p: Point2| p.x1 * p.x2),
            Some(PiecewiseFn::smooth(Arc::new(|p: Point2| p.x1 * p.x2))),
        )
        .expect("coercive")
    }

    /// Direction `θ ∈ [0, π/4]`: `b = (tan θ·x2, 1)`, `c = 1`, `f = 1`, `g = 1 − x1` on the bottom, 0 on the left.
    pub fn parametric(theta: f64) -> Result<TransportProblem> {
        if !(0.0..=std::f64::consts::FRAC_PI_4 + 1e-12).contains(&theta) {
            return Err(Error::InadmissibleProblem(format!("direction {theta} outside [0, pi/4]")));
        }
        let t = theta.tan();
        let right: ScalarFn = Arc::new(move |p: Point2| 1.0 - (p.x1 - 0.5 * t * p.x2 * p.x2) * (-p.x2).exp());
        let exact = if t > 0.0 {
            PiecewiseFn::split(
                Interface::Horizon(HorizonCurve::parabola(t)?),
                Arc::new(move |p: Point2| {
                    let entry = (p.x2 * p.x2 - 2.0 * p.x1 / t).max(0.0).sqrt();
                    1.0 - (-(p.x2 - entry)).exp()
                }),
                right,
            )
        } else {
            PiecewiseFn::smooth(right)
        };
        TransportProblem::new(
            "parametric",
            Arc::new(move |p: Point2| Point2::new(t * p.x2, 1.0)),
            Arc::new(|_| 0.0),
            Arc::new(|_| 1.0),
            PiecewiseFn::constant(1.0),
            Arc::new(bottom_data),
            Some(exact),
        )
    }

    /// Looks up a built-in problem by name.
    pub fn builtin(name: &str) -> Option<TransportProblem> {
        match name {
            "boundary" => Some(TransportProblem::boundary()),
            "curve" => Some(TransportProblem::curve()),
            "manufactured" => Some(TransportProblem::manufactured()),
            _ => None,
        }
    }
}

/// `1 − x1` on the bottom edge, 0 elsewhere.
fn bottom_data(p: Point2) -> f64 {
    if p.x2.abs() <= 1e-14 {
        1.0 - p.x1
    } else {
        0.0
    }
}

/// Characteristics solution of a built-in problem (`theta` selects the parametric family).
pub fn exact_solution(problem_id: &str, theta: Option<f64>, p: Point2) -> Result<f64> {
    let prob = match (problem_id, theta) {
        ("parametric", Some(t)) => TransportProblem::parametric(t)?,
        (name, _) => TransportProblem::builtin(name)
            .ok_or_else(|| Error::InadmissibleProblem(format!("unknown problem {name}")))?,
    };
    Ok(prob.exact.as_ref().expect("built-ins carry an oracle").eval(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        let u = exact_solution("boundary", None, Point2::new(0.9, 0.3)).unwrap();
        assert!((u - 0.425918).abs() < 5e-7, "{u}");
        let u = exact_solution("curve", None, Point2::new(0.1, 0.6)).unwrap();
        assert!((u - 0.090635).abs() < 5e-7, "{u}");
        let u = exact_solution("curve", None, Point2::new(0.5, 0.5)).unwrap();
        assert!((u - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        let pts: [(f64, f64); 3] = [(0.2, 0.7), (0.9, 0.1), (0.0, 0.5)];
        for (x1, x2) in pts {
            let u = exact_solution("parametric", Some(0.0), Point2::new(x1, x2)).unwrap();
            assert!((u - (1.0 - x1 * (-x2).exp())).abs() < 1e-15);
        }
    }

    /// Residual of `b·∇u + cu − f` by central differences away from the layers.
    fn pde_residual(p: &TransportProblem, x: Point2) -> f64 {
        let u = p.exact.as_ref().unwrap();
        let h = 1e-6;
        let du1 = (u.eval(Point2::new(x.x1 + h, x.x2)) - u.eval(Point2::new(x.x1 - h, x.x2))) / (2.0 * h);
        let du2 = (u.eval(Point2::new(x.x1, x.x2 + h)) - u.eval(Point2::new(x.x1, x.x2 - h))) / (2.0 * h);
        (p.b)(x).dot(Point2::new(du1, du2)) + (p.c)(x) * u.eval(x) - p.f0.eval(x)
    }

    #[test]
    fn oracles_solve_the_equations() {
        let probs = [
            TransportProblem::boundary(),
            TransportProblem::curve(),
            TransportProblem::manufactured(),
            TransportProblem::parametric(0.3).unwrap(),
        ];
        for p in &probs {
            for &(x1, x2) in &[(0.3, 0.7), (0.8, 0.2), (0.05, 0.9), (0.6, 0.6 + 0.05)] {
                let r = pde_residual(p, Point2::new(x1, x2));
                assert!(r.abs() < 1e-6, "{}: residual {r} at ({x1},{x2})", p.name);
            }
        }
    }

    #[test]
    fn non_coercive_rejected() {
        let r = TransportProblem::new(
            "bad",
            Arc::new(|p: Point2| Point2::new(4.0 * p.x1, 0.0)),
            Arc::new(|_| 4.0),
            Arc::new(|_| 1.0),
            PiecewiseFn::constant(1.0),
            Arc::new(|_| 0.0),
            None,
        );
        assert!(r.is_err());
    }
}
