//! The cartoon benchmark class and oracle partition builders.
//!
//! A cartoon is `f1` on `{x1 <= E(x2)}` and `f2` elsewhere. The oracle builders
//! construct partitions adapted to the jump curve, either by parabolic scaling and
//! shearing ([`build_oracle_partition`]) or by repeated bisection
//! ([`build_bisection_partition`]).

mod bisection;
mod gamma;
mod horizon;
mod oracle;

use std::sync::Arc;

pub use bisection::{build_bisection_partition, BisectionBuild};
pub use gamma::{clip_segment, GammaPolyline};
pub use horizon::{Fn1, HorizonCurve};
pub use oracle::{build_oracle_partition, OracleBuild};

use crate::fem::{best_affine_error, Interface, PiecewiseFn, ScalarFn};
use crate::geometry::{Partition, Point2};
use crate::{Error, Result};

/// Class parameters: curvature bound, curve length bound, function bound and separation width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartoonParams {
    pub kappa: f64,
    pub length: f64,
    pub m_bound: f64,
    pub omega: f64,
}

#[derive(Clone)]
pub struct Cartoon {
    field: PiecewiseFn,
    horizon: Option<HorizonCurve>,
    params: CartoonParams,
}

impl std::fmt::Debug for Cartoon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cartoon").field("horizon", &self.horizon).field("params", &self.params).finish()
    }
}

/// Sampled sup of `|f|`, `|∇f|` and `|∇²f|` by central differences on a grid.
fn sampled_bound(f: &ScalarFn) -> f64 {
    let n = 32;
    let h = 1e-4;
    let mut m: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let p = Point2::new(h + (1.0 - 2.0 * h) * i as f64 / n as f64, h + (1.0 - 2.0 * h) * j as f64 / n as f64);
            let v = f(p);
            let at = |dx: f64, dy: f64| f(Point2::new(p.x1 + dx, p.x2 + dy));
            let d1 = (at(h, 0.0) - at(-h, 0.0)) / (2.0 * h);
            let d2 = (at(0.0, h) - at(0.0, -h)) / (2.0 * h);
            let dxx = (at(h, 0.0) - 2.0 * v + at(-h, 0.0)) / (h * h);
            let dyy = (at(0.0, h) - 2.0 * v + at(0.0, -h)) / (h * h);
            m = m.max(v.abs()).max(d1.abs()).max(d2.abs()).max(dxx.abs()).max(dyy.abs());
        }
    }
    m
}

impl Cartoon {
    /// `f1` left of the horizon, `f2` right of it; checks the curvature and function bounds.
    pub fn new(horizon: HorizonCurve, f1: ScalarFn, f2: ScalarFn, params: CartoonParams) -> Result<Cartoon> {
        if horizon.kappa() > params.kappa + 1e-12 {
            return Err(Error::Inadmissible(format!(
                "sampled curvature {} exceeds kappa {}",
                horizon.kappa(),
                params.kappa
            )));
        }
        for (name, f) in [("f1", &f1), ("f2", &f2)] {
            let m = sampled_bound(f);
            // finite differences carry O(h²) noise
            if m > params.m_bound * (1.0 + 1e-6) + 1e-6 {
                return Err(Error::Inadmissible(format!("{name} bound {m} exceeds M={}", params.m_bound)));
            }
        }
        let field = PiecewiseFn::split(Interface::Horizon(horizon.clone()), f1, f2);
        Ok(Cartoon { field, horizon: Some(horizon), params })
    }

    /// A cartoon without jump.
    pub fn smooth(f: ScalarFn, params: CartoonParams) -> Cartoon {
        Cartoon { field: PiecewiseFn::smooth(f), horizon: None, params }
    }

    /// `E(x2) = x2²/2`, `f1 = 1`, `f2 = ½`, `κ = 1`.
    pub fn reference() -> Cartoon {
        let h = HorizonCurve::parabola(1.0).expect("admissible parabola");
        let params = CartoonParams { kappa: 1.0, length: 1.15, m_bound: 1.0, omega: 0.5 };
        Cartoon::new(h, Arc::new(|_| 1.0), Arc::new(|_| 0.5), params).expect("reference cartoon")
    }

    pub fn eval(&self, p: Point2) -> f64 {
        self.field.eval(p)
    }

    pub fn field(&self) -> &PiecewiseFn {
        &self.field
    }

    pub fn horizon(&self) -> Option<&HorizonCurve> {
        self.horizon.as_ref()
    }

    pub fn params(&self) -> CartoonParams {
        self.params
    }
}

/// Smallest `J0` with `4·5^{3/2}·κ <= 2^{J0}`.
pub fn base_scale(kappa: f64) -> u32 {
    let need = 4.0 * 5f64.powf(1.5) * kappa;
    (0..64).find(|&j| need <= 2f64.powi(j as i32)).unwrap_or(64)
}

/// Orientation `ι` minimizing `|s − (2k+ι)/2^{⌈j/2⌉}|`; ties prefer 0, then +1.
pub fn orientation_for_slope(slope: f64, j: u32, k: i64) -> i64 {
    let scale = 2f64.powi(j.div_ceil(2) as i32);
    let mut best = (0i64, f64::INFINITY);
    for iota in [0, 1, -1] {
        let d = (slope - (2 * k + iota) as f64 / scale).abs();
        if d < best.1 {
            best = (iota, d);
        }
    }
    best.0
}

/// Orientation of the split creating level `j` (odd) of a cell with shear `k` anchored at ordinate `m2`.
pub fn orientation(h: &HorizonCurve, j: u32, k: i64, m2: f64) -> i64 {
    orientation_for_slope(h.slope(m2.clamp(0.0, 1.0)), j, k)
}

/// `max(⌈J/2 − 3j/4 − Jr⌉, 0)`.
pub fn iso_depth(j: u32, big_j: u32, jr: u32) -> u32 {
    let num = 2 * big_j as i64 - 3 * j as i64 - 4 * jr as i64;
    if num <= 0 {
        0
    } else {
        ((num + 3) / 4) as u32
    }
}

/// `√(Σ_Q ‖f − P_Q f‖²)` with `P_Q` the cellwise best affine fit.
pub fn nterm_error(cartoon: &Cartoon, partition: &Partition) -> f64 {
    best_affine_error(&partition.cells, &cartoon.field)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let c = Cartoon::reference();
        assert_eq!(c.eval(Point2::new(0.1, 0.6)), 1.0);
        assert_eq!(c.eval(Point2::new(0.5, 0.5)), 0.5);
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation_for_slope(0.6, 1, 0), 1);
        assert_eq!(orientation_for_slope(0.0, 1, 0), 0);
        assert_eq!(orientation_for_slope(0.0, 5, 0), 0);
        assert_eq!(orientation_for_slope(-0.6, 1, 0), -1);
        // exact tie between 0 and +1 resolves to 0
        assert_eq!(orientation_for_slope(0.25, 1, 0), 0);
    }

    #[test]
    fn iso_depth_examples() {
        assert_eq!(iso_depth(0, 8, 2), 2);
        assert_eq!(iso_depth(2, 8, 2), 1);
        for j in 0..=12 {
            if 3 * j >= 2 * (8 - 2 * 2) {
                assert_eq!(iso_depth(j, 8, 2), 0);
            }
        }
        assert_eq!(iso_depth(0, 12, 6), 0);
    }

    #[test]
    fn base_scale_for_unit_curvature() {
        assert_eq!(base_scale(1.0), 6);
        assert_eq!(base_scale(0.0), 0);
    }

    #[test]
    fn inadmissible_kappa_rejected() {
        let h = HorizonCurve::parabola(2.0).unwrap();
        let p = CartoonParams { kappa: 1.0, length: 1.0, m_bound: 1.0, omega: 0.5 };
        assert!(Cartoon::new(h, Arc::new(|_| 1.0), Arc::new(|_| 0.0), p).is_err());
    }
}
