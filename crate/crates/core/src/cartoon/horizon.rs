use std::sync::Arc;

use crate::geometry::Point2;
use crate::{Error, Result};

pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The jump curve `x1 = E(x2)`, `x2 ∈ [0,1]`, with analytic derivatives.
#[derive(Clone)]
pub struct HorizonCurve {
    e: Fn1,
    de: Fn1,
    dde: Fn1,
    kappa: f64,
    max_slope: f64,
}

impl std::fmt::Debug for HorizonCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HorizonCurve")
            .field("kappa", &self.kappa)
            .field("max_slope", &self.max_slope)
            .finish()
    }
}

/// Samples used for the slope and curvature checks.
const SAMPLES: usize = 4096;

impl HorizonCurve {
    /// Checks `|E'| <= 2` on a dense sample and records the sampled curvature bound.
    pub fn new(e: Fn1, de: Fn1, dde: Fn1) -> Result<HorizonCurve> {
        let (mut kappa, mut slope) = (0f64, 0f64);
        for i in 0..=SAMPLES {
            let y = i as f64 / SAMPLES as f64;
            let (v, d1, d2) = (e(y), de(y), dde(y));
            if !(v.is_finite() && d1.is_finite() && d2.is_finite()) {
                return Err(Error::Inadmissible(format!("non-finite horizon data at x2={y}")));
            }
            slope = slope.max(d1.abs());
            kappa = kappa.max(d2.abs());
        }
        if slope > 2.0 + 1e-12 {
            return Err(Error::Inadmissible(format!("horizon slope {slope} exceeds 2")));
        }
        Ok(HorizonCurve { e, de, dde, kappa, max_slope: slope })
    }

    /// `E(x2) = a·x2²/2`.
    pub fn parabola(a: f64) -> Result<HorizonCurve> {
        HorizonCurve::new(
            Arc::new(move |y| 0.5 * a * y * y),
            Arc::new(move |y| a * y),
            Arc::new(move |_| a),
        )
    }

    /// `E(x2) = s·x2 + c`.
    pub fn line(s: f64, c: f64) -> Result<HorizonCurve> {
        HorizonCurve::new(Arc::new(move |y| s * y + c), Arc::new(move |_| s), Arc::new(|_| 0.0))
    }

    pub fn e(&self, x2: f64) -> f64 {
        (self.e)(x2)
    }

    pub fn slope(&self, x2: f64) -> f64 {
        (self.de)(x2)
    }

    pub fn second(&self, x2: f64) -> f64 {
        (self.dde)(x2)
    }

    /// Sampled bound on `|E''|`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn max_slope(&self) -> f64 {
        self.max_slope
    }

    /// True on the closed side `x1 <= E(x2)`.
    pub fn is_left(&self, p: Point2) -> bool {
        p.x1 <= self.e(p.x2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_bounds() {
        let h = HorizonCurve::parabola(1.0).unwrap();
        assert!((h.kappa() - 1.0).abs() < 1e-15);
        assert!((h.max_slope() - 1.0).abs() < 1e-15);
        assert!(h.is_left(Point2::new(0.1, 0.6)));
        assert!(!h.is_left(Point2::new(0.5, 0.5)));
    }

    #[test]
    fn steep_curve_rejected() {
        assert!(HorizonCurve::line(3.0, 0.0).is_err());
    }
}
