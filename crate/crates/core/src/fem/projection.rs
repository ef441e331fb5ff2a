//! Cellwise L2 projections onto affine functions.

use rayon::prelude::*;

use super::field::PiecewiseFn;
use super::integrate::quad_points;
use super::onb::LocalOnb;
use super::quadrature::QuadratureRule;
use crate::geometry::{Cell, Point2};

/// Best affine fit of a field on one cell.
#[derive(Clone, Debug)]
pub struct CellFit {
    pub onb: LocalOnb,
    pub coeffs: [f64; 3],
    /// `‖f − P f‖²` on the cell.
    pub residual_sq: f64,
}

/// Projects `f` onto the affine functions on a convex polygon.
pub fn fit_cell(vertices: &[Point2], f: &PiecewiseFn, rule: &QuadratureRule) -> CellFit {
    let onb = LocalOnb::new(vertices);
    let pts = quad_points(vertices, &f.interface, rule);
    let mut c = [0.0; 3];
    let vals: Vec<f64> = pts.iter().map(|&(p, _, s)| f.eval_side(p, s)).collect();
    for (&(p, w, _), &v) in pts.iter().zip(&vals) {
        let phi = onb.eval(p);
        for i in 0..3 {
            c[i] += w * v * phi[i];
        }
    }
    let mut r = 0.0;
    for (&(p, w, _), &v) in pts.iter().zip(&vals) {
        let d = v - onb.combine(&c, p);
        r += w * d * d;
    }
    CellFit { onb, coeffs: c, residual_sq: r }
}

/// Cellwise fits of `f` on all cells, computed in parallel, returned in cell order.
pub fn fit_cells(cells: &[Cell], f: &PiecewiseFn) -> Vec<CellFit> {
    let rule = QuadratureRule::degree4();
    cells.par_iter().map(|c| fit_cell(c.vertices(), f, &rule)).collect()
}

/// `√(Σ_Q ‖f − P_Q f‖²)` over a partition.
pub fn best_affine_error(cells: &[Cell], f: &PiecewiseFn) -> f64 {
    let rule = QuadratureRule::degree4();
    let parts: Vec<f64> = cells.par_iter().map(|c| fit_cell(c.vertices(), f, &rule).residual_sq).collect();
    parts.iter().sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fem::field::Interface;
    use crate::geometry::Partition;

    #[test]
    fn jump_on_unit_square_has_half_constant_coefficient() {
        let f = PiecewiseFn::split(
            Interface::Sign(Arc::new(|p: Point2| p.x1 <= 0.5)),
            Arc::new(|_| 0.0),
            Arc::new(|_| 1.0),
        );
        let sq = Partition::uniform(0);
        let fit = fit_cell(sq.cells[0].vertices(), &f, &QuadratureRule::degree4());
        assert!((fit.coeffs[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn affine_field_is_reproduced() {
        let f = PiecewiseFn::smooth(Arc::new(|p: Point2| 1.0 + 2.0 * p.x1 - p.x2));
        assert!(best_affine_error(&Partition::uniform(2).cells, &f) < 1e-12);
    }
}
