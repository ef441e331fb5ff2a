//! Integration over convex polygons of fields with an interior jump.
//!
//! Horizon interfaces are resolved by cutting the polygon into horizontal slabs and
//! splitting each slab along the chord of the curve. Sign interfaces fall back to
//! recursive quartering of triangles.

use super::field::{Interface, PiecewiseFn, Side};
use super::quadrature::{map_rule, QuadratureRule};
use crate::cartoon::HorizonCurve;
use crate::geometry::{polygon, Point2};

/// Maximum quartering depth of the sign-function route.
pub const MAX_DEPTH: u32 = 12;
/// Leaves below this area are not subdivided further.
pub const MIN_LEAF_AREA: f64 = 1e-10;

/// Splits a convex polygon into convex pieces lying on one side of the interface.
pub fn decompose(poly: &[Point2], interface: &Interface) -> Vec<(Vec<Point2>, Side)> {
    match interface {
        Interface::Smooth => vec![(poly.to_vec(), Side::Left)],
        Interface::Horizon(h) => slab_split(poly, h),
        Interface::Sign(_) => {
            let mut out = Vec::new();
            for t in polygon::vertex_fan(poly) {
                quarter(&t, interface, 0, &mut out);
            }
            out.into_iter().map(|(t, s)| (t.to_vec(), s)).collect()
        }
    }
}

fn slab_split(poly: &[Point2], h: &HorizonCurve) -> Vec<(Vec<Point2>, Side)> {
    let (lo, hi) = polygon::bbox(poly);
    let height = hi.x2 - lo.x2;
    let width = hi.x1 - lo.x1;
    let tol = (1e-4 * width).clamp(1e-14, 1e-9);
    let kappa = h.kappa();
    let n = if kappa > 0.0 && height > 0.0 {
        ((height / (8.0 * tol / kappa).sqrt()).ceil() as usize).clamp(1, 16384)
    } else {
        1
    };
    let dy = height / n as f64;
    let ys: Vec<f64> = (0..=n).map(|i| if i == n { hi.x2 } else { lo.x2 + i as f64 * dy }).collect();
    let es: Vec<f64> = ys.iter().map(|&y| h.e(y)).collect();
    let margin = kappa * dy * dy / 8.0 + 1e-15;
    let emin = es.iter().cloned().fold(f64::INFINITY, f64::min) - margin;
    let emax = es.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + margin;
    if hi.x1 <= emin {
        return vec![(poly.to_vec(), Side::Left)];
    }
    if lo.x1 >= emax {
        return vec![(poly.to_vec(), Side::Right)];
    }
    let mut out = Vec::new();
    let push = |out: &mut Vec<(Vec<Point2>, Side)>, p: Vec<Point2>, s: Side| {
        let p = polygon::cleanup(&p);
        if p.len() >= 3 && polygon::area(&p) > 0.0 {
            out.push((p, s));
        }
    };
    for i in 0..n {
        let slab = if n == 1 {
            poly.to_vec()
        } else {
            let s = polygon::clip_halfplane(poly, Point2::new(0.0, -1.0), -ys[i]);
            polygon::clip_halfplane(&s, Point2::new(0.0, 1.0), ys[i + 1])
        };
        if slab.len() < 3 {
            continue;
        }
        let s = if ys[i + 1] > ys[i] { (es[i + 1] - es[i]) / (ys[i + 1] - ys[i]) } else { 0.0 };
        // x1 − (es[i] + s (x2 − ys[i])) <= 0 is the left side
        let nrm = Point2::new(1.0, -s);
        let c = es[i] - s * ys[i];
        push(&mut out, polygon::clip_halfplane(&slab, nrm, c), Side::Left);
        push(&mut out, polygon::clip_halfplane(&slab, -1.0 * nrm, -c), Side::Right);
    }
    out
}

fn quarter(t: &[Point2; 3], interface: &Interface, depth: u32, out: &mut Vec<([Point2; 3], Side)>) {
    let (a, b, c) = (t[0], t[1], t[2]);
    let (ab, bc, ca) = (a.midpoint(b), b.midpoint(c), c.midpoint(a));
    let centre = (1.0 / 3.0) * (a + b + c);
    let s0 = interface.side(centre);
    let uniform = [a, b, c, ab, bc, ca].iter().all(|&p| interface.side(p) == s0);
    let area = 0.5 * (b - a).cross(c - a).abs();
    if uniform || depth >= MAX_DEPTH || area < MIN_LEAF_AREA {
        out.push((*t, s0));
        return;
    }
    for child in [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]] {
        quarter(&child, interface, depth + 1, out);
    }
}

/// Quadrature points `(p, w, side)` of `rule` applied on every piece.
pub fn quad_points(poly: &[Point2], interface: &Interface, rule: &QuadratureRule) -> Vec<(Point2, f64, Side)> {
    let mut out = Vec::new();
    for (piece, side) in decompose(poly, interface) {
        for t in polygon::vertex_fan(&piece) {
            out.extend(map_rule(&t, rule).map(|(p, w)| (p, w, side)));
        }
    }
    out
}

/// `∫_poly f · weight`.
pub fn integrate(poly: &[Point2], f: &PiecewiseFn, weight: impl Fn(Point2) -> f64, rule: &QuadratureRule) -> f64 {
    quad_points(poly, &f.interface, rule)
        .into_iter()
        .map(|(p, w, s)| w * f.eval_side(p, s) * weight(p))
        .sum()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn square() -> Vec<Point2> {
        vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)]
    }

    #[test]
    fn parabola_area_matches_closed_form() {
        // area of {x1 <= x2²/2} in the unit square is 1/6
        let h = HorizonCurve::parabola(1.0).unwrap();
        let f = PiecewiseFn::split(Interface::Horizon(h), Arc::new(|_| 1.0), Arc::new(|_| 0.0));
        let v = integrate(&square(), &f, |_| 1.0, &QuadratureRule::degree4());
        assert!((v - 1.0 / 6.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn slab_and_quartering_routes_agree() {
        let h = HorizonCurve::parabola(1.0).unwrap();
        let hs = h.clone();
        let left: crate::fem::ScalarFn = Arc::new(|p: Point2| 1.0 + p.x1 * p.x2);
        let right: crate::fem::ScalarFn = Arc::new(|p: Point2| 0.5 - p.x2);
        let a = PiecewiseFn::split(Interface::Horizon(h), left.clone(), right.clone());
        let b = PiecewiseFn::split(Interface::Sign(Arc::new(move |p| hs.is_left(p))), left, right);
        let tri = [Point2::new(0.0, 0.1), Point2::new(0.4, 0.3), Point2::new(0.05, 0.9)];
        let rule = QuadratureRule::degree4();
        let va = integrate(&tri, &a, |p| p.x1, &rule);
        let vb = integrate(&tri, &b, |p| p.x1, &rule);
        assert!((va - vb).abs() < 1e-6, "{va} vs {vb}");
    }

    #[test]
    fn pieces_cover_the_polygon() {
        let h = HorizonCurve::parabola(1.0).unwrap();
        let poly = vec![Point2::new(0.2, 0.5), Point2::new(0.3, 0.5), Point2::new(0.3, 0.8), Point2::new(0.2, 0.8)];
        let total: f64 = decompose(&poly, &Interface::Horizon(h)).iter().map(|(p, _)| polygon::area(p)).sum();
        assert!((total - polygon::area(&poly)).abs() < 1e-15);
    }
}
