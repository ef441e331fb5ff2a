//! Dense polyline surrogate of the jump curve with exact segment/polygon tests.

use super::HorizonCurve;
use crate::geometry::{polygon, Point2};

#[derive(Clone, Debug)]
pub struct GammaPolyline {
    pts: Vec<Point2>,
}

/// Parameter interval of the segment `a + t(b − a)`, `t ∈ [0,1]`, inside a convex CCW polygon.
pub fn clip_segment(a: Point2, b: Point2, poly: &[Point2]) -> Option<(f64, f64)> {
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let n = poly.len();
    for i in 0..n {
        let v = poly[i];
        let e = poly[(i + 1) % n] - v;
        let f0 = e.cross(a - v);
        let fd = e.cross(d);
        if fd == 0.0 {
            if f0 < 0.0 {
                return None;
            }
            continue;
        }
        let t = -f0 / fd;
        if fd > 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

impl GammaPolyline {
    /// Samples `x1 = E(x2)` at `samples + 1` equispaced ordinates of `[0,1]`.
    pub fn new(h: &HorizonCurve, samples: usize) -> GammaPolyline {
        let pts = (0..=samples)
            .map(|i| {
                let y = i as f64 / samples as f64;
                Point2::new(h.e(y), y)
            })
            .collect();
        GammaPolyline { pts }
    }

    pub fn points(&self) -> &[Point2] {
        &self.pts
    }

    fn segments_between(&self, ylo: f64, yhi: f64) -> std::ops::Range<usize> {
        let n = self.pts.len() - 1;
        let lo = self.pts.partition_point(|p| p.x2 < ylo).saturating_sub(1);
        let hi = self.pts.partition_point(|p| p.x2 <= yhi).min(n);
        lo..hi.max(lo)
    }

    /// Portions of the polyline inside the polygon, as point pairs in curve order.
    pub fn pieces_in(&self, poly: &[Point2]) -> Vec<(Point2, Point2)> {
        let (lo, hi) = polygon::bbox(poly);
        let mut out: Vec<(Point2, Point2)> = Vec::new();
        for i in self.segments_between(lo.x2, hi.x2) {
            let (a, b) = (self.pts[i], self.pts[i + 1]);
            if a.x1.max(b.x1) < lo.x1 || a.x1.min(b.x1) > hi.x1 {
                continue;
            }
            if let Some((t0, t1)) = clip_segment(a, b, poly) {
                if t1 - t0 > 1e-9 {
                    out.push((a.lerp(b, t0), a.lerp(b, t1)));
                }
            }
        }
        out
    }

    /// Whether the curve meets the polygon in a set of positive length.
    pub fn intersects(&self, poly: &[Point2]) -> bool {
        let (lo, hi) = polygon::bbox(poly);
        for i in self.segments_between(lo.x2, hi.x2) {
            let (a, b) = (self.pts[i], self.pts[i + 1]);
            if a.x1.max(b.x1) < lo.x1 || a.x1.min(b.x1) > hi.x1 {
                continue;
            }
            if let Some((t0, t1)) = clip_segment(a, b, poly) {
                if t1 - t0 > 1e-9 {
                    return true;
                }
            }
        }
        false
    }

    /// Whether the curve meets the closed polygon, including contact at a single point.
    pub fn touches(&self, poly: &[Point2]) -> bool {
        let (lo, hi) = polygon::bbox(poly);
        let tol = 1e-12 * (hi.x1 - lo.x1 + hi.x2 - lo.x2);
        for i in self.segments_between(lo.x2 - tol, hi.x2 + tol) {
            let (a, b) = (self.pts[i], self.pts[i + 1]);
            if a.x1.max(b.x1) < lo.x1 - tol || a.x1.min(b.x1) > hi.x1 + tol {
                continue;
            }
            if polygon::contains(poly, a, tol) || polygon::contains(poly, b, tol) || clip_segment(a, b, poly).is_some() {
                return true;
            }
        }
        false
    }

    /// First entry and last exit point of the curve in the polygon.
    pub fn chord(&self, poly: &[Point2]) -> Option<(Point2, Point2)> {
        let pieces = self.pieces_in(poly);
        Some((pieces.first()?.0, pieces.last()?.1))
    }

    /// Points where the curve crosses the vertical sides `x1 = 0` or `x1 = 1` of the unit square.
    pub fn vertical_boundary_hits(&self) -> Vec<Point2> {
        let mut out: Vec<Point2> = Vec::new();
        for w in self.pts.windows(2) {
            for c in [0.0, 1.0] {
                let (da, db) = (w[0].x1 - c, w[1].x1 - c);
                if da * db > 0.0 || (da == 0.0 && db == 0.0) {
                    continue;
                }
                let t = if da == db { 0.0 } else { da / (da - db) };
                let p = Point2::new(c, w[0].x2 + t * (w[1].x2 - w[0].x2));
                if (0.0..=1.0).contains(&p.x2) && !out.iter().any(|q| q.dist(p) < 1e-9) {
                    out.push(p);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_clip() {
        let sq = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)];
        let (t0, t1) = clip_segment(Point2::new(-1.0, 0.5), Point2::new(3.0, 0.5), &sq).unwrap();
        assert!((t0 - 0.25).abs() < 1e-15 && (t1 - 0.5).abs() < 1e-15);
        assert!(clip_segment(Point2::new(-1.0, 2.0), Point2::new(3.0, 2.0), &sq).is_none());
    }

    #[test]
    fn parabola_hits_origin() {
        let g = GammaPolyline::new(&HorizonCurve::parabola(1.0).unwrap(), 1024);
        let hits = g.vertical_boundary_hits();
        assert_eq!(hits.len(), 1);
        assert!(hits[0].norm() < 1e-12);
        let cell = [Point2::new(0.1, 0.5), Point2::new(0.2, 0.5), Point2::new(0.2, 0.6), Point2::new(0.1, 0.6)];
        assert!(g.intersects(&cell));
        let (p, q) = g.chord(&cell).unwrap();
        assert!((p.x2 - 0.5).abs() < 1e-12 && (q.x1 - 0.18).abs() < 1e-3);
    }
}
