//! Convex polygon predicates on CCW vertex lists.

use super::Point2;

/// Points closer than this are identified.
pub const POINT_TOL: f64 = 1e-12;

pub fn signed_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let o = poly[0];
    let mut s = 0.0;
    for i in 1..n - 1 {
        s += (poly[i] - o).cross(poly[i + 1] - o);
    }
    0.5 * s
}

pub fn area(poly: &[Point2]) -> f64 {
    signed_area(poly).abs()
}

pub fn centroid(poly: &[Point2]) -> Point2 {
    let o = poly[0];
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 1..poly.len() - 1 {
        let (p, q) = (poly[i] - o, poly[i + 1] - o);
        let t = 0.5 * p.cross(q);
        a += t;
        cx += t * (p.x1 + q.x1) / 3.0;
        cy += t * (p.x2 + q.x2) / 3.0;
    }
    if a.abs() < f64::MIN_POSITIVE {
        let n = poly.len() as f64;
        let s = poly.iter().fold(Point2::default(), |s, &p| s + p);
        return (1.0 / n) * s;
    }
    Point2::new(o.x1 + cx / a, o.x2 + cy / a)
}

pub fn diameter(poly: &[Point2]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in poly.iter().enumerate() {
        for q in &poly[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    d
}

/// Axis-aligned bounding box as (min, max).
pub fn bbox(poly: &[Point2]) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in poly {
        lo.x1 = lo.x1.min(p.x1);
        lo.x2 = lo.x2.min(p.x2);
        hi.x1 = hi.x1.max(p.x1);
        hi.x2 = hi.x2.max(p.x2);
    }
    (lo, hi)
}

/// Point-in-convex-polygon test, boundary included up to `tol` (absolute distance).
pub fn contains(poly: &[Point2], p: Point2, tol: f64) -> bool {
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let e = poly[(i + 1) % n] - a;
        let len = e.norm();
        if len == 0.0 {
            continue;
        }
        if e.cross(p - a) / len < -tol {
            return false;
        }
    }
    true
}

/// Keep the part of `poly` where `n·p <= c`.
pub fn clip_halfplane(poly: &[Point2], n: Point2, c: f64) -> Vec<Point2> {
    let len = poly.len();
    let mut out = Vec::with_capacity(len + 1);
    for i in 0..len {
        let p = poly[i];
        let q = poly[(i + 1) % len];
        let dp = n.dot(p) - c;
        let dq = n.dot(q) - c;
        if dp <= 0.0 {
            out.push(p);
        }
        if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
            let t = dp / (dp - dq);
            out.push(p.lerp(q, t));
        }
    }
    out
}

/// Intersection of two convex CCW polygons, cleaned; empty when the overlap has no area.
pub fn clip_convex(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let mut out = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if out.len() < 3 {
            return Vec::new();
        }
        let a = clip[i];
        let b = clip[(i + 1) % m];
        let e = b - a;
        // inside is left of edge: e × (p − a) >= 0  <=>  n·p <= n·a with n = (e.x2, −e.x1)
        let n = Point2::new(e.x2, -e.x1);
        out = clip_halfplane(&out, n, n.dot(a));
    }
    let out = cleanup(&out);
    if out.len() < 3 || area(&out) <= 1e-14 * area(subject).min(area(clip)) {
        return Vec::new();
    }
    out
}

/// Remove duplicate and collinear vertices from a convex polygon.
pub fn cleanup(poly: &[Point2]) -> Vec<Point2> {
    let scale = diameter(poly).max(f64::MIN_POSITIVE);
    let dup = POINT_TOL.min(1e-9 * scale);
    let mut v: Vec<Point2> = Vec::with_capacity(poly.len());
    for &p in poly {
        if v.last().map_or(true, |q: &Point2| q.dist(p) > dup) {
            v.push(p);
        }
    }
    while v.len() > 1 && v[0].dist(*v.last().unwrap()) <= dup {
        v.pop();
    }
    loop {
        let n = v.len();
        if n < 3 {
            return v;
        }
        let mut removed = false;
        for i in 0..n {
            let a = v[(i + n - 1) % n];
            let b = v[i];
            let c = v[(i + 1) % n];
            let (u, w) = (b - a, c - b);
            if u.cross(w).abs() <= 1e-12 * u.norm() * w.norm() && u.dot(w) >= 0.0 {
                v.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            return v;
        }
    }
}

/// Whether a CCW polygon is strictly convex.
pub fn is_strictly_convex(poly: &[Point2]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        let (u, w) = (b - a, c - b);
        u.cross(w) > 1e-12 * u.norm() * w.norm()
    })
}

/// Area of the overlap of two convex polygons.
pub fn overlap_area(a: &[Point2], b: &[Point2]) -> f64 {
    let (alo, ahi) = bbox(a);
    let (blo, bhi) = bbox(b);
    if alo.x1 >= bhi.x1 || blo.x1 >= ahi.x1 || alo.x2 >= bhi.x2 || blo.x2 >= ahi.x2 {
        return 0.0;
    }
    area(&clip_convex(a, b))
}

/// Fan triangulation from the centroid; works for any convex polygon.
pub fn centroid_fan(poly: &[Point2]) -> Vec<[Point2; 3]> {
    let c = centroid(poly);
    let n = poly.len();
    (0..n).map(|i| [c, poly[i], poly[(i + 1) % n]]).collect()
}

/// Fan triangulation from vertex 0.
pub fn vertex_fan(poly: &[Point2]) -> Vec<[Point2; 3]> {
    (1..poly.len() - 1).map(|i| [poly[0], poly[i], poly[i + 1]]).collect()
}
