//! Gauss rules on intervals and symmetric rules on the reference triangle
//! `(0,0), (1,0), (0,1)`.

use crate::geometry::Point2;

/// Points and weights on the reference triangle; weights sum to ½.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<(Point2, f64)>,
    pub degree: u32,
}

impl QuadratureRule {
    /// Three edge-midpoint-free interior points, exact for quadratics.
    pub fn degree2() -> Self {
        let (a, b) = (1.0 / 6.0, 2.0 / 3.0);
        let w = 1.0 / 6.0;
        QuadratureRule {
            points: vec![(Point2::new(a, a), w), (Point2::new(b, a), w), (Point2::new(a, b), w)],
            degree: 2,
        }
    }

    /// Six-point Dunavant rule, exact for quartics.
    pub fn degree4() -> Self {
        let a1 = 0.445_948_490_915_964_886_318_329_253_883_05;
        let w1 = 0.223_381_589_678_011_465_695_007_008_433_12;
        let a2 = 0.091_576_213_509_770_743_459_571_463_402_202;
        let w2 = 0.109_951_743_655_321_867_638_326_324_900_21;
        let mut pts = Vec::with_capacity(6);
        for (a, w) in [(a1, w1), (a2, w2)] {
            let b = 1.0 - 2.0 * a;
            for p in [Point2::new(a, a), Point2::new(b, a), Point2::new(a, b)] {
                pts.push((p, 0.5 * w));
            }
        }
        QuadratureRule { points: pts, degree: 4 }
    }

    /// Seven-point rule, exact for quintics.
    pub fn degree5() -> Self {
        let s15 = 15f64.sqrt();
        let a1 = (6.0 - s15) / 21.0;
        let a2 = (6.0 + s15) / 21.0;
        let w1 = (155.0 - s15) / 1200.0;
        let w2 = (155.0 + s15) / 1200.0;
        let mut pts = vec![(Point2::new(1.0 / 3.0, 1.0 / 3.0), 0.5 * 0.225)];
        for (a, w) in [(a1, w1), (a2, w2)] {
            let b = 1.0 - 2.0 * a;
            for p in [Point2::new(a, a), Point2::new(b, a), Point2::new(a, b)] {
                pts.push((p, 0.5 * w));
            }
        }
        QuadratureRule { points: pts, degree: 5 }
    }

    /// Collapsed (Duffy) tensor Gauss rule with `n²` points, exact to degree `2n−2`.
    pub fn collapsed(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let mut pts = Vec::with_capacity(n * n);
        for i in 0..n {
            let u = 0.5 * (x[i] + 1.0);
            for j in 0..n {
                let v = 0.5 * (x[j] + 1.0);
                // (u, v) in the unit square ↦ (u, (1−u)v), Jacobian (1−u)
                let wt = 0.25 * w[i] * w[j] * (1.0 - u);
                pts.push((Point2::new(u, (1.0 - u) * v), wt));
            }
        }
        QuadratureRule { points: pts, degree: (2 * n - 2) as u32 }
    }
}

/// `n`-point Gauss–Legendre nodes and weights on `[−1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_interval(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let (h, m) = (0.5 * (b - a), 0.5 * (a + b));
    x.iter().zip(&w).map(|(&xi, &wi)| (m + h * xi, h * wi)).collect()
}

/// Maps a reference rule onto a physical triangle.
pub fn map_rule<'a>(tri: &[Point2; 3], rule: &'a QuadratureRule) -> impl Iterator<Item = (Point2, f64)> + 'a {
    let (a, e1, e2) = (tri[0], tri[1] - tri[0], tri[2] - tri[0]);
    let jac = e1.cross(e2).abs();
    rule.points.iter().map(move |&(r, w)| (a + r.x1 * e1 + r.x2 * e2, w * jac))
}

pub fn integrate_triangle(tri: &[Point2; 3], rule: &QuadratureRule, f: impl Fn(Point2) -> f64) -> f64 {
    map_rule(tri, rule).map(|(p, w)| w * f(p)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    fn check(rule: &QuadratureRule) {
        let wsum: f64 = rule.points.iter().map(|p| p.1).sum();
        assert!((wsum - 0.5).abs() < 1e-15);
        for a in 0..=rule.degree {
            for b in 0..=rule.degree - a {
                let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                let q: f64 =
                    rule.points.iter().map(|(p, w)| w * p.x1.powi(a as i32) * p.x2.powi(b as i32)).sum();
                assert!((q - exact).abs() < 1e-14, "deg {} monomial ({a},{b}): {q} vs {exact}", rule.degree);
            }
        }
    }

    #[test]
    fn triangle_rules_are_exact_to_their_degree() {
        check(&QuadratureRule::degree2());
        check(&QuadratureRule::degree4());
        check(&QuadratureRule::degree5());
        check(&QuadratureRule::collapsed(6));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for d in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d as i32)).sum();
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} d={d}");
            }
        }
    }
}
