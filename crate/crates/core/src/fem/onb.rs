//! L2-orthonormal affine bases on convex cells.
//!
//! The Gram–Schmidt step runs in the coordinates of the affine map spanned by the two
//! edges at vertex 0, where every cell of interest (triangles, parallelograms and their
//! trimmed relatives) has an O(1) aspect ratio. This keeps thin sheared cells well
//! conditioned.

use crate::geometry::{polygon, Point2};

#[derive(Clone, Debug, PartialEq)]
pub struct LocalOnb {
    origin: Point2,
    jinv: [[f64; 2]; 2],
    shift: Point2,
    coef: [[f64; 3]; 3],
    centroid: Point2,
    area: f64,
}

impl LocalOnb {
    pub fn new(vertices: &[Point2]) -> LocalOnb {
        let n = vertices.len();
        let o = vertices[0];
        let e1 = vertices[1] - o;
        let e2 = vertices[n - 1] - o;
        let det = e1.cross(e2);
        let jinv = [[e2.x2 / det, -e2.x1 / det], [-e1.x2 / det, e1.x1 / det]];
        let to_ref = |p: Point2| {
            let d = p - o;
            Point2::new(jinv[0][0] * d.x1 + jinv[0][1] * d.x2, jinv[1][0] * d.x1 + jinv[1][1] * d.x2)
        };
        let refpoly: Vec<Point2> = vertices.iter().map(|&p| to_ref(p)).collect();
        let shift = polygon::centroid(&refpoly);
        let rule = super::QuadratureRule::degree2();
        let (mut m0, mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0, 0.0);
        for t in polygon::vertex_fan(&refpoly) {
            for (p, w) in super::quadrature::map_rule(&t, &rule) {
                let (x, y) = (p.x1 - shift.x1, p.x2 - shift.x2);
                m0 += w;
                sxx += w * x * x;
                sxy += w * x * y;
                syy += w * y * y;
            }
        }
        let s = det.abs();
        let (m0, sxx, sxy, syy) = (s * m0, s * sxx, s * sxy, s * syy);
        // Cholesky of [[sxx, sxy], [sxy, syy]], inverted
        let l11 = sxx.sqrt();
        let l21 = sxy / l11;
        let l22 = (syy - l21 * l21).sqrt();
        let coef = [
            [1.0 / m0.sqrt(), 0.0, 0.0],
            [0.0, 1.0 / l11, 0.0],
            [0.0, -l21 / (l11 * l22), 1.0 / l22],
        ];
        LocalOnb { origin: o, jinv, shift, coef, centroid: polygon::centroid(vertices), area: polygon::area(vertices) }
    }

    fn monomials(&self, p: Point2) -> [f64; 3] {
        let d = p - self.origin;
        let x = self.jinv[0][0] * d.x1 + self.jinv[0][1] * d.x2 - self.shift.x1;
        let y = self.jinv[1][0] * d.x1 + self.jinv[1][1] * d.x2 - self.shift.x2;
        [1.0, x, y]
    }

    /// Values of the three basis functions at `p`.
    pub fn eval(&self, p: Point2) -> [f64; 3] {
        let m = self.monomials(p);
        let c = &self.coef;
        [c[0][0], c[1][1] * m[1], c[2][1] * m[1] + c[2][2] * m[2]]
    }

    /// Gradients of the basis functions (constant).
    pub fn grads(&self) -> [Point2; 3] {
        let g1 = Point2::new(self.jinv[0][0], self.jinv[0][1]);
        let g2 = Point2::new(self.jinv[1][0], self.jinv[1][1]);
        let c = &self.coef;
        [Point2::default(), c[1][1] * g1, c[2][1] * g1 + c[2][2] * g2]
    }

    /// Value of `Σ u_i φ_i` at `p`.
    pub fn combine(&self, u: &[f64], p: Point2) -> f64 {
        let v = self.eval(p);
        u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
    }

    pub fn centroid(&self) -> Point2 {
        self.centroid
    }

    pub fn area(&self) -> f64 {
        self.area
    }
}
