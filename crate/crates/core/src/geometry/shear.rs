//! Parabolic scaling, shearing and the parallelogram lattice.

use super::Point2;

/// `diag(2^j, 2^⌊j/2⌋)`.
pub fn dilation_matrix(j: u32) -> [[f64; 2]; 2] {
    [[pow2(j as i32), 0.0], [0.0, pow2((j / 2) as i32)]]
}

/// `[[1, k], [0, 1]]`.
pub fn shear_matrix(k: i64) -> [[f64; 2]; 2] {
    [[1.0, k as f64], [0.0, 1.0]]
}

pub fn apply(m: [[f64; 2]; 2], p: Point2) -> Point2 {
    Point2::new(m[0][0] * p.x1 + m[0][1] * p.x2, m[1][0] * p.x1 + m[1][1] * p.x2)
}

pub(crate) fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

/// Index of the parallelogram `D_j^{-1} S_k (2^{-J0}[0,1]²) + m`.
///
/// The anchor is stored in lattice units, `m = (a·w, b·h)` with `w = 2^{-J0-j}` and
/// `h = 2^{-J0-⌊j/2⌋}`, so equality of indices is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShearIndex {
    pub j0: u32,
    pub j: u32,
    pub k: i64,
    pub a: i64,
    pub b: i64,
}

impl ShearIndex {
    pub fn new(j0: u32, j: u32, k: i64, a: i64, b: i64) -> Self {
        Self { j0, j, k, a, b }
    }

    /// Width of the cell along x1 (before shearing).
    pub fn width(&self) -> f64 {
        pow2(-((self.j0 + self.j) as i32))
    }

    pub fn height(&self) -> f64 {
        pow2(-((self.j0 + self.j / 2) as i32))
    }

    pub fn anchor(&self) -> Point2 {
        Point2::new(self.a as f64 * self.width(), self.b as f64 * self.height())
    }

    /// Slope dx1/dx2 of the sheared sides.
    pub fn slope(&self) -> f64 {
        self.k as f64 * self.width() / self.height()
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Corners in CCW order starting at the anchor.
    pub fn corners(&self) -> [Point2; 4] {
        let m = self.anchor();
        let (w, h) = (self.width(), self.height());
        let kw = self.k as f64 * w;
        [
            m,
            Point2::new(m.x1 + w, m.x2),
            Point2::new(m.x1 + w + kw, m.x2 + h),
            Point2::new(m.x1 + kw, m.x2 + h),
        ]
    }

    /// Child `P_{j+1, 2k+ι, m + w_{j+1}·t}` used by the anisotropic split (`j` even).
    pub fn aniso_child(&self, iota: i64, t: i64) -> ShearIndex {
        ShearIndex::new(self.j0, self.j + 1, 2 * self.k + iota, 2 * self.a + t, self.b)
    }

    /// Child `(s, t)` of the 2×2 midpoint split (`j` odd), which stays in the lattice.
    pub fn iso_child(&self, s: i64, t: i64) -> ShearIndex {
        ShearIndex::new(self.j0, self.j + 1, self.k, 2 * self.a + s + t * self.k, 2 * self.b + t)
    }
}
