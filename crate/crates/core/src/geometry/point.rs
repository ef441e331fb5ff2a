use std::ops::{Add, Mul, Sub};

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x1 * o.x1 + self.x2 * o.x2
    }

    /// z-component of the cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x1 * o.x2 - self.x2 * o.x1
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        Point2::new(self.x1 + t * (o.x1 - self.x1), self.x2 + t * (o.x2 - self.x2))
    }

    pub fn midpoint(self, o: Point2) -> Point2 {
        Point2::new(0.5 * (self.x1 + o.x1), 0.5 * (self.x2 + o.x2))
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, p: Point2) -> Point2 {
        Point2::new(self * p.x1, self * p.x2)
    }
}
