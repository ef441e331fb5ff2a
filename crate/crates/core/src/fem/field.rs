//! Scalar fields that are smooth on either side of an interface.

use std::sync::Arc;

use crate::cartoon::HorizonCurve;
use crate::geometry::Point2;

pub type ScalarFn = Arc<dyn Fn(Point2) -> f64 + Send + Sync>;
pub type SignFn = Arc<dyn Fn(Point2) -> bool + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Where a piecewise field may jump.
#[derive(Clone)]
pub enum Interface {
    Smooth,
    Horizon(HorizonCurve),
    /// General splitting of the plane; `true` selects the left piece.
    Sign(SignFn),
}

impl Interface {
    pub fn side(&self, p: Point2) -> Side {
        let left = match self {
            Interface::Smooth => true,
            Interface::Horizon(h) => h.is_left(p),
            Interface::Sign(s) => s(p),
        };
        if left {
            Side::Left
        } else {
            Side::Right
        }
    }
}

/// `left` on `{side = Left}`, `right` elsewhere.
#[derive(Clone)]
pub struct PiecewiseFn {
    pub interface: Interface,
    pub left: ScalarFn,
    pub right: ScalarFn,
}

impl PiecewiseFn {
    pub fn smooth(f: ScalarFn) -> PiecewiseFn {
        PiecewiseFn { interface: Interface::Smooth, left: f.clone(), right: f }
    }

    pub fn constant(c: f64) -> PiecewiseFn {
        PiecewiseFn::smooth(Arc::new(move |_| c))
    }

    pub fn split(interface: Interface, left: ScalarFn, right: ScalarFn) -> PiecewiseFn {
        PiecewiseFn { interface, left, right }
    }

    pub fn eval(&self, p: Point2) -> f64 {
        self.eval_side(p, self.interface.side(p))
    }

    pub fn eval_side(&self, p: Point2, side: Side) -> f64 {
        match side {
            Side::Left => (self.left)(p),
            Side::Right => (self.right)(p),
        }
    }
}
