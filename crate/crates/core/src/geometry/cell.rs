use serde::{Deserialize, Serialize};

use super::polygon;
use super::{Point2, ShearIndex};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellKind {
    Parallelogram,
    Triangle,
    Polygon,
}

impl CellKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CellKind::Parallelogram => "parallelogram",
            CellKind::Triangle => "triangle",
            CellKind::Polygon => "polygon",
        }
    }
}

/// A strictly convex CCW polygon with optional lattice metadata.
///
/// `level` is the refinement counter whose parity selects between anisotropic
/// and isotropic refinement.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    vertices: Vec<Point2>,
    kind: CellKind,
    index: Option<ShearIndex>,
    level: u32,
}

fn classify(v: &[Point2]) -> CellKind {
    match v.len() {
        3 => CellKind::Triangle,
        4 => {
            let par = |a: Point2, b: Point2| a.cross(b).abs() <= 1e-9 * a.norm() * b.norm();
            let e: Vec<Point2> = (0..4).map(|i| v[(i + 1) % 4] - v[i]).collect();
            if par(e[0], e[2]) && par(e[1], e[3]) {
                CellKind::Parallelogram
            } else {
                CellKind::Polygon
            }
        }
        _ => CellKind::Polygon,
    }
}

impl Cell {
    /// Builds a cell from a convex vertex list (either orientation); duplicates and
    /// collinear vertices are removed.
    pub fn new(vertices: Vec<Point2>, index: Option<ShearIndex>, level: u32) -> Result<Cell> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegenerateCell("non-finite vertex".into()));
        }
        let mut v = polygon::cleanup(&vertices);
        if polygon::signed_area(&v) < 0.0 {
            v.reverse();
        }
        if v.len() < 3 || polygon::area(&v) <= 0.0 || !polygon::is_strictly_convex(&v) {
            return Err(Error::DegenerateCell(format!("{} vertices after cleanup", v.len())));
        }
        let kind = classify(&v);
        Ok(Cell { vertices: v, kind, index, level })
    }

    /// The full parallelogram of a lattice index, vertices starting at the anchor.
    pub fn from_index(idx: ShearIndex, level: u32) -> Cell {
        Cell {
            vertices: idx.corners().to_vec(),
            kind: CellKind::Parallelogram,
            index: Some(idx),
            level,
        }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn kind(&self) -> CellKind {
        self.kind
    }

    pub fn index(&self) -> Option<ShearIndex> {
        self.index
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn with_level(mut self, level: u32) -> Cell {
        self.level = level;
        self
    }

    pub fn without_index(mut self) -> Cell {
        self.index = None;
        self
    }

    pub fn area(&self) -> f64 {
        polygon::area(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        polygon::diameter(&self.vertices)
    }

    pub fn centroid(&self) -> Point2 {
        polygon::centroid(&self.vertices)
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        polygon::bbox(&self.vertices)
    }

    pub fn contains(&self, p: Point2) -> bool {
        polygon::contains(&self.vertices, p, polygon::POINT_TOL)
    }

    /// Intersection with a convex polygon, `None` if it has no area.
    pub fn clip(&self, other: &[Point2]) -> Option<Cell> {
        let v = polygon::clip_convex(&self.vertices, other);
        if v.len() < 3 {
            return None;
        }
        Cell::new(v, self.index, self.level).ok()
    }

    /// Edges as `(start, end)` in CCW order.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// True when the cell is the untrimmed parallelogram of its index.
    pub fn is_full_parallelogram(&self) -> bool {
        match (self.kind, self.index) {
            (CellKind::Parallelogram, Some(idx)) => {
                (self.area() - idx.area()).abs() <= 1e-9 * idx.area()
            }
            _ => false,
        }
    }
}
