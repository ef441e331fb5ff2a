use super::polygon;
use super::{Cell, Point2, ShearIndex};
use crate::{Error, Result};

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub lo: Point2,
    pub hi: Point2,
}

impl Rect {
    pub const UNIT: Rect = Rect { lo: Point2::new(0.0, 0.0), hi: Point2::new(1.0, 1.0) };

    pub fn new(lo: Point2, hi: Point2) -> Rect {
        Rect { lo, hi }
    }

    pub fn area(&self) -> f64 {
        (self.hi.x1 - self.lo.x1) * (self.hi.x2 - self.lo.x2)
    }

    pub fn corners(&self) -> [Point2; 4] {
        [
            self.lo,
            Point2::new(self.hi.x1, self.lo.x2),
            self.hi,
            Point2::new(self.lo.x1, self.hi.x2),
        ]
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x1 >= self.lo.x1 && p.x1 <= self.hi.x1 && p.x2 >= self.lo.x2 && p.x2 <= self.hi.x2
    }
}

impl Default for Rect {
    fn default() -> Self {
        Rect::UNIT
    }
}

/// Cells with disjoint interiors covering `domain`.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub cells: Vec<Cell>,
    pub domain: Rect,
}

impl Partition {
    pub fn new(cells: Vec<Cell>, domain: Rect) -> Partition {
        Partition { cells, domain }
    }

    /// `2^{j0} × 2^{j0}` grid of lattice squares on the unit square.
    pub fn uniform(j0: u32) -> Partition {
        let n = 1i64 << j0;
        let mut cells = Vec::with_capacity((n * n) as usize);
        for b in 0..n {
            for a in 0..n {
                cells.push(Cell::from_index(ShearIndex::new(j0, 0, 0, a, b), 0));
            }
        }
        Partition::new(cells, Rect::UNIT)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `|Σ area(cell) − area(domain)|`.
    pub fn area_defect(&self) -> f64 {
        let s: f64 = self.cells.iter().map(Cell::area).sum();
        (s - self.domain.area()).abs()
    }

    /// Largest pairwise overlap relative to the smaller cell, using a bucket grid.
    pub fn max_relative_overlap(&self) -> f64 {
        if self.cells.len() < 2 {
            return 0.0;
        }
        let loc = CellLocator::new(self);
        let mut worst: f64 = 0.0;
        let mut seen = std::collections::HashSet::new();
        for bucket in &loc.buckets {
            for (p, &i) in bucket.iter().enumerate() {
                for &j in &bucket[p + 1..] {
                    if !seen.insert((i, j)) {
                        continue;
                    }
                    let (ci, cj) = (&self.cells[i], &self.cells[j]);
                    let ov = polygon::overlap_area(ci.vertices(), cj.vertices());
                    if ov > 0.0 {
                        worst = worst.max(ov / ci.area().min(cj.area()));
                    }
                }
            }
        }
        worst
    }

    /// Checks cover (area sum) and interior-disjointness.
    pub fn validate(&self) -> Result<()> {
        let d = self.area_defect();
        if d > 1e-12 {
            return Err(Error::NonCovering(d));
        }
        let ov = self.max_relative_overlap();
        if ov > 1e-12 {
            return Err(Error::NonCovering(ov));
        }
        Ok(())
    }

    /// Cell containing `p` (first match in storage order).
    pub fn locate(&self, p: Point2) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(p))
    }

    /// Whether every cell of `self` lies inside a cell of `coarse`.
    pub fn refines(&self, coarse: &Partition) -> bool {
        let loc = CellLocator::new(coarse);
        self.cells.iter().all(|c| {
            let tol = 1e-12 * c.diameter().max(1e-300);
            loc.candidates(c.centroid()).iter().any(|&i| {
                c.vertices().iter().all(|&v| polygon::contains(coarse.cells[i].vertices(), v, tol))
            })
        })
    }
}

/// Bucket grid over the bounding boxes of a partition's cells.
#[derive(Clone, Debug)]
pub struct CellLocator {
    lo: Point2,
    scale: (f64, f64),
    g: usize,
    buckets: Vec<Vec<usize>>,
}

impl CellLocator {
    pub fn new(p: &Partition) -> CellLocator {
        let g = ((p.cells.len() as f64).sqrt().ceil() as usize).clamp(1, 512);
        let (lo, hi) = (p.domain.lo, p.domain.hi);
        let scale = (g as f64 / (hi.x1 - lo.x1), g as f64 / (hi.x2 - lo.x2));
        let mut loc = CellLocator { lo, scale, g, buckets: vec![Vec::new(); g * g] };
        for (i, c) in p.cells.iter().enumerate() {
            let (a, b) = c.bbox();
            let (x0, y0) = loc.bucket(a);
            let (x1, y1) = loc.bucket(b);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    loc.buckets[y * g + x].push(i);
                }
            }
        }
        loc
    }

    fn bucket(&self, p: Point2) -> (usize, usize) {
        let cl = |v: f64| (v.max(0.0) as usize).min(self.g - 1);
        (cl((p.x1 - self.lo.x1) * self.scale.0), cl((p.x2 - self.lo.x2) * self.scale.1))
    }

    /// Indices of cells whose bounding box may contain `p`.
    pub fn candidates(&self, p: Point2) -> &[usize] {
        let (x, y) = self.bucket(p);
        &self.buckets[y * self.g + x]
    }

    /// Cell containing `p`, lowest index first.
    pub fn locate(&self, cells: &[Cell], p: Point2) -> Option<usize> {
        self.candidates(p).iter().copied().find(|&i| cells[i].contains(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_is_valid() {
        let p = Partition::uniform(3);
        assert_eq!(p.len(), 64);
        p.validate().unwrap();
    }

    #[test]
    fn refinement_relation() {
        let coarse = Partition::uniform(1);
        let fine = Partition::uniform(2);
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
        let loc = CellLocator::new(&fine);
        assert_eq!(loc.locate(&fine.cells, Point2::new(0.3, 0.6)), fine.locate(Point2::new(0.3, 0.6)));
    }

    #[test]
    fn overlap_detected() {
        let mut p = Partition::uniform(1);
        p.cells.push(p.cells[0].clone());
        assert!(p.validate().is_err());
    }
}
