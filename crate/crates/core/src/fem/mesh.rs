//! Conforming triangulations resolving the edges of a non-conforming polygonal partition.

use std::collections::HashMap;

use crate::geometry::{polygon, refine_iso_any, Cell, CellLocator, Partition, Point2};
use crate::{Error, Result};

/// Points closer than this are identified.
pub const VERTEX_TOL: f64 = 1e-12;

/// Triangle mesh of the domain with ownership maps into the trial and refined partitions.
#[derive(Clone, Debug)]
pub struct CompanionMesh {
    pub vertices: Vec<Point2>,
    /// Counter-clockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Trial cell containing each triangle.
    pub owner: Vec<usize>,
    /// Refined cell containing each triangle.
    pub sub_owner: Vec<usize>,
}

/// Vertex pool with tolerance-based deduplication on a hash grid.
struct VertexPool {
    pts: Vec<Point2>,
    grid: HashMap<(i64, i64), Vec<usize>>,
    h: f64,
}

impl VertexPool {
    fn new() -> VertexPool {
        VertexPool { pts: Vec::new(), grid: HashMap::new(), h: 1e-9 }
    }

    fn key(&self, p: Point2) -> (i64, i64) {
        ((p.x1 / self.h).floor() as i64, (p.x2 / self.h).floor() as i64)
    }

    fn find(&self, p: Point2) -> Option<usize> {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.grid.get(&(kx + dx, ky + dy)) {
                    if let Some(&i) = ids.iter().find(|&&i| self.pts[i].dist(p) <= VERTEX_TOL) {
                        return Some(i);
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, p: Point2) -> usize {
        if let Some(i) = self.find(p) {
            return i;
        }
        let i = self.pts.len();
        self.pts.push(p);
        let k = self.key(p);
        self.grid.entry(k).or_default().push(i);
        i
    }
}

/// Uniform bucket grid over points, for segment queries.
struct PointGrid {
    lo: Point2,
    g: usize,
    sx: f64,
    sy: f64,
    buckets: Vec<Vec<usize>>,
}

impl PointGrid {
    fn new(pts: &[Point2]) -> PointGrid {
        let (lo, hi) = polygon::bbox(pts);
        let g = ((pts.len() as f64).sqrt().ceil() as usize).clamp(1, 1024);
        let sx = g as f64 / (hi.x1 - lo.x1).max(1e-300);
        let sy = g as f64 / (hi.x2 - lo.x2).max(1e-300);
        let mut grid = PointGrid { lo, g, sx, sy, buckets: vec![Vec::new(); g * g] };
        for (i, &p) in pts.iter().enumerate() {
            let (x, y) = grid.cell(p);
            grid.buckets[y * g + x].push(i);
        }
        grid
    }

    fn cell(&self, p: Point2) -> (usize, usize) {
        let cl = |v: f64| (v.max(0.0) as usize).min(self.g - 1);
        (cl((p.x1 - self.lo.x1) * self.sx), cl((p.x2 - self.lo.x2) * self.sy))
    }

    /// Points strictly inside segment `a b` (within tolerance), sorted along it.
    fn on_segment(&self, pts: &[Point2], a: Point2, b: Point2) -> Vec<usize> {
        let d = b - a;
        let l2 = d.dot(d);
        let pad = Point2::new(VERTEX_TOL, VERTEX_TOL);
        let (x0, y0) = self.cell(Point2::new(a.x1.min(b.x1), a.x2.min(b.x2)) - pad);
        let (x1, y1) = self.cell(Point2::new(a.x1.max(b.x1), a.x2.max(b.x2)) + pad);
        let mut hits: Vec<(f64, usize)> = Vec::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                for &i in &self.buckets[y * self.g + x] {
                    let p = pts[i];
                    let t = (p - a).dot(d) / l2;
                    if t <= 0.0 || t >= 1.0 || p.dist(a) <= VERTEX_TOL || p.dist(b) <= VERTEX_TOL {
                        continue;
                    }
                    if p.dist(a + t * d) <= VERTEX_TOL {
                        hits.push((t, i));
                    }
                }
            }
        }
        hits.sort_by(|p, q| p.0.total_cmp(&q.0));
        hits.into_iter().map(|(_, i)| i).collect()
    }
}

/// Once-isotropically refined partition and the parent of every child.
pub fn refine_once(partition: &Partition) -> Result<(Partition, Vec<usize>)> {
    let mut cells = Vec::with_capacity(4 * partition.len());
    let mut parent = Vec::with_capacity(4 * partition.len());
    for (i, c) in partition.cells.iter().enumerate() {
        for k in refine_iso_any(c)? {
            cells.push(k);
            parent.push(i);
        }
    }
    Ok((Partition::new(cells, partition.domain), parent))
}

fn owner_of(loc: &CellLocator, cells: &[Cell], sub: &Cell) -> Result<usize> {
    let c = sub.centroid();
    let tol = 1e-10 * sub.diameter();
    loc.candidates(c)
        .iter()
        .copied()
        .find(|&i| cells[i].contains(c) && sub.vertices().iter().all(|&v| polygon::contains(cells[i].vertices(), v, tol)))
        .ok_or_else(|| Error::InvalidRefinement("refined cell is not contained in a trial cell".into()))
}

/// Triangulation of `refined`, conforming across hanging vertices, with ownership in `partition`.
///
/// Quadrilaterals without hanging vertices are split along their shorter diagonal.
pub fn companion_triangulation(partition: &Partition, refined: &Partition) -> Result<CompanionMesh> {
    let d = refined.area_defect();
    if d > 1e-10 {
        return Err(Error::NonCovering(d));
    }
    let loc = CellLocator::new(partition);
    let owners: Vec<usize> = refined.cells.iter().map(|c| owner_of(&loc, &partition.cells, c)).collect::<Result<_>>()?;
    let mut pool = VertexPool::new();
    let corner_ids: Vec<Vec<usize>> =
        refined.cells.iter().map(|c| c.vertices().iter().map(|&p| pool.insert(p)).collect()).collect();
    let grid = PointGrid::new(&pool.pts);
    let corner_pts = pool.pts.clone();
    let mut triangles = Vec::new();
    let (mut owner, mut sub_owner) = (Vec::new(), Vec::new());
    for (ci, ids) in corner_ids.iter().enumerate() {
        let n = ids.len();
        let mut ring = Vec::with_capacity(n + 4);
        for k in 0..n {
            let (a, b) = (ids[k], ids[(k + 1) % n]);
            ring.push(a);
            ring.extend(grid.on_segment(&corner_pts, corner_pts[a], corner_pts[b]));
        }
        let tris: Vec<[usize; 3]> = if ring.len() == n && n <= 4 {
            if n == 3 {
                vec![[ring[0], ring[1], ring[2]]]
            } else {
                let p = |i: usize| pool.pts[ring[i]];
                // shorter diagonal
                if p(0).dist(p(2)) <= p(1).dist(p(3)) {
                    vec![[ring[0], ring[1], ring[2]], [ring[0], ring[2], ring[3]]]
                } else {
                    vec![[ring[1], ring[2], ring[3]], [ring[1], ring[3], ring[0]]]
                }
            }
        } else {
            let c = pool.insert(refined.cells[ci].centroid());
            (0..ring.len()).map(|k| [c, ring[k], ring[(k + 1) % ring.len()]]).collect()
        };
        for t in tris {
            triangles.push(t);
            owner.push(owners[ci]);
            sub_owner.push(ci);
        }
    }
    let mesh = CompanionMesh { vertices: pool.pts, triangles, owner, sub_owner };
    mesh.check_conforming(partition)?;
    Ok(mesh)
}

impl CompanionMesh {
    pub fn triangle(&self, t: usize) -> [Point2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle(t);
        0.5 * (b - a).cross(c - a)
    }

    /// Map from sorted vertex pairs to the triangles using that edge.
    pub fn edge_map(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut m: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                m.entry((a.min(b), a.max(b))).or_default().push(t);
            }
        }
        m
    }

    /// Interior edges have two triangles, boundary edges one lying on the domain boundary.
    pub fn check_conforming(&self, partition: &Partition) -> Result<()> {
        for t in 0..self.triangles.len() {
            if self.triangle_area(t) <= 0.0 {
                return Err(Error::DegenerateCell(format!("companion triangle {t} has non-positive area")));
            }
        }
        let dom = partition.domain;
        let on_boundary = |p: Point2| {
            let tol = VERTEX_TOL;
            (p.x1 - dom.lo.x1).abs() <= tol
                || (p.x1 - dom.hi.x1).abs() <= tol
                || (p.x2 - dom.lo.x2).abs() <= tol
                || (p.x2 - dom.hi.x2).abs() <= tol
        };
        for ((a, b), ts) in self.edge_map() {
            let ok = match ts.len() {
                2 => true,
                1 => {
                    let (p, q) = (self.vertices[a], self.vertices[b]);
                    let m = p.midpoint(q);
                    on_boundary(p) && on_boundary(q) && on_boundary(m)
                }
                _ => false,
            };
            if !ok {
                return Err(Error::InvalidRefinement(format!("non-conforming companion edge ({a}, {b}) used by {} triangles", ts.len())));
            }
        }
        Ok(())
    }

    /// Total area of the triangles owned by each trial cell.
    pub fn owned_areas(&self, ncells: usize) -> Vec<f64> {
        let mut a = vec![0.0; ncells];
        for t in 0..self.triangles.len() {
            a[self.owner[t]] += self.triangle_area(t);
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{refine_aniso, ShearIndex};

    #[test]
    fn unit_square_gives_eight_triangles() {
        let p = Partition::uniform(0);
        let (r, _) = refine_once(&p).unwrap();
        let m = companion_triangulation(&p, &r).unwrap();
        assert_eq!(m.triangles.len(), 8);
        assert_eq!(m.vertices.len(), 9);
        assert!((m.owned_areas(1)[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hanging_vertices_are_resolved() {
        // one coarse square next to refined squares
        let mut cells = Vec::new();
        let base = Partition::uniform(1);
        for (i, c) in base.cells.iter().enumerate() {
            if i == 0 {
                cells.extend(crate::geometry::refine_iso(c).unwrap());
            } else if i == 1 {
                cells.extend(refine_aniso(c, 1).unwrap());
            } else {
                cells.push(c.clone());
            }
        }
        let p = Partition::new(cells, base.domain);
        p.validate().unwrap();
        let (r, _) = refine_once(&p).unwrap();
        let m = companion_triangulation(&p, &r).unwrap();
        let areas = m.owned_areas(p.len());
        for (c, a) in p.cells.iter().zip(areas) {
            assert!((c.area() - a).abs() < 1e-14);
        }
    }

    #[test]
    fn non_covering_rejected() {
        let cell = Cell::from_index(ShearIndex::new(1, 0, 0, 0, 0), 0);
        let p = Partition::new(vec![cell], Partition::uniform(0).domain);
        assert!(companion_triangulation(&p, &p).is_err());
    }
}
