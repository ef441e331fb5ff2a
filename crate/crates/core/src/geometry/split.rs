//! Bisection rules: vertex–midpoint (R1), vertex–vertex (R2), midpoint–midpoint (R3).

use super::Cell;
use crate::{Error, Result};

/// Splits along the chord between boundary positions `i < j` of `ring`.
fn split_ring(cell: &Cell, ring: &[super::Point2], i: usize, j: usize) -> Result<[Cell; 2]> {
    let a = ring[i..=j].to_vec();
    let mut b = ring[j..].to_vec();
    b.extend_from_slice(&ring[..=i]);
    let lvl = cell.level() + 1;
    let ca = Cell::new(a, None, lvl)?;
    let cb = Cell::new(b, None, lvl)?;
    if ca.vertices().len() > 4 || cb.vertices().len() > 4 {
        return Err(Error::InvalidSplit("split produced a polygon with more than 4 vertices".into()));
    }
    Ok([ca, cb])
}

fn check_index(cell: &Cell, i: usize, what: &str) -> Result<()> {
    if i >= cell.vertices().len() {
        return Err(Error::InvalidSplit(format!("{what} {i} out of range")));
    }
    Ok(())
}

/// Inserts midpoints after the given edge indices; returns the ring and the ring
/// positions of each vertex and each inserted midpoint.
fn ring_with_midpoints(cell: &Cell, edges: &[usize]) -> (Vec<super::Point2>, Vec<usize>, Vec<usize>) {
    let v = cell.vertices();
    let n = v.len();
    let mut ring = Vec::with_capacity(n + edges.len());
    let mut vpos = Vec::with_capacity(n);
    let mut mpos = vec![0; edges.len()];
    for i in 0..n {
        vpos.push(ring.len());
        ring.push(v[i]);
        for (k, &e) in edges.iter().enumerate() {
            if e == i {
                mpos[k] = ring.len();
                ring.push(v[i].midpoint(v[(i + 1) % n]));
            }
        }
    }
    (ring, vpos, mpos)
}

/// (R1) connect vertex `vertex_id` with the midpoint of edge `edge_id`
/// (edge `e` runs from vertex `e` to vertex `e+1`).
pub fn split_r1(cell: &Cell, vertex_id: usize, edge_id: usize) -> Result<[Cell; 2]> {
    check_index(cell, vertex_id, "vertex")?;
    check_index(cell, edge_id, "edge")?;
    let n = cell.vertices().len();
    if vertex_id == edge_id || vertex_id == (edge_id + 1) % n {
        return Err(Error::InvalidSplit("R1: the edge contains the vertex".into()));
    }
    let (ring, vpos, mpos) = ring_with_midpoints(cell, &[edge_id]);
    let (i, j) = (vpos[vertex_id].min(mpos[0]), vpos[vertex_id].max(mpos[0]));
    split_ring(cell, &ring, i, j)
}

/// (R2) connect two non-adjacent vertices of a quadrilateral.
pub fn split_r2(cell: &Cell, v1: usize, v2: usize) -> Result<[Cell; 2]> {
    if cell.vertices().len() != 4 {
        return Err(Error::InvalidSplit("R2 needs a quadrilateral".into()));
    }
    check_index(cell, v1, "vertex")?;
    check_index(cell, v2, "vertex")?;
    if (v1 + 2) % 4 != v2 {
        return Err(Error::InvalidSplit("R2: vertices are adjacent or equal".into()));
    }
    let v = cell.vertices().to_vec();
    split_ring(cell, &v, v1.min(v2), v1.max(v2))
}

/// (R3) connect the midpoints of two edges; for quadrilaterals they must share no vertex.
pub fn split_r3(cell: &Cell, e1: usize, e2: usize) -> Result<[Cell; 2]> {
    check_index(cell, e1, "edge")?;
    check_index(cell, e2, "edge")?;
    let n = cell.vertices().len();
    if e1 == e2 {
        return Err(Error::InvalidSplit("R3: identical edges".into()));
    }
    if n == 4 && (e1 + 2) % 4 != e2 {
        return Err(Error::InvalidSplit("R3: quadrilateral edges share a vertex".into()));
    }
    if n > 4 {
        return Err(Error::InvalidSplit("R3 needs a triangle or quadrilateral".into()));
    }
    let (ring, _, mpos) = ring_with_midpoints(cell, &[e1, e2]);
    split_ring(cell, &ring, mpos[0].min(mpos[1]), mpos[0].max(mpos[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CellKind, Point2, ShearIndex};

    fn square() -> Cell {
        Cell::from_index(ShearIndex::new(0, 0, 0, 0, 0), 0)
    }

    #[test]
    fn r2_diagonal() {
        let [a, b] = split_r2(&square(), 0, 2).unwrap();
        assert!((a.area() - 0.5).abs() < 1e-15 && (b.area() - 0.5).abs() < 1e-15);
        assert!(split_r2(&square(), 0, 1).is_err());
    }

    #[test]
    fn r3_left_right_midpoints() {
        // edges 1 (right) and 3 (left)
        let [a, b] = split_r3(&square(), 1, 3).unwrap();
        for c in [a, b] {
            assert_eq!(c.kind(), CellKind::Parallelogram);
            assert!((c.area() - 0.5).abs() < 1e-15);
        }
        assert!(split_r3(&square(), 0, 1).is_err());
    }

    #[test]
    fn r1_triangle_apex_to_base_midpoint() {
        let t = Cell::new(
            vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)],
            None,
            0,
        )
        .unwrap();
        let [a, b] = split_r1(&t, 2, 0).unwrap();
        assert!((a.area() - 0.25).abs() < 1e-15 && (b.area() - 0.25).abs() < 1e-15);
        assert!(split_r1(&t, 0, 0).is_err());
    }

    #[test]
    fn r3_on_triangle_cuts_corner() {
        let t = Cell::new(
            vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)],
            None,
            0,
        )
        .unwrap();
        let [a, b] = split_r3(&t, 0, 2).unwrap();
        let mut n = [a.vertices().len(), b.vertices().len()];
        n.sort();
        assert_eq!(n, [3, 4]);
    }
}
