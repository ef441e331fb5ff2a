//! Partitions built only from the bisection rules R1–R3.
//!
//! The build runs generations `J' = 2, 4, …, J`. Each generation refines the previous
//! partition, so `build(J + 2)` refines `build(J)` cell by cell.

use rayon::prelude::*;

use super::{Cartoon, GammaPolyline};
use crate::geometry::{polygon, refine_iso_any, split_r1, split_r2, split_r3, Cell, Partition, Point2, Rect};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct BisectionBuild {
    pub j: u32,
    pub partition: Partition,
    /// Number of far-vertex splits performed in the final generation.
    pub splits: usize,
    /// Largest number of far-vertex splits applied to one cell.
    pub max_splits_per_cell: usize,
}

fn point_on_segment(p: Point2, a: Point2, b: Point2, tol: f64) -> bool {
    let d = b - a;
    let l2 = d.dot(d);
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    p.dist(a + t * d) <= tol
}

fn edges_through(cell: &Cell, p: Point2, tol: f64) -> Vec<usize> {
    let v = cell.vertices();
    let n = v.len();
    (0..n).filter(|&i| point_on_segment(p, v[i], v[(i + 1) % n], tol)).collect()
}

/// One far-vertex split of `cell` for the chord `p q`; `None` when no rule applies.
pub(crate) fn far_vertex_split(cell: &Cell, p: Point2, q: Point2) -> Option<[Cell; 2]> {
    let v = cell.vertices();
    let n = v.len();
    let tol = 1e-9 * cell.diameter();
    let ep_all = edges_through(cell, p, tol);
    let eq_all = edges_through(cell, q, tol);
    let mut pair = None;
    'outer: for &a in &ep_all {
        for &b in &eq_all {
            if a == b {
                continue;
            }
            let opposite = n == 4 && (a + 2) % 4 == b;
            if opposite {
                pair = Some((a, b));
                break 'outer;
            }
            if pair.is_none() {
                pair = Some((a, b));
            }
        }
    }
    let (ep, eq) = pair?;
    let ends = |e: usize| (e, (e + 1) % n);
    let far = |e: usize, x: Point2| {
        let (i, j) = ends(e);
        if v[i].dist(x) >= v[j].dist(x) {
            i
        } else {
            j
        }
    };
    let near = |e: usize, x: Point2| {
        let (i, j) = ends(e);
        if far(e, x) == i {
            j
        } else {
            i
        }
    };
    let len = |e: usize| {
        let (i, j) = ends(e);
        v[i].dist(v[j])
    };
    let (fp, fq) = (far(ep, p), far(eq, q));
    let split = if n == 4 && (ep + 2) % 4 == eq {
        let adjacent = (fp + 1) % 4 == fq || (fq + 1) % 4 == fp;
        if adjacent {
            split_r3(cell, ep, eq)
        } else if len(ep) >= len(eq) {
            split_r1(cell, near(eq, q), ep)
        } else {
            split_r1(cell, near(ep, p), eq)
        }
    } else {
        let (pi, pj) = ends(ep);
        let (qi, qj) = ends(eq);
        let shared = if pi == qi || pi == qj { pi } else { pj };
        let u = if pi == shared { pj } else { pi };
        let w = if qi == shared { qj } else { qi };
        match n {
            4 => split_r2(cell, u.min(w), u.max(w)),
            3 => match (fp == shared, fq == shared) {
                (true, true) => split_r3(cell, ep, eq),
                (false, true) => split_r1(cell, w, ep),
                (true, false) => split_r1(cell, u, eq),
                (false, false) => split_r3(cell, ep, eq),
            },
            _ => return None,
        }
    };
    split.ok()
}

/// Far-vertex automaton on one cell until the piece holding the chord has area at most `target`.
fn bisect_cell(cell: &Cell, gamma: &GammaPolyline, target: f64, max_splits: usize) -> (Vec<Cell>, usize) {
    let Some((p, q)) = gamma.chord(cell.vertices()) else {
        return (vec![cell.clone()], 0);
    };
    let mut out = Vec::new();
    let mut cur = cell.clone();
    let mut count = 0;
    while count < max_splits && cur.area() > target {
        let Some([a, b]) = far_vertex_split(&cur, p, q) else { break };
        let tol = 1e-9 * cur.diameter();
        let holds = |c: &Cell| {
            polygon::contains(c.vertices(), p, tol) && polygon::contains(c.vertices(), q, tol)
        };
        let (keep, other) = if holds(&a) {
            (a, b)
        } else if holds(&b) {
            (b, a)
        } else {
            break;
        };
        out.push(other);
        cur = keep;
        count += 1;
    }
    out.push(cur);
    (out, count)
}

fn iso_until(cells: Vec<Cell>, select: impl Fn(&Cell) -> bool + Sync, diam: f64) -> Result<Vec<Cell>> {
    let mut cur = cells;
    loop {
        let flags: Vec<bool> = cur.par_iter().map(|c| c.diameter() > diam * (1.0 + 1e-9) && select(c)).collect();
        if !flags.iter().any(|&f| f) {
            return Ok(cur);
        }
        let mut next = Vec::with_capacity(cur.len() * 2);
        for (c, f) in cur.into_iter().zip(flags) {
            if f {
                next.extend(refine_iso_any(&c)?);
            } else {
                next.push(c);
            }
        }
        cur = next;
    }
}

/// Builds the bisection partition for even `J >= 2`.
pub fn build_bisection_partition(cartoon: &Cartoon, big_j: u32) -> Result<BisectionBuild> {
    if big_j < 2 || big_j % 2 != 0 {
        return Err(Error::Inadmissible(format!("bisection scale J={big_j} must be even and >= 2")));
    }
    let mut cells = Partition::uniform(0).cells;
    let (mut splits, mut max_splits) = (0, 0);
    for jp in (2..=big_j).step_by(2) {
        let gamma = cartoon.horizon().map(|h| GammaPolyline::new(h, 1usize << (jp + 4)));
        let hits = |c: &Cell| gamma.as_ref().is_some_and(|g| g.intersects(c.vertices()));
        let coarse = 2f64.sqrt() * 2f64.powi(-(jp as i32) / 2);
        cells = iso_until(cells, |c| !hits(c), coarse)?;
        let Some(g) = gamma.as_ref() else {
            continue;
        };
        let fine = 2f64.sqrt() * 2f64.powi(-(jp as i32));
        cells = iso_until(cells, hits, fine)?;
        let target = 2f64.powi(-3 * jp as i32);
        let cap = 2 * jp as usize + 1;
        let pieces: Vec<(Vec<Cell>, usize)> = cells
            .par_iter()
            .map(|c| {
                if c.area() > target && g.intersects(c.vertices()) {
                    bisect_cell(c, g, target, cap)
                } else {
                    (vec![c.clone()], 0)
                }
            })
            .collect();
        splits = 0;
        cells = Vec::with_capacity(cells.len());
        for (p, n) in pieces {
            splits += n;
            max_splits = max_splits.max(n);
            cells.extend(p);
        }
    }
    Ok(BisectionBuild { j: big_j, partition: Partition::new(cells, Rect::UNIT), splits, max_splits_per_cell: max_splits })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cartoon::{CartoonParams, HorizonCurve};
    use crate::geometry::ShearIndex;

    #[test]
    fn diagonal_chord_terminates_within_budget() {
        let sq = Cell::from_index(ShearIndex::new(3, 0, 0, 2, 2), 0);
        let (lo, hi) = sq.bbox();
        // straight 45° curve through the square: x1 = x2 + c
        let c = lo.x1 - lo.x2 + 0.3 * (hi.x1 - lo.x1);
        let h = HorizonCurve::line(1.0, c).unwrap();
        let g = GammaPolyline::new(&h, 1 << 12);
        let j = 3;
        let target = 2f64.powi(-3 * j);
        let (pieces, n) = bisect_cell(&sq, &g, target, 2 * j as usize + 1);
        assert!(n <= 2 * j as usize + 1);
        let holder = pieces.last().unwrap();
        assert!(holder.area() <= target * (1.0 + 1e-9), "{} > {target}", holder.area());
        let total: f64 = pieces.iter().map(Cell::area).sum();
        assert!((total - sq.area()).abs() < 1e-15);
        assert!(pieces.iter().all(|c| c.vertices().len() <= 4));
    }

    #[test]
    fn smooth_gives_uniform_grid() {
        let p = CartoonParams { kappa: 0.0, length: 0.0, m_bound: 1.0, omega: 1.0 };
        let c = Cartoon::smooth(Arc::new(|_| 1.0), p);
        let b = build_bisection_partition(&c, 6).unwrap();
        assert_eq!(b.partition.len(), 4usize.pow(3));
    }
}
