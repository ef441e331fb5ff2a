//! Anisotropic and isotropic refinement operators and MERGE.

use std::collections::HashMap;

use super::polygon;
use super::{Cell, CellKind, Point2, ShearIndex};
use crate::{Error, Result};

/// Offsets `t` of the children of the anisotropic split with orientation `iota`.
///
/// For `ι = −1` the offsets are the mirror image of the `ι = +1` set, which is the
/// choice that tiles the parent.
pub fn aniso_offsets(iota: i64) -> &'static [i64] {
    match iota {
        0 => &[0, 1],
        1 => &[-1, 0, 1],
        -1 => &[0, 1, 2],
        _ => &[],
    }
}

/// Splits a lattice parallelogram at even scale into its sheared children at the next
/// (odd) scale, clipped against the parent.
pub fn refine_aniso(parent: &Cell, iota: i64) -> Result<Vec<Cell>> {
    if !(-1..=1).contains(&iota) {
        return Err(Error::InvalidRefinement(format!("orientation {iota} not in {{-1,0,1}}")));
    }
    let idx = match (parent.kind(), parent.index()) {
        (CellKind::Parallelogram, Some(idx)) => idx,
        _ => {
            return Err(Error::InvalidRefinement(
                "anisotropic refinement needs an indexed parallelogram".into(),
            ))
        }
    };
    if idx.j % 2 != 0 {
        return Err(Error::InvalidRefinement(format!(
            "anisotropic refinement needs an even scale, got j={}",
            idx.j
        )));
    }
    let tol = 1e-12 * idx.width();
    let mut out = Vec::with_capacity(3);
    for &t in aniso_offsets(iota) {
        let whole = Cell::from_index(idx.aniso_child(iota, t), parent.level() + 1);
        // untrimmed children keep their exact lattice corners
        let inside = whole.vertices().iter().all(|&p| polygon::contains(parent.vertices(), p, tol));
        if inside {
            out.push(whole);
        } else if let Some(c) = whole.clip(parent.vertices()) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Midpoint split into four children.
pub fn refine_iso(cell: &Cell) -> Result<Vec<Cell>> {
    let lvl = cell.level() + 1;
    let v = cell.vertices();
    match v.len() {
        3 => {
            let (a, b, c) = (v[0], v[1], v[2]);
            let (ab, bc, ca) = (a.midpoint(b), b.midpoint(c), c.midpoint(a));
            [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
                .into_iter()
                .map(|t| Cell::new(t.to_vec(), None, lvl))
                .collect()
        }
        4 => {
            if let Some(idx) = cell.index() {
                if idx.j % 2 == 1 && cell.is_full_parallelogram() {
                    return Ok([(0, 0), (1, 0), (1, 1), (0, 1)]
                        .into_iter()
                        .map(|(s, t)| Cell::from_index(idx.iso_child(s, t), lvl))
                        .collect());
                }
            }
            let m: Vec<Point2> = (0..4).map(|i| v[i].midpoint(v[(i + 1) % 4])).collect();
            let c = 0.25 * (v[0] + v[1] + v[2] + v[3]);
            [
                [v[0], m[0], c, m[3]],
                [m[0], v[1], m[1], c],
                [c, m[1], v[2], m[2]],
                [m[3], c, m[2], v[3]],
            ]
            .into_iter()
            .map(|q| Cell::new(q.to_vec(), None, lvl))
            .collect()
        }
        n => Err(Error::InvalidRefinement(format!(
            "isotropic refinement of a {n}-gon is undefined"
        ))),
    }
}

/// `ℓ`-fold isotropic refinement, `4^ℓ` cells.
pub fn refine_iso_pow(cell: &Cell, l: u32) -> Result<Vec<Cell>> {
    let mut cur = vec![cell.clone()];
    for _ in 0..l {
        let mut next = Vec::with_capacity(4 * cur.len());
        for c in &cur {
            next.extend(refine_iso(c)?);
        }
        cur = next;
    }
    Ok(cur)
}

/// Isotropic refinement that also accepts pentagons and larger, which are first
/// fanned into triangles around the centroid.
pub fn refine_iso_any(cell: &Cell) -> Result<Vec<Cell>> {
    if cell.vertices().len() <= 4 {
        return refine_iso(cell);
    }
    polygon::centroid_fan(cell.vertices())
        .into_iter()
        .map(|t| Cell::new(t.to_vec(), None, cell.level() + 1))
        .collect()
}

fn share_edge(a: &Cell, b: &Cell, tol: f64) -> bool {
    let common = a
        .vertices()
        .iter()
        .filter(|p| b.vertices().iter().any(|q| q.dist(**p) <= tol))
        .count();
    common >= 2
}

/// Replaces contiguous triangle pairs carrying the same lattice index, whose union is
/// that index's parallelogram, by the parallelogram.
pub fn merge_pairs(cells: Vec<Cell>) -> Vec<Cell> {
    merge_pairs_tracked(cells).0
}

/// As [`merge_pairs`], additionally returning for every output cell the input
/// positions it was formed from.
pub fn merge_pairs_tracked(cells: Vec<Cell>) -> (Vec<Cell>, Vec<Vec<usize>>) {
    let mut groups: HashMap<ShearIndex, Vec<usize>> = HashMap::new();
    for (i, c) in cells.iter().enumerate() {
        if c.kind() == CellKind::Triangle {
            if let Some(idx) = c.index() {
                groups.entry(idx).or_default().push(i);
            }
        }
    }
    // partner[i] = Some(j): i absorbs j; consumed[j] = true
    let mut partner: Vec<Option<usize>> = vec![None; cells.len()];
    let mut consumed = vec![false; cells.len()];
    for (i, c) in cells.iter().enumerate() {
        if consumed[i] || partner[i].is_some() || c.kind() != CellKind::Triangle {
            continue;
        }
        let Some(idx) = c.index() else { continue };
        let target = idx.area();
        let tol = 1e-9 * idx.width().min(idx.height());
        for &j in &groups[&idx] {
            if j <= i || consumed[j] || partner[j].is_some() {
                continue;
            }
            let d = &cells[j];
            if (c.area() + d.area() - target).abs() <= 1e-9 * target && share_edge(c, d, tol) {
                partner[i] = Some(j);
                consumed[j] = true;
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(cells.len());
    let mut src = Vec::with_capacity(cells.len());
    for (i, c) in cells.into_iter().enumerate() {
        if consumed[i] {
            continue;
        }
        match partner[i] {
            Some(j) => {
                let idx = c.index().expect("indexed");
                out.push(Cell::from_index(idx, c.level()));
                src.push(vec![i, j]);
            }
            None => {
                out.push(c);
                src.push(vec![i]);
            }
        }
    }
    (out, src)
}
