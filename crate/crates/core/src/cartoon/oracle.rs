//! Partitions adapted to a horizon by parabolic scaling and shearing.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{base_scale, iso_depth, orientation, Cartoon, GammaPolyline, HorizonCurve};
use crate::geometry::{aniso_offsets, merge_pairs, refine_aniso, refine_iso_any, refine_iso_pow, Cell, CellKind, Partition, Rect, ShearIndex};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct OracleBuild {
    pub j: u32,
    pub j0: u32,
    pub partition: Partition,
    /// Cells meeting the curve at each level `j` of the main region (index 0 = base squares).
    pub aniso: Vec<Vec<Cell>>,
    /// Cells meeting the curve at the finest level of every region, plus the residual zoom squares.
    pub final_gamma: Vec<Cell>,
    /// Base squares where the curve meets the vertical boundary.
    pub boundary_squares: Vec<ShearIndex>,
    /// Number of non-parallelogram cells meeting the curve, per level of the main region.
    pub gamma_non_parallelograms: Vec<usize>,
}

struct Region {
    out: Vec<Cell>,
    levels: Vec<Vec<Cell>>,
    non_par: Vec<usize>,
}

fn split_gamma(cells: Vec<Cell>, gamma: &GammaPolyline) -> (Vec<Cell>, Vec<Cell>) {
    let hit: Vec<bool> = cells.par_iter().map(|c| gamma.touches(c.vertices())).collect();
    let (mut g, mut rest) = (Vec::new(), Vec::new());
    for (c, h) in cells.into_iter().zip(hit) {
        if h {
            g.push(c);
        } else {
            rest.push(c);
        }
    }
    (g, rest)
}

/// Ordinate used by the orientation rule: the anchor, or the lowest point of the curve in
/// the cell when the curve is outside the domain at the anchor height.
fn orientation_ordinate(c: &Cell, idx: ShearIndex, h: &HorizonCurve, gamma: &GammaPolyline) -> f64 {
    let m2 = idx.anchor().x2;
    let e = h.e(m2);
    if (0.0..=1.0).contains(&e) {
        return m2;
    }
    gamma.chord(c.vertices()).map_or(m2, |(p, _)| p.x2)
}

fn refine_gamma_cell(c: &Cell, j: u32, h: &HorizonCurve, gamma: &GammaPolyline) -> Result<Vec<Cell>> {
    if j % 2 == 1 && c.is_full_parallelogram() {
        let idx = c.index().expect("full parallelogram is indexed");
        if idx.j % 2 == 0 {
            let m2 = orientation_ordinate(c, idx, h, gamma);
            let iota = orientation(h, idx.j + 1, idx.k, m2);
            return refine_aniso(c, iota);
        }
    }
    refine_iso_any(c)
}

/// Refines non-curve neighbours whose anisotropic split supplies the missing partner of
/// an unmerged triangle, so that the pair can be merged. Returns whether anything changed.
fn pull_partners(next: &mut Vec<Cell>, pending: &mut [Option<Cell>], pool: &HashMap<ShearIndex, usize>, j: u32, gamma: &GammaPolyline) -> Result<bool> {
    let mut added = Vec::new();
    for c in next.iter() {
        let Some(idx) = c.index() else { continue };
        if c.kind() != CellKind::Triangle || idx.j != j || idx.k % 2 == 0 || !gamma.touches(c.vertices()) {
            continue;
        }
        'search: for iota in [1i64, -1] {
            let k = (idx.k - iota) / 2;
            let offsets = aniso_offsets(iota);
            for ap in [idx.a.div_euclid(2) - 2, idx.a.div_euclid(2) - 1, idx.a.div_euclid(2), idx.a.div_euclid(2) + 1] {
                if !offsets.iter().any(|&t| 2 * ap + t == idx.a) {
                    continue;
                }
                let nidx = ShearIndex::new(idx.j0, j - 1, k, ap, idx.b);
                if let Some(&slot) = pool.get(&nidx) {
                    if let Some(n) = pending[slot].take() {
                        added.extend(refine_aniso(&n, iota)?);
                        break 'search;
                    }
                }
            }
        }
    }
    let changed = !added.is_empty();
    next.extend(added);
    Ok(changed)
}

/// Runs the alternating refinement on cells of base scale `s` up to level `2J − s`.
fn process_region(cells: Vec<Cell>, s: u32, big_j: u32, h: &HorizonCurve, gamma: &GammaPolyline) -> Result<Region> {
    let jmax = (2 * big_j).saturating_sub(s);
    let (mut g, rest) = split_gamma(cells, gamma);
    let mut out = Vec::new();
    let mut pending: Vec<Option<Cell>> = rest.into_iter().map(Some).collect();
    let mut levels = vec![g.clone()];
    let mut non_par = vec![count_non_par(&g)];
    for j in 1..=jmax {
        let kids: Vec<Vec<Cell>> = g
            .par_iter()
            .map(|c| refine_gamma_cell(c, j, h, gamma))
            .collect::<Result<_>>()?;
        let mut next: Vec<Cell> = kids.into_iter().flatten().collect();
        if j % 2 == 1 {
            let pool: HashMap<ShearIndex, usize> = pending
                .iter()
                .enumerate()
                .filter_map(|(i, c)| {
                    let c = c.as_ref()?;
                    c.is_full_parallelogram().then(|| (c.index().expect("indexed"), i))
                })
                .collect();
            loop {
                next = merge_pairs(next);
                if !pull_partners(&mut next, &mut pending, &pool, j, gamma)? {
                    break;
                }
            }
        }
        let depth = iso_depth(j - 1, big_j, s);
        for c in pending.into_iter().flatten() {
            out.extend(refine_iso_pow(&c, depth)?);
        }
        let (ng, rest) = split_gamma(next, gamma);
        pending = rest.into_iter().map(Some).collect();
        non_par.push(count_non_par(&ng));
        levels.push(ng.clone());
        g = ng;
    }
    let depth = iso_depth(jmax, big_j, s);
    for c in pending.into_iter().flatten() {
        out.extend(refine_iso_pow(&c, depth)?);
    }
    out.extend(g);
    Ok(Region { out, levels, non_par })
}

fn count_non_par(cells: &[Cell]) -> usize {
    cells.iter().filter(|c| c.kind() != CellKind::Parallelogram).count()
}

/// Builds the partition adapted to the cartoon's jump curve at target scale `J`.
pub fn build_oracle_partition(cartoon: &Cartoon, big_j: u32) -> Result<OracleBuild> {
    let j0 = base_scale(cartoon.params().kappa);
    if j0 >= 31 {
        return Err(Error::Inadmissible(format!("curvature bound {} is too large", cartoon.params().kappa)));
    }
    if big_j < j0 && cartoon.horizon().is_some() {
        return Err(Error::Inadmissible(format!("J={big_j} must be at least the base scale J0={j0}")));
    }
    let base = Partition::uniform(j0);
    let Some(h) = cartoon.horizon() else {
        let mut cells = Vec::new();
        for c in &base.cells {
            cells.extend(refine_iso_pow(c, iso_depth(0, big_j, j0))?);
        }
        return Ok(OracleBuild {
            j: big_j,
            j0,
            partition: Partition::new(cells, Rect::UNIT),
            aniso: vec![Vec::new()],
            final_gamma: Vec::new(),
            boundary_squares: Vec::new(),
            gamma_non_parallelograms: vec![0],
        });
    };
    let gamma = GammaPolyline::new(h, 1usize << (big_j + 4));
    let n = 1i64 << j0;
    let locate = |v: f64| ((v * n as f64).floor() as i64).clamp(0, n - 1);
    let hits = gamma.vertical_boundary_hits();
    let mut boundary: Vec<(ShearIndex, crate::geometry::Point2)> = Vec::new();
    for g in &hits {
        let idx = ShearIndex::new(j0, 0, 0, locate(g.x1), locate(g.x2));
        if !boundary.iter().any(|(b, _)| *b == idx) {
            boundary.push((idx, *g));
        }
    }
    let main: Vec<Cell> = base
        .cells
        .into_iter()
        .filter(|c| !boundary.iter().any(|(b, _)| Some(*b) == c.index()))
        .collect();
    let region = process_region(main, j0, big_j, h, &gamma)?;
    let mut cells = region.out;
    let mut final_gamma = region.levels.last().cloned().unwrap_or_default();
    for (idx, g) in &boundary {
        let mut p = *idx;
        for r in 0..(big_j - j0) {
            let scale = j0 + r + 1;
            let kids: Vec<ShearIndex> = [(0, 0), (1, 0), (0, 1), (1, 1)]
                .into_iter()
                .map(|(s, t)| ShearIndex::new(scale, 0, 0, 2 * p.a + s, 2 * p.b + t))
                .collect();
            let m = 1i64 << scale;
            let loc = |v: f64| ((v * m as f64).floor() as i64).clamp(0, m - 1);
            let next = ShearIndex::new(scale, 0, 0, loc(g.x1), loc(g.x2));
            let others: Vec<Cell> = kids.into_iter().filter(|k| *k != next).map(|k| Cell::from_index(k, 0)).collect();
            let sub = process_region(others, scale, big_j, h, &gamma)?;
            final_gamma.extend(sub.levels.last().cloned().unwrap_or_default());
            cells.extend(sub.out);
            p = next;
        }
        let residual = Cell::from_index(p, 0);
        final_gamma.push(residual.clone());
        cells.push(residual);
    }
    Ok(OracleBuild {
        j: big_j,
        j0,
        partition: Partition::new(cells, Rect::UNIT),
        aniso: region.levels,
        final_gamma,
        boundary_squares: boundary.into_iter().map(|(b, _)| b).collect(),
        gamma_non_parallelograms: region.non_par,
    })
}
