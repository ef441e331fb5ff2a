//! Candidate refinements, their residual scores, marking and the refined partition.

use rayon::prelude::*;

use crate::fem::quadrature::map_rule;
use crate::fem::{LocalOnb, QuadratureRule};
use crate::geometry::{
    merge_pairs_tracked, polygon, refine_aniso, refine_iso_any, Cell, CellKind, Partition, Point2,
};
use crate::Result;

/// Refinement family offered to every cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[serde(rename = "aniso")]
    Anisotropic,
    #[serde(rename = "iso")]
    Isotropic,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Anisotropic => "aniso",
            Mode::Isotropic => "iso",
        }
    }
}

/// Orientations tried in this order; the first maximal score wins.
pub const ORIENTATION_ORDER: [i64; 3] = [0, 1, -1];

/// Companion triangles grouped by the trial cell that owns them.
pub fn triangles_by_owner(owner: &[usize], ncells: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); ncells];
    for (t, &o) in owner.iter().enumerate() {
        out[o].push(t);
    }
    out
}

/// Source of a piecewise smooth function: the triangles of its pieces and the integrand.
pub struct Pieces<'a, H: Fn(usize, Point2) -> f64 + Sync> {
    pub triangles: &'a [[Point2; 3]],
    pub by_owner: &'a [Vec<usize>],
    pub h: H,
}

/// `∫_K h φ_k^K` for `k = 0, 1, 2`, where `K` is covered by the triangles owned by `parents`.
pub fn moments<H: Fn(usize, Point2) -> f64 + Sync>(src: &Pieces<'_, H>, cell: &Cell, parents: &[usize]) -> [f64; 3] {
    let rule = QuadratureRule::degree4();
    let onb = LocalOnb::new(cell.vertices());
    let (lo, hi) = cell.bbox();
    let mut m = [0.0; 3];
    for &q in parents {
        for &t in &src.by_owner[q] {
            let tri = src.triangles[t];
            let (tlo, thi) = polygon::bbox(&tri);
            if tlo.x1 >= hi.x1 || tlo.x2 >= hi.x2 || thi.x1 <= lo.x1 || thi.x2 <= lo.x2 {
                continue;
            }
            let piece = polygon::clip_convex(&tri, cell.vertices());
            if piece.len() < 3 {
                continue;
            }
            for sub in polygon::vertex_fan(&piece) {
                for (p, w) in map_rule(&sub, &rule) {
                    let v = (src.h)(t, p);
                    let phi = onb.eval(p);
                    for k in 0..3 {
                        m[k] += w * v * phi[k];
                    }
                }
            }
        }
    }
    m
}

/// Children offered to a cell: the three sheared splits for untrimmed even-scale
/// parallelograms in anisotropic mode, otherwise the isotropic split.
pub fn candidates(cell: &Cell, mode: Mode) -> Result<Vec<Vec<Cell>>> {
    let shearable = mode == Mode::Anisotropic
        && cell.kind() == CellKind::Parallelogram
        && cell.is_full_parallelogram()
        && cell.index().is_some_and(|i| i.j % 2 == 0);
    if shearable {
        ORIENTATION_ORDER.iter().map(|&i| refine_aniso(cell, i)).collect()
    } else {
        Ok(vec![refine_iso_any(cell)?])
    }
}

/// Best candidate of one cell and its squared projection norm.
#[derive(Clone, Debug)]
pub struct Choice {
    pub children: Vec<Cell>,
    pub score2: f64,
}

/// Scores all candidates of every cell against the residual source.
pub fn best_choices<H: Fn(usize, Point2) -> f64 + Sync>(
    partition: &Partition,
    src: &Pieces<'_, H>,
    mode: Mode,
) -> Result<Vec<Choice>> {
    partition
        .cells
        .par_iter()
        .enumerate()
        .map(|(q, cell)| {
            let mut best: Option<Choice> = None;
            for children in candidates(cell, mode)? {
                let score2: f64 = children
                    .iter()
                    .map(|k| moments(src, k, &[q]).iter().map(|m| m * m).sum::<f64>())
                    .sum();
                // strict improvement keeps the earlier candidate on ties
                if best.as_ref().map_or(true, |b| score2 > b.score2) {
                    best = Some(Choice { children, score2 });
                }
            }
            Ok(best.expect("at least one candidate"))
        })
        .collect()
}

/// Cells with `score ≥ θ · max score`.
pub fn mark_max(scores2: &[f64], theta: f64) -> Vec<bool> {
    let max = scores2.iter().cloned().fold(0.0, f64::max).sqrt();
    scores2.iter().map(|s| s.sqrt() >= theta * max).collect()
}

/// Smallest prefix of the cells sorted by descending indicator whose sum reaches `θ` of the total.
pub fn mark_bulk(indicators: &[f64], theta: f64) -> Vec<bool> {
    let total: f64 = indicators.iter().sum();
    let mut order: Vec<usize> = (0..indicators.len()).collect();
    order.sort_by(|&a, &b| indicators[b].total_cmp(&indicators[a]).then(a.cmp(&b)));
    let mut marked = vec![false; indicators.len()];
    let mut acc = 0.0;
    for i in order {
        marked[i] = true;
        acc += indicators[i];
        if acc >= theta * total {
            break;
        }
    }
    marked
}

/// A refined partition and, for every new cell, the old cells it was cut from.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub partition: Partition,
    pub parents: Vec<Vec<usize>>,
    pub marked: usize,
}

/// Replaces marked cells by their chosen children; new children are merged pairwise.
pub fn apply_marking(partition: &Partition, choices: Vec<Choice>, marked: &[bool]) -> Refinement {
    let mut cells = Vec::with_capacity(partition.len());
    let mut parents = Vec::with_capacity(partition.len());
    let mut fresh = Vec::new();
    let mut fresh_parent = Vec::new();
    for (q, (cell, choice)) in partition.cells.iter().zip(choices).enumerate() {
        if marked[q] {
            for c in choice.children {
                fresh.push(c);
                fresh_parent.push(q);
            }
        } else {
            cells.push(cell.clone());
            parents.push(vec![q]);
        }
    }
    let (merged, src) = merge_pairs_tracked(fresh);
    for (c, s) in merged.into_iter().zip(src) {
        let mut ps: Vec<usize> = s.iter().map(|&i| fresh_parent[i]).collect();
        ps.dedup();
        cells.push(c);
        parents.push(ps);
    }
    let nmarked = marked.iter().filter(|&&m| m).count();
    Refinement { partition: Partition::new(cells, partition.domain), parents, marked: nmarked }
}

/// Greedy refinement: best candidate per cell, max marking, merging of fresh children.
pub fn approx_refine<H: Fn(usize, Point2) -> f64 + Sync>(
    partition: &Partition,
    src: &Pieces<'_, H>,
    theta: f64,
    mode: Mode,
) -> Result<Refinement> {
    let choices = best_choices(partition, src, mode)?;
    let scores: Vec<f64> = choices.iter().map(|c| c.score2).collect();
    let marked = match mode {
        Mode::Anisotropic => mark_max(&scores, theta),
        Mode::Isotropic => mark_bulk(&scores, theta),
    };
    Ok(apply_marking(partition, choices, &marked))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ShearIndex;

    fn square_tris(q: usize) -> [Point2; 3] {
        let p = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)];
        if q == 0 {
            [p[0], p[1], p[2]]
        } else {
            [p[0], p[2], p[3]]
        }
    }

    #[test]
    fn aligned_jump_selects_matching_orientation() {
        let parent = Cell::from_index(ShearIndex::new(0, 0, 0, 0, 0), 0);
        let kids = refine_aniso(&parent, 1).unwrap();
        // indicator of the sheared middle child of the ι=+1 split
        let mid = kids.iter().find(|c| c.kind() == CellKind::Parallelogram).unwrap().clone();
        let by_owner = vec![vec![0, 1]];
        let tri = [square_tris(0), square_tris(1)];
        let src = Pieces { triangles: &tri, by_owner: &by_owner, h: |_, p: Point2| if mid.contains(p) { 1.0 } else { 0.0 } };
        let p = Partition::new(vec![parent], Partition::uniform(0).domain);
        let mut norms = Vec::new();
        for children in candidates(&p.cells[0], Mode::Anisotropic).unwrap() {
            let s: f64 = children.iter().map(|k| moments(&src, k, &[0]).iter().map(|m| m * m).sum::<f64>()).sum();
            norms.push(s);
        }
        // order 0, +1, −1
        assert!(norms[1] > norms[0] + 1e-3 && norms[1] > norms[2] + 1e-3, "{norms:?}");
        let best = best_choices(&p, &src, Mode::Anisotropic).unwrap();
        assert_eq!(best[0].children.len(), 3);
    }

    #[test]
    fn max_marking() {
        // inputs are squared scores
        assert_eq!(mark_max(&[1.0, 0.0, 0.24, 0.26], 0.5), vec![true, false, false, true]);
        assert_eq!(mark_max(&[1.0, 0.5, 0.2], 1e-9), vec![true, true, true]);
        assert_eq!(mark_max(&[0.0, 4.0, 0.0], 0.999), vec![false, true, false]);
    }

    #[test]
    fn bulk_marking_is_minimal() {
        assert_eq!(mark_bulk(&[1.0, 5.0, 3.0, 1.0], 0.5), vec![false, true, false, false]);
        assert_eq!(mark_bulk(&[1.0, 5.0, 3.0, 1.0], 0.7), vec![false, true, true, false]);
        // ties broken by position
        assert_eq!(mark_bulk(&[2.0, 2.0], 0.5), vec![true, false]);
    }

    #[test]
    fn everything_marked_multiplies_cells() {
        let p = Partition::uniform(1);
        let tri = [square_tris(0), square_tris(1)];
        // equal indicators, so bulk marking with θ = 1 takes every cell
        let covered: Vec<Vec<usize>> = (0..4).map(|_| vec![0, 1]).collect();
        let src = Pieces { triangles: &tri, by_owner: &covered, h: |_, _| 1.0 };
        let r = approx_refine(&p, &src, 1.0, Mode::Isotropic).unwrap();
        assert_eq!(r.partition.len(), 16);
        let by_owner: Vec<Vec<usize>> = (0..4).map(|_| Vec::new()).collect();
        let src = Pieces { triangles: &tri, by_owner: &by_owner, h: |_, _| 0.0 };
        let r = approx_refine(&p, &src, 0.0, Mode::Anisotropic).unwrap();
        // all scores tie, so ι = 0 halves every cell
        assert_eq!(r.partition.len(), 8);
        assert!(r.partition.area_defect() < 1e-14);
    }

    #[test]
    fn merged_children_remember_both_parents() {
        let p = Partition::uniform(1);
        let marked = vec![true; 4];
        let choices: Vec<Choice> = p
            .cells
            .iter()
            .map(|c| Choice { children: refine_aniso(c, 1).unwrap(), score2: 1.0 })
            .collect();
        let r = apply_marking(&p, choices, &marked);
        r.partition.validate().unwrap();
        assert!(r.parents.iter().any(|ps| ps.len() == 2));
        assert!(r.partition.len() < 12);
    }
}
