mod common;

use proptest::prelude::*;
use shearlet_transport::geometry::{merge_pairs, polygon, refine_aniso, refine_iso, Cell, CellKind, Partition, ShearIndex};

use common::{merge_is_idempotent, random_history, random_refinements};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn random_refinements_stay_valid(seed in any::<u64>(), steps in 1usize..6) {
        for p in random_refinements(seed, steps) {
            prop_assert!(p.area_defect() < 1e-12, "area defect {}", p.area_defect());
            prop_assert!(p.max_relative_overlap() < 1e-12);
            prop_assert!(merge_is_idempotent(&p));
        }
    }
}

proptest! {
    #[test]
    fn new_cells_lie_in_their_parents(seed in any::<u64>()) {
        // merged pairs may straddle two old cells, so check coverage by the recorded parents
        let (mut old, steps) = random_history(seed, 4);
        for r in steps {
            for (cell, ps) in r.partition.cells.iter().zip(&r.parents) {
                let covered: f64 = ps.iter().map(|&q| polygon::overlap_area(cell.vertices(), old.cells[q].vertices())).sum();
                prop_assert!((covered - cell.area()).abs() <= 1e-12 * cell.area().max(1e-300) + 1e-15);
            }
            prop_assert!(r.partition.len() >= old.len());
            old = r.partition;
        }
    }

    #[test]
    fn aniso_children_tile_parent(j0 in 0u32..3, jh in 0u32..3, k in -4i64..=4, iota in -1i64..=1, a in 0i64..8, b in 0i64..8) {
        let j = 2 * jh;
        let k = k.clamp(-(1 << jh), 1 << jh);
        let parent = Cell::from_index(ShearIndex::new(j0, j, k, a, b), 0);
        let kids = refine_aniso(&parent, iota).unwrap();
        let area: f64 = kids.iter().map(Cell::area).sum();
        prop_assert!((area - parent.area()).abs() <= 1e-12 * parent.area());
        let p = Partition::new(kids.clone(), Partition::uniform(0).domain);
        prop_assert!(p.max_relative_overlap() < 1e-12);
        if iota == 0 {
            prop_assert_eq!(kids.len(), 2);
        }
        prop_assert!(kids.len() <= 4);
    }
}

#[test]
fn iso_split_of_a_square_is_four_squares() {
    let kids = refine_iso(&Partition::uniform(0).cells[0]).unwrap();
    assert_eq!(kids.len(), 4);
    assert!(kids.iter().all(|c| c.kind() == CellKind::Parallelogram && (c.area() - 0.25).abs() < 1e-15));
}

#[test]
fn merging_restores_a_split_square() {
    let sq = Partition::uniform(1).cells[0].clone();
    let kids = refine_aniso(&sq, 1).unwrap();
    let merged = merge_pairs(kids.clone());
    assert!(merged.len() <= kids.len());
    let area: f64 = merged.iter().map(Cell::area).sum();
    assert!((area - sq.area()).abs() < 1e-15);
}
