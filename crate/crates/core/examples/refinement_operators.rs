//! The refinement operators on a single lattice square: isotropic split, the three
//! sheared splits and the merge of triangle pairs across neighbours.
//!
//! `cargo run --example refinement_operators -- [mesh.jsonl]` also writes the merged
//! partition as JSON lines.

use shearlet_transport::geometry::mesh_io::write_mesh;
use shearlet_transport::geometry::{merge_pairs, refine_aniso, refine_iso, Cell, Partition};

fn describe(label: &str, cells: &[Cell]) {
    let area: f64 = cells.iter().map(Cell::area).sum();
    let kinds: Vec<&str> = cells.iter().map(|c| c.kind().as_str()).collect();
    println!("{label:<22} {:>2} cells, area {area:.6}, {kinds:?}", cells.len());
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Partition::uniform(1);
    let square = &grid.cells[0];
    describe("parent", std::slice::from_ref(square));
    describe("isotropic", &refine_iso(square)?);
    for iota in [0, 1, -1] {
        describe(&format!("sheared, iota={iota:+}"), &refine_aniso(square, iota)?);
    }

    // split two horizontal neighbours with iota=+1; the triangles on their common
    // edge belong to one sheared lattice cell and merge back into it
    let mut kids = refine_aniso(&grid.cells[0], 1)?;
    kids.extend(refine_aniso(&grid.cells[1], 1)?);
    describe("two neighbours split", &kids);
    let merged = merge_pairs(kids);
    describe("after merging", &merged);

    let mut all = merged;
    all.extend(grid.cells[2..].iter().cloned());
    let p = Partition::new(all, grid.domain);
    p.validate()?;
    println!("partition of {} cells covers the square without overlap", p.len());

    if let Some(path) = std::env::args().nth(1) {
        write_mesh(&p.cells, std::io::BufWriter::new(std::fs::File::create(&path)?))?;
        println!("mesh written to {path}");
    }
    Ok(())
}
