//! JSON-lines mesh dump: one `{id, kind, level, vertices}` object per line.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::Cell;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshRecord {
    pub id: usize,
    pub kind: String,
    pub level: u32,
    pub vertices: Vec<[f64; 2]>,
}

impl MeshRecord {
    pub fn from_cell(id: usize, c: &Cell) -> MeshRecord {
        MeshRecord {
            id,
            kind: c.kind().as_str().to_string(),
            level: c.level(),
            vertices: c.vertices().iter().map(|p| [p.x1, p.x2]).collect(),
        }
    }
}

pub fn write_mesh<W: Write>(cells: &[Cell], mut w: W) -> std::io::Result<()> {
    for (id, c) in cells.iter().enumerate() {
        let line = serde_json::to_string(&MeshRecord::from_cell(id, c))?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_mesh<R: BufRead>(r: R) -> Result<Vec<MeshRecord>> {
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: MeshRecord =
            serde_json::from_str(&line).map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{refine_aniso, Partition};

    #[test]
    fn round_trip_is_exact() {
        let p = Partition::uniform(1);
        let mut cells = refine_aniso(&p.cells[0], 1).unwrap();
        cells.extend(p.cells[1..].iter().cloned());
        let mut buf = Vec::new();
        write_mesh(&cells, &mut buf).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(back.len(), cells.len());
        for (r, c) in back.iter().zip(&cells) {
            for (v, p) in r.vertices.iter().zip(c.vertices()) {
                assert!((v[0] - p.x1).abs() <= 1e-15 && (v[1] - p.x2).abs() <= 1e-15);
            }
        }
    }
}
