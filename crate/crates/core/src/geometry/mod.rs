//! Cells, partitions and the refinement operators acting on them.

mod cell;
pub mod mesh_io;
mod partition;
mod point;
pub mod polygon;
mod refine;
mod shear;
mod split;

pub use cell::{Cell, CellKind};
pub use partition::{CellLocator, Partition, Rect};
pub use point::Point2;
pub use refine::{
    aniso_offsets, merge_pairs, merge_pairs_tracked, refine_aniso, refine_iso, refine_iso_any,
    refine_iso_pow,
};
pub use shear::{apply, dilation_matrix, shear_matrix, ShearIndex};
pub use split::{split_r1, split_r2, split_r3};
