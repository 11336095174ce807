//! Deterministic symmetry-breaking building blocks.

pub mod colored_mm;
pub mod coloring;
pub mod orient;

pub use colored_mm::colored_maximal_matching;
pub use coloring::{linial_coloring, reduction_plan, Coloring, PaletteStep};
pub use orient::{orient_min_length, OrientError, Orientation};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SubroutineError {
    #[error("coloring is missing node {0}")]
    MissingColor(crate::graph::NodeId),
    #[error("coloring is not proper on this graph: {0}")]
    ImproperColoring(crate::graph::GraphError),
    #[error(transparent)]
    Sim(#[from] crate::sim::SimError),
}
