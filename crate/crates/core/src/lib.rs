//! Reference graphs, their classical and three-valued semantics, and the
//! analyses built on top: contradictory cells, Yablo-style constructions and
//! embedding searches.

pub mod cells;
pub mod conjecture;
pub mod construction;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod graph;
pub mod logic;
pub mod semantics;

pub use error::{Error, Result};
pub use graph::{
    compose_value, contradiction_loop_check, enumerate_paths, find_contradictory_cells,
    path_value, Arrow, BareDag, Cell, LoopReport, NodeId, Path, RefGraph, Sign,
};
pub use format::{parse_graph, ParsedGraph};
pub use logic::{Dnf, Formula, TruthValue3};
pub use semantics::{ModelSet, StatusKind};
