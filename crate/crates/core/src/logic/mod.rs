//! First-order formulas, evaluation, interpretations and the reductions built on them.
mod eval;
mod formula;
mod grid;
mod interp;
mod universal;

pub use eval::{eval, Evaluator, Query, DEFAULT_DEPTH_BUDGET};
pub use formula::{Formula, Fresh};
pub use grid::{verify_defined_grid, GridDefinition};
pub use interp::{compose, Interpretation, X, Y};
pub use universal::{
    bipartite_cells, bipartite_graph, bipartite_signature, mc_reduce, universal_interpretation,
    COL, ROW,
};
