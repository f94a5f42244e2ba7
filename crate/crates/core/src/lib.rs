//! Colour Refinement with full iteration traces, structural analysis of
//! long-refinement graphs, string constructions of infinite families, and
//! exhaustive search over small orders.

pub mod analyze;
pub mod canon;
pub mod dot;
pub mod families;
pub mod fast;
pub mod graph;
pub mod graph6;
pub mod refine;
pub mod search;
pub mod strings;

pub use graph::{DegreeSet, Graph, GraphError};
pub use graph6::{parse_graph6, write_graph6, Graph6Error};
pub use refine::{
    distinguishing_iteration, is_long_refinement, iteration_number, run_colour_refinement, Colouring, Distinguishing,
    RefinementTrace,
};
