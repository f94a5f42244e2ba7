//! Graphviz output.

use crate::graph::Graph;
use crate::refine::{Colouring, RefineError};

/// Renders `g` as an undirected DOT graph. With a colouring, each class gets
/// its own fill colour spread evenly around the hue circle.
pub fn write_dot(g: &Graph, colouring: Option<&Colouring>) -> Result<String, RefineError> {
    if let Some(c) = colouring {
        if c.len() != g.n() {
            return Err(RefineError::SizeMismatch { colouring: c.len(), graph: g.n() });
        }
    }
    let mut out = String::from("graph G {\n  node [shape=circle];\n");
    for v in 0..g.n() {
        match colouring {
            Some(c) => {
                let k = c.num_classes().max(1);
                let hue = c.colour(v) as f64 / k as f64;
                out.push_str(&format!(
                    "  {v} [style=filled, fillcolor=\"{hue:.3} 0.450 0.950\", label=\"{v}\\n{}\"];\n",
                    c.colour(v)
                ));
            }
            None => out.push_str(&format!("  {v};\n")),
        }
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("  {u} -- {v};\n"));
    }
    out.push_str("}\n");
    Ok(out)
}
