//! Colour Refinement (1-WL) with full iteration traces.
//!
//! The naive engine recomputes every vertex colour from the pair
//! `(old colour, sorted neighbour colours)` and numbers the distinct keys by
//! their lexicographic rank. Ranked numbering makes colours comparable across
//! runs, across graphs and across the two halves of a disjoint union.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("colouring covers {colouring} vertices but the graph has {graph}")]
    SizeMismatch { colouring: usize, graph: usize },
}

/// A vertex colouring with dense colours `0..k`, every colour in use.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Colouring {
    colour: Vec<usize>,
    k: usize,
}

impl Colouring {
    pub fn monochromatic(n: usize) -> Colouring {
        Colouring { colour: vec![0; n], k: usize::from(n > 0) }
    }

    /// Densifies arbitrary labels, keeping their relative order.
    pub fn from_labels(labels: &[usize]) -> Colouring {
        let mut distinct: Vec<usize> = labels.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let colour = labels.iter().map(|l| distinct.binary_search(l).unwrap()).collect();
        Colouring { colour, k: distinct.len() }
    }

    /// One colour per class, classes listed in colour order.
    pub fn from_classes(n: usize, classes: &[Vec<usize>]) -> Colouring {
        let mut colour = vec![usize::MAX; n];
        for (c, class) in classes.iter().enumerate() {
            for &v in class {
                colour[v] = c;
            }
        }
        assert!(colour.iter().all(|&c| c != usize::MAX), "classes must cover every vertex");
        Colouring::from_labels(&colour)
    }

    pub fn colours(&self) -> &[usize] {
        &self.colour
    }

    pub fn colour(&self, v: usize) -> usize {
        self.colour[v]
    }

    pub fn len(&self) -> usize {
        self.colour.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colour.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.k
    }

    /// Class members per colour, each list ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &c) in self.colour.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub fn class_of(&self, v: usize) -> Vec<usize> {
        let c = self.colour[v];
        (0..self.len()).filter(|&u| self.colour[u] == c).collect()
    }

    pub fn is_discrete(&self) -> bool {
        self.k == self.len()
    }

    /// Renumbers colours by first occurrence, so two colourings inducing the
    /// same partition become equal.
    pub fn normalized(&self) -> Colouring {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let colour = self
            .colour
            .iter()
            .map(|&c| {
                if map[c] == usize::MAX {
                    map[c] = next;
                    next += 1;
                }
                map[c]
            })
            .collect();
        Colouring { colour, k: self.k }
    }

    pub fn same_partition(&self, other: &Colouring) -> bool {
        self.len() == other.len() && self.k == other.k && self.normalized().colour == other.normalized().colour
    }

    /// True if every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &Colouring) -> bool {
        if self.len() != coarser.len() {
            return false;
        }
        let mut parent = vec![usize::MAX; self.k];
        self.colour.iter().zip(&coarser.colour).all(|(&c, &p)| {
            if parent[c] == usize::MAX {
                parent[c] = p;
            }
            parent[c] == p
        })
    }
}

/// One class of the previous partition and the classes it split into.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSplit {
    pub parent: Vec<usize>,
    pub children: Vec<Vec<usize>>,
}

/// The partitions `π^0 .. π^j` of a run together with the splits per iteration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementTrace {
    pub partitions: Vec<Colouring>,
    /// `splits[i - 1]` lists the classes of `π^{i-1}` that split in iteration `i`,
    /// ordered by least vertex.
    pub splits: Vec<Vec<ClassSplit>>,
    pub iteration_number: usize,
}

impl RefinementTrace {
    /// Builds the split records from a strictly refining partition sequence.
    pub fn from_partitions(partitions: Vec<Colouring>) -> RefinementTrace {
        assert!(!partitions.is_empty(), "a trace holds at least pi^0");
        let splits = partitions.windows(2).map(|w| class_splits(&w[0], &w[1])).collect();
        let iteration_number = partitions.len() - 1;
        RefinementTrace { partitions, splits, iteration_number }
    }

    pub fn final_partition(&self) -> &Colouring {
        self.partitions.last().expect("trace is nonempty")
    }

    /// `(C_{i-1}, A_i, B_i)` when iteration `i` split exactly one class in two.
    pub fn binary_split(&self, i: usize) -> Option<(&[usize], &[usize], &[usize])> {
        let s = self.splits.get(i.checked_sub(1)?)?;
        match s.as_slice() {
            [one] if one.children.len() == 2 => Some((&one.parent, &one.children[0], &one.children[1])),
            _ => None,
        }
    }

    /// One JSON record per iteration: the classes of `π^i` and the splits
    /// that produced them.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.partitions.iter().enumerate() {
            let record = serde_json::json!({
                "iteration": i,
                "classes": p.classes(),
                "splits": if i == 0 { Vec::new() } else { self.splits[i - 1].clone() },
                "stable": i == self.iteration_number,
            });
            out.push_str(&record.to_string());
            out.push('\n');
        }
        out
    }
}

fn class_splits(before: &Colouring, after: &Colouring) -> Vec<ClassSplit> {
    let mut children_of: Vec<Vec<usize>> = vec![Vec::new(); before.num_classes()];
    let classes = after.classes();
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by_key(|&c| classes[c][0]);
    for c in order {
        children_of[before.colour(classes[c][0])].push(c);
    }
    let old = before.classes();
    let mut splits = children_of
        .into_iter()
        .enumerate()
        .filter(|(_, ch)| ch.len() > 1)
        .map(|(p, ch)| ClassSplit { parent: old[p].clone(), children: ch.into_iter().map(|c| classes[c].clone()).collect() })
        .collect::<Vec<_>>();
    splits.sort_by_key(|s| s.parent[0]);
    splits
}

/// One refinement round with ranked colour numbering.
pub fn refine_step(g: &Graph, c: &Colouring) -> Result<Colouring, RefineError> {
    if c.len() != g.n() {
        return Err(RefineError::SizeMismatch { colouring: c.len(), graph: g.n() });
    }
    Ok(step(g, c))
}

fn step(g: &Graph, c: &Colouring) -> Colouring {
    let keys: Vec<(usize, Vec<usize>)> = (0..g.n())
        .map(|v| {
            let mut nb: Vec<usize> = g.neighbours(v).iter().map(|&u| c.colour[u]).collect();
            nb.sort_unstable();
            (c.colour[v], nb)
        })
        .collect();
    let mut sorted: Vec<&(usize, Vec<usize>)> = keys.iter().collect();
    sorted.sort_unstable();
    sorted.dedup();
    let colour = keys.iter().map(|k| sorted.binary_search(&k).unwrap()).collect();
    Colouring { colour, k: sorted.len() }
}

/// Runs Colour Refinement from the monochromatic colouring.
pub fn run_colour_refinement(g: &Graph) -> RefinementTrace {
    run_from(g, Colouring::monochromatic(g.n()))
}

/// Runs Colour Refinement from a given initial colouring.
pub fn run_colour_refinement_from(g: &Graph, initial: &Colouring) -> Result<RefinementTrace, RefineError> {
    if initial.len() != g.n() {
        return Err(RefineError::SizeMismatch { colouring: initial.len(), graph: g.n() });
    }
    Ok(run_from(g, initial.clone()))
}

fn run_from(g: &Graph, initial: Colouring) -> RefinementTrace {
    let mut partitions = vec![initial];
    loop {
        let cur = partitions.last().unwrap();
        let next = step(g, cur);
        if next.k == cur.k {
            break;
        }
        partitions.push(next);
    }
    RefinementTrace::from_partitions(partitions)
}

/// `WL_1(g)`: the number of iterations until the partition is stable.
pub fn iteration_number(g: &Graph) -> usize {
    run_colour_refinement(g).iteration_number
}

/// True iff Colour Refinement takes `n - 1` iterations on `g` (`n >= 1`).
///
/// Stops as soon as some iteration adds anything other than one class.
pub fn is_long_refinement(g: &Graph) -> bool {
    let n = g.n();
    if n == 0 {
        return false;
    }
    let mut c = Colouring::monochromatic(n);
    while c.k < n {
        let next = step(g, &c);
        if next.k != c.k + 1 {
            return false;
        }
        c = next;
    }
    true
}

/// True if one more refinement round leaves the partition unchanged.
pub fn is_stable(g: &Graph, c: &Colouring) -> bool {
    c.len() == g.n() && step(g, c).k == c.k
}

/// Result of running Colour Refinement jointly on two graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distinguishing {
    /// The least iteration after which the colour multisets differ.
    Iteration(usize),
    Equivalent,
}

/// Refines the disjoint union of `g` and `h` and reports the first iteration
/// at which the two colour multisets differ. Graphs of different order
/// differ at iteration 0.
pub fn distinguishing_iteration(g: &Graph, h: &Graph) -> Distinguishing {
    if g.n() != h.n() {
        return Distinguishing::Iteration(0);
    }
    let n = g.n();
    let u = g.disjoint_union(h);
    let mut c = Colouring::monochromatic(2 * n);
    let mut i = 0;
    loop {
        let next = step(&u, &c);
        if next.k == c.k {
            return Distinguishing::Equivalent;
        }
        i += 1;
        let mut left = next.colour[..n].to_vec();
        let mut right = next.colour[n..].to_vec();
        left.sort_unstable();
        right.sort_unstable();
        if left != right {
            return Distinguishing::Iteration(i);
        }
        c = next;
    }
}
