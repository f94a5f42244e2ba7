//! Canonical labelling by individualization-refinement.
//!
//! Search tree nodes are equitable ordered partitions. The target cell is the
//! first non-singleton cell; each leaf gives a relabelling whose adjacency
//! bits, read in graph6 order, form its certificate. The smallest certificate
//! wins. Leaves with equal certificates yield automorphisms, used for orbit
//! pruning and for jumping back to the common ancestor.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::graph6::write_graph6;
use crate::refine::{Colouring, RefineError};

/// graph6 of the canonically relabelled graph, followed for coloured inputs
/// by `;` and the class sizes in colour order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm(pub String);

impl CanonicalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The graph6 part.
    pub fn graph6(&self) -> &str {
        self.0.split(';').next().unwrap_or("")
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

struct Bits {
    w: usize,
    rows: Vec<u64>,
}

impl Bits {
    fn new(g: &Graph) -> Bits {
        let n = g.n();
        let w = n.div_ceil(64).max(1);
        let mut rows = vec![0u64; n * w];
        for (u, v) in g.edges() {
            rows[u * w + v / 64] |= 1 << (v % 64);
            rows[v * w + u / 64] |= 1 << (u % 64);
        }
        Bits { w, rows }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.w..(v + 1) * self.w]
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.w + v / 64] >> (v % 64) & 1 == 1
    }
}

type Cells = Vec<Vec<usize>>;

/// Splits cells by neighbour counts into every cell until equitable.
/// Subcells are ordered by their count vectors, so the result depends only
/// on the input up to relabelling.
fn refine(bits: &Bits, cells: &mut Cells) {
    let w = bits.w;
    loop {
        let k = cells.len();
        let mut masks = vec![0u64; k * w];
        for (i, c) in cells.iter().enumerate() {
            for &v in c {
                masks[i * w + v / 64] |= 1 << (v % 64);
            }
        }
        let mut next: Cells = Vec::with_capacity(k);
        let mut changed = false;
        for c in cells.iter() {
            if c.len() == 1 {
                next.push(c.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<u32>, usize)> = c
                .iter()
                .map(|&v| {
                    let row = bits.row(v);
                    let sig = (0..k)
                        .map(|j| row.iter().zip(&masks[j * w..(j + 1) * w]).map(|(a, b)| (a & b).count_ones()).sum())
                        .collect();
                    (sig, v)
                })
                .collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|x| x.1).collect());
                    start = i;
                }
            }
            changed |= next.last().map(Vec::len) != Some(c.len());
        }
        *cells = next;
        if !changed {
            return;
        }
    }
}

struct Search<'a> {
    bits: &'a Bits,
    n: usize,
    first: Option<(Vec<u64>, Vec<usize>, Vec<usize>)>,
    best: Option<(Vec<u64>, Vec<usize>, Vec<usize>)>,
    generators: Vec<Vec<usize>>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl Search<'_> {
    /// Certificate of a discrete partition: adjacency bits of the relabelled
    /// graph in graph6 order, packed most significant bit first.
    fn certificate(&self, order: &[usize]) -> Vec<u64> {
        let n = self.n;
        let mut out = vec![0u64; (n * n.saturating_sub(1) / 2).div_ceil(64)];
        let mut k = 0;
        for j in 1..n {
            for i in 0..j {
                if self.bits.adjacent(order[i], order[j]) {
                    out[k / 64] |= 1 << (63 - k % 64);
                }
                k += 1;
            }
        }
        out
    }

    fn orbit_roots(&self, path: &[usize]) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        for g in &self.generators {
            if path.iter().all(|&v| g[v] == v) {
                for (v, &w) in g.iter().enumerate() {
                    let (a, b) = (find(&mut parent, v), find(&mut parent, w));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        (0..self.n).map(|v| find(&mut parent, v)).collect()
    }

    /// Returns `Some(level)` to unwind to the node at depth `level`.
    fn visit(&mut self, cells: Cells, path: &mut Vec<usize>) -> Option<usize> {
        let Some(t) = cells.iter().position(|c| c.len() > 1) else {
            return self.leaf(&cells, path);
        };
        let depth = path.len();
        let mut done: Vec<usize> = Vec::new();
        for &v in &cells[t] {
            let roots = self.orbit_roots(path);
            if done.iter().any(|&u| roots[u] == roots[v]) {
                continue;
            }
            done.push(v);
            let mut child = Vec::with_capacity(cells.len() + 1);
            child.extend_from_slice(&cells[..t]);
            child.push(vec![v]);
            child.push(cells[t].iter().copied().filter(|&u| u != v).collect());
            child.extend_from_slice(&cells[t + 1..]);
            refine(self.bits, &mut child);
            path.push(v);
            let jump = self.visit(child, path);
            path.pop();
            if let Some(level) = jump {
                if level < depth {
                    return Some(level);
                }
            }
        }
        None
    }

    fn leaf(&mut self, cells: &Cells, path: &[usize]) -> Option<usize> {
        let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
        let cert = self.certificate(&order);
        let common = |other: &[usize]| path.iter().zip(other).take_while(|(a, b)| a == b).count();
        for (c, o, p) in [&self.first, &self.best].into_iter().flatten() {
            if *c == cert {
                // order[i] and o[i] play the same role
                let mut gamma = vec![0; self.n];
                for i in 0..self.n {
                    gamma[order[i]] = o[i];
                }
                let level = common(p);
                self.generators.push(gamma);
                return Some(level);
            }
        }
        if self.first.is_none() {
            self.first = Some((cert.clone(), order.clone(), path.to_vec()));
        }
        if self.best.as_ref().is_none_or(|(c, _, _)| cert < *c) {
            self.best = Some((cert, order, path.to_vec()));
        }
        None
    }
}

/// Canonical order of the vertices: `order[i]` gets label `i`.
fn canonical_order(g: &Graph, initial: Cells) -> Vec<usize> {
    let bits = Bits::new(g);
    let mut cells: Cells = initial.into_iter().filter(|c| !c.is_empty()).collect();
    if g.n() == 0 {
        return Vec::new();
    }
    refine(&bits, &mut cells);
    let mut s = Search { bits: &bits, n: g.n(), first: None, best: None, generators: Vec::new() };
    s.visit(cells, &mut Vec::new());
    s.best.expect("search reaches at least one leaf").1
}

fn relabel(g: &Graph, order: &[usize]) -> Graph {
    let mut perm = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        perm[v] = i;
    }
    g.permute(&perm)
}

/// `perm[v]` is the canonical label of `v`.
pub fn canonical_labelling(g: &Graph) -> Vec<usize> {
    canonical(g).0
}

/// Canonical labelling and canonical form from a single search.
pub fn canonical(g: &Graph) -> (Vec<usize>, CanonicalForm) {
    let order = canonical_order(g, vec![(0..g.n()).collect()]);
    let mut perm = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        perm[v] = i;
    }
    let form = CanonicalForm(write_graph6(&g.permute(&perm)));
    (perm, form)
}

pub fn canonical_graph(g: &Graph) -> Graph {
    relabel(g, &canonical_order(g, vec![(0..g.n()).collect()]))
}

pub fn canonical_form(g: &Graph) -> CanonicalForm {
    CanonicalForm(write_graph6(&canonical_graph(g)))
}

/// Canonical form of a vertex-coloured graph; isomorphisms must preserve
/// each colour.
pub fn canonical_form_coloured(g: &Graph, c: &Colouring) -> Result<CanonicalForm, RefineError> {
    if c.len() != g.n() {
        return Err(RefineError::SizeMismatch { colouring: c.len(), graph: g.n() });
    }
    let classes = c.classes();
    let sizes: Vec<String> = classes.iter().map(|x| x.len().to_string()).collect();
    let order = canonical_order(g, classes);
    Ok(CanonicalForm(format!("{};{}", write_graph6(&relabel(g, &order)), sizes.join(","))))
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> bool {
    g.n() == h.n() && g.m() == h.m() && g.degree_set() == h.degree_set() && canonical_form(g) == canonical_form(h)
}
