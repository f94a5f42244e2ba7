//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use lrgraph::canon::canonical_form;
use lrgraph::Graph;
use rand::Rng;

/// G(n, p) with edges drawn in lexicographic order.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, &edges).unwrap()
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Adjacency bits of `g` relabelled by `perm`, in graph6 order.
fn bits_under(g: &Graph, perm: &[usize]) -> Vec<bool> {
    let n = g.n();
    let mut inv = vec![0; n];
    for (v, &p) in perm.iter().enumerate() {
        inv[p] = v;
    }
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 1..n {
        for i in 0..j {
            out.push(g.has_edge(inv[i], inv[j]));
        }
    }
    out
}

/// Lexicographically least adjacency string over all n! relabellings.
pub fn brute_canonical(g: &Graph) -> Vec<bool> {
    (0..g.n()).permutations(g.n()).map(|p| bits_under(g, &p)).min().unwrap_or_default()
}

/// Number of automorphisms by trying every permutation.
pub fn brute_automorphisms(g: &Graph) -> usize {
    let base = bits_under(g, &(0..g.n()).collect::<Vec<_>>());
    (0..g.n()).permutations(g.n()).filter(|p| bits_under(g, p) == base).count()
}

/// Every labelled graph on `n` vertices, in order of its edge mask.
pub fn labelled_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        let edges: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        Graph::new(n, &edges).unwrap()
    })
}

pub struct Labelled {
    pub classes: BTreeSet<String>,
    pub labelled: u64,
}

/// Labelled enumeration with rejection: keeps graphs with max degree at
/// most `max_degree` (and connected if asked), merged by canonical form.
pub fn brute_force(n: usize, max_degree: usize, connected: bool) -> Labelled {
    let mut classes = BTreeSet::new();
    let mut labelled = 0;
    for g in labelled_graphs(n) {
        if g.max_degree() > max_degree || (connected && !g.is_connected()) {
            continue;
        }
        labelled += 1;
        classes.insert(canonical_form(&g).0);
    }
    Labelled { classes, labelled }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
