//! Isomorph-free generation of small graphs by canonical augmentation.
//!
//! Graphs grow one vertex at a time. A child is kept only if the new vertex
//! lies in the automorphism orbit of the child's canonical deletion vertex,
//! and isomorphic children of one parent are merged. For connected searches
//! deletion is restricted to non-cut vertices, so every intermediate graph is
//! connected. Degree bounds are hereditary and prune the tree.

use std::collections::{BTreeMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{canonical, canonical_form_coloured, CanonicalForm};
use crate::families::{catalog, CatalogError, CatalogQuery, SporadicInfo};
use crate::graph::{DegreeSet, Graph};
use crate::graph6::{parse_graph6, write_graph6};
use crate::refine::{is_long_refinement, Colouring};

/// Which degree sets are emitted at the final order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeFilter {
    /// Only the bound `max degree <= max(D)`.
    MaxDegree,
    /// `deg(G) ⊆ D`.
    Subset,
    /// `deg(G) ⊆ D` with exactly two distinct degrees.
    TwoDegrees,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub n: usize,
    pub degrees: DegreeSet,
    pub connected: bool,
    pub filter: DegreeFilter,
    pub budget: Budget,
}

impl SearchSpec {
    /// Connected graphs on `n` vertices with exactly two degrees, both in `degrees`.
    pub fn new(n: usize, degrees: &[usize]) -> SearchSpec {
        SearchSpec {
            n,
            degrees: DegreeSet::new(degrees),
            connected: true,
            filter: DegreeFilter::TwoDegrees,
            budget: Budget::default(),
        }
    }

    pub fn filter(mut self, filter: DegreeFilter) -> SearchSpec {
        self.filter = filter;
        self
    }

    pub fn connected(mut self, connected: bool) -> SearchSpec {
        self.connected = connected;
        self
    }

    pub fn budget(mut self, budget: Budget) -> SearchSpec {
        self.budget = budget;
        self
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.n < 2 {
            return Err(SearchError::InvalidSpec(format!("n = {} is below 2", self.n)));
        }
        match (self.degrees.lowest(), self.degrees.highest()) {
            (Some(lo), Some(hi)) if lo >= 1 && hi < self.n => Ok(()),
            (None, _) => Err(SearchError::InvalidSpec("empty degree set".into())),
            _ => Err(SearchError::InvalidSpec(format!("degree set {} not within [1, {}]", self.degrees, self.n - 1))),
        }
    }

    fn accepts(&self, g: &Graph) -> bool {
        let ds = g.degree_set();
        match self.filter {
            DegreeFilter::MaxDegree => true,
            DegreeFilter::Subset => ds.is_subset(&self.degrees),
            DegreeFilter::TwoDegrees => ds.len() == 2 && ds.is_subset(&self.degrees),
        }
    }
}

/// One emitted graph, relabelled canonically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Found {
    pub graph: Graph,
    pub canonical: CanonicalForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("invalid search: {0}")]
    InvalidSpec(String),
    #[error("budget exceeded after {nodes} nodes and {elapsed:?}; {} results so far", partial.len())]
    BudgetExceeded { partial: Vec<Found>, nodes: u64, elapsed: Duration },
}

/// Small mutable graph used while growing.
#[derive(Clone)]
struct Grow {
    adj: Vec<Vec<usize>>,
}

impl Grow {
    fn to_graph(&self) -> Graph {
        let edges: Vec<(usize, usize)> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect();
        Graph::new(self.adj.len(), &edges).expect("grown graphs are simple")
    }

    #[cfg(test)]
    fn from_graph(g: &Graph) -> Grow {
        Grow { adj: (0..g.n()).map(|v| g.neighbours(v).to_vec()).collect() }
    }

    fn with_vertex(&self, nbrs: &[usize]) -> Grow {
        let mut adj = self.adj.clone();
        let v = adj.len();
        for &u in nbrs {
            adj[u].push(v);
        }
        adj.push(nbrs.to_vec());
        Grow { adj }
    }

    /// Vertices whose removal keeps the graph connected.
    fn non_cut(&self) -> Vec<bool> {
        let n = self.adj.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut cut = vec![false; n];
        let mut timer = 0;
        // iterative DFS from 0 keeping (vertex, parent, next neighbour index)
        let mut stack = vec![(0usize, usize::MAX, 0usize)];
        disc[0] = 0;
        low[0] = 0;
        timer += 1;
        let mut root_children = 0;
        while let Some(&mut (v, p, ref mut i)) = stack.last_mut() {
            if *i < self.adj[v].len() {
                let u = self.adj[v][*i];
                *i += 1;
                if disc[u] == usize::MAX {
                    disc[u] = timer;
                    low[u] = timer;
                    timer += 1;
                    if v == 0 {
                        root_children += 1;
                    }
                    stack.push((u, v, 0));
                } else if u != p {
                    low[v] = low[v].min(disc[u]);
                }
            } else {
                stack.pop();
                if p != usize::MAX {
                    low[p] = low[p].min(low[v]);
                    if p != 0 && low[v] >= disc[p] {
                        cut[p] = true;
                    }
                }
            }
        }
        cut[0] = root_children > 1;
        cut.iter().map(|&c| !c).collect()
    }

    fn invariant(&self, v: usize) -> (usize, Vec<usize>) {
        let mut nd: Vec<usize> = self.adj[v].iter().map(|&u| self.adj[u].len()).collect();
        nd.sort_unstable();
        (self.adj[v].len(), nd)
    }
}

struct Ctx<'a> {
    spec: &'a SearchSpec,
    max_deg: usize,
    min_deg: usize,
    prune_min: bool,
    lr_only: bool,
    nodes: AtomicU64,
    stop: AtomicBool,
    start: Instant,
}

impl Ctx<'_> {
    fn tick(&self) -> bool {
        let nodes = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let over_nodes = self.spec.budget.max_nodes.is_some_and(|m| nodes > m);
        let over_time = nodes.is_multiple_of(256) && self.spec.budget.max_time.is_some_and(|t| self.start.elapsed() > t);
        if over_nodes || over_time {
            self.stop.store(true, Ordering::Relaxed);
        }
        !self.stop.load(Ordering::Relaxed)
    }

    /// Accepted, pruned children of `g`; at the final order, filtered too.
    fn children(&self, g: &Grow) -> Vec<(Grow, CanonicalForm)> {
        let k = g.adj.len();
        let last = k + 1 == self.spec.n;
        let open: Vec<usize> = (0..k).filter(|&u| g.adj[u].len() < self.max_deg).collect();
        let mut out = Vec::new();
        let mut seen: HashSet<CanonicalForm> = HashSet::new();
        let min_size = usize::from(self.spec.connected);
        let mut subset: Vec<usize> = Vec::new();
        let mut visit = |subset: &[usize]| {
            let child = g.with_vertex(subset);
            if self.prune_min {
                let slack = self.spec.n - (k + 1);
                if child.adj.iter().any(|l| l.len() + slack < self.min_deg) {
                    return;
                }
            }
            let Some(needs_orbit_test) = self.cheap_accept(&child) else { return };
            let graph = child.to_graph();
            if last {
                if !self.spec.accepts(&graph) || (self.spec.connected && !graph.is_connected()) {
                    return;
                }
                if self.lr_only && !is_long_refinement(&graph) {
                    return;
                }
            }
            let (labels, form) = canonical(&graph);
            if needs_orbit_test && !self.orbit_accept(&child, &graph, &labels) {
                return;
            }
            if seen.insert(form.clone()) {
                out.push((child, form));
            }
        };
        fn rec(open: &[usize], from: usize, left: usize, subset: &mut Vec<usize>, min: usize, f: &mut dyn FnMut(&[usize])) {
            if subset.len() >= min {
                f(subset);
            }
            if left == 0 {
                return;
            }
            for i in from..open.len() {
                subset.push(open[i]);
                rec(open, i + 1, left - 1, subset, min, f);
                subset.pop();
            }
        }
        rec(&open, 0, self.max_deg, &mut subset, min_size, &mut visit);
        out
    }

    fn candidates(&self, child: &Grow) -> Vec<usize> {
        if self.spec.connected {
            let nc = child.non_cut();
            (0..child.adj.len()).filter(|&v| nc[v]).collect()
        } else {
            (0..child.adj.len()).collect()
        }
    }

    /// `None` rejects; `Some(true)` means several candidates share the best
    /// invariant and the orbit test decides.
    fn cheap_accept(&self, child: &Grow) -> Option<bool> {
        let v = child.adj.len() - 1;
        let cands = self.candidates(child);
        let inv: Vec<_> = cands.iter().map(|&u| child.invariant(u)).collect();
        let best = inv.iter().max().unwrap();
        let mine = child.invariant(v);
        if &mine != best {
            return None;
        }
        Some(inv.iter().filter(|x| *x == best).count() > 1)
    }

    fn orbit_accept(&self, child: &Grow, graph: &Graph, labels: &[usize]) -> bool {
        let v = child.adj.len() - 1;
        let cands = self.candidates(child);
        let best = cands.iter().map(|&u| child.invariant(u)).max().unwrap();
        let w = cands.into_iter().filter(|&u| child.invariant(u) == best).min_by_key(|&u| labels[u]).unwrap();
        if w == v {
            return true;
        }
        let mark = |x: usize| {
            let mut lab = vec![0; graph.n()];
            lab[x] = 1;
            canonical_form_coloured(graph, &Colouring::from_labels(&lab)).expect("sizes match")
        };
        mark(v) == mark(w)
    }

    fn dfs(&self, g: &Grow, out: &mut Vec<Found>) {
        if !self.tick() {
            return;
        }
        for (child, form) in self.children(g) {
            if child.adj.len() == self.spec.n {
                let graph = parse_graph6(form.as_str()).expect("canonical forms are graph6");
                out.push(Found { graph, canonical: form });
            } else {
                self.dfs(&child, out);
            }
            if self.stop.load(Ordering::Relaxed) {
                return;
            }
        }
    }
}

const SPLIT_ORDER: usize = 6;

fn run(spec: &SearchSpec, lr_only: bool) -> Result<Vec<Found>, SearchError> {
    spec.validate()?;
    let ctx = Ctx {
        spec,
        max_deg: spec.degrees.highest().unwrap(),
        min_deg: spec.degrees.lowest().unwrap(),
        prune_min: spec.filter != DegreeFilter::MaxDegree,
        lr_only,
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        start: Instant::now(),
    };
    // expand breadth-first to a frontier, then split subtrees across threads
    let mut frontier = vec![Grow { adj: vec![Vec::new()] }];
    let mut out: Vec<Found> = Vec::new();
    while frontier.first().is_some_and(|g| g.adj.len() < SPLIT_ORDER.min(spec.n - 1)) {
        let mut next = Vec::new();
        for g in &frontier {
            if !ctx.tick() {
                break;
            }
            next.extend(ctx.children(g).into_iter().map(|(c, _)| c));
        }
        frontier = next;
    }
    let parts: Vec<Vec<Found>> = frontier
        .par_iter()
        .map(|g| {
            let mut local = Vec::new();
            ctx.dfs(g, &mut local);
            local
        })
        .collect();
    out.extend(parts.into_iter().flatten());
    out.sort_by(|a, b| a.canonical.cmp(&b.canonical));
    if ctx.stop.load(Ordering::Relaxed) {
        return Err(SearchError::BudgetExceeded {
            partial: out,
            nodes: ctx.nodes.load(Ordering::Relaxed),
            elapsed: ctx.start.elapsed(),
        });
    }
    Ok(out)
}

/// Every graph of the spec's order up to isomorphism, sorted by canonical form.
pub fn enumerate(spec: &SearchSpec) -> Result<Vec<Found>, SearchError> {
    run(spec, false)
}

/// The enumerated graphs that are long-refinement.
pub fn find_long_refinement(spec: &SearchSpec) -> Result<Vec<Found>, SearchError> {
    run(spec, true)
}

/// Search and catalog disagreement at one order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderComparison {
    pub order: usize,
    pub found: usize,
    pub catalogued: usize,
    /// graph6 of canonical forms found by search but not catalogued.
    pub missing_from_catalog: Vec<String>,
    /// graph6 of canonical forms catalogued but not found by search.
    pub missing_from_search: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossValidation {
    pub degrees: DegreeSet,
    pub min_order: usize,
    pub max_order: usize,
    pub orders: Vec<OrderComparison>,
    pub unavailable: Vec<SporadicInfo>,
    pub equal: bool,
}

#[derive(Debug, Error)]
pub enum CrossValidateError {
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// Compares exhaustive search with the catalog, order by order, on the
/// graphs whose degree set is exactly `degrees`.
pub fn cross_validate(
    min_order: usize,
    max_order: usize,
    degrees: &[usize],
    budget: Budget,
) -> Result<CrossValidation, CrossValidateError> {
    let ds = DegreeSet::new(degrees);
    let cat = catalog(&CatalogQuery::new(min_order, max_order).degrees(degrees))?;
    let mut by_order: BTreeMap<usize, HashSet<String>> = BTreeMap::new();
    for e in &cat.entries {
        by_order.entry(e.order).or_default().insert(e.canonical.0.clone());
    }
    let mut orders = Vec::new();
    for n in min_order.max(2)..=max_order {
        let found: HashSet<String> = if ds.highest().is_some_and(|m| m < n) && ds.lowest().is_some_and(|m| m >= 1) {
            let spec = SearchSpec::new(n, degrees).budget(budget);
            find_long_refinement(&spec)?
                .into_iter()
                .filter(|f| f.graph.degree_set() == ds)
                .map(|f| f.canonical.0)
                .collect()
        } else {
            HashSet::new()
        };
        let catalogued = by_order.remove(&n).unwrap_or_default();
        let mut missing_from_catalog: Vec<String> = found.difference(&catalogued).cloned().collect();
        let mut missing_from_search: Vec<String> = catalogued.difference(&found).cloned().collect();
        missing_from_catalog.sort();
        missing_from_search.sort();
        orders.push(OrderComparison {
            order: n,
            found: found.len(),
            catalogued: catalogued.len(),
            missing_from_catalog,
            missing_from_search,
        });
    }
    let equal = orders.iter().all(|o| o.missing_from_catalog.is_empty() && o.missing_from_search.is_empty());
    Ok(CrossValidation { degrees: ds, min_order, max_order, orders, unavailable: cat.unavailable, equal })
}

/// graph6 lines of the found graphs.
pub fn to_graph6_lines(found: &[Found]) -> String {
    found.iter().map(|f| write_graph6(&f.graph) + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(n: usize, degrees: &[usize], filter: DegreeFilter) -> usize {
        enumerate(&SearchSpec::new(n, degrees).filter(filter)).unwrap().len()
    }

    #[test]
    fn connected_graph_counts() {
        let known = [1, 1, 2, 6, 21, 112, 853];
        for n in 2..=7 {
            let all: Vec<usize> = (1..n).collect();
            assert_eq!(count(n, &all, DegreeFilter::MaxDegree), known[n - 1], "n = {n}");
        }
    }

    #[test]
    fn small_examples() {
        assert_eq!(count(3, &[2], DegreeFilter::Subset), 1);
        assert_eq!(count(3, &[2], DegreeFilter::TwoDegrees), 0);
        assert_eq!(count(5, &[1, 2], DegreeFilter::Subset), 2);
        let two = enumerate(&SearchSpec::new(5, &[1, 2])).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].graph.m(), 4);
    }

    #[test]
    fn disconnected_counts() {
        // all graphs on 4 vertices: 11
        let spec = SearchSpec::new(4, &[1, 2, 3]).connected(false).filter(DegreeFilter::MaxDegree);
        assert_eq!(enumerate(&spec).unwrap().len(), 11);
    }

    #[test]
    fn invalid_and_budget() {
        assert!(matches!(enumerate(&SearchSpec::new(1, &[1])), Err(SearchError::InvalidSpec(_))));
        assert!(matches!(enumerate(&SearchSpec::new(4, &[0, 2])), Err(SearchError::InvalidSpec(_))));
        let spec = SearchSpec::new(8, &[1, 2, 3, 4])
            .filter(DegreeFilter::MaxDegree)
            .budget(Budget { max_nodes: Some(50), max_time: None });
        assert!(matches!(enumerate(&spec), Err(SearchError::BudgetExceeded { .. })));
    }

    #[test]
    fn non_cut_vertices() {
        let p = Grow::from_graph(&Graph::path(4));
        assert_eq!(p.non_cut(), vec![true, false, false, true]);
        let c = Grow::from_graph(&Graph::cycle(5));
        assert!(c.non_cut().iter().all(|&x| x));
        let s = Grow::from_graph(&Graph::star(3));
        assert_eq!(s.non_cut(), vec![false, true, true, true]);
    }
}
