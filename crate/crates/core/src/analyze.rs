//! Pair-phase extraction and structural checks on long-refinement traces.
//!
//! Notation follows the usual one for long-refinement runs: `C_i` is the
//! class of `π^i` that splits in iteration `i + 1` into `A_{i+1}` and
//! `B_{i+1}`; `p` is the first iteration whose classes all have size at most
//! two, and `P_1, ..., P_{n_P}` are the pairs of `π^p` in splitting order.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::refine::{run_colour_refinement, Colouring, RefinementTrace};

/// A class that sees at least one class (possibly itself) with differing degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unbalanced {
    pub class: Vec<usize>,
    pub witnesses: Vec<Vec<usize>>,
}

/// Every class `C` of `c` that is unbalanced with respect to some class `C'`,
/// with all such `C'` listed as witnesses.
pub fn unbalanced_classes(g: &Graph, c: &Colouring) -> Vec<Unbalanced> {
    let k = c.num_classes();
    let classes = c.classes();
    let mut counts = vec![0usize; g.n() * k];
    for v in 0..g.n() {
        for &u in g.neighbours(v) {
            counts[v * k + c.colour(u)] += 1;
        }
    }
    let mut out = Vec::new();
    for class in &classes {
        let first = class[0];
        let witnesses: Vec<Vec<usize>> = (0..k)
            .filter(|&d| class.iter().any(|&v| counts[v * k + d] != counts[first * k + d]))
            .map(|d| classes[d].clone())
            .collect();
        if !witnesses.is_empty() {
            out.push(Unbalanced { class: class.clone(), witnesses });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyzeError {
    #[error("not a long-refinement graph: {iterations} iterations on {n} vertices")]
    NotLongRefinement { n: usize, iterations: usize },
    #[error("trace does not belong to this graph")]
    TraceMismatch,
    #[error("the class split at iteration p is not two pairs: {0:?} and {1:?}")]
    SplitNotPairs(Vec<usize>, Vec<usize>),
    #[error("graph has fewer than 3 vertices; no pair phase")]
    TooSmall,
}

/// Quantities describing the pair phase of a long-refinement run.
/// Positions `a`, `b`, `c`, `d` are 1-based positions in the splitting order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPhase {
    pub p: usize,
    /// `pairs[i]` is `P_{i+1}`.
    pub pairs: Vec<[usize; 2]>,
    pub singletons: Vec<usize>,
    pub n_p: usize,
    pub a: usize,
    pub b: usize,
    pub ell: usize,
    pub c: usize,
    /// `None` when `C_{p-ℓ-2}` matches neither admissible shape.
    pub t: Option<usize>,
    pub q: Option<usize>,
    pub d: Option<i64>,
    pub ell_prime: Option<i64>,
}

impl PairPhase {
    /// `P_i` for 1-based `i`.
    pub fn pair(&self, i: usize) -> [usize; 2] {
        self.pairs[i - 1]
    }

    /// Position of the pair containing `v`, if any.
    pub fn position_of(&self, v: usize) -> Option<usize> {
        self.pairs.iter().position(|p| p.contains(&v)).map(|i| i + 1)
    }
}

fn is_lr_trace(trace: &RefinementTrace, n: usize) -> bool {
    n >= 1 && trace.iteration_number == n - 1 && trace.partitions.iter().enumerate().all(|(i, p)| p.num_classes() == i + 1)
}

/// `C_i`: the class of `π^i` that splits in iteration `i + 1`.
fn splitting_class(trace: &RefinementTrace, i: usize) -> &[usize] {
    trace.binary_split(i + 1).expect("long-refinement traces split one class per iteration").0
}

pub fn pair_phase(trace: &RefinementTrace, g: &Graph) -> Result<PairPhase, AnalyzeError> {
    let n = g.n();
    if trace.partitions.first().map(Colouring::len) != Some(n) {
        return Err(AnalyzeError::TraceMismatch);
    }
    if !is_lr_trace(trace, n) {
        return Err(AnalyzeError::NotLongRefinement { n, iterations: trace.iteration_number });
    }
    if n < 3 {
        return Err(AnalyzeError::TooSmall);
    }
    let max_class = |i: usize| trace.partitions[i].classes().iter().map(Vec::len).max().unwrap_or(0);
    let p = (0..=trace.iteration_number).find(|&i| max_class(i) <= 2).expect("final partition is discrete");
    let pairs: Vec<[usize; 2]> = (p..n - 1)
        .map(|i| {
            let c = splitting_class(trace, i);
            [c[0], c[1]]
        })
        .collect();
    let singletons: Vec<usize> =
        trace.partitions[p].classes().into_iter().filter(|c| c.len() == 1).map(|c| c[0]).collect();
    let n_p = pairs.len();
    let position = |set: &[usize]| -> Option<usize> {
        if set.len() != 2 {
            return None;
        }
        pairs.iter().position(|q| q[0] == set[0] && q[1] == set[1]).map(|i| i + 1)
    };
    let (_, ap, bp) = trace.binary_split(p).expect("p >= 1 for n >= 3");
    let (a, b) = match (position(ap), position(bp)) {
        (Some(x), Some(y)) => (x.min(y), x.max(y)),
        _ => return Err(AnalyzeError::SplitNotPairs(ap.to_vec(), bp.to_vec())),
    };
    let ell = (n_p - b).min(a - 1);
    let c = a - ell;
    let mut phase = PairPhase { p, pairs, singletons, n_p, a, b, ell, c, t: None, q: None, d: None, ell_prime: None };
    if p >= ell + 2 {
        let shape: BTreeSet<usize> = splitting_class(trace, p - ell - 2).iter().copied().collect();
        let union = |ids: &[usize], extra: Option<usize>| -> BTreeSet<usize> {
            ids.iter().flat_map(|&i| phase.pair(i)).chain(extra).collect()
        };
        let t = if c >= 2 && shape == union(&[c - 1, c, n_p], None) {
            Some(0)
        } else if c >= 2 && phase.singletons.iter().any(|&s| shape == union(&[c - 1], Some(s))) {
            Some(1)
        } else {
            None
        };
        if let Some(t) = t {
            phase.t = Some(t);
            phase.q = (p + 1).checked_sub(ell + 2 + t);
            let d = c as i64 - t as i64 - 1;
            phase.d = Some(d);
            phase.ell_prime = Some((ell as i64).min(d - 1));
        }
    }
    Ok(phase)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The statement quantifies over an empty range.
    Vacuous,
    /// Not evaluated because an earlier check it depends on failed.
    Skipped,
}

/// Evidence attached to a failed check, as vertex sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub iteration: Option<usize>,
    pub sets: Vec<Vec<usize>>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: u8,
    pub name: String,
    pub status: CheckStatus,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub checks: Vec<Check>,
    pub pair_phase: Option<PairPhase>,
}

impl StructureReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| matches!(c.status, CheckStatus::Pass | CheckStatus::Vacuous))
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !matches!(c.status, CheckStatus::Pass | CheckStatus::Vacuous))
    }

    pub fn check(&self, id: u8) -> &Check {
        &self.checks[id as usize - 1]
    }

    /// Plain-text table, one line per check.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Vacuous => "vacuous",
                CheckStatus::Skipped => "skipped",
            };
            out.push_str(&format!("{:>2}  {:<8} {}", c.id, status, c.name));
            if let Some(w) = &c.witness {
                out.push_str(&format!("  [{}", w.detail));
                if let Some(i) = w.iteration {
                    out.push_str(&format!(" at iteration {i}"));
                }
                if !w.sets.is_empty() {
                    out.push_str(&format!(": {:?}", w.sets));
                }
                out.push(']');
            }
            out.push('\n');
        }
        if let Some(pp) = &self.pair_phase {
            let opt = |x: Option<i64>| x.map_or("-".to_string(), |v| v.to_string());
            out.push_str(&format!(
                "p={} n_P={} a={} b={} ell={} c={} t={} q={} d={} ell'={}\n",
                pp.p,
                pp.n_p,
                pp.a,
                pp.b,
                pp.ell,
                pp.c,
                opt(pp.t.map(|x| x as i64)),
                opt(pp.q.map(|x| x as i64)),
                opt(pp.d),
                opt(pp.ell_prime)
            ));
        }
        out
    }
}

pub const CHECK_NAMES: [&str; 10] = [
    "one binary split per iteration, one unbalanced class",
    "A_p and B_p are pairs",
    "consecutive pairs joined by a matching",
    "P_1 attached completely to P_a and P_b",
    "trivial attachment of singletons and non-consecutive pairs",
    "b in {a+1, a+2}",
    "4->2 cascade shape of pi^{p-h-1}",
    "consecutive size-4 classes have degree 1 or 3",
    "shape of C_{p-l-2} and C_{q(t)-1}",
    "range of d",
];

struct Checker<'a> {
    checks: Vec<Check>,
    g: &'a Graph,
}

impl Checker<'_> {
    fn push(&mut self, status: CheckStatus, witness: Option<Witness>) {
        let id = self.checks.len() as u8 + 1;
        self.checks.push(Check { id, name: CHECK_NAMES[id as usize - 1].to_string(), status, witness });
    }

    fn result(&mut self, r: Result<(), Witness>) {
        match r {
            Ok(()) => self.push(CheckStatus::Pass, None),
            Err(w) => self.push(CheckStatus::Fail, Some(w)),
        }
    }

    fn skip_rest(&mut self, why: &str) {
        while self.checks.len() < CHECK_NAMES.len() {
            self.push(CheckStatus::Skipped, Some(Witness { iteration: None, sets: vec![], detail: why.to_string() }));
        }
    }

    fn edges_between(&self, x: &[usize], y: &[usize]) -> usize {
        x.iter().map(|&u| y.iter().filter(|&&v| self.g.has_edge(u, v)).count()).sum()
    }

    /// Common number of neighbours in `y` of every vertex of `x`, if uniform.
    fn uniform_degree(&self, x: &[usize], y: &[usize]) -> Option<usize> {
        let d: BTreeSet<usize> = x.iter().map(|&u| y.iter().filter(|&&v| self.g.has_edge(u, v)).count()).collect();
        (d.len() == 1).then(|| *d.iter().next().unwrap())
    }
}

fn witness(iteration: Option<usize>, sets: Vec<Vec<usize>>, detail: impl Into<String>) -> Witness {
    Witness { iteration, sets, detail: detail.into() }
}

fn partition_set(c: &Colouring) -> BTreeSet<Vec<usize>> {
    c.classes().into_iter().collect()
}

/// Runs Colour Refinement on `g` and evaluates the ten structural checks.
pub fn verify_structure(g: &Graph) -> StructureReport {
    verify_trace(g, &run_colour_refinement(g))
}

/// As [`verify_structure`] with a precomputed naive trace of `g`.
pub fn verify_trace(g: &Graph, trace: &RefinementTrace) -> StructureReport {
    let n = g.n();
    let mut ck = Checker { checks: Vec::new(), g };

    // 1
    if !is_lr_trace(trace, n) || n < 3 {
        ck.result(Err(witness(
            Some(trace.iteration_number),
            vec![],
            format!("not long-refinement: {} iterations on {} vertices", trace.iteration_number, n),
        )));
        ck.skip_rest("graph is not long-refinement");
        return StructureReport { checks: ck.checks, pair_phase: None };
    }
    let r1 = (|| {
        for i in 0..n - 1 {
            let pi = &trace.partitions[i];
            let c_i = splitting_class(trace, i);
            let unb = unbalanced_classes(g, pi);
            if unb.len() != 1 || unb[0].class != c_i {
                return Err(witness(
                    Some(i),
                    unb.iter().map(|u| u.class.clone()).collect(),
                    "expected exactly one unbalanced class, the one that splits next",
                ));
            }
            if i > 0 {
                let (_, a, b) = trace.binary_split(i).unwrap();
                let expect: BTreeSet<Vec<usize>> = [a.to_vec(), b.to_vec()].into();
                let got: BTreeSet<Vec<usize>> = unb[0].witnesses.iter().cloned().collect();
                if got != expect {
                    return Err(witness(Some(i), unb[0].witnesses.clone(), "witness classes are not exactly A_i and B_i"));
                }
            }
        }
        Ok(())
    })();
    ck.result(r1);

    // 2
    let pp = match pair_phase(trace, g) {
        Ok(pp) => pp,
        Err(e) => {
            ck.result(Err(witness(None, vec![], e.to_string())));
            ck.skip_rest("pair phase unavailable");
            return StructureReport { checks: ck.checks, pair_phase: None };
        }
    };
    ck.push(CheckStatus::Pass, None);
    let pair = |i: usize| pp.pair(i).to_vec();
    let pairs_union = |ids: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = ids.iter().flat_map(|&i| pp.pair(i)).collect();
        v.sort_unstable();
        v
    };

    // 3
    let r3 = (1..pp.n_p).try_for_each(|i| {
        let (x, y) = (pair(i), pair(i + 1));
        if ck.uniform_degree(&x, &y) == Some(1) && ck.uniform_degree(&y, &x) == Some(1) {
            Ok(())
        } else {
            Err(witness(None, vec![x, y], "consecutive pairs not joined by a perfect matching"))
        }
    });
    ck.result(r3);

    // 4
    let (p1, pa, pb) = (pair(1), pair(pp.a), pair(pp.b));
    let r4 = {
        let full = |u: usize, set: &[usize]| set.iter().all(|&v| g.has_edge(u, v));
        let none = |u: usize, set: &[usize]| set.iter().all(|&v| !g.has_edge(u, v));
        let ok = |u: usize, w: usize| full(u, &pa) && none(u, &pb) && full(w, &pb) && none(w, &pa);
        if ok(p1[0], p1[1]) || ok(p1[1], p1[0]) {
            Ok(())
        } else {
            Err(witness(None, vec![p1.clone(), pa.clone(), pb.clone()], "P_1 is not split completely between P_a and P_b"))
        }
    };
    ck.result(r4);

    // 5
    let r5 = (|| {
        for i in 1..=pp.n_p {
            let x = pair(i);
            for &s in &pp.singletons {
                if g.has_edge(x[0], s) != g.has_edge(x[1], s) {
                    return Err(witness(None, vec![x, vec![s]], "singleton adjacent to one vertex of a pair"));
                }
            }
            for j in i + 2..=pp.n_p {
                if i == 1 && (j == pp.a || j == pp.b) {
                    continue;
                }
                let y = pair(j);
                let e = ck.edges_between(&x, &y);
                if e != 0 && e != 4 {
                    return Err(witness(None, vec![x, y], format!("{e} edges between non-consecutive pairs")));
                }
            }
        }
        Ok(())
    })();
    ck.result(r5);

    // 6
    if pp.b == pp.a + 1 || pp.b == pp.a + 2 {
        ck.push(CheckStatus::Pass, None);
    } else {
        ck.result(Err(witness(None, vec![pa.clone(), pb.clone()], format!("a = {}, b = {}", pp.a, pp.b))));
    }

    // 7
    let r7 = (|| {
        for h in 0..=pp.ell {
            let Some(it) = pp.p.checked_sub(h + 1) else {
                return Err(witness(None, vec![], format!("cascade needs iteration p-{}-1 < 0", h)));
            };
            let mut expect: BTreeSet<Vec<usize>> = pp.singletons.iter().map(|&s| vec![s]).collect();
            for i in 0..=h {
                expect.insert(pairs_union(&[pp.a - i, pp.b + i]));
            }
            let singles = (1..pp.a - h).chain(pp.a + 1..pp.b).chain(pp.b + h + 1..=pp.n_p);
            for i in singles {
                expect.insert(pair(i));
            }
            if partition_set(&trace.partitions[it]) != expect {
                return Err(witness(Some(it), trace.partitions[it].classes(), "partition differs from the cascade shape"));
            }
        }
        Ok(())
    })();
    ck.result(r7);

    // 8
    if pp.ell == 0 {
        ck.push(CheckStatus::Vacuous, None);
    } else {
        let r8 = (0..pp.ell).try_for_each(|h| {
            let x = pairs_union(&[pp.a - h, pp.b + h]);
            let y = pairs_union(&[pp.a - h - 1, pp.b + h + 1]);
            match (ck.uniform_degree(&x, &y), ck.uniform_degree(&y, &x)) {
                (Some(d1), Some(d2)) if d1 == d2 && (d1 == 1 || d1 == 3) => Ok(()),
                _ => Err(witness(None, vec![x, y], "size-4 classes not joined with degree 1 or 3")),
            }
        });
        ck.result(r8);
    }

    // 9
    let r9 = match (pp.t, pp.q, pp.d) {
        (Some(_), Some(q), Some(d)) if q >= 1 && d >= 1 => {
            let c_q = splitting_class(trace, q - 1);
            let expect = pairs_union(&[d as usize, pp.c, pp.n_p]);
            if c_q == expect.as_slice() {
                Ok(())
            } else {
                Err(witness(Some(q - 1), vec![c_q.to_vec(), expect], "C_{q(t)-1} is not P_d + P_c + P_{n_P}"))
            }
        }
        (Some(t), q, d) => Err(witness(None, vec![], format!("t = {t} but q = {q:?}, d = {d:?} out of range"))),
        (None, _, _) => {
            let sets = pp.p.checked_sub(pp.ell + 2).map(|i| vec![splitting_class(trace, i).to_vec()]).unwrap_or_default();
            Err(witness(pp.p.checked_sub(pp.ell + 2), sets, "C_{p-l-2} matches neither admissible shape"))
        }
    };
    let t_known = r9.is_ok();
    ck.result(r9);

    // 10
    match (t_known, pp.d) {
        (true, Some(d)) => {
            let ell = pp.ell as i64;
            let hi = if pp.b == pp.a + 1 { ell + 4 } else { ell + 2 };
            if (ell..=hi).contains(&d) {
                ck.push(CheckStatus::Pass, None);
            } else {
                ck.result(Err(witness(None, vec![], format!("d = {d} outside [{ell}, {hi}]"))));
            }
        }
        _ => ck.push(
            CheckStatus::Skipped,
            Some(witness(None, vec![], "t undetermined")),
        ),
    }

    StructureReport { checks: ck.checks, pair_phase: Some(pp) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_partition_has_no_unbalanced_class() {
        let g = Graph::path(3);
        let c = Colouring::from_labels(&[0, 1, 0]);
        assert!(unbalanced_classes(&g, &c).is_empty());
    }

    #[test]
    fn p4_is_unbalanced_wrt_itself() {
        let g = Graph::path(4);
        let u = unbalanced_classes(&g, &Colouring::monochromatic(4));
        assert_eq!(u, vec![Unbalanced { class: vec![0, 1, 2, 3], witnesses: vec![vec![0, 1, 2, 3]] }]);
    }

    #[test]
    fn c6_fails_first_check() {
        let r = verify_structure(&Graph::cycle(6));
        assert_eq!(r.check(1).status, CheckStatus::Fail);
        assert!(r.checks[1..].iter().all(|c| c.status == CheckStatus::Skipped));
        assert_eq!(r.checks.len(), 10);
        let t = run_colour_refinement(&Graph::cycle(6));
        assert!(matches!(pair_phase(&t, &Graph::cycle(6)), Err(AnalyzeError::NotLongRefinement { .. })));
    }
}
