//! The {3,4} table families, the catalog of classified long-refinement
//! graphs and the order-gap check.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyze::verify_structure;
use crate::canon::{canonical_form, CanonicalForm};
use crate::graph::{DegreeSet, Graph};
use crate::graph6::parse_graph6_lines;
use crate::refine::is_long_refinement;
use crate::strings::{parse, realize, Family, LrString};

const TABLE_DATA: &str = include_str!("../data/tables.txt");

/// `ck * k + ci * i + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Expr {
    ck: i64,
    ci: i64,
    c: i64,
}

impl Expr {
    fn parse(text: &str) -> Result<Expr, String> {
        let mut e = Expr { ck: 0, ci: 0, c: 0 };
        let bytes = text.as_bytes();
        let mut pos = 0;
        if bytes.is_empty() {
            return Err("empty expression".into());
        }
        while pos < bytes.len() {
            let mut sign = 1;
            if pos > 0 || bytes[0] == b'-' || bytes[0] == b'+' {
                match bytes[pos] {
                    b'+' => {}
                    b'-' => sign = -1,
                    _ => return Err(format!("expected + or - in {text:?}")),
                }
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let coef: Option<i64> = (pos > start).then(|| text[start..pos].parse().unwrap());
            match bytes.get(pos) {
                Some(b'k') => {
                    e.ck += sign * coef.unwrap_or(1);
                    pos += 1;
                }
                Some(b'i') => {
                    e.ci += sign * coef.unwrap_or(1);
                    pos += 1;
                }
                _ => e.c += sign * coef.ok_or_else(|| format!("missing term in {text:?}"))?,
            }
        }
        Ok(e)
    }

    fn eval(self, k: usize, i: usize) -> i64 {
        self.ck * k as i64 + self.ci * i as i64 + self.c
    }
}

#[derive(Debug, Clone)]
struct Row {
    variant: Option<u8>,
    vertex: Expr,
    neighbours: Vec<Expr>,
    text: String,
}

#[derive(Debug, Clone)]
struct TableDef {
    id: u8,
    order: Expr,
    domain: [usize; 2],
    interior: Vec<(Expr, Expr)>,
    odd: Vec<Expr>,
    even: Vec<Expr>,
    rows: Vec<Row>,
    omit: Vec<(usize, Expr)>,
}

fn parse_tables(text: &str) -> Result<Vec<TableDef>, String> {
    let mut out = Vec::new();
    let mut cur: Option<TableDef> = None;
    let exprs = |s: &str| s.split_whitespace().map(Expr::parse).collect::<Result<Vec<_>, _>>();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let ctx = |e: String| format!("line {}: {e}", ln + 1);
        let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
        if head == "table" {
            let mut w = rest.split_whitespace();
            let id = w.next().and_then(|s| s.parse().ok()).ok_or_else(|| ctx("bad table id".into()))?;
            let order = match (w.next(), w.next()) {
                (Some("order"), Some(e)) => Expr::parse(e).map_err(ctx)?,
                _ => return Err(ctx("expected order".into())),
            };
            cur = Some(TableDef {
                id,
                order,
                domain: [0, 0],
                interior: vec![],
                odd: vec![],
                even: vec![],
                rows: vec![],
                omit: vec![],
            });
            continue;
        }
        let t = cur.as_mut().ok_or_else(|| ctx("statement outside a table".into()))?;
        match head {
            "domain" => {
                let (v, min) = rest.split_once(" k>=").ok_or_else(|| ctx("bad domain".into()))?;
                let v: usize = v.parse().map_err(|_| ctx("bad variant".into()))?;
                if !(1..=2).contains(&v) {
                    return Err(ctx("bad variant".into()));
                }
                t.domain[v - 1] = min.parse().map_err(|_| ctx("bad domain bound".into()))?;
            }
            "interior" => {
                for r in rest.split_whitespace() {
                    let (a, b) = r.split_once("..").ok_or_else(|| ctx("bad range".into()))?;
                    t.interior.push((Expr::parse(a).map_err(ctx)?, Expr::parse(b).map_err(ctx)?));
                }
            }
            "interior-odd" => t.odd = exprs(rest).map_err(ctx)?,
            "interior-even" => t.even = exprs(rest).map_err(ctx)?,
            "row" => {
                let (lhs, rhs) = rest.split_once(':').ok_or_else(|| ctx("row needs ':'".into()))?;
                let (v, vertex) = lhs.trim().split_once(' ').ok_or_else(|| ctx("bad row head".into()))?;
                let variant = match v {
                    "*" => None,
                    "1" => Some(1),
                    "2" => Some(2),
                    _ => return Err(ctx("bad row variant".into())),
                };
                t.rows.push(Row {
                    variant,
                    vertex: Expr::parse(vertex.trim()).map_err(ctx)?,
                    neighbours: exprs(rhs).map_err(ctx)?,
                    text: line.to_string(),
                });
            }
            "omit" => {
                let mut w = rest.split_whitespace();
                let k = w
                    .next()
                    .and_then(|s| s.strip_prefix("k="))
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| ctx("bad omit parameter".into()))?;
                for e in w {
                    t.omit.push((k, Expr::parse(e).map_err(ctx)?));
                }
            }
            "end" => out.push(cur.take().unwrap()),
            _ => return Err(ctx(format!("unknown statement {head:?}"))),
        }
    }
    if cur.is_some() {
        return Err("unterminated table".into());
    }
    Ok(out)
}

fn tables() -> Result<&'static [TableDef], TableError> {
    static TABLES: OnceLock<Result<Vec<TableDef>, String>> = OnceLock::new();
    TABLES.get_or_init(|| parse_tables(TABLE_DATA)).as_deref().map_err(|e| TableError::Data(e.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TableFamilySpec {
    pub table: u8,
    pub variant: u8,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("unknown table {0}")]
    UnknownTable(u8),
    #[error("unknown adjacency variant {0}")]
    UnknownVariant(u8),
    #[error("table {table} variant {variant} needs k >= {min}, got {k}")]
    OutOfDomain { table: u8, variant: u8, k: usize, min: usize },
    #[error("row {row:?}: neighbour {entry} outside 0..{n}")]
    OutOfRange { row: String, entry: i64, n: usize },
    #[error("vertex {vertex} has two rows (second: {row:?})")]
    DuplicateRow { vertex: usize, row: String },
    #[error("vertex {0} has no row")]
    MissingRow(usize),
    #[error("row of vertex {row} lists {entry}, whose row does not list {row}")]
    Asymmetric { row: usize, entry: usize },
    #[error("row of vertex {0} lists itself or repeats a neighbour")]
    BadRow(usize),
    #[error("table {table} variant {variant} k={k} is not long-refinement")]
    NotLongRefinement { table: u8, variant: u8, k: usize },
    #[error("table {table} variant {variant} k={k} has degree set {found}")]
    DegreeSet { table: u8, variant: u8, k: usize, found: DegreeSet },
    #[error("table data: {0}")]
    Data(String),
}

fn table_def(table: u8) -> Result<&'static TableDef, TableError> {
    tables()?.iter().find(|t| t.id == table).ok_or(TableError::UnknownTable(table))
}

/// Ids of the available tables.
pub fn table_ids() -> Vec<u8> {
    tables().map(|t| t.iter().map(|d| d.id).collect()).unwrap_or_default()
}

/// Smallest admissible parameter of a table variant.
pub fn table_min_k(table: u8, variant: u8) -> Result<usize, TableError> {
    let t = table_def(table)?;
    if !(1..=2).contains(&variant) {
        return Err(TableError::UnknownVariant(variant));
    }
    Ok(t.domain[variant as usize - 1])
}

pub fn table_order(table: u8, k: usize) -> Result<usize, TableError> {
    Ok(table_def(table)?.order.eval(k, 0) as usize)
}

/// Builds the graph from the rows without the long-refinement check.
pub fn table_graph(spec: TableFamilySpec) -> Result<Graph, TableError> {
    let TableFamilySpec { table, variant, k } = spec;
    let min = table_min_k(table, variant)?;
    if k < min {
        return Err(TableError::OutOfDomain { table, variant, k, min });
    }
    build_table(table_def(table)?, variant, k)
}

fn build_table(t: &TableDef, variant: u8, k: usize) -> Result<Graph, TableError> {
    let n = t.order.eval(k, 0) as usize;
    let mut rows: Vec<Option<(Vec<i64>, String)>> = vec![None; n];
    let mut place = |v: i64, nb: Vec<i64>, text: String| -> Result<(), TableError> {
        if v < 0 || v as usize >= n {
            return Err(TableError::OutOfRange { row: text, entry: v, n });
        }
        if rows[v as usize].is_some() {
            return Err(TableError::DuplicateRow { vertex: v as usize, row: text });
        }
        rows[v as usize] = Some((nb, text));
        Ok(())
    };
    for &(a, b) in &t.interior {
        for i in a.eval(k, 0)..=b.eval(k, 0) {
            let rule = if i % 2 == 1 { &t.odd } else { &t.even };
            place(i, rule.iter().map(|e| e.eval(k, i as usize)).collect(), format!("interior {i}"))?;
        }
    }
    for r in &t.rows {
        if r.variant.is_some_and(|v| v != variant) || t.omit.iter().any(|&(ok, e)| ok == k && e == r.vertex) {
            continue;
        }
        place(r.vertex.eval(k, 0), r.neighbours.iter().map(|e| e.eval(k, 0)).collect(), r.text.clone())?;
    }
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(n);
    for (v, row) in rows.iter().enumerate() {
        let (nb, text) = row.as_ref().ok_or(TableError::MissingRow(v))?;
        let mut list = Vec::with_capacity(nb.len());
        for &u in nb {
            if u < 0 || u as usize >= n {
                return Err(TableError::OutOfRange { row: text.clone(), entry: u, n });
            }
            list.push(u as usize);
        }
        list.sort_unstable();
        if list.windows(2).any(|w| w[0] == w[1]) || list.contains(&v) {
            return Err(TableError::BadRow(v));
        }
        adj.push(list);
    }
    for (v, list) in adj.iter().enumerate() {
        if let Some(&u) = list.iter().find(|&&u| adj[u].binary_search(&v).is_err()) {
            return Err(TableError::Asymmetric { row: v, entry: u });
        }
    }
    let edges: Vec<(usize, usize)> =
        adj.iter().enumerate().flat_map(|(v, l)| l.iter().filter(move |&&u| v < u).map(move |&u| (v, u))).collect();
    Ok(Graph::new(n, &edges).expect("validated rows form a simple graph"))
}

/// The table graph, checked to be long-refinement with degrees {3,4}.
pub fn table_family(spec: TableFamilySpec) -> Result<Graph, TableError> {
    let g = table_graph(spec)?;
    let TableFamilySpec { table, variant, k } = spec;
    let found = g.degree_set();
    if found != DegreeSet::new(&[3, 4]) {
        return Err(TableError::DegreeSet { table, variant, k, found });
    }
    if !is_long_refinement(&g) {
        return Err(TableError::NotLongRefinement { table, variant, k });
    }
    Ok(g)
}

/// A graph classified only through a drawing; shipped as `<id>.g6`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SporadicInfo {
    pub id: &'static str,
    pub degrees: [usize; 2],
}

pub const SPORADIC: [SporadicInfo; 20] = [
    SporadicInfo { id: "deg24-17", degrees: [2, 4] },
    SporadicInfo { id: "deg24-14", degrees: [2, 4] },
    SporadicInfo { id: "deg24-12", degrees: [2, 4] },
    SporadicInfo { id: "deg24-13", degrees: [2, 4] },
    SporadicInfo { id: "deg24-16", degrees: [2, 4] },
    SporadicInfo { id: "deg24-18", degrees: [2, 4] },
    SporadicInfo { id: "deg24-21", degrees: [2, 4] },
    SporadicInfo { id: "deg24-27", degrees: [2, 4] },
    SporadicInfo { id: "deg24-singleton-adjXX-1", degrees: [2, 4] },
    SporadicInfo { id: "deg24-singleton-adjXX-2", degrees: [2, 4] },
    SporadicInfo { id: "deg24-14a", degrees: [2, 4] },
    SporadicInfo { id: "deg24-24a", degrees: [2, 4] },
    SporadicInfo { id: "deg34-11", degrees: [3, 4] },
    SporadicInfo { id: "deg34-10", degrees: [3, 4] },
    SporadicInfo { id: "deg34-12", degrees: [3, 4] },
    SporadicInfo { id: "deg34-13A", degrees: [3, 4] },
    SporadicInfo { id: "deg34-16", degrees: [3, 4] },
    SporadicInfo { id: "deg34-21", degrees: [3, 4] },
    SporadicInfo { id: "deg34-27", degrees: [3, 4] },
    SporadicInfo { id: "deg34-15", degrees: [3, 4] },
];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    StringFamily { family: String, k: usize, string: String },
    StringExtra { family: String, string: String },
    Table { table: u8, variant: u8, k: usize },
    /// The string graph with a pendant vertex on its singleton.
    PendantOnSingleton { string: String },
    Sporadic { id: String, file: PathBuf },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::StringFamily { family, k, string } => write!(f, "{family} k={k} {string}"),
            Provenance::StringExtra { family, string } => write!(f, "{family} extra {string}"),
            Provenance::Table { table, variant, k } => write!(f, "table {table} variant {variant} k={k}"),
            Provenance::PendantOnSingleton { string } => write!(f, "{string} + pendant on singleton"),
            Provenance::Sporadic { id, file } => write!(f, "sporadic {id} ({})", file.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub graph: Graph,
    pub provenance: Provenance,
    /// Further constructions that produced an isomorphic graph.
    pub aliases: Vec<Provenance>,
    pub order: usize,
    pub degrees: DegreeSet,
    pub canonical: CanonicalForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    /// Sporadic graphs matching the degree filter whose data file is absent.
    /// Their orders are unknown, so they are listed for every order range.
    pub unavailable: Vec<SporadicInfo>,
}

#[derive(Debug, Clone)]
pub struct CatalogQuery {
    pub min_order: usize,
    pub max_order: usize,
    pub degrees: Option<DegreeSet>,
    pub sporadic_dir: Option<PathBuf>,
}

impl CatalogQuery {
    pub fn new(min_order: usize, max_order: usize) -> CatalogQuery {
        CatalogQuery { min_order, max_order, degrees: None, sporadic_dir: None }
    }

    pub fn degrees(mut self, d: &[usize]) -> CatalogQuery {
        self.degrees = Some(DegreeSet::new(d));
        self
    }

    fn wants(&self, order: usize, degrees: &[usize]) -> bool {
        (self.min_order..=self.max_order).contains(&order)
            && self.degrees.as_ref().is_none_or(|d| d.degrees() == degrees)
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("sporadic file {file}: {reason}")]
    Sporadic { file: PathBuf, reason: String },
    #[error("construction {provenance} failed: {reason}")]
    Construction { provenance: String, reason: String },
}

/// The string with a pendant vertex attached to its only singleton.
pub fn pendant_on_singleton(s: &LrString) -> Result<Graph, String> {
    let r = realize(s).map_err(|e| e.to_string())?;
    let &[(_, single)] = r.singleton_of.as_slice() else {
        return Err("string must have exactly one singleton".into());
    };
    let n = r.graph.n();
    let mut edges: Vec<(usize, usize)> = r.graph.edges().collect();
    edges.push((single, n));
    Ok(Graph::new(n + 1, &edges).expect("pendant edge is new"))
}

const PENDANT_BASE: &str = "S1_211XX";

enum Job {
    String(Provenance, LrString),
    Table(TableFamilySpec),
    Pendant,
    Sporadic(&'static str, PathBuf),
}

fn build(job: Job) -> Result<(Provenance, Graph), CatalogError> {
    match job {
        Job::String(p, s) => {
            let g = realize(&s)
                .map_err(|e| CatalogError::Construction { provenance: p.to_string(), reason: e.to_string() })?
                .graph;
            Ok((p, g))
        }
        Job::Table(spec) => {
            let p = Provenance::Table { table: spec.table, variant: spec.variant, k: spec.k };
            let g = table_family(spec)
                .map_err(|e| CatalogError::Construction { provenance: p.to_string(), reason: e.to_string() })?;
            Ok((p, g))
        }
        Job::Pendant => {
            let p = Provenance::PendantOnSingleton { string: PENDANT_BASE.into() };
            let g = pendant_on_singleton(&parse(PENDANT_BASE).unwrap())
                .map_err(|reason| CatalogError::Construction { provenance: p.to_string(), reason })?;
            if g.degree_set() != DegreeSet::new(&[1, 3]) || !is_long_refinement(&g) {
                return Err(CatalogError::Construction {
                    provenance: p.to_string(),
                    reason: "not a degree-{1,3} long-refinement graph".into(),
                });
            }
            Ok((p, g))
        }
        Job::Sporadic(id, file) => {
            let g = load_sporadic(id, &file)?;
            Ok((Provenance::Sporadic { id: id.into(), file }, g))
        }
    }
}

fn load_sporadic(id: &str, file: &Path) -> Result<Graph, CatalogError> {
    let fail = |reason: String| CatalogError::Sporadic { file: file.to_path_buf(), reason };
    let info = SPORADIC.iter().find(|s| s.id == id).expect("known sporadic id");
    let text = std::fs::read_to_string(file).map_err(|e| fail(e.to_string()))?;
    let graphs = parse_graph6_lines(&text).map_err(|(line, e)| fail(format!("line {line}: {e}")))?;
    let [g] = <[Graph; 1]>::try_from(graphs).map_err(|v| fail(format!("expected one graph, found {}", v.len())))?;
    if g.degree_set() != DegreeSet::new(&info.degrees) {
        return Err(fail(format!("degree set {} instead of {}", g.degree_set(), DegreeSet::new(&info.degrees))));
    }
    if !is_long_refinement(&g) {
        return Err(fail("not long-refinement".into()));
    }
    let report = verify_structure(&g);
    if !report.all_passed() {
        let ids: Vec<u8> = report.failures().map(|c| c.id).collect();
        return Err(fail(format!("structure checks {ids:?} failed")));
    }
    Ok(g)
}

/// All classified long-refinement graphs within the query, one entry per
/// isomorphism class, ordered by (order, provenance).
pub fn catalog(q: &CatalogQuery) -> Result<Catalog, CatalogError> {
    let mut jobs: Vec<Job> = Vec::new();
    if q.degrees.as_ref().is_none_or(|d| d.degrees() == [2, 3]) {
        for f in Family::ALL {
            let mut k = 0;
            loop {
                let s = f.expand(k);
                if s.order() > q.max_order {
                    break;
                }
                if s.order() >= q.min_order {
                    jobs.push(Job::String(
                        Provenance::StringFamily { family: f.id().into(), k, string: s.to_string() },
                        s,
                    ));
                }
                if f.is_single() {
                    break;
                }
                k += 1;
            }
            for s in f.extras() {
                if q.wants(s.order(), &[2, 3]) {
                    jobs.push(Job::String(Provenance::StringExtra { family: f.id().into(), string: s.to_string() }, s));
                }
            }
        }
    }
    for table in table_ids() {
        for variant in 1..=2u8 {
            let mut k = table_min_k(table, variant).expect("listed table");
            while let Ok(order) = table_order(table, k) {
                if order > q.max_order {
                    break;
                }
                if q.wants(order, &[3, 4]) {
                    jobs.push(Job::Table(TableFamilySpec { table, variant, k }));
                }
                k += 1;
            }
        }
    }
    let pendant_order = parse(PENDANT_BASE).unwrap().order() + 1;
    if q.wants(pendant_order, &[1, 3]) {
        jobs.push(Job::Pendant);
    }
    let mut unavailable = Vec::new();
    for info in SPORADIC.iter().filter(|s| q.degrees.as_ref().is_none_or(|d| d.degrees() == s.degrees)) {
        match q.sporadic_dir.as_ref().map(|d| d.join(format!("{}.g6", info.id))) {
            Some(file) if file.exists() => jobs.push(Job::Sporadic(info.id, file)),
            _ => unavailable.push(info.clone()),
        }
    }

    let built: Vec<(Provenance, Graph, CanonicalForm)> = jobs
        .into_par_iter()
        .map(|job| {
            let (p, g) = build(job)?;
            let c = canonical_form(&g);
            Ok((p, g, c))
        })
        .collect::<Result<_, CatalogError>>()?;

    let mut built: Vec<_> = built.into_iter().filter(|(_, g, _)| q.wants(g.n(), g.degree_set().degrees())).collect();
    built.sort_by(|a, b| (a.1.n(), &a.0).cmp(&(b.1.n(), &b.0)));
    let mut entries: Vec<CatalogEntry> = Vec::new();
    let mut seen: HashMap<CanonicalForm, usize> = HashMap::new();
    for (provenance, graph, canonical) in built {
        if let Some(&i) = seen.get(&canonical) {
            entries[i].aliases.push(provenance);
            continue;
        }
        seen.insert(canonical.clone(), entries.len());
        entries.push(CatalogEntry {
            order: graph.n(),
            degrees: graph.degree_set(),
            graph,
            provenance,
            aliases: Vec::new(),
            canonical,
        });
    }
    Ok(Catalog { entries, unavailable })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    pub degrees: DegreeSet,
    pub max_order: usize,
    /// Orders in `1..=max_order` without a catalog entry.
    pub gaps: Vec<usize>,
    /// Sporadic graphs of this degree set not available to the check.
    pub unavailable: Vec<SporadicInfo>,
}

pub fn gap_check(max_order: usize, degrees: &[usize]) -> Result<GapReport, CatalogError> {
    let cat = catalog(&CatalogQuery::new(1, max_order).degrees(degrees))?;
    let gaps = (1..=max_order).filter(|&n| !cat.entries.iter().any(|e| e.order == n)).collect();
    Ok(GapReport { degrees: DegreeSet::new(degrees), max_order, gaps, unavailable: cat.unavailable })
}
