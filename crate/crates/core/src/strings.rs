//! Long-refinement strings for degree-{2,3} graphs.
//!
//! A string has one letter per pair of `π^p` in splitting order: `S` for
//! `P_1`, `X` for `P_a` and `P_b`, and `0`/`1` for pairs of degree 2/3.
//! A subscript 2 marks a pair with an attached singleton.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analyze::{pair_phase, verify_trace, StructureReport};
use crate::graph::{DegreeSet, Graph};
use crate::refine::run_colour_refinement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    S,
    X,
    Zero,
    One,
}

impl Letter {
    fn as_char(self) -> char {
        match self {
            Letter::S => 'S',
            Letter::X => 'X',
            Letter::Zero => '0',
            Letter::One => '1',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub letter: Letter,
    pub singleton: bool,
}

/// A validated long-refinement string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LrString {
    tokens: Vec<Token>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StringError {
    #[error("unknown token {found:?} at position {position}")]
    UnknownToken { position: usize, found: char },
    #[error("S must be the first token (found at position {position})")]
    SNotFirst { position: usize },
    #[error("S cannot carry a subscript (position {position})")]
    SubscriptOnS { position: usize },
    #[error("expected exactly two X tokens, found {count}")]
    WrongXCount { count: usize },
    #[error("at most one subscript-2 token allowed; second one at position {position}")]
    MultipleSubscripts { position: usize },
    #[error("a string needs at least 4 tokens, found {len}")]
    TooShort { len: usize },
}

impl StringError {
    /// Token position the error refers to, when there is one.
    pub fn position(&self) -> Option<usize> {
        match *self {
            StringError::UnknownToken { position, .. }
            | StringError::SNotFirst { position }
            | StringError::SubscriptOnS { position }
            | StringError::MultipleSubscripts { position } => Some(position),
            StringError::WrongXCount { .. } | StringError::TooShort { .. } => None,
        }
    }
}

impl LrString {
    pub fn from_tokens(tokens: Vec<Token>) -> Result<LrString, StringError> {
        let mut subscripts = 0;
        for (i, t) in tokens.iter().enumerate() {
            if (t.letter == Letter::S) != (i == 0) {
                let position = if i == 0 { tokens.iter().position(|t| t.letter == Letter::S).unwrap_or(0) } else { i };
                return Err(StringError::SNotFirst { position });
            }
            if t.letter == Letter::S && t.singleton {
                return Err(StringError::SubscriptOnS { position: i });
            }
            if t.singleton {
                subscripts += 1;
                if subscripts > 1 {
                    return Err(StringError::MultipleSubscripts { position: i });
                }
            }
        }
        let count = tokens.iter().filter(|t| t.letter == Letter::X).count();
        if count != 2 {
            return Err(StringError::WrongXCount { count });
        }
        if tokens.len() < 4 {
            return Err(StringError::TooShort { len: tokens.len() });
        }
        Ok(LrString { tokens })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn singleton_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.singleton).count()
    }

    /// Order of the realized graph.
    pub fn order(&self) -> usize {
        2 * self.len() + self.singleton_count()
    }

    /// 1-based positions of the two X tokens.
    pub fn x_positions(&self) -> (usize, usize) {
        let mut it = self.tokens.iter().enumerate().filter(|(_, t)| t.letter == Letter::X).map(|(i, _)| i + 1);
        (it.next().unwrap(), it.next().unwrap())
    }

    /// Rendering with a Unicode subscript, e.g. `S1₂11XX`.
    pub fn to_unicode(&self) -> String {
        self.tokens.iter().map(|t| format!("{}{}", t.letter.as_char(), if t.singleton { "₂" } else { "" })).collect()
    }
}

impl fmt::Display for LrString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tokens {
            write!(f, "{}", t.letter.as_char())?;
            if t.singleton {
                write!(f, "_2")?;
            }
        }
        Ok(())
    }
}

/// Accepts `_2`, `₂` or a bare `2` after a letter, with optional whitespace
/// between tokens (so `0 2` reads as `0_2`).
pub fn parse(text: &str) -> Result<LrString, StringError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens: Vec<Token> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let position = tokens.len();
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let subscript_len = match (c, chars.get(i + 1)) {
            ('_', Some('2')) => 2,
            ('₂', _) | ('2', _) => 1,
            _ => 0,
        };
        if subscript_len > 0 {
            match tokens.last_mut() {
                Some(t) if !t.singleton => t.singleton = true,
                _ => return Err(StringError::UnknownToken { position, found: c }),
            }
            i += subscript_len;
            continue;
        }
        let letter = match c {
            'S' => Letter::S,
            'X' => Letter::X,
            '0' => Letter::Zero,
            '1' => Letter::One,
            _ => return Err(StringError::UnknownToken { position, found: c }),
        };
        tokens.push(Token { letter, singleton: false });
        i += 1;
    }
    LrString::from_tokens(tokens)
}

impl FromStr for LrString {
    type Err = StringError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// The string families of the degree-{2,3} classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Even1,
    Even2,
    Even3,
    Even4,
    Even5,
    Even6,
    Odd1,
    Odd2,
    Odd3,
    Odd4,
    Odd5,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown family id {0:?}")]
pub struct UnknownFamily(pub String);

impl Family {
    pub const ALL: [Family; 11] = [
        Family::Even1,
        Family::Even2,
        Family::Even3,
        Family::Even4,
        Family::Even5,
        Family::Even6,
        Family::Odd1,
        Family::Odd2,
        Family::Odd3,
        Family::Odd4,
        Family::Odd5,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Family::Even1 => "even-family-1",
            Family::Even2 => "even-family-2",
            Family::Even3 => "even-family-3",
            Family::Even4 => "even-family-4",
            Family::Even5 => "even-family-5",
            Family::Even6 => "even-family-6",
            Family::Odd1 => "odd-family-1",
            Family::Odd2 => "odd-family-2",
            Family::Odd3 => "odd-family-3",
            Family::Odd4 => "odd-family-4",
            Family::Odd5 => "odd-family-5",
        }
    }

    pub fn from_id(id: &str) -> Result<Family, UnknownFamily> {
        Family::ALL.into_iter().find(|f| f.id() == id).ok_or_else(|| UnknownFamily(id.to_string()))
    }

    pub fn is_even(self) -> bool {
        (self as usize) < 6
    }

    /// Pattern with `{k}` marking the repeated blocks; single-member families ignore `k`.
    pub fn pattern(self) -> &'static str {
        match self {
            Family::Even1 => "S011XX",
            Family::Even2 => "S(1)^k00(1)^kX1X(1)^k0",
            Family::Even3 => "S(1)^k1100(1)^kXX(1)^k0",
            Family::Even4 => "S(1)^k001(1)^kXX(1)^k10",
            Family::Even5 => "S011(011)^k00(110)^kXX(011)^k0",
            Family::Even6 => "S(011)^k00(110)^k1X0X1(011)^k0",
            Family::Odd1 => "S1_211XX",
            Family::Odd2 => "S(1)^k101(1)^kX1X(1)^k1_2",
            Family::Odd3 => "S11(1)^k101(1)^kXX(1)^k1_2",
            Family::Odd4 => "S(1)^k0(1)^k1XX(1)^k1_2",
            Family::Odd5 => "S(011)^k00(110)^kX1_2X(011)^k0",
        }
    }

    /// True when the family is a single string independent of `k`.
    pub fn is_single(self) -> bool {
        matches!(self, Family::Even1 | Family::Odd1)
    }

    /// The member with repetition parameter `k`.
    pub fn expand(self, k: usize) -> LrString {
        let mut out = String::new();
        let mut rest = self.pattern();
        while let Some(open) = rest.find('(') {
            out.push_str(&rest[..open]);
            let close = open + rest[open..].find(")^k").expect("pattern blocks end in )^k");
            out.push_str(&rest[open + 1..close].repeat(k));
            rest = &rest[close + 3..];
        }
        out.push_str(rest);
        parse(&out).expect("family patterns expand to valid strings")
    }

    /// Members listed alongside the family that do not follow its pattern.
    pub fn extras(self) -> Vec<LrString> {
        let list: &[&str] = match self {
            Family::Odd2 => &["S0X1X_2"],
            Family::Odd3 => &["S110XX_2"],
            _ => &[],
        };
        list.iter().map(|s| parse(s).expect("extra members are valid strings")).collect()
    }

    /// Order of `expand(k)`.
    pub fn order(self, k: usize) -> usize {
        self.expand(k).order()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = UnknownFamily;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::from_id(s)
    }
}

/// A string's graph together with the vertex labels of its pairs and singletons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizedGraph {
    pub graph: Graph,
    /// `pair_of[i]` is the pair of token `i` (0-based).
    pub pair_of: Vec<[usize; 2]>,
    /// `(token index, singleton vertex)` for each subscript token.
    pub singleton_of: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("pair {position} has degrees {found:?}, cannot reach {wanted} with the internal edge")]
    DegreeResidual { position: usize, wanted: usize, found: [usize; 2] },
    #[error("string does not realize a long-refinement graph ({iterations} iterations on {n} vertices)")]
    NotLongRefinement { n: usize, iterations: usize },
    #[error("realized degree set is {0}, expected {{2,3}}")]
    DegreeSet(DegreeSet),
    #[error("structure checks failed: {0:?}")]
    Structure(Vec<u8>),
    #[error("pair phase puts a, b at {found:?}, string has X at {expected:?}")]
    XPositions { expected: (usize, usize), found: (usize, usize) },
}

/// Builds the graph of `s` without checking that it is long-refinement.
///
/// Pair `i` is `{2i, 2i+1}`; singletons follow the pairs. Consecutive pairs
/// get the parallel matching, `P_1` is joined to `P_a` and `P_b`, each
/// singleton to both vertices of its pair, and a pair short of its letter's
/// degree by one on both vertices gets its internal edge. When the two X
/// pairs end up one apart in degree, the lower one gets its internal edge.
pub fn construct(s: &LrString) -> Result<RealizedGraph, RealizeError> {
    let t = s.tokens();
    let np = t.len();
    let pair_of: Vec<[usize; 2]> = (0..np).map(|i| [2 * i, 2 * i + 1]).collect();
    let mut singleton_of = Vec::new();
    let mut next = 2 * np;
    for (i, tok) in t.iter().enumerate() {
        if tok.singleton {
            singleton_of.push((i, next));
            next += 1;
        }
    }
    let n = next;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 1..np {
        edges.push((2 * i - 2, 2 * i));
        edges.push((2 * i - 1, 2 * i + 1));
    }
    let (a, b) = s.x_positions();
    let (pa, pb) = (pair_of[a - 1], pair_of[b - 1]);
    edges.extend([(0, pa[0]), (0, pa[1]), (1, pb[0]), (1, pb[1])]);
    for &(i, v) in &singleton_of {
        edges.extend([(pair_of[i][0], v), (pair_of[i][1], v)]);
    }
    let mut deg = vec![0usize; n];
    for &(u, v) in &edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    for (i, tok) in t.iter().enumerate() {
        let wanted = match tok.letter {
            Letter::Zero => 2,
            Letter::One => 3,
            _ => continue,
        };
        let [u, v] = pair_of[i];
        if deg[u] + 1 == wanted && deg[v] + 1 == wanted {
            edges.push((u, v));
            deg[u] += 1;
            deg[v] += 1;
        } else if deg[u] != wanted || deg[v] != wanted {
            return Err(RealizeError::DegreeResidual { position: i + 1, wanted, found: [deg[u], deg[v]] });
        }
    }
    let (da, db) = (deg[pa[0]], deg[pb[0]]);
    if da + 1 == db {
        edges.push((pa[0], pa[1]));
    } else if db + 1 == da {
        edges.push((pb[0], pb[1]));
    }
    let graph = Graph::new(n, &edges).expect("construction never repeats an edge");
    Ok(RealizedGraph { graph, pair_of, singleton_of })
}

/// [`construct`] followed by the long-refinement check, the degree check,
/// the structure report and the position of the X pairs in the pair phase.
pub fn realize(s: &LrString) -> Result<RealizedGraph, RealizeError> {
    let r = construct(s)?;
    validate(s, &r).map(|_| r)
}

/// As [`realize`], also returning the structure report.
pub fn realize_with_report(s: &LrString) -> Result<(RealizedGraph, StructureReport), RealizeError> {
    let r = construct(s)?;
    let report = validate(s, &r)?;
    Ok((r, report))
}

fn validate(s: &LrString, r: &RealizedGraph) -> Result<StructureReport, RealizeError> {
    let g = &r.graph;
    let trace = run_colour_refinement(g);
    if trace.iteration_number + 1 != g.n() {
        return Err(RealizeError::NotLongRefinement { n: g.n(), iterations: trace.iteration_number });
    }
    let ds = g.degree_set();
    if ds != DegreeSet::new(&[2, 3]) {
        return Err(RealizeError::DegreeSet(ds));
    }
    let report = verify_trace(g, &trace);
    if !report.all_passed() {
        return Err(RealizeError::Structure(report.failures().map(|c| c.id).collect()));
    }
    let pp = report.pair_phase.as_ref().expect("passing report has a pair phase");
    let (xa, xb) = s.x_positions();
    let at_x = |x: usize| pp.position_of(r.pair_of[x - 1][0]) == Some(x);
    if (pp.a, pp.b) != (xa, xb) || !at_x(xa) || !at_x(xb) {
        return Err(RealizeError::XPositions { expected: (xa, xb), found: (pp.a, pp.b) });
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("not long-refinement ({iterations} iterations on {n} vertices)")]
    NotLongRefinement { n: usize, iterations: usize },
    #[error("degree set is {0}, expected {{2,3}}")]
    DegreeSet(DegreeSet),
    #[error("pi^p has {0} singletons, at most one allowed")]
    TooManySingletons(usize),
    #[error("pair phase: {0}")]
    PairPhase(String),
    #[error("pair {position} has vertices of different degrees")]
    UnevenPair { position: usize },
    #[error("resulting letters do not form a valid string: {0}")]
    Invalid(StringError),
}

/// Reads the long-refinement string off a degree-{2,3} long-refinement graph.
pub fn extract_string(g: &Graph) -> Result<LrString, ExtractError> {
    let trace = run_colour_refinement(g);
    if g.n() == 0 || trace.iteration_number + 1 != g.n() {
        return Err(ExtractError::NotLongRefinement { n: g.n(), iterations: trace.iteration_number });
    }
    let ds = g.degree_set();
    if ds != DegreeSet::new(&[2, 3]) {
        return Err(ExtractError::DegreeSet(ds));
    }
    let pp = pair_phase(&trace, g).map_err(|e| ExtractError::PairPhase(e.to_string()))?;
    if pp.singletons.len() > 1 {
        return Err(ExtractError::TooManySingletons(pp.singletons.len()));
    }
    let tokens = (1..=pp.n_p)
        .map(|i| {
            let [u, v] = pp.pair(i);
            if g.degree(u) != g.degree(v) {
                return Err(ExtractError::UnevenPair { position: i });
            }
            let singleton = pp.singletons.iter().any(|&s| g.has_edge(u, s) || g.has_edge(v, s));
            let letter = if i == 1 {
                Letter::S
            } else if i == pp.a || i == pp.b {
                Letter::X
            } else if g.degree(u) == 2 {
                Letter::Zero
            } else {
                Letter::One
            };
            Ok(Token { letter, singleton })
        })
        .collect::<Result<Vec<_>, _>>()?;
    LrString::from_tokens(tokens).map_err(ExtractError::Invalid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let s = parse("S1_211XX").unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(s.order(), 13);
        assert!(s.tokens()[1].singleton);
        assert_eq!(parse("S1₂11XX").unwrap(), s);
        assert_eq!(parse("S1211XX").unwrap(), s);
        assert_eq!(parse("S1 2 11XX").unwrap(), s);
        assert_eq!(s.to_string(), "S1_211XX");
        assert_eq!(s.to_unicode(), "S1₂11XX");
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse("XXS").unwrap_err(), StringError::SNotFirst { position: 2 });
        assert_eq!(parse("S0XXX").unwrap_err(), StringError::WrongXCount { count: 3 });
        assert_eq!(parse("S0_2X1_2X").unwrap_err(), StringError::MultipleSubscripts { position: 3 });
        assert_eq!(parse("S0aXX").unwrap_err(), StringError::UnknownToken { position: 2, found: 'a' });
        assert_eq!(parse("SXX").unwrap_err(), StringError::TooShort { len: 3 });
        assert_eq!(parse("S_2XX0").unwrap_err(), StringError::SubscriptOnS { position: 0 });
        assert_eq!(parse("S0_2_2XX").unwrap_err().position(), Some(2));
    }

    #[test]
    fn expansions() {
        assert_eq!(Family::Even2.expand(0).to_string(), "S00X1X0");
        assert_eq!(Family::Even5.expand(0).to_string(), "S01100XX0");
        assert_eq!(Family::Odd4.expand(1).to_string(), "S1011XX11_2");
        assert_eq!(Family::Odd4.expand(0).to_string(), "S01XX1_2");
        assert_eq!(Family::Even1.expand(3).to_string(), "S011XX");
        assert_eq!(Family::from_id("odd-family-5").unwrap(), Family::Odd5);
        assert!(Family::from_id("odd-family-6").is_err());
    }

    #[test]
    fn small_realizations() {
        let r = realize(&parse("S011XX").unwrap()).unwrap();
        assert_eq!(r.graph.n(), 12);
        assert_eq!(extract_string(&r.graph).unwrap().to_string(), "S011XX");
        assert!(matches!(realize(&parse("S000XX").unwrap()), Err(RealizeError::NotLongRefinement { .. })));
    }
}
