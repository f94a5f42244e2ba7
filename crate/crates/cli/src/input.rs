use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::Args;
use lrgraph::graph6::{parse_graph6, parse_graph6_lines};
use lrgraph::strings::{parse, realize, Family};
use lrgraph::Graph;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Budget(String),
    Assertion(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Assertion(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Budget(m) => write!(f, "budget exceeded: {m}"),
            CliError::Assertion(m) => write!(f, "assertion failed: {m}"),
        }
    }
}

pub fn usage(m: impl fmt::Display) -> CliError {
    CliError::Usage(m.to_string())
}

/// A graph source. Exactly one must be given.
#[derive(Args, Debug, Clone)]
pub struct Input {
    /// graph6 text, or `-` to read graph6 lines from stdin
    pub graph: Option<String>,
    /// Inline graph6
    #[arg(long)]
    pub g6: Option<String>,
    /// File of graph6 lines
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Long-refinement string, realized as a graph
    #[arg(long)]
    pub string: Option<String>,
    /// String family id (e.g. even-family-1), expanded at --k and realized
    #[arg(long, requires = "k")]
    pub family: Option<String>,
    /// Family parameter for --family
    #[arg(long)]
    pub k: Option<usize>,
}

/// A labelled graph read from some input.
pub struct Loaded {
    pub label: String,
    pub graph: Graph,
}

impl Input {
    pub fn load(&self) -> Result<Vec<Loaded>, CliError> {
        let given = [self.graph.is_some(), self.g6.is_some(), self.file.is_some(), self.string.is_some(), self.family.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if given != 1 {
            return Err(usage("give exactly one input: a graph6 argument, -, --g6, --file, --string or --family"));
        }
        if let Some(g) = &self.graph {
            return load_operand_text(g);
        }
        if let Some(g) = &self.g6 {
            return inline(g);
        }
        if let Some(p) = &self.file {
            return from_file(p);
        }
        if let Some(s) = &self.string {
            return from_string(s);
        }
        let id = self.family.as_deref().unwrap_or_default();
        let f = Family::from_id(id).map_err(usage)?;
        let k = self.k.unwrap_or(0);
        let s = f.expand(k);
        let r = realize(&s).map_err(|e| usage(format!("{id} k={k}: {e}")))?;
        Ok(vec![Loaded { label: format!("{id} k={k}"), graph: r.graph }])
    }

    pub fn load_one(&self) -> Result<Loaded, CliError> {
        let mut all = self.load()?;
        match all.len() {
            1 => Ok(all.remove(0)),
            0 => Err(usage("input holds no graph")),
            n => Err(usage(format!("expected one graph, input holds {n}"))),
        }
    }
}

fn inline(text: &str) -> Result<Vec<Loaded>, CliError> {
    let g = parse_graph6(text).map_err(|e| usage(format!("graph6: {e}")))?;
    Ok(vec![Loaded { label: text.to_string(), graph: g }])
}

fn lines(text: &str, origin: &str) -> Result<Vec<Loaded>, CliError> {
    let graphs = parse_graph6_lines(text).map_err(|(line, e)| usage(format!("{origin} line {line}: {e}")))?;
    Ok(graphs.into_iter().enumerate().map(|(i, g)| Loaded { label: format!("{origin}:{}", i + 1), graph: g }).collect())
}

fn from_file(p: &Path) -> Result<Vec<Loaded>, CliError> {
    let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    lines(&text, &p.display().to_string())
}

fn from_stdin() -> Result<Vec<Loaded>, CliError> {
    let mut text = String::new();
    std::io::stdin().read_to_string(&mut text).map_err(|e| CliError::Io(format!("stdin: {e}")))?;
    lines(&text, "stdin")
}

fn from_string(text: &str) -> Result<Vec<Loaded>, CliError> {
    let s = parse(text).map_err(|e| usage(format!("string: {e}")))?;
    let r = realize(&s).map_err(|e| usage(format!("{s}: {e}")))?;
    Ok(vec![Loaded { label: s.to_string(), graph: r.graph }])
}

/// A positional operand: `-`, `file:PATH`, `string:TEXT`, `g6:TEXT` or bare graph6.
pub fn load_operand(text: &str) -> Result<Loaded, CliError> {
    let mut all = load_operand_text(text)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        n => Err(usage(format!("operand {text}: expected one graph, found {n}"))),
    }
}

fn load_operand_text(text: &str) -> Result<Vec<Loaded>, CliError> {
    if text == "-" {
        from_stdin()
    } else if let Some(p) = text.strip_prefix("file:") {
        from_file(Path::new(p))
    } else if let Some(s) = text.strip_prefix("string:") {
        from_string(s)
    } else {
        inline(text.strip_prefix("g6:").unwrap_or(text))
    }
}

/// `A..B` (inclusive) or a single order.
#[derive(Debug, Clone, Copy)]
pub struct OrderRange {
    pub lo: usize,
    pub hi: usize,
}

impl std::str::FromStr for OrderRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad order {t:?}: {e}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
            None => (num(s)?, num(s)?),
        };
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        Ok(OrderRange { lo, hi })
    }
}

/// Comma-separated degrees such as `2,3`.
#[derive(Debug, Clone)]
pub struct Degrees(pub Vec<usize>);

impl std::str::FromStr for Degrees {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let d: Result<Vec<usize>, _> = s.split(',').map(|t| t.trim().parse::<usize>()).collect();
        match d {
            Ok(d) if !d.is_empty() => Ok(Degrees(d)),
            Ok(_) => Err("empty degree list".into()),
            Err(e) => Err(format!("bad degree list {s:?}: {e}")),
        }
    }
}
