//! graph6 encoding: the upper triangle of the adjacency matrix in
//! column-major order, six bits per printable byte (offset 63).

use thiserror::Error;

use crate::graph::Graph;

const HEADER: &str = ">>graph6<<";
const MAX_N: usize = 68_719_476_735;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("graph6 parse error at byte {offset}: {kind}")]
pub struct Graph6Error {
    pub offset: usize,
    pub kind: Graph6ErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Graph6ErrorKind {
    #[error("empty input")]
    Empty,
    #[error("byte {0:#04x} outside the printable range 63..=126")]
    ByteOutOfRange(u8),
    #[error("input ends inside the vertex count")]
    TruncatedHeader,
    #[error("expected {expected} data bytes for n = {n}, found {found}")]
    BadLength { n: usize, expected: usize, found: usize },
    #[error("trailing garbage after the encoded graph")]
    TrailingGarbage,
}

fn err(offset: usize, kind: Graph6ErrorKind) -> Graph6Error {
    Graph6Error { offset, kind }
}

fn data_len(n: usize) -> usize {
    (n * n.saturating_sub(1) / 2).div_ceil(6)
}

/// Parses one graph6 record. An optional `>>graph6<<` header is accepted;
/// a single trailing newline is tolerated.
pub fn parse_graph6(text: &str) -> Result<Graph, Graph6Error> {
    let mut bytes = text.as_bytes();
    let mut base = 0;
    if let Some(rest) = bytes.strip_prefix(HEADER.as_bytes()) {
        bytes = rest;
        base = HEADER.len();
    }
    if let Some(rest) = bytes.strip_suffix(b"\n") {
        bytes = rest.strip_suffix(b"\r").unwrap_or(rest);
    }
    if bytes.is_empty() {
        return Err(err(base, Graph6ErrorKind::Empty));
    }
    for (i, &b) in bytes.iter().enumerate() {
        if !(63..=126).contains(&b) {
            // a stray newline followed by more data is garbage, not a bad byte
            let kind = if b == b'\n' { Graph6ErrorKind::TrailingGarbage } else { Graph6ErrorKind::ByteOutOfRange(b) };
            return Err(err(base + i, kind));
        }
    }
    let word = |from: usize, count: usize| -> Result<usize, Graph6Error> {
        if bytes.len() < from + count {
            return Err(err(base + bytes.len(), Graph6ErrorKind::TruncatedHeader));
        }
        Ok(bytes[from..from + count].iter().fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize))
    };
    let (n, start) = if bytes[0] != 126 {
        ((bytes[0] - 63) as usize, 1)
    } else if bytes.get(1) != Some(&126) {
        (word(1, 3)?, 4)
    } else {
        (word(2, 6)?, 8)
    };
    let expected = data_len(n);
    let found = bytes.len() - start;
    if found > expected {
        return Err(err(base + start + expected, Graph6ErrorKind::TrailingGarbage));
    }
    if found < expected {
        return Err(err(base + bytes.len(), Graph6ErrorKind::BadLength { n, expected, found }));
    }
    let data = &bytes[start..];
    let mut adj = vec![Vec::new(); n];
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = data[k / 6] - 63;
            if byte >> (5 - k % 6) & 1 == 1 {
                adj[i].push(j);
                adj[j].push(i);
            }
            k += 1;
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Ok(Graph::from_sorted_adjacency(adj))
}

/// Writes the shortest graph6 encoding of `g` (no header, no newline).
pub fn write_graph6(g: &Graph) -> String {
    let n = g.n();
    assert!(n <= MAX_N, "graph too large for graph6");
    let mut out: Vec<u8> = Vec::with_capacity(8 + data_len(n));
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        out.extend((0..3).rev().map(|s| ((n >> (6 * s)) & 63) as u8 + 63));
    } else {
        out.extend([126, 126]);
        out.extend((0..6).rev().map(|s| ((n >> (6 * s)) & 63) as u8 + 63));
    }
    let mut acc = 0u8;
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            k += 1;
            if k == 6 {
                out.push(acc + 63);
                acc = 0;
                k = 0;
            }
        }
    }
    if k > 0 {
        out.push((acc << (6 - k)) + 63);
    }
    String::from_utf8(out).expect("graph6 output is ASCII")
}

/// Parses a multi-line graph6 document, skipping blank lines.
/// Errors carry the 1-based line number.
pub fn parse_graph6_lines(text: &str) -> Result<Vec<Graph>, (usize, Graph6Error)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_graph6(l.trim_end()).map_err(|e| (i + 1, e)))
        .collect()
}
