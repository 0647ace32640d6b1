//! Plain-text graph files.
//!
//! ```text
//! halfedges 6
//! twin: 0 3
//! twin: 1 4
//! twin: 2 5
//! vertex: 0 1 2
//! vertex: 3 4 5
//! length: 0 1/3
//! length: 1 0.25
//! length: 2 2
//! ```
//!
//! `length:` lines name an edge by the smaller of its two half-edges. Values
//! are decimals or fractions `p/q`; both are kept exactly as rationals.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use num_rational::Rational64;
use thiserror::Error;

use crate::ribbon::{MetricRibbonGraph, RibbonError, RibbonGraph};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `halfedges` header")]
    MissingHeader,
    #[error("no length given for edge {0}")]
    MissingLength(usize),
    #[error("length given twice for edge {0}")]
    DuplicateLength(usize),
    #[error("`length: {0}` does not name the smaller half-edge of an edge")]
    NotAnEdge(usize),
    #[error(transparent)]
    Graph(#[from] RibbonError),
}

/// Parses a decimal (`0.125`, `3`, `-1e-2` is rejected) or fraction (`7/3`).
pub fn parse_rational(s: &str) -> Option<Rational64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(Rational64::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i64 = digits.parse().ok()?;
    let denom = 10i64.checked_pow(frac_part.len() as u32)?;
    let r = Rational64::new(numer, denom);
    Some(if neg { -r } else { r })
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_indices(line: usize, rest: &str) -> Result<Vec<usize>, ParseError> {
    rest.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| syntax(line, format!("`{t}` is not a half-edge index")))
        })
        .collect()
}

pub fn parse_graph(text: &str) -> Result<MetricRibbonGraph, ParseError> {
    let mut n_half: Option<usize> = None;
    let mut pairs = Vec::new();
    let mut cycles = Vec::new();
    let mut lengths: Vec<(usize, usize, Rational64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if let Some(rest) = content.strip_prefix("halfedges") {
            let n = rest
                .trim()
                .parse::<usize>()
                .map_err(|_| syntax(line, "expected `halfedges <count>`"))?;
            n_half = Some(n);
        } else if let Some(rest) = content.strip_prefix("twin:") {
            let ix = parse_indices(line, rest)?;
            if ix.len() != 2 {
                return Err(syntax(line, "expected `twin: a b`"));
            }
            pairs.push((ix[0], ix[1]));
        } else if let Some(rest) = content.strip_prefix("vertex:") {
            let ix = parse_indices(line, rest)?;
            if ix.is_empty() {
                return Err(syntax(line, "vertex with no half-edges"));
            }
            cycles.push(ix);
        } else if let Some(rest) = content.strip_prefix("length:") {
            let mut it = rest.split_whitespace();
            let (Some(id), Some(val), None) = (it.next(), it.next(), it.next()) else {
                return Err(syntax(line, "expected `length: edge_id value`"));
            };
            let id = id
                .parse::<usize>()
                .map_err(|_| syntax(line, format!("`{id}` is not an edge id")))?;
            let val = parse_rational(val)
                .ok_or_else(|| syntax(line, format!("`{val}` is not a decimal or fraction")))?;
            lengths.push((line, id, val));
        } else {
            return Err(syntax(line, format!("unrecognised line `{content}`")));
        }
    }

    let n_half = n_half.ok_or(ParseError::MissingHeader)?;
    let graph = RibbonGraph::from_cycles(n_half, &pairs, &cycles)?;
    let mut exact: Vec<Option<Rational64>> = vec![None; graph.n_edges()];
    for (line, id, val) in lengths {
        if id >= graph.n_half_edges() {
            return Err(syntax(line, format!("edge id {id} out of range")));
        }
        if graph.twin(id) < id {
            return Err(ParseError::NotAnEdge(id));
        }
        let e = graph.edge_of(id);
        if exact[e].is_some() {
            return Err(ParseError::DuplicateLength(id));
        }
        exact[e] = Some(val);
    }
    let exact = exact
        .into_iter()
        .enumerate()
        .map(|(e, v)| v.ok_or(ParseError::MissingLength(graph.edges()[e].0)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MetricRibbonGraph::with_exact_lengths(graph, exact)?)
}

/// Writes a graph in the format read by [`parse_graph`]. Exact lengths are
/// written as fractions, floating lengths with full round-trip precision.
pub fn write_graph(g: &MetricRibbonGraph) -> String {
    let rg = g.graph();
    let mut out = String::new();
    writeln!(out, "halfedges {}", rg.n_half_edges()).unwrap();
    for &(a, b) in rg.edges() {
        writeln!(out, "twin: {a} {b}").unwrap();
    }
    for cyc in rg.vertices() {
        let items: Vec<String> = cyc.iter().map(|h| h.to_string()).collect();
        writeln!(out, "vertex: {}", items.join(" ")).unwrap();
    }
    for (e, &(a, _)) in rg.edges().iter().enumerate() {
        match g.exact_lengths() {
            Some(ex) => writeln!(out, "length: {a} {}/{}", ex[e].numer(), ex[e].denom()).unwrap(),
            None => writeln!(out, "length: {a} {:?}", g.edge_length(e)).unwrap(),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA: &str = "halfedges 6
twin: 0 3
twin: 1 4
twin: 2 5
vertex: 0 1 2
vertex: 3 4 5
length: 0 1/3
length: 1 0.25
length: 2 2
";

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("0.25"), Some(Rational64::new(1, 4)));
        assert_eq!(parse_rational("7/3"), Some(Rational64::new(7, 3)));
        assert_eq!(parse_rational("2"), Some(Rational64::from_integer(2)));
        assert_eq!(parse_rational(".5"), Some(Rational64::new(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn parse_and_round_trip() {
        let g = parse_graph(THETA).unwrap();
        assert_eq!(g.graph().topological_type(), (1, 1));
        assert_eq!(g.exact_lengths().unwrap()[1], Rational64::new(1, 4));
        let again = parse_graph(&write_graph(&g)).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_graph("twin: 0 1"), Err(ParseError::MissingHeader)));
        assert!(matches!(
            parse_graph("halfedges 2\ntwin: 0 1\nvertex: 0 1\n"),
            Err(ParseError::MissingLength(0))
        ));
        assert!(matches!(
            parse_graph("halfedges 2\ntwin: 0 1\nvertex: 0 1\nlength: 1 2\n"),
            Err(ParseError::NotAnEdge(1))
        ));
        assert!(matches!(
            parse_graph("halfedges 2\ntwin: 0 1\nvertex: 0 1\nlength: 0 x\n"),
            Err(ParseError::Syntax { line: 4, .. })
        ));
        assert!(matches!(
            parse_graph("halfedges 2\ntwin: 0 1\nvertex: 0 1\nlength: 0 -1\n"),
            Err(ParseError::Graph(RibbonError::NonPositiveLength { .. }))
        ));
        assert!(matches!(
            parse_graph("halfedges 2\ntwin: 0 0\nvertex: 0 1\nlength: 0 1\n"),
            Err(ParseError::Graph(_))
        ));
    }
}
