//! Plain-text graph exchange format.
//!
//! First non-blank line declares the node count as `p=<int>`; every further
//! non-blank line is one edge, `i -> j` (directed) or `i -- j` (undirected).
//! Blank lines are ignored. Output is ASCII with edges in sorted order.

use crate::error::{Error, Result};
use crate::graph::{Dag, Pdag};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::GraphParse { line, msg: msg.into() }
}

fn parse_node(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| parse_err(line, format!("expected node index, got `{tok}`")))
}

/// Parsed edge lists: (p, directed i->j, undirected i--j as written).
fn parse_edges(text: &str) -> Result<(usize, Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    let mut p = None;
    let mut directed = Vec::new();
    let mut undirected = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if p.is_none() {
            let rest = trimmed
                .strip_prefix("p=")
                .ok_or_else(|| parse_err(line, "expected header `p=<int>`"))?;
            let n = rest
                .trim()
                .parse::<usize>()
                .map_err(|_| parse_err(line, format!("invalid node count `{rest}`")))?;
            p = Some(n);
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(line, format!("expected `i -> j` or `i -- j`, got `{trimmed}`")));
        }
        let i = parse_node(toks[0], line)?;
        let j = parse_node(toks[2], line)?;
        match toks[1] {
            "->" => directed.push((i, j)),
            "--" => undirected.push((i, j)),
            other => return Err(parse_err(line, format!("unknown edge marker `{other}`"))),
        }
    }
    match p {
        Some(p) => Ok((p, directed, undirected)),
        None => Err(parse_err(0, "empty graph text, missing `p=<int>` header")),
    }
}

/// Parse a fully directed graph; undirected edges are rejected.
pub fn parse_dag(text: &str) -> Result<Dag> {
    let (p, directed, undirected) = parse_edges(text)?;
    if let Some(&(i, j)) = undirected.first() {
        return Err(parse_err(0, format!("undirected edge {i} -- {j} not allowed in a DAG")));
    }
    Dag::from_edges(p, &directed)
}

/// Parse a partially directed graph with both edge kinds.
pub fn parse_pdag(text: &str) -> Result<Pdag> {
    let (p, directed, undirected) = parse_edges(text)?;
    Pdag::from_parts(p, &directed, &undirected)
}

pub fn serialize_dag(g: &Dag) -> String {
    let mut out = format!("p={}\n", g.p());
    for (i, j) in g.edges() {
        out.push_str(&format!("{i} -> {j}\n"));
    }
    out
}

pub fn serialize_pdag(c: &Pdag) -> String {
    let mut out = format!("p={}\n", c.p());
    for (i, j) in c.directed_edges() {
        out.push_str(&format!("{i} -> {j}\n"));
    }
    for (i, j) in c.undirected_edges() {
        out.push_str(&format!("{i} -- {j}\n"));
    }
    out
}
