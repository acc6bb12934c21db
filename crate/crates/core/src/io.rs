//! Plain-text instance files.
//!
//! ```text
//! # optional comments
//! n m
//! i j delta [g]
//! ```
//!
//! One edge per line, offsets in radians written with 17 significant digits
//! so that they read back bit-exactly. The optional last column `g` is the
//! ground-truth good flag (0 or 1); it must be present on every edge line or
//! on none. Text after `#` is ignored.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::OffsetGraph;

pub fn write_instance(
    mut out: impl Write,
    graph: &OffsetGraph,
    good: Option<&[bool]>,
) -> std::io::Result<()> {
    if let Some(flags) = good {
        assert_eq!(flags.len(), graph.m(), "one good flag per edge");
    }
    writeln!(out, "{} {}", graph.n(), graph.m())?;
    for (k, e) in graph.edges().iter().enumerate() {
        match good {
            Some(flags) => writeln!(out, "{} {} {:.16e} {}", e.i, e.j, e.delta, u8::from(flags[k]))?,
            None => writeln!(out, "{} {} {:.16e}", e.i, e.j, e.delta)?,
        }
    }
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} {tok:?}")))
}

/// Reads an instance; returns the graph and the good flags if the file has them.
pub fn read_instance(input: impl BufRead) -> Result<(OffsetGraph, Option<Vec<bool>>)> {
    let mut header: Option<(usize, usize)> = None;
    let mut triples = Vec::new();
    let mut flags: Vec<bool> = Vec::new();
    let mut with_flags: Option<bool> = None;

    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        if header.is_none() {
            let n = field(toks.next(), lineno, "vertex count")?;
            let m = field(toks.next(), lineno, "edge count")?;
            if toks.next().is_some() {
                return Err(parse_err(lineno, "header must be `n m`"));
            }
            header = Some((n, m));
            continue;
        }
        let i: usize = field(toks.next(), lineno, "vertex")?;
        let j: usize = field(toks.next(), lineno, "vertex")?;
        let delta: f64 = field(toks.next(), lineno, "offset")?;
        let flag = match toks.next() {
            None => None,
            Some("0") => Some(false),
            Some("1") => Some(true),
            Some(other) => return Err(parse_err(lineno, format!("good flag must be 0 or 1, got {other:?}"))),
        };
        if toks.next().is_some() {
            return Err(parse_err(lineno, "too many columns"));
        }
        match (with_flags, flag) {
            (None, f) => with_flags = Some(f.is_some()),
            (Some(true), None) | (Some(false), Some(_)) => {
                return Err(parse_err(lineno, "good flag present on some edges only"))
            }
            _ => {}
        }
        if let Some(f) = flag {
            flags.push(f);
        }
        triples.push((i, j, delta));
    }

    let (n, m) = header.ok_or_else(|| parse_err(0, "missing header"))?;
    if triples.len() != m {
        return Err(parse_err(0, format!("header promises {m} edges, found {}", triples.len())));
    }
    let graph = OffsetGraph::new(n, triples)?;
    Ok((graph, with_flags.unwrap_or(false).then_some(flags)))
}
