//! Plain-text graph format: a header line `n d` followed by one `u v` line per
//! edge with `u < v`, sorted lexicographically. Lines starting with `#` are
//! ignored on input.

use std::fmt::Write as _;
use std::io::{self, Write};

use super::RegularGraph;
use crate::error::{Error, Result};

impl RegularGraph {
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(12 * (self.num_edges() + 1));
        let _ = writeln!(out, "{} {}", self.n(), self.d());
        for &(u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_text().as_bytes())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let (n, d) = parse_pair::<usize>(line, header)?;
        let mut edges = Vec::with_capacity(n * d / 2);
        let mut prev: Option<(u32, u32)> = None;
        for (line, l) in lines {
            let (u, v) = parse_pair::<u32>(line, l)?;
            if u >= v {
                return Err(Error::Parse { line, msg: format!("edge '{l}' must satisfy u < v") });
            }
            if prev.is_some_and(|p| p >= (u, v)) {
                return Err(Error::Parse { line, msg: "edges must be strictly sorted".into() });
            }
            prev = Some((u, v));
            edges.push((u, v));
        }
        if edges.len() * 2 != n * d {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected {} edges, found {}", n * d / 2, edges.len()),
            });
        }
        RegularGraph::from_edges(n, d, edges)
    }
}

fn parse_pair<T: std::str::FromStr>(line: usize, l: &str) -> Result<(T, T)> {
    let mut it = l.split_whitespace();
    let parse = |tok: Option<&str>| -> Result<T> {
        tok.and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse { line, msg: format!("expected two integers, got '{l}'") })
    };
    let a = parse(it.next())?;
    let b = parse(it.next())?;
    if it.next().is_some() {
        return Err(Error::Parse { line, msg: format!("trailing tokens in '{l}'") });
    }
    Ok((a, b))
}
