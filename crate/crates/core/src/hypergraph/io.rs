//! Text and JSON hypergraph formats.
//!
//! Text: one edge per line, whitespace-separated 1-based vertices, `#`
//! starts a comment. The writer emits a `# n=<n> r=<r>` header, which the
//! reader honours so isolated vertices and empty hypergraphs survive a
//! round trip; without it `n` is the largest vertex and `r` the first edge
//! length. JSON: `{"n":…,"r":…,"edges":[[…],…]}`. Both writers emit edges in
//! colex order.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Edge, Hypergraph, SetFamily};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct RawHypergraph {
    n: usize,
    r: usize,
    edges: Vec<Vec<u32>>,
}

impl Serialize for Hypergraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawHypergraph {
            n: self.n,
            r: self.r,
            edges: self.edges.iter().map(|e| e.0.clone()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hypergraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawHypergraph::deserialize(d)?;
        Hypergraph::new(raw.n, raw.r, raw.edges).map_err(serde::de::Error::custom)
    }
}

impl Hypergraph {
    pub fn to_text(&self) -> String {
        let mut out = format!("# n={} r={}\n", self.n, self.r);
        for e in &self.edges {
            write_edge(&mut out, e);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("hypergraph serializes")
    }
}

impl SetFamily {
    pub fn to_text(&self) -> String {
        let mut out = format!("# k={}\n", self.k);
        for e in &self.members {
            write_edge(&mut out, e);
        }
        out
    }
}

fn write_edge(out: &mut String, e: &Edge) {
    let mut first = true;
    for v in &e.0 {
        if !first {
            out.push(' ');
        }
        first = false;
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

fn parse_header(comment: &str) -> Option<(usize, usize)> {
    let mut n = None;
    let mut r = None;
    for tok in comment.split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            n = v.parse().ok();
        } else if let Some(v) = tok.strip_prefix("r=") {
            r = v.parse().ok();
        }
    }
    Some((n?, r?))
}

pub fn parse_text(input: &str) -> Result<Hypergraph> {
    let mut header = None;
    let mut edges: Vec<(usize, Vec<u32>)> = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let (body, comment) = match line.find('#') {
            Some(i) => (&line[..i], Some(&line[i + 1..])),
            None => (line, None),
        };
        if header.is_none() && edges.is_empty() && body.trim().is_empty() {
            if let Some(h) = comment.and_then(parse_header) {
                header = Some(h);
                continue;
            }
        }
        if body.trim().is_empty() {
            continue;
        }
        let edge = body
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u32>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("not a vertex index: {tok:?}"),
                })
            })
            .collect::<Result<Vec<u32>>>()?;
        edges.push((lineno, edge));
    }
    let (n, r) = match header {
        Some(h) => h,
        None => {
            let r = edges.first().map(|(_, e)| e.len()).ok_or(Error::Parse {
                line: 0,
                message: "no edges and no `# n=.. r=..` header".into(),
            })?;
            let n = edges
                .iter()
                .flat_map(|(_, e)| e.iter().copied())
                .max()
                .unwrap_or(0) as usize;
            (n, r)
        }
    };
    for (lineno, e) in &edges {
        if e.len() != r {
            return Err(Error::Parse {
                line: *lineno,
                message: format!("edge has {} vertices, expected {r}", e.len()),
            });
        }
    }
    Hypergraph::new(n, r, edges.into_iter().map(|(_, e)| e)).map_err(|err| Error::Parse {
        line: 0,
        message: err.to_string(),
    })
}

pub fn parse_json(input: &str) -> Result<Hypergraph> {
    Ok(serde_json::from_str(input)?)
}

/// Accepts either format, dispatching on the first non-blank character.
pub fn parse_hypergraph(input: &str) -> Result<Hypergraph> {
    if input.trim_start().starts_with('{') {
        parse_json(input)
    } else {
        parse_text(input)
    }
}
