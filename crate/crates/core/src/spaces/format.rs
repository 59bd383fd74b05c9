//! Text and JSON renderings of spaces and edge-labelled graphs.
//!
//! ```text
//! # a path on three points
//! points: 3
//! 0 1 2
//! 1 0 1
//! 2 1 0
//! ```
//!
//! Graphs write `?` for an unlabelled pair. The JSON form carries the same
//! tokens: `{"points": 3, "rows": [["0","1","2"], ...]}`.

use serde::{Deserialize, Serialize};

use super::{EdgeLabelledGraph, FiniteMetricSpace};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub points: usize,
    pub rows: Vec<Vec<String>>,
}

fn parse_cells(text: &str) -> Result<Vec<Vec<Option<Rational>>>> {
    let mut lines = text.lines().map(|l| l.split('#').next().unwrap().trim()).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("missing `points:` header".into()))?;
    let n: usize = header
        .strip_prefix("points:")
        .ok_or_else(|| Error::Parse(format!("expected `points: <n>`, found {header:?}")))?
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad point count in {header:?}")))?;
    let mut rows = Vec::with_capacity(n);
    for line in lines {
        let row = line
            .split_whitespace()
            .map(|tok| if tok == "?" { Ok(None) } else { tok.parse().map(Some) })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(Error::Parse(format!("row {} has {} entries, expected {n}", rows.len(), row.len())));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::Parse(format!("found {} rows, expected {n}", rows.len())));
    }
    Ok(rows)
}

pub fn parse_graph(text: &str) -> Result<EdgeLabelledGraph> {
    EdgeLabelledGraph::from_rows(parse_cells(text)?)
}

pub fn parse_space(text: &str) -> Result<FiniteMetricSpace> {
    let rows = parse_cells(text)?;
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.into_iter()
                .enumerate()
                .map(|(j, v)| v.ok_or(Error::IncompleteLabelling(i.min(j), i.max(j))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteMetricSpace::new(rows)
}

fn render(n: usize, cell: impl Fn(usize, usize) -> String) -> String {
    let mut out = format!("points: {n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| cell(i, j)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn graph_cell(g: &EdgeLabelledGraph, i: usize, j: usize) -> String {
    if i == j {
        "0".into()
    } else {
        g.label(i, j).map_or("?".into(), |v| v.to_string())
    }
}

pub fn space_to_text(x: &FiniteMetricSpace) -> String {
    render(x.len(), |i, j| x.dist(i, j).to_string())
}

pub fn graph_to_text(g: &EdgeLabelledGraph) -> String {
    render(g.len(), |i, j| graph_cell(g, i, j))
}

pub fn space_to_json(x: &FiniteMetricSpace) -> MatrixJson {
    let n = x.len();
    MatrixJson { points: n, rows: (0..n).map(|i| (0..n).map(|j| x.dist(i, j).to_string()).collect()).collect() }
}

pub fn graph_to_json(g: &EdgeLabelledGraph) -> MatrixJson {
    let n = g.len();
    MatrixJson { points: n, rows: (0..n).map(|i| (0..n).map(|j| graph_cell(g, i, j)).collect()).collect() }
}

/// Converts the JSON form back to the text form, token for token.
pub fn json_to_text(m: &MatrixJson) -> String {
    render(m.points, |i, j| m.rows[i][j].clone())
}
