use serde::Serialize;

use super::EdgeLabelledGraph;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    Metric,
    Ultrametric,
    /// Every labelled pair is at most the length of every path of at most
    /// `l` vertices joining it.
    LMetric(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `d(i,k)` exceeds the sum (or max) of `d(i,j)` and `d(j,k)`.
    /// `labels` lists `(d(i,j), d(j,k), d(i,k))`.
    Triangle { points: (usize, usize, usize), labels: (Rational, Rational, Rational) },
    /// A path whose length is below the label of its endpoints.
    Path { path: Vec<usize>, label: Rational, length: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub ok: bool,
    pub witness: Option<Violation>,
}

impl Validation {
    fn from(witness: Option<Violation>) -> Validation {
        Validation { ok: witness.is_none(), witness }
    }
}

/// Checks `g` against `mode`, returning the lexicographically least violation.
pub fn validate(g: &EdgeLabelledGraph, mode: ValidationMode) -> Result<Validation> {
    match mode {
        ValidationMode::Metric | ValidationMode::Ultrametric => {
            if let Some((i, j)) = g.first_unlabelled() {
                return Err(Error::IncompleteLabelling(i, j));
            }
            let n = g.len();
            let d = |a, b| g.label(a, b).unwrap();
            for i in 0..n {
                for j in 0..n {
                    for k in i + 1..n {
                        if j == i || j == k {
                            continue;
                        }
                        let bound = match mode {
                            ValidationMode::Metric => d(i, j).checked_add(d(j, k))?,
                            _ => d(i, j).max(d(j, k)),
                        };
                        if d(i, k) > bound {
                            return Ok(Validation::from(Some(Violation::Triangle {
                                points: (i, j, k),
                                labels: (d(i, j), d(j, k), d(i, k)),
                            })));
                        }
                    }
                }
            }
            Ok(Validation::from(None))
        }
        ValidationMode::LMetric(l) => {
            if l == 0 {
                return Err(Error::Invalid("l must be positive".into()));
            }
            for (x, y, label) in g.edges() {
                let mut path = vec![x];
                if let Some(v) = short_path_below(g, y, label, l, &mut path, Rational::ZERO)? {
                    return Ok(Validation::from(Some(v)));
                }
            }
            Ok(Validation::from(None))
        }
    }
}

/// Depth-first search over simple paths from the end of `path` to `target`
/// with at most `l` vertices in total, reporting the first one shorter than
/// `label`. Non-simple paths never give a shorter length than a simple one.
fn short_path_below(
    g: &EdgeLabelledGraph,
    target: usize,
    label: Rational,
    l: usize,
    path: &mut Vec<usize>,
    length: Rational,
) -> Result<Option<Violation>> {
    let last = *path.last().unwrap();
    for (next, w) in g.neighbours(last) {
        if path.contains(&next) {
            continue;
        }
        let len = length.checked_add(w)?;
        if next == target {
            if path.len() >= 2 && len < label {
                let mut p = path.clone();
                p.push(next);
                return Ok(Some(Violation::Path { path: p, label, length: len }));
            }
            continue;
        }
        // a further vertex still has to reach `target`
        if path.len() + 2 <= l {
            path.push(next);
            let found = short_path_below(g, target, label, l, path, len)?;
            path.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
    }
    Ok(None)
}
