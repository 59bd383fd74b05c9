use super::{EdgeLabelledGraph, FiniteMetricSpace};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompletionMode {
    /// Shortest-path length, truncated at `cap` when one is given.
    Sum { cap: Option<Rational> },
    /// Least possible largest label along a path.
    Max,
}

/// Extends the labelling of a connected graph to a metric.
///
/// Labels are positive, so the infimum over all paths is attained on a
/// simple path and an all-pairs relaxation computes it exactly. The result
/// agrees with every existing label; if some label exceeds the best path
/// between its endpoints the graph is not metric (resp. ultrametric) and
/// the first such pair is reported.
pub fn complete(g: &EdgeLabelledGraph, mode: CompletionMode) -> Result<FiniteMetricSpace> {
    let n = g.len();
    if let CompletionMode::Sum { cap: Some(cap) } = mode {
        if let Some((_, _, label)) = g.edges().into_iter().find(|e| e.2 > cap) {
            return Err(Error::CapBelowLabel { cap, label });
        }
    }
    let mut best: Vec<Option<Rational>> =
        (0..n * n).map(|k| if k / n == k % n { Some(Rational::ZERO) } else { g.label(k / n, k % n) }).collect();
    for m in 0..n {
        for i in 0..n {
            let Some(a) = best[i * n + m] else { continue };
            for j in 0..n {
                let Some(b) = best[m * n + j] else { continue };
                let via = match mode {
                    CompletionMode::Sum { .. } => a.checked_add(b)?,
                    CompletionMode::Max => a.max(b),
                };
                if best[i * n + j].is_none_or(|cur| via < cur) {
                    best[i * n + j] = Some(via);
                }
            }
        }
    }
    let mut d = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let Some(mut v) = best[i * n + j] else {
                return Err(Error::Disconnected(i.min(j), i.max(j)));
            };
            if let CompletionMode::Sum { cap: Some(cap) } = mode {
                v = v.min(cap);
            }
            d.push(v);
        }
    }
    for (i, j, label) in g.edges() {
        if d[i * n + j] != label {
            return Err(Error::NotMetric(format!(
                "label {label} on ({i},{j}) exceeds the best path value {}",
                d[i * n + j]
            )));
        }
    }
    let x = FiniteMetricSpace::from_matrix_unchecked(n, d);
    debug_assert!(matches!(x.first_triangle_violation(), Ok(None)));
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn graph(n: usize, edges: &[(usize, usize, i64)]) -> EdgeLabelledGraph {
        let mut g = EdgeLabelledGraph::new(n);
        for &(i, j, v) in edges {
            g.set(i, j, Rational::integer(v)).unwrap();
        }
        g
    }

    #[test]
    fn glued_triangles_get_shortest_paths() {
        // triangles 0-1-2 and 1-2-3 sharing the edge 1-2
        let g = graph(4, &[(0, 1, 1), (0, 2, 2), (1, 2, 2), (1, 3, 3), (2, 3, 1)]);
        let x = complete(&g, CompletionMode::Sum { cap: Some(q(1000, 1)) }).unwrap();
        assert_eq!(x.dist(0, 3), q(3, 1));
        let y = complete(&g, CompletionMode::Sum { cap: None }).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn complete_space_is_unchanged() {
        let x = FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]]).unwrap();
        let g = EdgeLabelledGraph::from_space(&x);
        for mode in [CompletionMode::Max, CompletionMode::Sum { cap: None }, CompletionMode::Sum { cap: Some(q(2, 1)) }]
        {
            assert_eq!(complete(&g, mode).unwrap(), x);
        }
    }

    #[test]
    fn star_under_max() {
        let g = graph(3, &[(0, 1, 1), (0, 2, 2)]);
        let x = complete(&g, CompletionMode::Max).unwrap();
        assert_eq!(x.dist(1, 2), q(2, 1));
        assert!(x.is_ultrametric());
    }

    #[test]
    fn cap_truncates() {
        let g = graph(3, &[(0, 1, 1), (1, 2, 1)]);
        let x = complete(&g, CompletionMode::Sum { cap: Some(q(3, 2)) }).unwrap();
        assert_eq!(x.dist(0, 2), q(3, 2));
    }

    #[test]
    fn errors() {
        let g = graph(3, &[(0, 1, 1)]);
        assert_eq!(complete(&g, CompletionMode::Max), Err(Error::Disconnected(0, 2)));
        let g = graph(2, &[(0, 1, 5)]);
        assert!(matches!(complete(&g, CompletionMode::Sum { cap: Some(q(1, 1)) }), Err(Error::CapBelowLabel { .. })));
        let g = graph(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 3)]);
        assert!(matches!(complete(&g, CompletionMode::Sum { cap: None }), Err(Error::NotMetric(_))));
    }
}
