//! Finite metric spaces, edge-labelled graphs and the maps between them.

mod complete;
pub mod format;
mod symmetry;
mod validate;

pub use complete::{complete, CompletionMode};
pub use symmetry::{
    canonicalize, canonicalize_bounded, copies, copies_bounded, first_embedding, isometries, isometries_bounded,
    Canonical, Isometries,
};
pub use validate::{validate, Validation, ValidationMode, Violation};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Size limits for the exhaustive searches. These are configuration, not
/// constants: raise them when a slower run is acceptable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub isometries: usize,
    pub copies: usize,
    pub distance_set: usize,
    pub orderings: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { isometries: 10, copies: 12, distance_set: 12, orderings: 8 }
    }
}

/// Environment variable that overrides every point-count bound at once.
pub const BUDGET_ENV: &str = "KATETOV_SEARCH_BUDGET";

impl SearchBounds {
    pub fn from_env() -> SearchBounds {
        match std::env::var(BUDGET_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
            Some(b) => SearchBounds { isometries: b, copies: b, distance_set: b, orderings: b },
            None => SearchBounds::default(),
        }
    }
}

/// A finite set of positive rationals, stored strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DistanceSet {
    values: Vec<Rational>,
}

impl DistanceSet {
    pub fn new(mut values: Vec<Rational>) -> Result<DistanceSet> {
        values.sort();
        values.dedup();
        if values.is_empty() {
            return Err(Error::Invalid("distance set is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_positive()) {
            return Err(Error::Invalid(format!("distance {v} is not positive")));
        }
        Ok(DistanceSet { values })
    }

    pub fn from_integers(values: &[i64]) -> Result<DistanceSet> {
        DistanceSet::new(values.iter().map(|&v| Rational::integer(v)).collect())
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: Rational) -> bool {
        self.values.binary_search(&v).is_ok()
    }

    pub fn index_of(&self, v: Rational) -> Option<usize> {
        self.values.binary_search(&v).ok()
    }

    pub fn min(&self) -> Rational {
        self.values[0]
    }

    pub fn max(&self) -> Rational {
        *self.values.last().unwrap()
    }

    /// Smallest element of `[lo, hi]`, if any.
    pub fn first_in(&self, lo: Rational, hi: Rational) -> Option<Rational> {
        let i = self.values.partition_point(|v| *v < lo);
        self.values.get(i).copied().filter(|v| *v <= hi)
    }

    pub fn intersects(&self, lo: Rational, hi: Rational) -> bool {
        self.first_in(lo, hi).is_some()
    }
}

impl std::fmt::Display for DistanceSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// An `n`-point metric space given by its full distance matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteMetricSpace {
    n: usize,
    d: Vec<Rational>,
}

impl FiniteMetricSpace {
    /// Builds a space from a full matrix, checking every metric axiom.
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<FiniteMetricSpace> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: row.len() });
            }
            d.extend(row);
        }
        let x = FiniteMetricSpace { n, d };
        x.check_axioms()?;
        Ok(x)
    }

    /// Builds a space from a distance function on index pairs `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Result<FiniteMetricSpace> {
        let mut d = vec![Rational::ZERO; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        let x = FiniteMetricSpace { n, d };
        x.check_axioms()?;
        Ok(x)
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<FiniteMetricSpace> {
        FiniteMetricSpace::new(rows.iter().map(|r| r.iter().map(|&v| Rational::integer(v)).collect()).collect())
    }

    /// Equilateral space with `n` points at mutual distance `a`.
    pub fn equilateral(n: usize, a: Rational) -> FiniteMetricSpace {
        Self::from_fn(n, |_, _| a).expect("equilateral spaces are metric")
    }

    /// Internal constructor for matrices already known to be metric.
    pub(crate) fn from_matrix_unchecked(n: usize, d: Vec<Rational>) -> FiniteMetricSpace {
        debug_assert_eq!(d.len(), n * n);
        FiniteMetricSpace { n, d }
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if !self.d[i * n + i].is_zero() {
                return Err(Error::NotMetric(format!("d({i},{i}) is not zero")));
            }
            for j in 0..n {
                if self.d[i * n + j] != self.d[j * n + i] {
                    return Err(Error::NotMetric(format!("d({i},{j}) != d({j},{i})")));
                }
                if i != j && !self.d[i * n + j].is_positive() {
                    return Err(Error::NotMetric(format!("d({i},{j}) is not positive")));
                }
            }
        }
        if let Some((i, j, k)) = self.first_triangle_violation()? {
            return Err(Error::NotMetric(format!(
                "d({i},{k}) = {} > d({i},{j}) + d({j},{k}) = {} + {}",
                self.dist(i, k),
                self.dist(i, j),
                self.dist(j, k)
            )));
        }
        Ok(())
    }

    /// Lexicographically least `(i, j, k)` with `i < k` and
    /// `d(i,k) > d(i,j) + d(j,k)`.
    pub fn first_triangle_violation(&self) -> Result<Option<(usize, usize, usize)>> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in i + 1..n {
                    if j != i && j != k && self.dist(i, k) > self.dist(i, j).checked_add(self.dist(j, k))? {
                        return Ok(Some((i, j, k)));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> Rational {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Induced subspace on `points`, in the given order.
    pub fn subspace(&self, points: &[usize]) -> FiniteMetricSpace {
        let m = points.len();
        let mut d = Vec::with_capacity(m * m);
        for &a in points {
            for &b in points {
                d.push(self.dist(a, b));
            }
        }
        FiniteMetricSpace { n: m, d }
    }

    /// The space relabelled so that new point `i` is old point `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> FiniteMetricSpace {
        self.subspace(perm)
    }

    /// Distinct nonzero distances, increasing.
    pub fn distances(&self) -> Vec<Rational> {
        let set: BTreeSet<Rational> = self.d.iter().copied().filter(|v| !v.is_zero()).collect();
        set.into_iter().collect()
    }

    pub fn diameter(&self) -> Rational {
        self.d.iter().copied().max().unwrap_or(Rational::ZERO)
    }

    /// Checks that every distance lies in `s`.
    pub fn check_distances_in(&self, s: &DistanceSet) -> Result<()> {
        match self.d.iter().find(|v| !v.is_zero() && !s.contains(**v)) {
            Some(v) => Err(Error::DistanceOutsideSet(*v)),
            None => Ok(()),
        }
    }

    pub fn is_ultrametric(&self) -> bool {
        self.first_ultrametric_violation().is_none()
    }

    pub fn first_ultrametric_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in i + 1..n {
                    if j != i && j != k && self.dist(i, k) > self.dist(i, j).max(self.dist(j, k)) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// True when `map` preserves every distance from `self` into `target`.
    pub fn is_isometric_map(&self, target: &FiniteMetricSpace, map: &[usize]) -> bool {
        map.len() == self.n
            && (0..self.n).all(|i| (i + 1..self.n).all(|j| target.dist(map[i], map[j]) == self.dist(i, j)))
    }
}

/// A symmetric, partially labelled graph. Labels are positive rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeLabelledGraph {
    n: usize,
    labels: Vec<Option<Rational>>,
}

impl EdgeLabelledGraph {
    pub fn new(n: usize) -> EdgeLabelledGraph {
        EdgeLabelledGraph { n, labels: vec![None; n * n] }
    }

    pub fn from_space(x: &FiniteMetricSpace) -> EdgeLabelledGraph {
        let mut g = EdgeLabelledGraph::new(x.len());
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                g.labels[i * g.n + j] = Some(x.dist(i, j));
                g.labels[j * g.n + i] = Some(x.dist(i, j));
            }
        }
        g
    }

    /// Builds a graph from rows of optional labels; the diagonal must be
    /// zero or unlabelled and the rows symmetric.
    pub fn from_rows(rows: Vec<Vec<Option<Rational>>>) -> Result<EdgeLabelledGraph> {
        let n = rows.len();
        let mut g = EdgeLabelledGraph::new(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: row.len() });
            }
            for (j, v) in row.iter().enumerate() {
                if i == j {
                    if v.is_some_and(|v| !v.is_zero()) {
                        return Err(Error::Invalid(format!("nonzero diagonal entry at {i}")));
                    }
                    continue;
                }
                if *v != rows[j][i] {
                    return Err(Error::Invalid(format!("labels at ({i},{j}) are not symmetric")));
                }
                if let Some(v) = v {
                    g.set(i, j, *v)?;
                }
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) -> Result<()> {
        if i == j {
            return Err(Error::Invalid(format!("cannot label the pair ({i},{i})")));
        }
        if !v.is_positive() {
            return Err(Error::Invalid(format!("label {v} on ({i},{j}) is not positive")));
        }
        self.labels[i * self.n + j] = Some(v);
        self.labels[j * self.n + i] = Some(v);
        Ok(())
    }

    pub fn unset(&mut self, i: usize, j: usize) {
        self.labels[i * self.n + j] = None;
        self.labels[j * self.n + i] = None;
    }

    #[inline]
    pub fn label(&self, i: usize, j: usize) -> Option<Rational> {
        self.labels[i * self.n + j]
    }

    /// Labelled pairs `(i, j, label)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if let Some(v) = self.label(i, j) {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = (usize, Rational)> + '_ {
        (0..self.n).filter_map(move |j| self.label(i, j).map(|v| (j, v)))
    }

    /// First unlabelled pair `i < j`, if any.
    pub fn first_unlabelled(&self) -> Option<(usize, usize)> {
        (0..self.n).flat_map(|i| (i + 1..self.n).map(move |j| (i, j))).find(|&(i, j)| self.label(i, j).is_none())
    }

    pub fn is_total(&self) -> bool {
        self.first_unlabelled().is_none()
    }

    /// The space carried by a total labelling, with axioms checked.
    pub fn to_space(&self) -> Result<FiniteMetricSpace> {
        if let Some((i, j)) = self.first_unlabelled() {
            return Err(Error::IncompleteLabelling(i, j));
        }
        FiniteMetricSpace::from_fn(self.n, |i, j| self.label(i, j).unwrap())
    }
}

/// An injective map between point sets, `map[i]` being the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointMap {
    map: Vec<usize>,
}

impl PointMap {
    pub fn new(map: Vec<usize>) -> Result<PointMap> {
        let set: BTreeSet<usize> = map.iter().copied().collect();
        if set.len() != map.len() {
            return Err(Error::Invalid("point map is not injective".into()));
        }
        Ok(PointMap { map })
    }

    pub fn identity(n: usize) -> PointMap {
        PointMap { map: (0..n).collect() }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn is_isometric(&self, source: &FiniteMetricSpace, target: &FiniteMetricSpace) -> bool {
        source.is_isometric_map(target, &self.map)
    }
}

/// A linear ordering of `{0..n-1}`: `position[p]` is the rank of point `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearOrdering {
    position: Vec<usize>,
}

impl LinearOrdering {
    pub fn from_positions(position: Vec<usize>) -> Result<LinearOrdering> {
        let mut seen = vec![false; position.len()];
        for &p in &position {
            if p >= seen.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Invalid("ordering is not a permutation".into()));
            }
        }
        Ok(LinearOrdering { position })
    }

    /// The ordering listing `sequence[0] < sequence[1] < ...`.
    pub fn from_sequence(sequence: &[usize]) -> Result<LinearOrdering> {
        let mut position = vec![usize::MAX; sequence.len()];
        for (rank, &p) in sequence.iter().enumerate() {
            if p >= position.len() || position[p] != usize::MAX {
                return Err(Error::Invalid("sequence is not a permutation".into()));
            }
            position[p] = rank;
        }
        Ok(LinearOrdering { position })
    }

    pub fn identity(n: usize) -> LinearOrdering {
        LinearOrdering { position: (0..n).collect() }
    }

    pub fn position(&self, p: usize) -> usize {
        self.position[p]
    }

    pub fn positions(&self) -> &[usize] {
        &self.position
    }

    /// Points listed from least to greatest.
    pub fn sequence(&self) -> Vec<usize> {
        let mut seq = vec![0; self.position.len()];
        for (p, &r) in self.position.iter().enumerate() {
            seq[r] = p;
        }
        seq
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }
}

/// Calls `f` on every permutation of `0..n` in lexicographic order; stops
/// early when `f` returns `false`.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if !f(&perm) {
            return;
        }
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else { return };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn distance_set_normalizes() {
        let s = DistanceSet::from_integers(&[5, 1, 2, 1]).unwrap();
        assert_eq!(s.values(), &[q(1, 1), q(2, 1), q(5, 1)]);
        assert_eq!(s.first_in(q(3, 1), q(6, 1)), Some(q(5, 1)));
        assert_eq!(s.first_in(q(3, 1), q(4, 1)), None);
        assert!(DistanceSet::from_integers(&[]).is_err());
        assert!(DistanceSet::from_integers(&[0, 1]).is_err());
    }

    #[test]
    fn space_axioms_are_enforced() {
        assert!(FiniteMetricSpace::from_integers(&[&[0, 1, 3], &[1, 0, 1], &[3, 1, 0]]).is_err());
        assert!(FiniteMetricSpace::from_integers(&[&[0, 1], &[2, 0]]).is_err());
        assert!(FiniteMetricSpace::from_integers(&[&[0, 0], &[0, 0]]).is_err());
        let x = FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap();
        assert_eq!(x.distances(), vec![q(1, 1), q(2, 1)]);
        assert_eq!(x.subspace(&[2, 0]).dist(0, 1), q(2, 1));
    }

    #[test]
    fn permutations_are_lexicographic_and_complete() {
        let mut seen = Vec::new();
        for_each_permutation(3, |p| {
            seen.push(p.to_vec());
            true
        });
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1, 2]);
        assert_eq!(seen[5], vec![2, 1, 0]);
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(sorted, seen);
    }

    #[test]
    fn ordering_round_trip() {
        let o = LinearOrdering::from_sequence(&[2, 0, 1]).unwrap();
        assert_eq!(o.positions(), &[1, 2, 0]);
        assert_eq!(o.sequence(), vec![2, 0, 1]);
        assert!(LinearOrdering::from_positions(vec![0, 0]).is_err());
    }
}
