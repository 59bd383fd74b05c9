//! The hedgehog space at finite scale.
//!
//! A prefix `y_0, ..., y_{N-1}` with distances in (0,1] is discretized to
//! `X_m` by rounding every distance up to a multiple of `1/m`. The tree `T`
//! holds the index sets `t` for which `x_n -> x_{t_n}` is an isometry of
//! `X_m`, ordered by end-extension. On `Z = X_m + T` a partial labelling
//! `delta` glues a copy of the prefix along every branch, each node within
//! `1/m` of its projection, and the capped shortest-path completion `dZ`
//! must agree with `delta` wherever it is defined.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::spaces::FiniteMetricSpace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HedgehogSpace {
    pub m: u32,
    /// The prefix with its original metric.
    pub prefix: FiniteMetricSpace,
    /// The same points with every distance rounded up to `[0,1]_m`.
    pub rounded: FiniteMetricSpace,
    /// Tree nodes as increasing index lists; node `i` is point `N + i` of Z.
    pub tree: Vec<Vec<usize>>,
    /// The partial labelling on Z, one entry `(a, b, label)` with `a < b`
    /// per labelled pair. Verification recomputes everything from this.
    pub delta: Vec<(usize, usize, Rational)>,
    /// The capped path completion of `delta` computed at build time.
    pub dz: FiniteMetricSpace,
}

/// `min([a, 1] ∩ {k/m})`.
fn round_up(a: Rational, m: u32) -> Result<Rational> {
    Ok(a.ceil_to(i64::from(m))?.min(Rational::ONE))
}

impl HedgehogSpace {
    /// Number of prefix points.
    pub fn base_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn len(&self) -> usize {
        self.base_len() + self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_tree_point(&self, z: usize) -> bool {
        z >= self.base_len()
    }

    /// The index list of a tree point.
    pub fn node(&self, z: usize) -> &[usize] {
        &self.tree[z - self.base_len()]
    }

    /// Projection to X: the identity on X, `x_{max t}` on T.
    pub fn pi(&self, z: usize) -> usize {
        if self.is_tree_point(z) {
            *self.node(z).last().expect("tree nodes are nonempty")
        } else {
            z
        }
    }

    /// Strict end-extension order on tree points.
    pub fn below(&self, a: usize, b: usize) -> bool {
        let (s, t) = (self.node(a), self.node(b));
        s.len() < t.len() && t.starts_with(s)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.below(a, b) || self.below(b, a)
    }

    /// Maximal branches as Z-indices `b(0), b(1), ...` with `|b(i)| = i + 1`.
    pub fn branches(&self) -> Vec<Vec<usize>> {
        let n = self.base_len();
        let index: BTreeMap<&[usize], usize> =
            self.tree.iter().enumerate().map(|(i, t)| (t.as_slice(), n + i)).collect();
        let maximal = (0..self.tree.len())
            .filter(|&i| !self.tree.iter().any(|u| u.len() > self.tree[i].len() && u.starts_with(&self.tree[i])));
        maximal.map(|i| (1..=self.tree[i].len()).map(|k| index[&self.tree[i][..k]]).collect()).collect()
    }
}

/// Builds the hedgehog space over `prefix` with tree nodes of size at most
/// `max_tree_size`.
pub fn hedgehog_build(m: u32, prefix: &FiniteMetricSpace, max_tree_size: usize) -> Result<HedgehogSpace> {
    if m == 0 {
        return Err(Error::Invalid("m must be positive".into()));
    }
    if let Some(d) = prefix.distances().into_iter().find(|&d| d > Rational::ONE) {
        return Err(Error::Invalid(format!("prefix distance {d} is not in (0, 1]")));
    }
    let n = prefix.len();
    let rounded = FiniteMetricSpace::from_fn(n, |i, j| {
        if i == j {
            Rational::ZERO
        } else {
            round_up(prefix.dist(i, j), m).expect("rounding stays in [0,1]")
        }
    })?;

    // Grow T level by level: an isometric t extends by any larger index
    // whose distances to the chosen images match the next prefix point.
    let mut tree: Vec<Vec<usize>> = Vec::new();
    let mut level: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    while !level.is_empty() && level[0].len() <= max_tree_size {
        let mut next = Vec::new();
        for t in &level {
            let k = t.len();
            if k == max_tree_size || k == n {
                continue;
            }
            for c in t[k - 1] + 1..n {
                if (0..k).all(|i| rounded.dist(t[i], c) == rounded.dist(i, k)) {
                    let mut u = t.clone();
                    u.push(c);
                    next.push(u);
                }
            }
        }
        tree.append(&mut level);
        level = next;
    }
    tree.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let mut z = HedgehogSpace {
        m,
        prefix: prefix.clone(),
        rounded,
        tree,
        delta: Vec::new(),
        dz: FiniteMetricSpace::equilateral(0, Rational::ONE),
    };
    let one_over_m = Rational::new(1, i64::from(m))?;
    let total = z.len();
    let mut delta = Vec::new();
    for a in 0..total {
        for b in a + 1..total {
            let label = match (z.is_tree_point(a), z.is_tree_point(b)) {
                (false, false) => Some(z.rounded.dist(a, b)),
                (false, true) => (z.pi(b) == a).then_some(one_over_m),
                (true, true) => z.comparable(a, b).then(|| prefix.dist(z.node(a).len() - 1, z.node(b).len() - 1)),
                (true, false) => unreachable!("a < b and X precedes T"),
            };
            if let Some(label) = label {
                delta.push((a, b, label));
            }
        }
    }
    z.delta = delta;
    z.dz = completion(total, &z.delta)?.space;
    Ok(z)
}

struct Completion {
    space: FiniteMetricSpace,
    /// Uncapped shortest-path values and next hops.
    dist: Vec<Option<Rational>>,
    next: Vec<usize>,
    n: usize,
}

impl Completion {
    fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let mut p = vec![a];
        let mut c = a;
        while c != b {
            c = self.next[c * self.n + b];
            p.push(c);
        }
        p
    }
}

/// `min(1, shortest path)` over the labelled pairs, with next-hop tables
/// for witness paths. Unreachable pairs sit at distance 1.
fn completion(n: usize, delta: &[(usize, usize, Rational)]) -> Result<Completion> {
    let mut dist: Vec<Option<Rational>> = vec![None; n * n];
    let mut next = vec![usize::MAX; n * n];
    for i in 0..n {
        dist[i * n + i] = Some(Rational::ZERO);
        next[i * n + i] = i;
    }
    for &(a, b, l) in delta {
        if a >= n || b >= n || a == b {
            return Err(Error::Invalid(format!("labelled pair ({a},{b}) is not a pair of distinct points")));
        }
        for (u, v) in [(a, b), (b, a)] {
            if dist[u * n + v].is_none_or(|c| l < c) {
                dist[u * n + v] = Some(l);
                next[u * n + v] = v;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(a) = dist[i * n + k] else { continue };
            for j in 0..n {
                let Some(b) = dist[k * n + j] else { continue };
                let via = a.checked_add(b)?;
                if dist[i * n + j].is_none_or(|c| via < c) {
                    dist[i * n + j] = Some(via);
                    next[i * n + j] = next[i * n + k];
                }
            }
        }
    }
    let space = FiniteMetricSpace::from_fn(n, |i, j| dist[i * n + j].map_or(Rational::ONE, |v| v.min(Rational::ONE)))?;
    Ok(Completion { space, dist, next, n })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum HedgehogViolation {
    /// `dZ` falls below `delta` on a labelled pair; `path` is a strictly
    /// shorter path, closing a non-metric cycle with the pair.
    LabelNotPreserved { pair: (usize, usize), label: Rational, dz: Rational, path: Vec<usize> },
    /// An enumerated chordless cycle in which one edge exceeds the sum of
    /// the others.
    NonMetricCycle { cycle: Vec<usize> },
    /// `dZ(b(i), b(j))` differs from `d(y_i, y_j)`.
    BranchNotIsometric { branch: Vec<usize>, i: usize, j: usize },
    /// The projections of a branch are not an isometric copy of the
    /// discretized prefix.
    ProjectionNotIsometric { branch: Vec<usize>, i: usize, j: usize },
    /// A branch node farther than `1/m` from its projection.
    BranchTooFar { node: usize, dz: Rational },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ShapeCounts {
    pub x_triangles: usize,
    pub t_triangles: usize,
    /// Two X points and two comparable tree nodes.
    pub case1: usize,
    /// One X point and three tree nodes, two incomparable above the third.
    pub case2: usize,
    /// Two X points and three tree nodes, two incomparable above the third.
    pub case3: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HedgehogReport {
    pub points: usize,
    pub labelled_pairs: usize,
    pub cycles_checked: usize,
    pub shapes: ShapeCounts,
    /// Chordless cycles whose support matches none of the expected shapes.
    pub unexpected_shapes: Vec<Vec<usize>>,
    pub branches_verified: usize,
    pub violations: Vec<HedgehogViolation>,
}

impl HedgehogReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.unexpected_shapes.is_empty()
    }
}

/// Longest cycle enumerated for the shape report.
const MAX_CYCLE: usize = 5;

/// Recomputes `dZ` from `z.delta` and runs the three checks: labels are
/// preserved, chordless cycles have the expected shapes and are metric, and
/// every branch is an isometric copy of the prefix within `1/m` of its
/// projection.
pub fn hedgehog_verify(z: &HedgehogSpace) -> Result<HedgehogReport> {
    let total = z.len();
    let comp = completion(total, &z.delta)?;
    let mut label: Vec<Option<Rational>> = vec![None; total * total];
    for &(a, b, l) in &z.delta {
        label[a * total + b] = Some(l);
        label[b * total + a] = Some(l);
    }
    let mut violations = Vec::new();

    // (a) dZ restricted to dom(delta) equals delta
    for &(a, b, l) in &z.delta {
        let dz = comp.space.dist(a, b);
        if dz != l {
            let path = if comp.dist[a * total + b].is_some_and(|d| d < l) { comp.path(a, b) } else { vec![a, b] };
            violations.push(HedgehogViolation::LabelNotPreserved { pair: (a, b), label: l, dz, path });
        }
    }

    // (b) chordless cycles up to MAX_CYCLE: shape and metricity
    let adj: Vec<Vec<usize>> =
        (0..total).map(|a| (0..total).filter(|&b| label[a * total + b].is_some()).collect()).collect();
    let mut shapes = ShapeCounts::default();
    let mut unexpected = Vec::new();
    let mut cycles = 0usize;
    let mut path = Vec::with_capacity(MAX_CYCLE);
    for v0 in 0..total {
        path.push(v0);
        chordless_cycles(v0, &adj, &label, total, &mut path, &mut |cycle| {
            cycles += 1;
            let edges: Vec<Rational> = (0..cycle.len())
                .map(|i| label[cycle[i] * total + cycle[(i + 1) % cycle.len()]].expect("cycle edge"))
                .collect();
            let sum = edges.iter().fold(Rational::ZERO, |acc, &e| acc + e);
            if edges.iter().any(|&e| e + e > sum) {
                violations.push(HedgehogViolation::NonMetricCycle { cycle: cycle.to_vec() });
            }
            match classify(z, cycle) {
                Some(Shape::XTriangle) => shapes.x_triangles += 1,
                Some(Shape::TTriangle) => shapes.t_triangles += 1,
                Some(Shape::Case1) => shapes.case1 += 1,
                Some(Shape::Case2) => shapes.case2 += 1,
                Some(Shape::Case3) => shapes.case3 += 1,
                None => unexpected.push(cycle.to_vec()),
            }
        });
        path.pop();
    }

    // (c) branches
    let one_over_m = Rational::new(1, i64::from(z.m))?;
    let branches = z.branches();
    for b in &branches {
        for i in 0..b.len() {
            let dz = comp.space.dist(b[i], z.pi(b[i]));
            if dz > one_over_m {
                violations.push(HedgehogViolation::BranchTooFar { node: b[i], dz });
            }
            for j in i + 1..b.len() {
                if comp.space.dist(b[i], b[j]) != z.prefix.dist(i, j) {
                    violations.push(HedgehogViolation::BranchNotIsometric { branch: b.clone(), i, j });
                }
                if z.rounded.dist(z.pi(b[i]), z.pi(b[j])) != z.rounded.dist(i, j) {
                    violations.push(HedgehogViolation::ProjectionNotIsometric { branch: b.clone(), i, j });
                }
            }
        }
    }

    Ok(HedgehogReport {
        points: total,
        labelled_pairs: z.delta.len(),
        cycles_checked: cycles,
        shapes,
        unexpected_shapes: unexpected,
        branches_verified: branches.len(),
        violations,
    })
}

/// Enumerates chordless cycles through `path[0]` whose other vertices are
/// larger, each once: the second vertex is smaller than the last.
fn chordless_cycles(
    v0: usize,
    adj: &[Vec<usize>],
    label: &[Option<Rational>],
    n: usize,
    path: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    let last = *path.last().expect("path starts at v0");
    for &w in &adj[last] {
        if w <= v0 || path.contains(&w) {
            continue;
        }
        // w may touch only its predecessor among the inner path vertices
        let inner = if path.len() > 2 { &path[1..path.len() - 1] } else { &[][..] };
        if inner.iter().any(|&p| label[p * n + w].is_some()) {
            continue;
        }
        let closes = path.len() >= 2 && label[v0 * n + w].is_some();
        if closes {
            if path[1] < w {
                path.push(w);
                emit(path);
                path.pop();
            }
        } else if path.len() < MAX_CYCLE - 1 {
            path.push(w);
            chordless_cycles(v0, adj, label, n, path, emit);
            path.pop();
        }
    }
}

enum Shape {
    XTriangle,
    TTriangle,
    Case1,
    Case2,
    Case3,
}

/// Matches a chordless cycle against the shapes allowed by the analysis of
/// irreducible cycles: triangles inside X, triangles on a branch of T, and
/// the three mixed cases.
fn classify(z: &HedgehogSpace, cycle: &[usize]) -> Option<Shape> {
    let xs: Vec<usize> = cycle.iter().copied().filter(|&v| !z.is_tree_point(v)).collect();
    let ts: Vec<usize> = cycle.iter().copied().filter(|&v| z.is_tree_point(v)).collect();
    let chain = |a: usize, b: usize| z.comparable(a, b);
    // two incomparable nodes above a common third
    let vee = |ts: &[usize]| {
        (0..3).any(|k| {
            let (lo, a, c) = (ts[k], ts[(k + 1) % 3], ts[(k + 2) % 3]);
            z.below(lo, a) && z.below(lo, c) && !chain(a, c)
        })
    };
    let projects_onto = |xs: &[usize], ts: &[usize]| {
        let hits: Vec<usize> = ts.iter().filter(|&&t| xs.contains(&z.pi(t))).copied().collect();
        hits
    };
    match (xs.len(), ts.len()) {
        (3, 0) => Some(Shape::XTriangle),
        (0, 3) if chain(ts[0], ts[1]) && chain(ts[1], ts[2]) && chain(ts[0], ts[2]) => Some(Shape::TTriangle),
        (2, 2) if chain(ts[0], ts[1]) && z.pi(ts[0]) != z.pi(ts[1]) && projects_onto(&xs, &ts).len() == 2 => {
            Some(Shape::Case1)
        }
        (1, 3) if vee(&ts) && projects_onto(&xs, &ts).len() == 2 => Some(Shape::Case2),
        (2, 3) if vee(&ts) && projects_onto(&xs, &ts).len() == 2 => Some(Shape::Case3),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn line(points: &[Rational]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(points.len(), |i, j| points[i].abs_diff(points[j]).unwrap()).unwrap()
    }

    fn four_points() -> FiniteMetricSpace {
        line(&[q(0, 1), q(1, 3), q(3, 4), q(1, 1)])
    }

    #[test]
    fn m1_rounds_everything_to_one() {
        let z = hedgehog_build(1, &four_points(), 4).unwrap();
        assert!(z.rounded.distances().iter().all(|&d| d == q(1, 1)));
        // every nonempty subset is isometric when all distances are 1
        assert_eq!(z.tree.len(), 15);
        let r = hedgehog_verify(&z).unwrap();
        assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn m2_four_points_pass() {
        let z = hedgehog_build(2, &four_points(), 4).unwrap();
        let r = hedgehog_verify(&z).unwrap();
        assert!(r.ok(), "{r:?}");
        assert!(r.cycles_checked > 0 && r.branches_verified > 0);
        for &(a, b, l) in &z.delta {
            assert_eq!(z.dz.dist(a, b), l);
        }
    }

    #[test]
    fn m3_five_points_pass() {
        let p = line(&[q(0, 1), q(1, 5), q(1, 2), q(2, 3), q(1, 1)]);
        let r = hedgehog_verify(&hedgehog_build(3, &p, 5).unwrap()).unwrap();
        assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn tree_is_closed_under_initial_segments() {
        let z = hedgehog_build(2, &four_points(), 4).unwrap();
        for t in &z.tree {
            for k in 1..t.len() {
                assert!(z.tree.iter().any(|u| u[..] == t[..k]));
            }
        }
    }

    #[test]
    fn lowered_label_is_caught_with_a_path() {
        let z = hedgehog_build(2, &four_points(), 4).unwrap();
        let caught = (0..z.delta.len()).any(|i| {
            let mut bad = z.clone();
            bad.delta[i].2 = q(1, 1000);
            hedgehog_verify(&bad)
                .unwrap()
                .violations
                .iter()
                .any(|v| matches!(v, HedgehogViolation::LabelNotPreserved { path, .. } if path.len() >= 2))
        });
        assert!(caught);
    }

    #[test]
    fn rejects_distances_above_one() {
        let p = line(&[q(0, 1), q(3, 2)]);
        assert!(hedgehog_build(2, &p, 2).is_err());
    }
}
