//! Ultrametric spaces as leaves of leveled trees.
//!
//! A tree with levels `a0 > a1 > ... > a_{k-1}` has all leaves at depth `k`;
//! two leaves whose longest common ancestor sits at depth `j` are at
//! distance `a_j`. Conversely the depth-`j` nodes of an ultrametric space
//! are its closed balls of radius `a_j`, and the leaves are its points.
//!
//! Text format (whitespace and newlines are free, `#` starts a comment):
//!
//! ```text
//! levels: 2 1
//! (
//!   (0 1)
//!   (2)
//! )
//! ```

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::spaces::{for_each_permutation, isometries_bounded, DistanceSet, FiniteMetricSpace, SearchBounds};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    pub depth: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Points below this node, increasing.
    pub points: Vec<usize>,
}

/// A rooted tree with uniform leaf depth `levels.len()`. Node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UltraTree {
    levels: Vec<Rational>,
    nodes: Vec<TreeNode>,
    leaf_of: Vec<usize>,
}

impl UltraTree {
    pub fn levels(&self) -> &[Rational] {
        &self.levels
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &TreeNode {
        &self.nodes[i]
    }

    /// Leaf depth.
    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn point_count(&self) -> usize {
        self.leaf_of.len()
    }

    pub fn leaf_of(&self, point: usize) -> usize {
        self.leaf_of[point]
    }

    /// Nodes from the root down to the leaf of `point`.
    pub fn path(&self, point: usize) -> Vec<usize> {
        let mut path = vec![self.leaf_of[point]];
        while let Some(p) = self.nodes[*path.last().unwrap()].parent {
            path.push(p);
        }
        path.reverse();
        path
    }

    /// Depth of the longest common ancestor of two points.
    pub fn meet_depth(&self, p: usize, q: usize) -> usize {
        let (a, b) = (self.path(p), self.path(q));
        a.iter().zip(&b).take_while(|(x, y)| x == y).count() - 1
    }

    pub fn is_internal(&self, i: usize) -> bool {
        self.nodes[i].depth < self.height()
    }

    /// Every internal node has the same number of children as the other
    /// nodes of its level.
    pub fn is_uniformly_branching(&self) -> bool {
        let mut per_level: BTreeMap<usize, usize> = BTreeMap::new();
        self.nodes
            .iter()
            .filter(|n| n.depth < self.height())
            .all(|n| *per_level.entry(n.depth).or_insert(n.children.len()) == n.children.len())
    }

    /// Rebuilds a tree from parent links and leaf labels, checking every
    /// structural invariant.
    fn from_parts(
        levels: Vec<Rational>,
        parent: Vec<Option<usize>>,
        leaf_point: Vec<Option<usize>>,
    ) -> Result<UltraTree> {
        check_levels(&levels)?;
        let k = levels.len();
        let m = parent.len();
        if m == 0 || parent[0].is_some() || parent[1..].iter().any(|p| p.is_none()) {
            return Err(Error::Invalid("node 0 must be the only root".into()));
        }
        let mut nodes: Vec<TreeNode> = (0..m)
            .map(|i| TreeNode { depth: 0, parent: parent[i], children: Vec::new(), points: Vec::new() })
            .collect();
        for i in 1..m {
            let p = parent[i].unwrap();
            if p >= i {
                return Err(Error::Invalid("parents must precede their children".into()));
            }
            nodes[i].depth = nodes[p].depth + 1;
            nodes[p].children.push(i);
        }
        let n = leaf_point.iter().flatten().count();
        let mut leaf_of = vec![usize::MAX; n];
        for i in 0..m {
            let leaf = nodes[i].children.is_empty();
            match (leaf, leaf_point[i]) {
                (true, Some(pt)) if nodes[i].depth == k && pt < n && leaf_of[pt] == usize::MAX => leaf_of[pt] = i,
                (true, Some(_)) if nodes[i].depth != k => {
                    return Err(Error::Invalid(format!("leaf at depth {} but there are {k} levels", nodes[i].depth)))
                }
                (true, Some(pt)) => return Err(Error::Invalid(format!("point {pt} is repeated or out of range"))),
                (true, None) => return Err(Error::Invalid("internal node without children".into())),
                (false, Some(_)) => return Err(Error::Invalid("labelled node has children".into())),
                (false, None) if nodes[i].depth >= k => {
                    return Err(Error::Invalid(format!("internal node at depth {}", nodes[i].depth)))
                }
                (false, None) => {}
            }
        }
        for i in (0..m).rev() {
            let mut pts: Vec<usize> = match leaf_point[i] {
                Some(pt) => vec![pt],
                None => nodes[i].children.iter().flat_map(|&c| nodes[c].points.clone()).collect(),
            };
            pts.sort();
            nodes[i].points = pts;
        }
        Ok(UltraTree { levels, nodes, leaf_of })
    }
}

fn check_levels(levels: &[Rational]) -> Result<()> {
    if levels.iter().any(|a| !a.is_positive()) || levels.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Invalid("levels must be positive and strictly decreasing".into()));
    }
    Ok(())
}

/// The tree of `x` over the given levels, which must be strictly decreasing
/// and include every distance of `x`. Levels no distance uses produce
/// single-child nodes.
pub fn tree_over_levels(x: &FiniteMetricSpace, levels: &[Rational]) -> Result<UltraTree> {
    check_levels(levels)?;
    if let Some((i, j, k)) = x.first_ultrametric_violation() {
        return Err(Error::NotUltrametric(format!("triangle ({i},{j},{k})")));
    }
    if let Some(d) = x.distances().into_iter().find(|d| !levels.contains(d)) {
        return Err(Error::DistanceOutsideSet(d));
    }
    let k = levels.len();
    let mut parent = vec![None];
    let mut leaf_point = vec![None];
    let mut frontier = vec![(0usize, (0..x.len()).collect::<Vec<usize>>())];
    for depth in 0..k {
        let radius = if depth + 1 < k { Some(levels[depth + 1]) } else { None };
        let mut next = Vec::new();
        for (node, pts) in frontier {
            let mut rest = pts;
            while let Some(&p) = rest.first() {
                let (ball, others): (Vec<usize>, Vec<usize>) =
                    rest.iter().partition(|&&q| q == p || radius.is_some_and(|r| x.dist(p, q) <= r));
                let id = parent.len();
                parent.push(Some(node));
                leaf_point.push(if depth + 1 == k { Some(p) } else { None });
                next.push((id, ball));
                rest = others;
            }
        }
        frontier = next;
    }
    if k == 0 {
        if x.len() != 1 {
            return Err(Error::Invalid(format!("{} points need at least one level", x.len())));
        }
        leaf_point[0] = Some(0);
    }
    UltraTree::from_parts(levels.to_vec(), parent, leaf_point)
}

/// The tree whose levels are exactly the distances of `x`.
pub fn tree_of_space(x: &FiniteMetricSpace) -> Result<UltraTree> {
    let mut levels = x.distances();
    levels.sort_by(|a, b| b.cmp(a));
    levels.dedup();
    tree_over_levels(x, &levels)
}

pub fn space_of_tree(t: &UltraTree) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::from_fn(
        t.point_count(),
        |p, q| {
            if p == q {
                Rational::ZERO
            } else {
                t.levels[t.meet_depth(p, q)]
            }
        },
    )
}

pub fn parse_tree(text: &str) -> Result<UltraTree> {
    let body: String = text.lines().map(|l| l.split('#').next().unwrap()).collect::<Vec<_>>().join("\n");
    let body = body.trim_start();
    let rest = body.strip_prefix("levels:").ok_or_else(|| Error::Parse("expected `levels:` header".into()))?;
    let (header, tree) = rest.split_once('\n').unwrap_or((rest, ""));
    let levels = header.split_whitespace().map(|t| t.parse()).collect::<Result<Vec<Rational>>>()?;
    let spaced = tree.replace('(', " ( ").replace(')', " ) ");
    let mut parent: Vec<Option<usize>> = Vec::new();
    let mut leaf_point: Vec<Option<usize>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut closed_root = false;
    for tok in spaced.split_whitespace() {
        if closed_root {
            return Err(Error::Parse(format!("unexpected {tok:?} after the root")));
        }
        match tok {
            "(" => {
                parent.push(stack.last().copied());
                leaf_point.push(None);
                stack.push(parent.len() - 1);
            }
            ")" => {
                stack.pop().ok_or_else(|| Error::Parse("unbalanced `)`".into()))?;
                closed_root = stack.is_empty();
            }
            _ => {
                let pt: usize = tok.parse().map_err(|_| Error::Parse(format!("bad point index {tok:?}")))?;
                if stack.is_empty() && !parent.is_empty() {
                    return Err(Error::Parse("point outside the root".into()));
                }
                parent.push(stack.last().copied());
                leaf_point.push(Some(pt));
                closed_root = stack.is_empty();
            }
        }
    }
    if !stack.is_empty() || parent.is_empty() {
        return Err(Error::Parse("unbalanced or empty tree".into()));
    }
    UltraTree::from_parts(levels, parent, leaf_point)
}

impl UltraTree {
    /// Indented text form, parseable by [`parse_tree`]. Nodes whose children
    /// are all leaves fit on one line.
    pub fn to_text(&self) -> String {
        let levels: Vec<String> = self.levels.iter().map(|a| a.to_string()).collect();
        let mut out = format!("levels: {}\n", levels.join(" "));
        self.write_node(0, 0, &mut out);
        out
    }

    fn write_node(&self, i: usize, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        let node = &self.nodes[i];
        if node.children.is_empty() {
            out.push_str(&format!("{pad}{}\n", node.points[0]));
        } else if node.children.iter().all(|&c| self.nodes[c].children.is_empty()) {
            let pts: Vec<String> = node.children.iter().map(|&c| self.nodes[c].points[0].to_string()).collect();
            out.push_str(&format!("{pad}({})\n", pts.join(" ")));
        } else {
            out.push_str(&format!("{pad}(\n"));
            for &c in &node.children {
                self.write_node(c, indent + 1, out);
            }
            out.push_str(&format!("{pad})\n"));
        }
    }

    /// Shape of the subtree below `i`, identical for isometric subtrees.
    fn shape(&self, i: usize, memo: &mut Vec<Option<String>>) -> String {
        if let Some(s) = &memo[i] {
            return s.clone();
        }
        let mut kids: Vec<String> = self.nodes[i].children.clone().into_iter().map(|c| self.shape(c, memo)).collect();
        kids.sort();
        let s = format!("({})", kids.concat());
        memo[i] = Some(s.clone());
        s
    }

    /// Order of the isometry group, as a product over nodes of the
    /// automorphisms permuting equal-shaped children.
    pub fn automorphism_count(&self) -> Result<u128> {
        let mut memo = vec![None; self.nodes.len()];
        let mut total: u128 = 1;
        for i in 0..self.nodes.len() {
            let mut counts: BTreeMap<String, usize> = BTreeMap::new();
            for &c in &self.nodes[i].children {
                *counts.entry(self.shape(c, &mut memo)).or_default() += 1;
            }
            for m in counts.values() {
                total = total.checked_mul(checked_factorial(*m)?).ok_or(Error::Overflow)?;
            }
        }
        Ok(total)
    }

    /// `|cLO|` as the product of `(children)!` over internal nodes.
    pub fn convex_orderings(&self) -> Result<u128> {
        self.nodes
            .iter()
            .try_fold(1u128, |acc, n| acc.checked_mul(checked_factorial(n.children.len())?).ok_or(Error::Overflow))
    }

    /// Number of linear extensions of the tree order on all nodes, root
    /// included, by the hook-length formula `|T|! / prod |subtree(t)|`.
    pub fn linear_extensions(&self) -> Result<u128> {
        let parent: Vec<Option<usize>> = self.nodes.iter().map(|n| n.parent).collect();
        hook_length_count(&parent)
    }
}

fn checked_factorial(n: usize) -> Result<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k).ok_or(Error::Overflow))
}

fn binomial(n: u128, k: u128) -> Result<u128> {
    let mut r: u128 = 1;
    for i in 0..k.min(n - k) {
        r = r.checked_mul(n - i).ok_or(Error::Overflow)? / (i + 1);
    }
    Ok(r)
}

/// Linear extensions of a forest given by parent links (parents may come in
/// any order but must not form cycles), by the hook-length formula computed
/// as nested multinomials so no intermediate exceeds the result by much.
pub fn hook_length_count(parent: &[Option<usize>]) -> Result<u128> {
    let n = parent.len();
    let mut children = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for (i, p) in parent.iter().enumerate() {
        match p {
            Some(p) if *p < n => children[*p].push(i),
            Some(p) => return Err(Error::Invalid(format!("parent {p} out of range"))),
            None => roots.push(i),
        }
    }
    // (size, extensions) of the forest formed by `kids`
    fn forest(kids: &[usize], children: &[Vec<usize>], depth: usize) -> Result<(u128, u128)> {
        if depth > children.len() {
            return Err(Error::Invalid("parent links contain a cycle".into()));
        }
        let (mut size, mut ways) = (0u128, 1u128);
        for &c in kids {
            let (s, e) = forest(&children[c], children, depth + 1)?;
            let s = s + 1;
            size += s;
            ways = ways.checked_mul(e).ok_or(Error::Overflow)?;
            ways = ways.checked_mul(binomial(size, s)?).ok_or(Error::Overflow)?;
        }
        Ok((size, ways))
    }
    if roots.is_empty() && n > 0 {
        return Err(Error::Invalid("parent links contain a cycle".into()));
    }
    let (size, ways) = forest(&roots, &children, 0)?;
    if size as usize != n {
        return Err(Error::Invalid("parent links contain a cycle".into()));
    }
    Ok(ways)
}

/// Linear extensions of the same forest counted directly, by dynamic
/// programming over down-closed node sets. Independent of the formula.
pub fn linear_extensions_brute(parent: &[Option<usize>]) -> Result<u128> {
    let n = parent.len();
    if n > 24 {
        return Err(Error::SearchTooLarge { what: "linear extension enumeration (nodes)", size: n as u128, bound: 24 });
    }
    let need: Vec<u32> = parent.iter().map(|p| p.map_or(0, |p| 1u32 << p)).collect();
    let mut ways = vec![0u128; 1 << n];
    ways[0] = 1;
    for set in 0..(1usize << n) {
        let w = ways[set];
        if w == 0 {
            continue;
        }
        for v in 0..n {
            if set & (1 << v) == 0 && (set as u32) & need[v] == need[v] {
                let next = set | (1 << v);
                ways[next] = ways[next].checked_add(w).ok_or(Error::Overflow)?;
            }
        }
    }
    Ok(ways[(1 << n) - 1])
}

/// `|cLO(x)|` by scanning all orderings for ones where every ball is an
/// interval.
pub fn convex_orderings_brute(x: &FiniteMetricSpace) -> Result<u128> {
    convex_orderings_brute_bounded(x, SearchBounds::from_env().orderings)
}

pub fn convex_orderings_brute_bounded(x: &FiniteMetricSpace, bound: usize) -> Result<u128> {
    let n = x.len();
    if n > bound {
        return Err(Error::SearchTooLarge {
            what: "ordering enumeration (points)",
            size: n as u128,
            bound: bound as u128,
        });
    }
    let t = tree_of_space(x)?;
    let balls: Vec<&Vec<usize>> = t.nodes.iter().map(|n| &n.points).filter(|p| p.len() > 1).collect();
    let mut count = 0u128;
    for_each_permutation(n, |seq| {
        let mut pos = vec![0; n];
        for (i, &p) in seq.iter().enumerate() {
            pos[p] = i;
        }
        let convex = balls.iter().all(|b| {
            let (lo, hi) = b.iter().fold((usize::MAX, 0), |(lo, hi), &p| (lo.min(pos[p]), hi.max(pos[p])));
            hi - lo + 1 == b.len()
        });
        count += convex as u128;
        true
    });
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeRecord {
    /// Number of admissible orderings (`LO`, `cLO` or `mLO`).
    pub orderings: u128,
    pub iso: u128,
    pub degree: u128,
}

impl DegreeRecord {
    /// Divides, refusing a non-integral ratio.
    pub fn from_counts(orderings: u128, iso: u128) -> Result<DegreeRecord> {
        if iso == 0 || !orderings.is_multiple_of(iso) {
            return Err(Error::Internal(format!("{iso} isometries do not divide {orderings} orderings")));
        }
        Ok(DegreeRecord { orderings, iso, degree: orderings / iso })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UltrametricDegree {
    pub record: DegreeRecord,
    pub uniformly_branching: bool,
}

/// Ramsey degree `|cLO(x)| / |iso(x)|` of an ultrametric space.
pub fn ramsey_degree_ultrametric(x: &FiniteMetricSpace) -> Result<UltrametricDegree> {
    let t = tree_of_space(x)?;
    let record = DegreeRecord::from_counts(t.convex_orderings()?, t.automorphism_count()?)?;
    Ok(UltrametricDegree { record, uniformly_branching: t.is_uniformly_branching() })
}

/// Isometry group order of an ultrametric space via the permutation search,
/// for cross-checking [`UltraTree::automorphism_count`].
pub fn isometry_order_brute(x: &FiniteMetricSpace) -> Result<u128> {
    Ok(isometries_bounded(x, SearchBounds::from_env().isometries)?.order() as u128)
}

/// Big Ramsey degree of `x` in the ultrametric Urysohn space over `S`: the
/// number of linear extensions of the tree of `x` drawn through every level
/// of `S`.
pub fn big_ramsey_degree(x: &FiniteMetricSpace, s: &DistanceSet) -> Result<u128> {
    let mut levels = s.values().to_vec();
    levels.reverse();
    tree_over_levels(x, &levels)?.linear_extensions()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FichetWeight {
    pub node: usize,
    pub depth: usize,
    /// `mu(t)^p`.
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FichetReport {
    pub p: u32,
    pub weights: Vec<FichetWeight>,
    pub dimension: usize,
    pub dimension_bound: usize,
    pub pairs_checked: usize,
    /// Pairs where the weighted sum differs from `d^p`.
    pub violations: Vec<(usize, usize)>,
    pub ok: bool,
}

impl FichetReport {
    /// `mu(t)^p` per coordinate for `point`: the weight on its root path,
    /// zero elsewhere.
    pub fn coordinate_powers(&self, t: &UltraTree, point: usize) -> Vec<Rational> {
        let path = t.path(point);
        self.weights.iter().map(|w| if path.contains(&w.node) { w.weight } else { Rational::ZERO }).collect()
    }

    /// Decimal approximation of the coordinates of `point` in `l_p`.
    pub fn coordinates_f64(&self, t: &UltraTree, point: usize) -> Vec<f64> {
        self.coordinate_powers(t, point).iter().map(|w| w.to_f64().powf(1.0 / self.p as f64)).collect()
    }
}

/// Embeds `x` into `l_p^T` with one coordinate per non-root node of its
/// tree. A node at depth `j` gets `mu^p = (a_{j-1}^p - a_j^p) / 2`, reading
/// `a_k` as 0; then `||x - y||_p^p` sums `a_j^p / 2` on each side of the
/// meet. Everything is checked on `p`-th powers, no roots are taken.
pub fn fichet_embedding(x: &FiniteMetricSpace, p: u32) -> Result<(UltraTree, FichetReport)> {
    if p == 0 {
        return Err(Error::Invalid("p must be positive".into()));
    }
    let t = tree_of_space(x)?;
    let k = t.height();
    let pow = |j: usize| if j < k { t.levels[j].checked_pow(p) } else { Ok(Rational::ZERO) };
    let mut weights = Vec::new();
    let mut weight_of = vec![Rational::ZERO; t.nodes.len()];
    for (i, node) in t.nodes.iter().enumerate().skip(1) {
        let w = pow(node.depth - 1)?.checked_sub(pow(node.depth)?)?.checked_div(Rational::integer(2))?;
        if !w.is_positive() {
            return Err(Error::Internal(format!("non-positive weight at node {i}")));
        }
        weight_of[i] = w;
        weights.push(FichetWeight { node: i, depth: node.depth, weight: w });
    }
    let paths: Vec<Vec<usize>> = (0..x.len()).map(|q| t.path(q)).collect();
    let mut violations = Vec::new();
    let mut pairs_checked = 0;
    for a in 0..x.len() {
        for b in a + 1..x.len() {
            pairs_checked += 1;
            let mut sum = Rational::ZERO;
            for (u, v) in [(a, b), (b, a)] {
                for &node in paths[u].iter().filter(|n| !paths[v].contains(n)) {
                    sum = sum.checked_add(weight_of[node])?;
                }
            }
            if sum != x.dist(a, b).checked_pow(p)? {
                violations.push((a, b));
            }
        }
    }
    let n = x.len();
    let report = FichetReport {
        p,
        dimension: weights.len(),
        dimension_bound: n * (n + 1) / 2,
        ok: violations.is_empty() && weights.len() <= n * (n + 1) / 2,
        weights,
        pairs_checked,
        violations,
    };
    Ok((t, report))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Shape {
    Leaf,
    /// Top distance index and children, children in non-increasing order.
    Node(usize, Vec<Shape>),
}

impl Shape {
    fn leaves(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Node(_, kids) => kids.iter().map(Shape::leaves).sum(),
        }
    }

    /// Fills the distances among leaves `start..start + leaves()`.
    fn write(&self, levels: &[Rational], out: &mut [Vec<Rational>], start: usize) {
        if let Shape::Node(l, kids) = self {
            let mut offs = start;
            let mut spans = Vec::new();
            for kid in kids {
                kid.write(levels, out, offs);
                spans.push((offs, offs + kid.leaves()));
                offs += kid.leaves();
            }
            for (i, &(a0, a1)) in spans.iter().enumerate() {
                for &(b0, b1) in &spans[i + 1..] {
                    for a in a0..a1 {
                        for b in b0..b1 {
                            out[a][b] = levels[*l];
                            out[b][a] = levels[*l];
                        }
                    }
                }
            }
        }
    }
}

/// All shapes with `n` leaves whose top distance index is below `cap`.
fn shapes(n: usize, cap: usize, memo: &mut BTreeMap<(usize, usize), Vec<Shape>>) -> Vec<Shape> {
    if n == 1 {
        return vec![Shape::Leaf];
    }
    if let Some(v) = memo.get(&(n, cap)) {
        return v.clone();
    }
    let mut out = Vec::new();
    for top in 0..cap {
        let mut pool: Vec<Shape> = (1..n).flat_map(|m| shapes(m, top, memo)).collect();
        pool.sort();
        pool.reverse();
        // multisets of at least two shapes from the pool with n leaves total
        fn pick(pool: &[Shape], from: usize, left: usize, cur: &mut Vec<Shape>, top: usize, out: &mut Vec<Shape>) {
            if left == 0 {
                if cur.len() >= 2 {
                    out.push(Shape::Node(top, cur.clone()));
                }
                return;
            }
            for i in from..pool.len() {
                let l = pool[i].leaves();
                if l <= left {
                    cur.push(pool[i].clone());
                    pick(pool, i, left - l, cur, top, out);
                    cur.pop();
                }
            }
        }
        pick(&pool, 0, n, &mut Vec::new(), top, &mut out);
    }
    memo.insert((n, cap), out.clone());
    out
}

/// Every ultrametric space on `n` points with distances in `levels`, one
/// per isometry type.
pub fn ultrametric_spaces(n: usize, levels: &DistanceSet) -> Vec<FiniteMetricSpace> {
    if n == 0 {
        return Vec::new();
    }
    let vals = levels.values();
    let mut memo = BTreeMap::new();
    shapes(n, vals.len(), &mut memo)
        .into_iter()
        .map(|s| {
            let mut rows = vec![vec![Rational::ZERO; n]; n];
            s.write(vals, &mut rows, 0);
            FiniteMetricSpace::new(rows).expect("shape spaces are ultrametric")
        })
        .collect()
}

/// Every rooted unlabelled tree on `n` nodes, as parent links with the root
/// at index 0 and parents before children.
pub fn rooted_trees(n: usize) -> Vec<Vec<Option<usize>>> {
    // trees as preorder depth sequences; a tree is its root followed by a
    // multiset of subtrees taken in non-increasing order
    fn trees(n: usize, memo: &mut BTreeMap<usize, Vec<Vec<usize>>>) -> Vec<Vec<usize>> {
        if n == 1 {
            return vec![vec![0]];
        }
        if let Some(v) = memo.get(&n) {
            return v.clone();
        }
        let mut pool: Vec<Vec<usize>> = (1..n).flat_map(|m| trees(m, memo)).collect();
        pool.sort();
        pool.reverse();
        fn pick(pool: &[Vec<usize>], from: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for i in from..pool.len() {
                if pool[i].len() <= left {
                    let mark = cur.len();
                    cur.extend(pool[i].iter().map(|d| d + 1));
                    pick(pool, i, left - pool[i].len(), cur, out);
                    cur.truncate(mark);
                }
            }
        }
        let mut out = Vec::new();
        pick(&pool, 0, n - 1, &mut vec![0], &mut out);
        memo.insert(n, out.clone());
        out
    }
    if n == 0 {
        return Vec::new();
    }
    trees(n, &mut BTreeMap::new())
        .into_iter()
        .map(|depths| {
            let mut parent = Vec::with_capacity(n);
            let mut stack: Vec<usize> = Vec::new();
            for (i, &d) in depths.iter().enumerate() {
                stack.truncate(d);
                parent.push(stack.last().copied());
                stack.push(i);
            }
            parent
        })
        .collect()
}
