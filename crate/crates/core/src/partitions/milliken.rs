//! Distance codings on pairs and triples of tree nodes.
//!
//! Strings over `{0, .., b-1}` of length at most `depth` are listed by
//! length, then lexicographically; a point is a pair or triple of distinct
//! strings in that order. The standard graph puts an edge between `a` and a
//! taller `b` when `b(|a|) = 1`. Each coding assigns distances from a case
//! table kept in a data file, and the greedy construction embeds any small
//! space over the coding's distance set into the subset where the coding
//! is known to be universal.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::spaces::FiniteMetricSpace;

/// Largest depth the constructions accept.
pub const MAX_DEPTH: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MillikenVariant {
    V134,
    V2379,
    V2678,
    V26712,
    V1378,
}

impl MillikenVariant {
    pub const ALL: [MillikenVariant; 5] = [
        MillikenVariant::V134,
        MillikenVariant::V2379,
        MillikenVariant::V2678,
        MillikenVariant::V26712,
        MillikenVariant::V1378,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MillikenVariant::V134 => "134",
            MillikenVariant::V2379 => "2379",
            MillikenVariant::V2678 => "2678",
            MillikenVariant::V26712 => "26712",
            MillikenVariant::V1378 => "1378",
        }
    }

    pub fn table_source(self) -> &'static str {
        match self {
            MillikenVariant::V134 => include_str!("../../data/milliken/134.toml"),
            MillikenVariant::V2379 => include_str!("../../data/milliken/2379.toml"),
            MillikenVariant::V2678 => include_str!("../../data/milliken/2678.toml"),
            MillikenVariant::V26712 => include_str!("../../data/milliken/26712.toml"),
            MillikenVariant::V1378 => include_str!("../../data/milliken/1378.toml"),
        }
    }

    pub fn table(self) -> CodingTable {
        CodingTable::parse(self.table_source()).expect("bundled coding tables parse")
    }
}

impl fmt::Display for MillikenVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MillikenVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<MillikenVariant> {
        MillikenVariant::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| {
            Error::Parse(format!("unknown coding variant {s:?}; expected one of 134, 2379, 2678, 26712, 1378"))
        })
    }
}

/// Conditions a case may require of two points `(s,t[,u])`, `(s',t'[,u'])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    SEq,
    SNe,
    TEq,
    TNe,
    SEdge,
    SNoEdge,
    TEdge,
    TNoEdge,
    UEdge,
    UNoEdge,
    /// The taller of `t, t'` has digit k at the height of the shorter.
    #[serde(rename = "t_digit_0")]
    TDigit0,
    #[serde(rename = "t_digit_1")]
    TDigit1,
    #[serde(rename = "t_digit_2")]
    TDigit2,
    /// `t` and `t'` have the same height.
    TLevel,
}

impl Condition {
    fn bit(self) -> u16 {
        1 << (self as u16)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
pub struct Case {
    pub value: i64,
    pub when: Vec<Condition>,
    /// Set on cases not present in the source table.
    #[serde(default)]
    pub supplied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
pub struct CodingTable {
    pub variant: String,
    pub branching: u8,
    pub arity: usize,
    pub distances: Vec<i64>,
    #[serde(rename = "case")]
    pub cases: Vec<Case>,
}

impl CodingTable {
    pub fn parse(src: &str) -> Result<CodingTable> {
        let t: CodingTable = toml::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        if !(2..=3).contains(&t.branching) {
            return Err(Error::Parse(format!("branching must be 2 or 3, got {}", t.branching)));
        }
        if !(2..=3).contains(&t.arity) {
            return Err(Error::Parse(format!("arity must be 2 or 3, got {}", t.arity)));
        }
        if t.distances.is_empty() || t.distances.iter().any(|&d| d <= 0) || t.distances.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::Parse("distances must be positive and strictly increasing".into()));
        }
        if let Some(c) = t.cases.iter().find(|c| !t.distances.contains(&c.value)) {
            return Err(Error::Parse(format!("case value {} is not a listed distance", c.value)));
        }
        Ok(t)
    }

    fn compiled(&self) -> Vec<(u16, u8)> {
        self.cases
            .iter()
            .map(|c| {
                let mask = c.when.iter().fold(0, |m, w| m | w.bit());
                let idx = self.distances.iter().position(|&d| d == c.value).expect("checked in parse");
                (mask, idx as u8)
            })
            .collect()
    }
}

/// Label meaning "no case applies".
const UNCOVERED: u8 = u8::MAX;

#[derive(Debug, Clone)]
pub struct MillikenSpace {
    pub table: CodingTable,
    pub depth: usize,
    /// All strings of length at most `depth`, in length-then-lex order.
    strings: Vec<Vec<u8>>,
    /// Points as increasing string indices; unused slots repeat the last.
    points: Vec<[u16; 3]>,
    edge: Vec<bool>,
    /// Digit of the taller string at the shorter's height; `LEVEL` when
    /// both have the same height.
    digit: Vec<u8>,
    cases: Vec<(u16, u8)>,
}

const LEVEL: u8 = u8::MAX;

impl MillikenSpace {
    pub fn build(table: CodingTable, depth: usize) -> Result<MillikenSpace> {
        if depth > MAX_DEPTH {
            return Err(Error::Precondition(format!("depth {depth} exceeds {MAX_DEPTH}")));
        }
        let b = table.branching;
        let mut strings: Vec<Vec<u8>> = vec![Vec::new()];
        let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
        for _ in 0..depth {
            layer = layer.iter().flat_map(|s| (0..b).map(move |d| [s.as_slice(), &[d]].concat())).collect();
            strings.extend(layer.iter().cloned());
        }
        Self::over_strings(table, strings)
    }

    /// The coding on the points spanned by `strings` alone, at any height.
    /// Distances only look at the strings inside the two points, so this
    /// agrees with every truncation containing those strings.
    pub fn over_strings(table: CodingTable, mut strings: Vec<Vec<u8>>) -> Result<MillikenSpace> {
        strings.sort_by(|a, c| a.len().cmp(&c.len()).then(a.cmp(c)));
        strings.dedup();
        if strings.len() > u16::MAX as usize {
            return Err(Error::SearchTooLarge {
                what: "coding strings",
                size: strings.len() as u128,
                bound: u16::MAX as u128,
            });
        }
        if let Some(bad) = strings.iter().flatten().find(|&&d| d >= table.branching) {
            return Err(Error::Invalid(format!("digit {bad} exceeds branching {}", table.branching)));
        }
        let depth = strings.last().map_or(0, |s| s.len());
        let ns = strings.len();
        let mut edge = vec![false; ns * ns];
        let mut digit = vec![LEVEL; ns * ns];
        for i in 0..ns {
            for j in 0..ns {
                let (a, c) = (&strings[i], &strings[j]);
                if a.len() != c.len() {
                    let (short, tall) = if a.len() < c.len() { (a, c) } else { (c, a) };
                    digit[i * ns + j] = tall[short.len()];
                    edge[i * ns + j] = tall[short.len()] == 1;
                }
            }
        }
        let mut points = Vec::new();
        let n = ns as u16;
        match table.arity {
            2 => {
                for s in 0..n {
                    for t in s + 1..n {
                        points.push([s, t, t]);
                    }
                }
            }
            _ => {
                for s in 0..n {
                    for t in s + 1..n {
                        for u in t + 1..n {
                            points.push([s, t, u]);
                        }
                    }
                }
            }
        }
        let cases = table.compiled();
        Ok(MillikenSpace { table, depth, strings, points, edge, digit, cases })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn strings(&self) -> &[Vec<u8>] {
        &self.strings
    }

    /// The strings making up point `p`.
    pub fn point(&self, p: usize) -> Vec<&[u8]> {
        self.points[p][..self.table.arity].iter().map(|&i| self.strings[i as usize].as_slice()).collect()
    }

    /// Point `p` written as `{s,t}` with strings in digits, `()` for empty.
    pub fn point_text(&self, p: usize) -> String {
        let parts: Vec<String> = self.point(p).iter().map(|s| string_text(s)).collect();
        format!("{{{}}}", parts.join(","))
    }

    fn conditions(&self, p: &[u16; 3], q: &[u16; 3]) -> u16 {
        use Condition::*;
        let ns = self.strings.len();
        let at = |a: u16, b: u16| a as usize * ns + b as usize;
        let mut bits = 0;
        let mut set = |c: Condition, on: bool, off: Condition| bits |= if on { c.bit() } else { off.bit() };
        set(SEq, p[0] == q[0], SNe);
        set(TEq, p[1] == q[1], TNe);
        set(SEdge, self.edge[at(p[0], q[0])], SNoEdge);
        set(TEdge, self.edge[at(p[1], q[1])], TNoEdge);
        set(UEdge, self.edge[at(p[2], q[2])], UNoEdge);
        bits |= match self.digit[at(p[1], q[1])] {
            0 => TDigit0.bit(),
            1 => TDigit1.bit(),
            2 => TDigit2.bit(),
            _ => TLevel.bit(),
        };
        bits
    }

    /// Index into the distance list of `d(p, q)` for `p != q`, or
    /// `UNCOVERED` when no case applies.
    fn label(&self, p: usize, q: usize) -> u8 {
        let bits = self.conditions(&self.points[p], &self.points[q]);
        self.cases.iter().find(|(mask, _)| bits & mask == *mask).map_or(UNCOVERED, |&(_, v)| v)
    }

    pub fn dist(&self, p: usize, q: usize) -> Result<Rational> {
        if p == q {
            return Ok(Rational::ZERO);
        }
        match self.label(p, q) {
            UNCOVERED => Err(Error::Invalid(format!(
                "no case of the {} table covers {} and {}",
                self.table.variant,
                self.point_text(p),
                self.point_text(q)
            ))),
            l => Ok(Rational::integer(self.table.distances[l as usize])),
        }
    }

    /// Membership in the subset the greedy construction targets: for pairs
    /// `|s| < |t|`, `s <lex t`, `t(|s|) = 0`; for triples additionally
    /// `|t| < |u|`, `t <lex u`, `u(|s|) = u(|t|) = 0`.
    pub fn in_embedding_set(&self, p: usize) -> bool {
        let pt = self.point(p);
        let ok = |a: &[u8], b: &[u8]| a.len() < b.len() && a < b && b[a.len()] == 0;
        match pt.as_slice() {
            [s, t] => ok(s, t),
            [s, t, u] => ok(s, t) && ok(t, u) && u[s.len()] == 0,
            _ => false,
        }
    }

    pub fn embedding_set(&self) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.in_embedding_set(p)).collect()
    }

    /// Index of the point made of the given strings, if present.
    pub fn find_point(&self, strings: &[Vec<u8>]) -> Option<usize> {
        let index: HashMap<&[u8], u16> =
            self.strings.iter().enumerate().map(|(i, s)| (s.as_slice(), i as u16)).collect();
        let mut key = [0u16; 3];
        for (k, s) in strings.iter().enumerate() {
            key[k] = *index.get(s.as_slice())?;
        }
        if strings.len() == 2 {
            key[2] = key[1];
        }
        self.points.binary_search(&key).ok()
    }

    /// The induced metric space on `subset`.
    pub fn subspace(&self, subset: &[usize]) -> Result<FiniteMetricSpace> {
        let mut rows = vec![vec![Rational::ZERO; subset.len()]; subset.len()];
        for i in 0..subset.len() {
            for j in 0..subset.len() {
                rows[i][j] = self.dist(subset[i], subset[j])?;
            }
        }
        FiniteMetricSpace::new(rows)
    }

    /// Exhaustive triangle scan. Only two-step paths whose length is below
    /// the largest distance can be beaten by a direct distance, so only
    /// those are followed. Returns the witness with the least middle point.
    pub fn check_metric(&self) -> Result<MetricVerdict> {
        let vals = &self.table.distances;
        let max = *vals.last().expect("nonempty distance set");
        let k = vals.len();
        let short_pairs: Vec<(usize, usize)> =
            (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).filter(|&(a, b)| vals[a] + vals[b] < max).collect();
        let n = self.len();
        let outcome = (0..n).into_par_iter().find_map_first(|p| {
            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
            for q in 0..n {
                if q == p {
                    continue;
                }
                match self.label(p, q) {
                    UNCOVERED => return Some(Err((p, q))),
                    l => groups[l as usize].push(q),
                }
            }
            for &(a, b) in &short_pairs {
                let bound = vals[a] + vals[b];
                for &q in &groups[a] {
                    for &r in &groups[b] {
                        if q == r {
                            continue;
                        }
                        match self.label(q, r) {
                            UNCOVERED => return Some(Err((q, r))),
                            l if vals[l as usize] > bound => return Some(Ok((q, p, r))),
                            _ => {}
                        }
                    }
                }
            }
            None
        });
        let witness = match outcome {
            Some(Err((p, q))) => return Err(self.dist(p, q).unwrap_err()),
            Some(Ok(w)) => Some(w),
            None => None,
        };
        Ok(MetricVerdict {
            variant: self.table.variant.clone(),
            depth: self.depth,
            points: n,
            metric: witness.is_none(),
            witness,
        })
    }
}

fn string_text(s: &[u8]) -> String {
    if s.is_empty() {
        "()".into()
    } else {
        s.iter().map(|d| char::from(b'0' + d)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricVerdict {
    pub variant: String,
    pub depth: usize,
    pub points: usize,
    pub metric: bool,
    /// `(q, p, r)` with `d(q, r) > d(q, p) + d(p, r)`.
    pub witness: Option<(usize, usize, usize)>,
}

/// Builds a coding at `depth` and scans all of its triangles.
pub fn milliken_space(variant: MillikenVariant, depth: usize) -> Result<(MillikenSpace, MetricVerdict)> {
    let space = MillikenSpace::build(variant.table(), depth)?;
    let verdict = space.check_metric()?;
    Ok((space, verdict))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CodingEmbedding {
    /// Image of each target point as its strings.
    pub strings: Vec<Vec<String>>,
    /// Image of each target point as an index of the coding at `depth`.
    pub indices: Vec<usize>,
    pub depth: usize,
    /// Length of the tallest string used.
    pub needed_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "outcome")]
pub enum CodingOutcome {
    Embedded(CodingEmbedding),
    /// The greedy construction needs strings of length `needed`.
    DepthExhausted {
        depth: usize,
        needed: usize,
    },
}

/// Strings chosen for one target point.
struct Node {
    s: Vec<u8>,
    t: Vec<u8>,
    u: Vec<u8>,
}

/// The greedy height-increasing embedding. Every new string is taller than
/// everything built so far, so all heights differ; a new point reuses the
/// `s` (and for triples the `t`) of the points it is close to, and its
/// newest string records its distances to earlier points in the digits at
/// their heights.
fn greedy_strings(variant: MillikenVariant, target: &FiniteMetricSpace) -> Result<Vec<Node>> {
    let d = |i: usize, j: usize| target.dist(i, j).numer();
    let mut nodes: Vec<Node> = Vec::new();
    let mut height = 0usize;
    let zeros = |h: usize| vec![0u8; h];
    for n in 0..target.len() {
        if n == 0 {
            let node = match variant {
                MillikenVariant::V1378 => Node { s: zeros(0), t: zeros(1), u: zeros(2) },
                _ => Node { s: zeros(0), t: zeros(1), u: Vec::new() },
            };
            height = if variant == MillikenVariant::V1378 { 3 } else { 2 };
            nodes.push(node);
            continue;
        }
        let close = |m: usize| match variant {
            MillikenVariant::V134 => d(m, n) == 1,
            MillikenVariant::V2379 => d(m, n) <= 3,
            MillikenVariant::V2678 | MillikenVariant::V26712 => d(m, n) == 2,
            MillikenVariant::V1378 => d(m, n) <= 3,
        };
        let class: Vec<usize> = (0..n).filter(|&m| close(m)).collect();
        let shared = |pick: &dyn Fn(&Node) -> &Vec<u8>, members: &[usize]| -> Result<Option<Vec<u8>>> {
            let Some(&first) = members.first() else { return Ok(None) };
            if members.iter().any(|&m| pick(&nodes[m]) != pick(&nodes[first])) {
                return Err(Error::Invalid(format!(
                    "target is not a {variant} space: point {n} is close to points coded apart"
                )));
            }
            Ok(Some(pick(&nodes[first]).clone()))
        };
        let s = match shared(&|x: &Node| &x.s, &class)? {
            Some(s) => s,
            None => {
                let mut s = zeros(height);
                if variant == MillikenVariant::V26712 {
                    // s-edges record distance 12 to earlier classes
                    for m in 0..n {
                        if d(m, n) == 12 {
                            s[nodes[m].s.len()] = 1;
                        }
                    }
                }
                height += 1;
                s
            }
        };
        if variant == MillikenVariant::V1378 {
            let tight: Vec<usize> = (0..n).filter(|&m| d(m, n) == 1).collect();
            let t = match shared(&|x: &Node| &x.t, &tight)? {
                Some(t) => t,
                None => {
                    height += 1;
                    zeros(height - 1)
                }
            };
            let mut u = zeros(height);
            for m in (0..n).filter(|m| !class.contains(m)) {
                u[nodes[m].u.len()] = u8::from(d(m, n) == 7);
            }
            height += 1;
            nodes.push(Node { s, t, u });
            continue;
        }
        let mut t = zeros(height);
        for m in 0..n {
            let inside = class.contains(&m);
            let digit = match variant {
                MillikenVariant::V134 => !inside && d(m, n) == 3,
                MillikenVariant::V2379 => d(m, n) == if inside { 2 } else { 7 },
                MillikenVariant::V2678 => {
                    if !inside {
                        t[nodes[m].t.len()] = match d(m, n) {
                            6 => 0,
                            7 => 1,
                            _ => 2,
                        };
                    }
                    continue;
                }
                MillikenVariant::V26712 => inside || d(m, n) == 7,
                MillikenVariant::V1378 => unreachable!("handled above"),
            };
            t[nodes[m].t.len()] = u8::from(digit);
        }
        // copying the 1-digits of s keeps s lexicographically below t
        for (h, &bit) in s.iter().enumerate() {
            if bit != 0 {
                t[h] = bit;
            }
        }
        height += 1;
        nodes.push(Node { s, t, u: Vec::new() });
    }
    Ok(nodes)
}

fn check_target_distances(table: &CodingTable, target: &FiniteMetricSpace) -> Result<()> {
    for dist in target.distances() {
        if !dist.is_integer() || !table.distances.contains(&dist.numer()) {
            return Err(Error::DistanceOutsideSet(dist));
        }
    }
    Ok(())
}

/// Embeds `target` into the coding at `depth` by the greedy construction
/// and verifies the result against `target`.
pub fn coding_embed(variant: MillikenVariant, depth: usize, target: &FiniteMetricSpace) -> Result<CodingOutcome> {
    let table = variant.table();
    check_target_distances(&table, target)?;
    if depth > MAX_DEPTH {
        return Err(Error::Precondition(format!("depth {depth} exceeds {MAX_DEPTH}")));
    }
    let nodes = greedy_nodes(variant, &table, target)?;
    let needed = nodes.iter().flatten().map(|s| s.len()).max().unwrap_or(0);
    if needed > depth {
        return Ok(CodingOutcome::DepthExhausted { depth, needed });
    }
    let space = MillikenSpace::build(table, depth)?;
    let mut embedding = place_nodes(variant, &space, &nodes, target)?;
    embedding.depth = depth;
    Ok(CodingOutcome::Embedded(embedding))
}

/// The greedy construction with no depth limit, verified on the coding
/// spanned by the strings it uses. `depth` in the result is the height the
/// construction reached.
pub fn greedy_coding(variant: MillikenVariant, target: &FiniteMetricSpace) -> Result<CodingEmbedding> {
    let table = variant.table();
    check_target_distances(&table, target)?;
    let nodes = greedy_nodes(variant, &table, target)?;
    let space = MillikenSpace::over_strings(table, nodes.iter().flatten().cloned().collect())?;
    place_nodes(variant, &space, &nodes, target)
}

/// Greedy output as string tuples of the table's arity.
fn greedy_nodes(
    variant: MillikenVariant,
    table: &CodingTable,
    target: &FiniteMetricSpace,
) -> Result<Vec<Vec<Vec<u8>>>> {
    let arity = table.arity;
    Ok(greedy_strings(variant, target)?
        .iter()
        .map(|x| if arity == 3 { vec![x.s.clone(), x.t.clone(), x.u.clone()] } else { vec![x.s.clone(), x.t.clone()] })
        .collect())
}

/// Locates the greedy points in `space`, checks embedding-set membership
/// and compares every distance with `target`.
fn place_nodes(
    variant: MillikenVariant,
    space: &MillikenSpace,
    nodes: &[Vec<Vec<u8>>],
    target: &FiniteMetricSpace,
) -> Result<CodingEmbedding> {
    let mut indices = Vec::with_capacity(nodes.len());
    for x in nodes {
        let p = space
            .find_point(x)
            .ok_or_else(|| Error::Internal("greedy strings do not form a point of the coding".into()))?;
        if !space.in_embedding_set(p) {
            return Err(Error::Internal(format!("greedy point {} misses the embedding set", space.point_text(p))));
        }
        indices.push(p);
    }
    for i in 0..indices.len() {
        for j in i + 1..indices.len() {
            if space.dist(indices[i], indices[j])? != target.dist(i, j) {
                return Err(Error::Invalid(format!(
                    "target is not realizable by the {variant} coding: points {i},{j} at {} map to {}",
                    target.dist(i, j),
                    space.dist(indices[i], indices[j])?
                )));
            }
        }
    }
    let needed = nodes.iter().flatten().map(|s| s.len()).max().unwrap_or(0);
    Ok(CodingEmbedding {
        strings: nodes.iter().map(|x| x.iter().map(|s| string_text(s)).collect()).collect(),
        indices,
        depth: needed,
        needed_depth: needed,
    })
}

/// Any isometric embedding of `target` into the embedding set of `space`,
/// by backtracking; the first one in index order. Used to tell apart the
/// limits of the greedy construction from the limits of the truncation.
pub fn coding_search(space: &MillikenSpace, target: &FiniteMetricSpace) -> Result<Option<Vec<usize>>> {
    check_target_distances(&space.table, target)?;
    let cand = space.embedding_set();
    fn go(space: &MillikenSpace, target: &FiniteMetricSpace, cand: &[usize], map: &mut Vec<usize>) -> Result<bool> {
        let i = map.len();
        if i == target.len() {
            return Ok(true);
        }
        for &c in cand {
            if map.contains(&c) {
                continue;
            }
            let mut fits = true;
            for (k, &p) in map.iter().enumerate() {
                if space.dist(p, c)? != target.dist(k, i) {
                    fits = false;
                    break;
                }
            }
            if fits {
                map.push(c);
                if go(space, target, cand, map)? {
                    return Ok(true);
                }
                map.pop();
            }
        }
        Ok(false)
    }
    let mut map = Vec::new();
    Ok(go(space, target, &cand, &mut map)?.then_some(map))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_parse_and_supplied_cases_are_marked() {
        for v in MillikenVariant::ALL {
            let t = v.table();
            assert_eq!(t.variant, v.name());
            let supplied = t.cases.iter().filter(|c| c.supplied).count();
            let expected = usize::from(matches!(v, MillikenVariant::V2678 | MillikenVariant::V26712));
            assert_eq!(supplied, expected, "{v}");
        }
    }

    #[test]
    fn point_counts() {
        let s = MillikenSpace::build(MillikenVariant::V134.table(), 2).unwrap();
        assert_eq!(s.strings().len(), 7);
        assert_eq!(s.len(), 21);
        let t = MillikenSpace::build(MillikenVariant::V2678.table(), 1).unwrap();
        assert_eq!(t.len(), 6);
        let u = MillikenSpace::build(MillikenVariant::V1378.table(), 2).unwrap();
        assert_eq!(u.len(), 35);
    }

    #[test]
    fn small_depths_are_metric() {
        for v in MillikenVariant::ALL {
            for depth in 0..=3 {
                let (space, verdict) = milliken_space(v, depth).unwrap();
                assert!(verdict.metric, "{v} depth {depth}: {:?}", verdict.witness);
                if space.len() <= 120 {
                    let all: Vec<usize> = (0..space.len()).collect();
                    let sub = space.subspace(&all).unwrap();
                    assert!(sub.first_triangle_violation().unwrap().is_none());
                }
            }
        }
    }

    #[test]
    fn distances_stay_in_the_set() {
        let (space, _) = milliken_space(MillikenVariant::V2379, 3).unwrap();
        for p in 0..space.len() {
            for q in 0..p {
                assert!([2, 3, 7, 9].contains(&space.dist(p, q).unwrap().numer()));
            }
        }
    }

    #[test]
    fn inverted_membership_breaks_the_metric() {
        let src = MillikenVariant::V134
            .table_source()
            .replace("\"s_eq\"", "\"tmp\"")
            .replace("\"s_ne\"", "\"s_eq\"")
            .replace("\"tmp\"", "\"s_ne\"");
        let table = CodingTable::parse(&src).unwrap();
        let verdict = MillikenSpace::build(table, 3).unwrap().check_metric().unwrap();
        assert!(!verdict.metric);
        assert!(verdict.witness.is_some());
    }

    #[test]
    fn dropping_the_supplied_case_leaves_pairs_uncovered() {
        let src = MillikenVariant::V26712.table_source();
        let cut = src.find("# s = s' without").unwrap();
        let table = CodingTable::parse(&src[..cut]).unwrap();
        assert!(MillikenSpace::build(table, 2).unwrap().check_metric().is_err());
    }

    #[test]
    fn two_points_at_distance_one_share_s() {
        let target = FiniteMetricSpace::equilateral(2, Rational::ONE);
        let CodingOutcome::Embedded(e) = coding_embed(MillikenVariant::V134, 3, &target).unwrap() else { panic!() };
        assert_eq!(e.strings[0][0], e.strings[1][0]);
    }

    #[test]
    fn one_point_embeds_trivially() {
        for v in MillikenVariant::ALL {
            let target = FiniteMetricSpace::equilateral(1, Rational::ONE);
            assert!(matches!(coding_embed(v, 3, &target).unwrap(), CodingOutcome::Embedded(_)));
        }
    }

    #[test]
    fn distance_outside_set_is_rejected() {
        let target = FiniteMetricSpace::equilateral(2, Rational::integer(5));
        assert!(matches!(coding_embed(MillikenVariant::V134, 3, &target), Err(Error::DistanceOutsideSet(_))));
    }

    #[test]
    fn far_points_exhaust_depth() {
        let target = FiniteMetricSpace::equilateral(4, Rational::integer(9));
        assert_eq!(
            coding_embed(MillikenVariant::V2379, 5, &target).unwrap(),
            CodingOutcome::DepthExhausted { depth: 5, needed: 7 }
        );
    }

    #[test]
    fn greedy_without_depth_limit_reaches_the_needed_height() {
        let target = FiniteMetricSpace::equilateral(4, Rational::integer(9));
        let e = greedy_coding(MillikenVariant::V2379, &target).unwrap();
        assert_eq!(e.needed_depth, 7);
        assert_eq!(e.indices.len(), 4);
    }

    #[test]
    fn sparse_coding_agrees_with_the_truncation() {
        for v in [MillikenVariant::V134, MillikenVariant::V2678, MillikenVariant::V1378] {
            let full = MillikenSpace::build(v.table(), 3).unwrap();
            let pick: Vec<usize> = (0..full.len()).step_by(full.len() / 12 + 1).collect();
            let strings: Vec<Vec<u8>> =
                pick.iter().flat_map(|&p| full.point(p).into_iter().map(|s| s.to_vec()).collect::<Vec<_>>()).collect();
            let sparse = MillikenSpace::over_strings(v.table(), strings).unwrap();
            for &a in &pick {
                for &b in &pick {
                    let own = |p: usize| full.point(p).iter().map(|s| s.to_vec()).collect::<Vec<_>>();
                    let (sa, sb) = (sparse.find_point(&own(a)).unwrap(), sparse.find_point(&own(b)).unwrap());
                    assert_eq!(full.dist(a, b).unwrap(), sparse.dist(sa, sb).unwrap(), "{v}");
                }
            }
        }
    }
}
