//! The 4-values condition on distance sets and amalgamation inside the class
//! of spaces with distances in a fixed set `S`.
//!
//! A quadruple `q = (u0,u1,u2,u3)` over `S` has admissible interval
//! `I(q) = [max(|u0-u1|, |u2-u3|), min(u0+u1, u2+u3)]` and is good when
//! `I(q)` meets `S`. `S` satisfies the 4-values condition iff `q` and
//! `q* = (u0,u2,u1,u3)` are always good together.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::spaces::{DistanceSet, FiniteMetricSpace, PointMap, SearchBounds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Quadruple(pub [Rational; 4]);

/// The 8 index permutations that fix the pairing `{{0,1},{2,3}}`.
pub const TRIVIAL_PERMUTATIONS: [[usize; 4]; 8] =
    [[0, 1, 2, 3], [1, 0, 2, 3], [0, 1, 3, 2], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 0, 1], [2, 3, 1, 0], [3, 2, 1, 0]];

impl Quadruple {
    pub fn from_integers(u: [i64; 4]) -> Quadruple {
        Quadruple(u.map(Rational::integer))
    }

    pub fn permuted(self, sigma: [usize; 4]) -> Quadruple {
        Quadruple(sigma.map(|i| self.0[i]))
    }

    /// `(u0,u2,u1,u3)`.
    pub fn star(self) -> Quadruple {
        self.permuted([0, 2, 1, 3])
    }

    /// `(u0,u3,u2,u1)`.
    pub fn lower_star(self) -> Quadruple {
        self.permuted([0, 3, 2, 1])
    }

    pub fn interval(self) -> Result<AdmissibleInterval> {
        let [u0, u1, u2, u3] = self.0;
        Ok(AdmissibleInterval {
            lo: u0.abs_diff(u1)?.max(u2.abs_diff(u3)?),
            hi: u0.checked_add(u1)?.min(u2.checked_add(u3)?),
        })
    }

    pub fn is_good(self, s: &DistanceSet) -> Result<bool> {
        Ok(self.interval()?.meets(s))
    }

    /// Representative of the class under trivial permutations: the pair
    /// with the larger difference comes first (then the larger sum), and
    /// each pair is increasing.
    pub fn display_form(self) -> Quadruple {
        let [u0, u1, u2, u3] = self.0;
        let p = (u0.min(u1), u0.max(u1));
        let r = (u2.min(u3), u2.max(u3));
        let key = |(a, b): (Rational, Rational)| (b - a, a + b);
        let (first, second) = if key(r) > key(p) { (r, p) } else { (p, r) };
        Quadruple([first.0, first.1, second.0, second.1])
    }

    /// Least member of the trivial-permutation class, used for equality
    /// up to trivial permutation.
    pub fn class_key(self) -> Quadruple {
        TRIVIAL_PERMUTATIONS.iter().map(|&s| self.permuted(s)).min().unwrap()
    }

    pub fn trivially_equivalent(self, other: Quadruple) -> bool {
        self.class_key() == other.class_key()
    }
}

impl std::fmt::Display for Quadruple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// The closed interval `[lo, hi]`, empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AdmissibleInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl AdmissibleInterval {
    pub fn meets(self, s: &DistanceSet) -> bool {
        s.intersects(self.lo, self.hi)
    }
}

impl std::fmt::Display for AdmissibleInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Every quadruple over `S` in lexicographic order of value indices.
fn quadruples(s: &DistanceSet) -> impl Iterator<Item = Quadruple> + '_ {
    let v = s.values();
    let k = v.len();
    (0..k.pow(4))
        .map(move |code| Quadruple([v[code / (k * k * k)], v[code / (k * k) % k], v[code / k % k], v[code % k]]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FourValuesVerdict {
    pub holds: bool,
    /// Lexicographically least `q` with exactly one of `q`, `q*` good.
    pub witness: Option<Quadruple>,
}

pub fn check_four_values(s: &DistanceSet) -> Result<FourValuesVerdict> {
    check_four_values_bounded(s, SearchBounds::from_env().distance_set)
}

pub fn check_four_values_bounded(s: &DistanceSet, bound: usize) -> Result<FourValuesVerdict> {
    if s.len() > bound {
        return Err(Error::SearchTooLarge {
            what: "4-values check (|S|)",
            size: s.len() as u128,
            bound: bound as u128,
        });
    }
    for q in quadruples(s) {
        if q.is_good(s)? != q.star().is_good(s)? {
            return Ok(FourValuesVerdict { holds: false, witness: Some(q) });
        }
    }
    Ok(FourValuesVerdict { holds: true, witness: None })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwapStatus {
    pub image: Quadruple,
    pub bad: bool,
    /// Display form of the listed quadruple the image is trivially
    /// equivalent to, when it is bad.
    pub matches: Option<Quadruple>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BadEntry {
    pub quadruple: Quadruple,
    pub star: SwapStatus,
    pub lower_star: SwapStatus,
}

impl BadEntry {
    /// Both swaps are bad, which is what the 4-values condition needs.
    pub fn closed(&self) -> bool {
        self.star.bad && self.lower_star.bad
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BadRow {
    pub interval: AdmissibleInterval,
    pub entries: Vec<BadEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BadQuadrupleTable {
    pub rows: Vec<BadRow>,
}

impl BadQuadrupleTable {
    /// One line per interval: `[a,b]  (u0,u1,u2,u3)` then the remaining
    /// quadruples of that row, each followed by its swap resolution.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let quads: Vec<String> = row.entries.iter().map(|e| e.quadruple.to_string()).collect();
            let res: Vec<String> = row.entries.iter().map(resolution_text).collect();
            out.push_str(&format!("{}  {}  {}\n", row.interval, quads.join(", "), res.join("; ")));
        }
        out
    }
}

fn resolution_text(e: &BadEntry) -> String {
    let one = |name: &str, st: &SwapStatus| match (&st.matches, st.bad) {
        (Some(m), _) => format!("{name} ~ {m}"),
        (None, true) => format!("{name} bad"),
        (None, false) => format!("{name} GOOD {}", st.image),
    };
    format!("{}: {}, {}", e.quadruple, one("*", &e.star), one("_*", &e.lower_star))
}

/// All bad quadruples of `S` grouped by their (empty) admissible interval
/// `[a,b]`, `a` a difference and `b` a sum of elements of `S`, listed up to
/// trivial permutation. Intervals with `b >= max S` always meet `S`, so the
/// rows are exactly those with `b` below the large sums.
pub fn bad_quadruples(s: &DistanceSet) -> Result<BadQuadrupleTable> {
    bad_quadruples_bounded(s, SearchBounds::from_env().distance_set)
}

pub fn bad_quadruples_bounded(s: &DistanceSet, bound: usize) -> Result<BadQuadrupleTable> {
    if s.len() > bound {
        return Err(Error::SearchTooLarge {
            what: "bad quadruple table (|S|)",
            size: s.len() as u128,
            bound: bound as u128,
        });
    }
    let mut by_interval: BTreeMap<AdmissibleInterval, BTreeMap<Quadruple, Quadruple>> = BTreeMap::new();
    for q in quadruples(s) {
        let iv = q.interval()?;
        if !iv.meets(s) {
            by_interval.entry(iv).or_default().entry(q.class_key()).or_insert_with(|| q.display_form());
        }
    }
    let mut listed: BTreeMap<Quadruple, Quadruple> = BTreeMap::new();
    for class in by_interval.values() {
        listed.extend(class.iter().map(|(k, v)| (*k, *v)));
    }
    let status = |image: Quadruple| -> Result<SwapStatus> {
        let bad = !image.is_good(s)?;
        Ok(SwapStatus { image, bad, matches: listed.get(&image.class_key()).copied() })
    };
    let mut rows = Vec::new();
    for (interval, class) in &by_interval {
        let mut entries = Vec::new();
        for q in class.values() {
            entries.push(BadEntry { quadruple: *q, star: status(q.star())?, lower_star: status(q.lower_star())? });
        }
        rows.push(BadRow { interval: *interval, entries });
    }
    Ok(BadQuadrupleTable { rows })
}

/// `S ~ T`: same size and the same pattern of triangle inequalities
/// `s_i <= s_j + s_k` over all index triples.
pub fn similar(s: &DistanceSet, t: &DistanceSet) -> Result<bool> {
    if s.len() != t.len() {
        return Ok(false);
    }
    let (a, b) = (s.values(), t.values());
    let k = a.len();
    for i in 0..k {
        for j in 0..k {
            for l in j..k {
                if (a[i] <= a[j].checked_add(a[l])?) != (b[i] <= b[j].checked_add(b[l])?) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amalgam {
    /// Points `0..|y0|` are `y0`; the points of `y1` outside the overlap
    /// follow in increasing order.
    pub space: FiniteMetricSpace,
    pub y1_embedding: PointMap,
}

/// Strong amalgamation of `y0` and `y1` over a common subspace, inside the
/// class of `S`-valued spaces.
///
/// `e0[i]` and `e1[i]` are the images of the `i`-th common point. Cross
/// distances are filled by induction on the symmetric difference, removing
/// the highest exclusive point of `y1` first; each one-point step picks the
/// least element of `S` in `[m, m']` where
/// `m = max |d(a,c) - d(c,b)|` and `m' = min d(a,c) + d(c,b)` over the
/// common points `c`.
pub fn amalgamate(
    s: &DistanceSet,
    y0: &FiniteMetricSpace,
    y1: &FiniteMetricSpace,
    e0: &PointMap,
    e1: &PointMap,
) -> Result<Amalgam> {
    amalgamate_with(s, y0, y1, e0, e1, &mut ValueChoice::Least)
}

/// How a one-point amalgamation step picks among the admissible values.
#[derive(Debug, Clone)]
pub enum ValueChoice {
    /// The least element of `S` in `[m, m']`.
    Least,
    /// A uniformly random admissible element, reproducible from the seed.
    Seeded(Box<ChaCha8Rng>),
}

impl ValueChoice {
    fn pick(&mut self, s: &DistanceSet, lo: Rational, hi: Rational) -> Option<Rational> {
        match self {
            ValueChoice::Least => s.first_in(lo, hi),
            ValueChoice::Seeded(rng) => {
                let admissible: Vec<Rational> = s.values().iter().copied().filter(|v| lo <= *v && *v <= hi).collect();
                if admissible.is_empty() {
                    None
                } else {
                    Some(admissible[rng.gen_range(0..admissible.len())])
                }
            }
        }
    }
}

/// [`amalgamate`] with an explicit rule for choosing admissible values.
pub fn amalgamate_with(
    s: &DistanceSet,
    y0: &FiniteMetricSpace,
    y1: &FiniteMetricSpace,
    e0: &PointMap,
    e1: &PointMap,
    choice: &mut ValueChoice,
) -> Result<Amalgam> {
    let verdict = check_four_values(s)?;
    if let Some(w) = verdict.witness {
        return Err(Error::FourValuesFailure(w.0));
    }
    y0.check_distances_in(s)?;
    y1.check_distances_in(s)?;
    if e0.len() != e1.len() {
        return Err(Error::LengthMismatch { expected: e0.len(), got: e1.len() });
    }
    if e0.as_slice().iter().any(|&p| p >= y0.len()) || e1.as_slice().iter().any(|&p| p >= y1.len()) {
        return Err(Error::Invalid("overlap map points outside the space".into()));
    }
    for i in 0..e0.len() {
        for j in i + 1..e0.len() {
            if y0.dist(e0.image(i), e0.image(j)) != y1.dist(e1.image(i), e1.image(j)) {
                return Err(Error::Invalid(format!("spaces disagree on common points {i} and {j}")));
            }
        }
    }

    let n0 = y0.len();
    let mut y1_to_union = vec![usize::MAX; y1.len()];
    for i in 0..e1.len() {
        y1_to_union[e1.image(i)] = e0.image(i);
    }
    let mut next = n0;
    for slot in y1_to_union.iter_mut().filter(|p| **p == usize::MAX) {
        *slot = next;
        next += 1;
    }
    let n = next;
    let mut d: Vec<Option<Rational>> = vec![None; n * n];
    for i in 0..n {
        d[i * n + i] = Some(Rational::ZERO);
    }
    for a in 0..n0 {
        for b in 0..n0 {
            d[a * n + b] = Some(y0.dist(a, b));
        }
    }
    for a in 0..y1.len() {
        for b in 0..y1.len() {
            d[y1_to_union[a] * n + y1_to_union[b]] = Some(y1.dist(a, b));
        }
    }
    let p0: Vec<usize> = (0..n0).collect();
    let mut p1 = y1_to_union.clone();
    p1.sort_unstable();
    let mut filler = Filler { s, n, d, choice };
    filler.fill(&p0, &p1)?;
    let space = FiniteMetricSpace::from_fn(n, |i, j| filler.d[i * n + j].expect("all pairs filled"))
        .map_err(|e| Error::Internal(format!("amalgam is not metric: {e}")))?;
    Ok(Amalgam { space, y1_embedding: PointMap::new(y1_to_union)? })
}

struct Filler<'a> {
    s: &'a DistanceSet,
    n: usize,
    d: Vec<Option<Rational>>,
    choice: &'a mut ValueChoice,
}

impl Filler<'_> {
    fn get(&self, a: usize, b: usize) -> Rational {
        self.d[a * self.n + b].expect("distance known")
    }

    fn fill(&mut self, p0: &[usize], p1: &[usize]) -> Result<()> {
        let e0: Vec<usize> = p0.iter().copied().filter(|p| !p1.contains(p)).collect();
        let e1: Vec<usize> = p1.iter().copied().filter(|p| !p0.contains(p)).collect();
        if e0.is_empty() || e1.is_empty() {
            return Ok(());
        }
        let (y0, y1) = (*e0.last().unwrap(), *e1.last().unwrap());
        if e0.len() > 1 || e1.len() > 1 {
            let p1_minus: Vec<usize> = p1.iter().copied().filter(|&p| p != y1).collect();
            self.fill(p0, &p1_minus)?;
            let mut z0: Vec<usize> = p0.iter().chain(p1_minus.iter()).copied().filter(|&p| p != y0).collect();
            z0.sort_unstable();
            z0.dedup();
            self.fill(&z0, p1)?;
        }
        // one-point step over every other point of the union
        let common: Vec<usize> = p0.iter().chain(p1.iter()).copied().filter(|&c| c != y0 && c != y1).collect();
        let mut lo = Rational::ZERO;
        let mut hi: Option<Rational> = None;
        for &c in &common {
            let (a, b) = (self.get(y0, c), self.get(c, y1));
            lo = lo.max(a.abs_diff(b)?);
            let sum = a.checked_add(b)?;
            hi = Some(hi.map_or(sum, |h| h.min(sum)));
        }
        let hi = hi.unwrap_or_else(|| self.s.max());
        let u = self
            .choice
            .pick(self.s, lo, hi)
            .ok_or_else(|| Error::Internal(format!("no distance in [{lo},{hi}] for the pair ({y0},{y1})")))?;
        self.d[y0 * self.n + y1] = Some(u);
        self.d[y1 * self.n + y0] = Some(u);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn set(v: &[i64]) -> DistanceSet {
        DistanceSet::from_integers(v).unwrap()
    }

    #[test]
    fn interval_examples() {
        let iv = Quadruple::from_integers([2, 5, 1, 1]).interval().unwrap();
        assert_eq!((iv.lo, iv.hi), (q(3, 1), q(2, 1)));
        assert!(!iv.meets(&set(&[1, 2, 5])));
        let iv = Quadruple::from_integers([1, 1, 1, 1]).interval().unwrap();
        assert_eq!((iv.lo, iv.hi), (q(0, 1), q(2, 1)));
        assert!(iv.meets(&set(&[1])));
        let iv = Quadruple::from_integers([3, 7, 2, 2]).interval().unwrap();
        assert_eq!((iv.lo, iv.hi), (q(4, 1), q(4, 1)));
        assert!(!iv.meets(&set(&[2, 3, 7, 9])));
    }

    #[test]
    fn interval_is_invariant_under_trivial_permutations() {
        let q0 = Quadruple::from_integers([2, 9, 3, 7]);
        for s in TRIVIAL_PERMUTATIONS {
            assert_eq!(q0.permuted(s).interval(), q0.interval());
        }
    }

    #[test]
    fn four_values_examples() {
        let v = check_four_values(&set(&[1, 2, 4])).unwrap();
        assert_eq!(v.witness, Some(Quadruple::from_integers([1, 1, 2, 4])));
        assert!(check_four_values(&set(&[1, 2, 5])).unwrap().holds);
        assert!(!check_four_values(&set(&[5, 7, 8, 14])).unwrap().holds);
        assert!(check_four_values(&set(&[1])).unwrap().holds);
    }

    #[test]
    fn bad_quadruples_for_125() {
        let t = bad_quadruples(&set(&[1, 2, 5])).unwrap();
        let rows: Vec<(String, Vec<String>)> = t
            .rows
            .iter()
            .map(|r| (r.interval.to_string(), r.entries.iter().map(|e| e.quadruple.to_string()).collect()))
            .collect();
        let expect = [
            ("[3,2]", "(2,5,1,1)"),
            ("[3,3]", "(2,5,1,2)"),
            ("[3,4]", "(2,5,2,2)"),
            ("[4,2]", "(1,5,1,1)"),
            ("[4,3]", "(1,5,1,2)"),
            ("[4,4]", "(1,5,2,2)"),
        ];
        assert_eq!(rows.len(), 6);
        for ((iv, qs), (eiv, eq)) in rows.iter().zip(expect) {
            assert_eq!((iv.as_str(), qs.clone()), (eiv, vec![eq.to_string()]));
        }
        assert!(t.rows.iter().flat_map(|r| &r.entries).all(BadEntry::closed));
        assert!(bad_quadruples(&set(&[1])).unwrap().rows.is_empty());
    }

    #[test]
    fn similarity_examples() {
        assert!(similar(&set(&[1, 2]), &set(&[2, 3])).unwrap());
        assert!(!similar(&set(&[1, 2]), &set(&[1, 3])).unwrap());
        assert!(similar(&set(&[1, 3, 4]), &set(&[1, 3, 4])).unwrap());
        assert!(!similar(&set(&[1, 2]), &set(&[1, 2, 3])).unwrap());
    }

    #[test]
    fn amalgamating_a_space_with_itself() {
        let x = FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]]).unwrap();
        let id = PointMap::identity(3);
        let a = amalgamate(&set(&[1, 2]), &x, &x, &id, &id).unwrap();
        assert_eq!(a.space, x);
    }

    #[test]
    fn amalgamation_picks_least_admissible_value() {
        // triangles (1,2,3) glued along the side of length 2
        let t = FiniteMetricSpace::from_integers(&[&[0, 2, 1], &[2, 0, 3], &[1, 3, 0]]).unwrap();
        let e = PointMap::new(vec![0, 1]).unwrap();
        let a = amalgamate(&set(&[1, 2, 3]), &t, &t, &e, &e).unwrap();
        // free pair: both apexes sit at 1 from point 0 and 3 from point 1
        assert_eq!(a.space.len(), 4);
        assert_eq!(a.space.dist(2, 3), q(1, 1));
    }

    #[test]
    fn amalgamation_rejects_bad_sets() {
        let x = FiniteMetricSpace::equilateral(1, Rational::ONE);
        let id = PointMap::identity(1);
        assert!(matches!(amalgamate(&set(&[1, 2, 4]), &x, &x, &id, &id), Err(Error::FourValuesFailure(_))));
        let y = FiniteMetricSpace::equilateral(2, q(3, 1));
        assert_eq!(amalgamate(&set(&[1, 2]), &y, &y, &id, &id), Err(Error::DistanceOutsideSet(q(3, 1))));
    }
}
