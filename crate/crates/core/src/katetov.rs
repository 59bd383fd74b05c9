//! Katetov maps, one-point extensions and finite Urysohn approximations.
//!
//! A map `f` on a space `X` is Katetov when
//! `|f(x) - f(y)| <= d(x,y) <= f(x) + f(y)` for all `x, y`; it describes
//! the distances from one new point to `X`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::four_values::{amalgamate_with, check_four_values, ValueChoice};
use crate::rational::Rational;
use crate::spaces::{canonicalize_bounded, DistanceSet, FiniteMetricSpace, PointMap};

/// A map over the points `base` of some ambient space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct KatetovMap {
    pub base: Vec<usize>,
    pub values: Vec<Rational>,
}

impl KatetovMap {
    pub fn new(base: Vec<usize>, values: Vec<Rational>) -> Result<KatetovMap> {
        if base.len() != values.len() {
            return Err(Error::LengthMismatch { expected: base.len(), got: values.len() });
        }
        if let Some(v) = values.iter().find(|v| **v < Rational::ZERO) {
            return Err(Error::Invalid(format!("negative value {v}")));
        }
        Ok(KatetovMap { base, values })
    }

    /// `f = d(x0, .)` over all of `x`.
    pub fn distance_from(x: &FiniteMetricSpace, x0: usize) -> KatetovMap {
        KatetovMap { base: (0..x.len()).collect(), values: x.row(x0).to_vec() }
    }

    /// `f` over the whole space `x`, listed point by point.
    pub fn total(x: &FiniteMetricSpace, values: Vec<Rational>) -> Result<KatetovMap> {
        KatetovMap::new((0..x.len()).collect(), values)
    }
}

/// First pair `(i, j)` of base positions violating the Katetov inequalities.
pub fn katetov_violation(x: &FiniteMetricSpace, f: &KatetovMap) -> Result<Option<(usize, usize)>> {
    let k = f.base.len();
    for i in 0..k {
        for j in i + 1..k {
            let d = x.dist(f.base[i], f.base[j]);
            let (a, b) = (f.values[i], f.values[j]);
            if a.abs_diff(b)? > d || d > a.checked_add(b)? {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KatetovCheck {
    pub ok: bool,
    pub witness: Option<(usize, usize)>,
}

/// Checks a map given by one value per point of `x`. Zero values are
/// allowed: such a map is realized by the point where it vanishes.
pub fn is_katetov(x: &FiniteMetricSpace, values: &[Rational]) -> Result<KatetovCheck> {
    if values.len() != x.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: values.len() });
    }
    let f = KatetovMap::total(x, values.to_vec())?;
    let witness = katetov_violation(x, &f)?;
    Ok(KatetovCheck { ok: witness.is_none(), witness })
}

/// `x` with one new point (index `|x|`) at distance `f(p)` from each `p`.
pub fn extend_with(x: &FiniteMetricSpace, values: &[Rational]) -> Result<FiniteMetricSpace> {
    let check = is_katetov(x, values)?;
    if let Some((i, j)) = check.witness {
        return Err(Error::NotKatetov(i, j));
    }
    if let Some(p) = values.iter().position(|v| v.is_zero()) {
        return Err(Error::RealizedByExistingPoint(p));
    }
    let n = x.len();
    let mut d = Vec::with_capacity((n + 1) * (n + 1));
    for i in 0..n {
        d.extend_from_slice(x.row(i));
        d.push(values[i]);
    }
    d.extend_from_slice(values);
    d.push(Rational::ZERO);
    let y = FiniteMetricSpace::from_matrix_unchecked(n + 1, d);
    debug_assert!(matches!(y.first_triangle_violation(), Ok(None)));
    Ok(y)
}

/// Extends `f` from its base to all of `x` by
/// `k(f)(y) = min over base points p of d(y,p) + f(p)`.
pub fn shortest_extension(x: &FiniteMetricSpace, f: &KatetovMap) -> Result<Vec<Rational>> {
    if f.base.is_empty() {
        return Err(Error::Invalid("cannot extend a map with empty base".into()));
    }
    if let Some((i, j)) = katetov_violation(x, f)? {
        return Err(Error::NotKatetov(f.base[i], f.base[j]));
    }
    (0..x.len())
        .map(|y| {
            let mut best: Option<Rational> = None;
            for (&p, &v) in f.base.iter().zip(&f.values) {
                let c = x.dist(y, p).checked_add(v)?;
                best = Some(best.map_or(c, |b| b.min(c)));
            }
            Ok(best.unwrap())
        })
        .collect()
}

/// Points `y` of `x` with `d(y, p) = f(p)` for every base point `p`. With an
/// empty base every point qualifies.
pub fn realizers(x: &FiniteMetricSpace, f: &KatetovMap) -> Vec<usize> {
    (0..x.len()).filter(|&y| realizes(x, y, f)).collect()
}

fn realizes(x: &FiniteMetricSpace, y: usize, f: &KatetovMap) -> bool {
    f.base.iter().zip(&f.values).all(|(&p, &v)| x.dist(y, p) == v)
}

/// Every `S`-valued Katetov map over `base`, values in lexicographic order
/// of their indices in `S`.
pub fn s_valued_katetov_maps(x: &FiniteMetricSpace, s: &DistanceSet, base: &[usize]) -> Result<Vec<KatetovMap>> {
    let k = base.len();
    let vals = s.values();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let f = KatetovMap { base: base.to_vec(), values: idx.iter().map(|&i| vals[i]).collect() };
        if katetov_violation(x, &f)?.is_none() {
            out.push(f);
        }
        // odometer over S^k, last coordinate fastest
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < vals.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// First `S`-valued Katetov map over a subspace of fewer than `size_cap`
/// points that no point of `x` realizes.
pub fn first_unrealized(x: &FiniteMetricSpace, s: &DistanceSet, size_cap: usize) -> Result<Option<KatetovMap>> {
    for k in 0..size_cap.min(x.len() + 1) {
        for base in subsets_of_size(x.len(), k) {
            for f in s_valued_katetov_maps(x, s, &base)? {
                if realizers(x, &f).is_empty() {
                    return Ok(Some(f));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProvenanceEntry {
    pub base: Vec<usize>,
    pub values: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrysohnApprox {
    pub space: FiniteMetricSpace,
    /// One entry per added point after the first: the map it realizes.
    pub provenance: Vec<ProvenanceEntry>,
}

impl UrysohnApprox {
    /// `(F-indices | f-values)` per added point.
    pub fn provenance_text(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.provenance.iter().enumerate() {
            let base: Vec<String> = e.base.iter().map(|b| b.to_string()).collect();
            let vals: Vec<String> = e.values.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{}: ({} | {})\n", i + 1, base.join(" "), vals.join(" ")));
        }
        out
    }
}

/// Default ceiling on the number of points `urysohn_approx` may create.
pub const DEFAULT_POINT_LIMIT: usize = 256;

/// Seed used by the builder unless told otherwise.
pub const DEFAULT_SEED: u64 = 0;

/// How the builder chooses the distances from a new point to the points
/// outside the base of the map it realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthRule {
    /// Always the least admissible distance. Simple, but for some sets the
    /// closure never stops: with `S = {1,2}` every new point lands at
    /// distance 1 from almost everything and keeps creating pairs without
    /// a common far point.
    Least,
    /// A uniformly random admissible distance drawn from a seeded stream.
    Seeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UrysohnConfig {
    pub size_cap: usize,
    pub point_limit: usize,
    pub rule: GrowthRule,
}

impl UrysohnConfig {
    pub fn new(size_cap: usize) -> UrysohnConfig {
        UrysohnConfig { size_cap, point_limit: DEFAULT_POINT_LIMIT, rule: GrowthRule::Seeded(DEFAULT_SEED) }
    }
}

/// A finite `S`-valued space in which every `S`-valued Katetov map over a
/// subspace of fewer than `size_cap` points is realized.
///
/// Starting from one point, each pass collects the unrealized maps, sorts
/// them by base size and then by the canonical form of the extended base,
/// and realizes them in that order (skipping maps an earlier addition has
/// already realized). Each new point is glued on by strong amalgamation,
/// its remaining distances chosen per [`GrowthRule`]. Passes repeat until
/// nothing is missing.
pub fn urysohn_approx(s: &DistanceSet, config: UrysohnConfig) -> Result<UrysohnApprox> {
    let UrysohnConfig { size_cap, point_limit, rule } = config;
    if let Some(w) = check_four_values(s)?.witness {
        return Err(Error::FourValuesFailure(w.0));
    }
    let mut choice = match rule {
        GrowthRule::Least => ValueChoice::Least,
        GrowthRule::Seeded(seed) => ValueChoice::Seeded(Box::new(ChaCha8Rng::seed_from_u64(seed))),
    };
    let mut x = FiniteMetricSpace::equilateral(1, s.min());
    let mut provenance = Vec::new();
    loop {
        let mut pending: BTreeMap<(usize, Vec<Rational>, KatetovMap), ()> = BTreeMap::new();
        for k in 0..size_cap.min(x.len() + 1) {
            for base in subsets_of_size(x.len(), k) {
                for f in s_valued_katetov_maps(&x, s, &base)? {
                    if realizers(&x, &f).is_empty() {
                        let ext = extend_with(&x.subspace(&f.base), &f.values)?;
                        let cert = canonicalize_bounded(&ext, usize::MAX)?.certificate;
                        pending.insert((k, cert, f), ());
                    }
                }
            }
        }
        if pending.is_empty() {
            return Ok(UrysohnApprox { space: x, provenance });
        }
        for (_, _, f) in pending.into_keys() {
            if !realizers(&x, &f).is_empty() {
                continue;
            }
            if x.len() >= point_limit {
                return Err(Error::ResourceLimit(format!(
                    "reached {} points after realizing {} maps; next unrealized map ({:?} | {:?})",
                    x.len(),
                    provenance.len(),
                    f.base,
                    f.values
                )));
            }
            let y1 = extend_with(&x.subspace(&f.base), &f.values)?;
            let e0 = PointMap::new(f.base.clone())?;
            let e1 = PointMap::identity(f.base.len());
            x = amalgamate_with(s, &x, &y1, &e0, &e1, &mut choice)?.space;
            provenance.push(ProvenanceEntry { base: f.base.clone(), values: f.values.clone() });
        }
    }
}

/// All `arity^k` tuples over `S = {a0 > ... > a_{k-1}}`, in lexicographic
/// order, at distance `a_i` where `i` is the first differing coordinate.
pub fn ultrametric_urysohn_grid(s: &DistanceSet, arity: usize) -> Result<FiniteMetricSpace> {
    if arity < 2 {
        return Err(Error::Invalid("arity must be at least 2".into()));
    }
    let levels: Vec<Rational> = s.values().iter().rev().copied().collect();
    let k = levels.len();
    let n = arity.checked_pow(k as u32).filter(|&n| n <= 1 << 16).ok_or(Error::SearchTooLarge {
        what: "grid points",
        size: (arity as u128).saturating_pow(k as u32),
        bound: 1 << 16,
    })?;
    let digit = |p: usize, i: usize| p / arity.pow((k - 1 - i) as u32) % arity;
    let mut d = vec![Rational::ZERO; n * n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                let first = (0..k).find(|&i| digit(a, i) != digit(b, i)).unwrap();
                d[a * n + b] = levels[first];
            }
        }
    }
    Ok(FiniteMetricSpace::from_matrix_unchecked(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::spaces::{complete, copies_bounded, CompletionMode, EdgeLabelledGraph};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&a| Rational::integer(a)).collect()
    }

    #[test]
    fn katetov_examples() {
        let two = FiniteMetricSpace::equilateral(2, q(2, 1));
        assert!(is_katetov(&two, &ints(&[1, 1])).unwrap().ok);
        assert_eq!(is_katetov(&two, &ints(&[1, 4])).unwrap().witness, Some((0, 1)));
        let x = FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap();
        assert!(is_katetov(&x, x.row(1)).unwrap().ok);
        assert!(is_katetov(&x, &ints(&[1])).is_err());
    }

    #[test]
    fn extension_examples() {
        let tri = FiniteMetricSpace::equilateral(3, Rational::ONE);
        assert_eq!(extend_with(&tri, &ints(&[1, 1, 1])).unwrap(), FiniteMetricSpace::equilateral(4, Rational::ONE));
        let two = FiniteMetricSpace::equilateral(2, q(2, 1));
        let y = extend_with(&two, &ints(&[1, 1])).unwrap();
        assert_eq!(y.dist(0, 2), q(1, 1));
        assert!(y.first_triangle_violation().unwrap().is_none());
        let x = FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap();
        assert_eq!(extend_with(&x, x.row(2)), Err(Error::RealizedByExistingPoint(2)));
    }

    #[test]
    fn shortest_extension_examples() {
        let x = FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap();
        let f = KatetovMap::new(vec![0], ints(&[1])).unwrap();
        assert_eq!(shortest_extension(&x, &f).unwrap(), ints(&[1, 2, 3]));
        let full = KatetovMap::total(&x, ints(&[2, 2, 2])).unwrap();
        assert_eq!(shortest_extension(&x, &full).unwrap(), ints(&[2, 2, 2]));
    }

    #[test]
    fn shortest_extension_matches_path_completion() {
        let x =
            FiniteMetricSpace::from_integers(&[&[0, 2, 3, 4], &[2, 0, 3, 2], &[3, 3, 0, 2], &[4, 2, 2, 0]]).unwrap();
        let f = KatetovMap::new(vec![0, 2], ints(&[1, 2])).unwrap();
        let ext = shortest_extension(&x, &f).unwrap();
        let mut g = EdgeLabelledGraph::from_space(&extend_with(&x, &ext).unwrap());
        for p in [1, 3] {
            g.unset(p, 4);
        }
        let z = complete(&g, CompletionMode::Sum { cap: None }).unwrap();
        assert_eq!(z.row(4)[..4], ext[..]);
    }

    #[test]
    fn realizer_examples() {
        let x = FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap();
        let f = KatetovMap::new(vec![0, 2], ints(&[1, 1])).unwrap();
        assert_eq!(realizers(&x, &f), vec![1]);
        assert_eq!(realizers(&x, &KatetovMap::new(vec![], vec![]).unwrap()), vec![0, 1, 2]);
        let grid = ultrametric_urysohn_grid(&DistanceSet::from_integers(&[1, 3]).unwrap(), 2).unwrap();
        let f = KatetovMap::new(vec![0, 1, 2, 3], ints(&[1, 3, 3, 3])).unwrap();
        let scan: Vec<usize> = (0..4).filter(|&y| (0..4).all(|p| grid.dist(y, p) == f.values[p])).collect();
        assert_eq!(realizers(&grid, &f), scan);
        assert!(scan.is_empty());
    }

    #[test]
    fn grid_examples() {
        let grid = ultrametric_urysohn_grid(&DistanceSet::from_integers(&[1, 3]).unwrap(), 2).unwrap();
        assert_eq!(grid.len(), 4);
        assert_eq!(
            (grid.dist(0, 1), grid.dist(2, 3), grid.dist(0, 2), grid.dist(1, 3)),
            (q(1, 1), q(1, 1), q(3, 1), q(3, 1))
        );
        assert!(grid.is_ultrametric());
        assert_eq!(grid.distances(), ints(&[1, 3]));
    }

    #[test]
    fn urysohn_equilateral() {
        let s = DistanceSet::from_integers(&[1]).unwrap();
        let u = urysohn_approx(&s, UrysohnConfig::new(3)).unwrap();
        assert_eq!(u.space, FiniteMetricSpace::equilateral(3, Rational::ONE));
        let least = UrysohnConfig { rule: GrowthRule::Least, ..UrysohnConfig::new(3) };
        assert_eq!(urysohn_approx(&s, least).unwrap().space, u.space);
        assert_eq!(u.provenance.len(), 2);
    }

    #[test]
    fn urysohn_two_distances() {
        let s = DistanceSet::from_integers(&[1, 2]).unwrap();
        let u = urysohn_approx(&s, UrysohnConfig::new(3)).unwrap();
        assert!(first_unrealized(&u.space, &s, 3).unwrap().is_none());
        u.space.check_distances_in(&s).unwrap();
        for t in [&[1, 1, 1][..], &[1, 1, 2], &[1, 2, 2], &[2, 2, 2]] {
            let x = FiniteMetricSpace::from_fn(3, |i, j| Rational::integer(t[i + j - 1])).unwrap();
            assert!(!copies_bounded(&u.space, &x, usize::MAX).unwrap().is_empty());
        }
    }

    #[test]
    fn least_rule_runs_away_on_two_distances() {
        let s = DistanceSet::from_integers(&[1, 2]).unwrap();
        let cfg = UrysohnConfig { size_cap: 3, point_limit: 40, rule: GrowthRule::Least };
        assert!(matches!(urysohn_approx(&s, cfg), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn urysohn_ultrametric_distances() {
        let s = DistanceSet::from_integers(&[1, 3]).unwrap();
        let u = urysohn_approx(&s, UrysohnConfig::new(3)).unwrap();
        assert!(u.space.is_ultrametric());
        assert!(first_unrealized(&u.space, &s, 3).unwrap().is_none());
    }

    #[test]
    fn urysohn_rejects_bad_sets() {
        let s = DistanceSet::from_integers(&[1, 2, 4]).unwrap();
        assert!(matches!(urysohn_approx(&s, UrysohnConfig::new(3)), Err(Error::FourValuesFailure(_))));
    }
}
