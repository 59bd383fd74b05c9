//! Ramsey degrees as ordering counts, critical distances, and finite
//! verifiers for the arrow relation and the ordering property.
//!
//! `Z -> (Y)^X_{k,l}` means: however the copies of `X` in `Z` are colored
//! with `k` colors, some copy of `Y` in `Z` sees at most `l` colors on the
//! copies of `X` inside it.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::spaces::{
    copies_bounded, factorial, for_each_permutation, isometries_bounded, DistanceSet, FiniteMetricSpace,
    LinearOrdering, SearchBounds,
};
use crate::ultrametric::{tree_of_space, DegreeRecord};

/// A metric space with a linear ordering of its points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedSpace {
    pub space: FiniteMetricSpace,
    pub order: LinearOrdering,
}

impl OrderedSpace {
    pub fn new(space: FiniteMetricSpace, order: LinearOrdering) -> Result<OrderedSpace> {
        if order.len() != space.len() {
            return Err(Error::LengthMismatch { expected: space.len(), got: order.len() });
        }
        Ok(OrderedSpace { space, order })
    }
}

/// Which orderings count: all of them, those making every ball an interval
/// (ultrametric spaces), or those making every class of each critical
/// distance an interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderingClass {
    All,
    Convex,
    Metric(DistanceSet),
}

/// `|LO(x)| / |iso(x)| = n! / |iso(x)|`.
pub fn ramsey_degree_general(x: &FiniteMetricSpace) -> Result<DegreeRecord> {
    let iso = isometries_bounded(x, SearchBounds::from_env().isometries)?.order() as u128;
    DegreeRecord::from_counts(factorial(x.len()), iso)
}

/// The `s` in `S` with no element of `S` in `(s, 2s]`. The largest element
/// always qualifies.
pub fn critical_distances(s: &DistanceSet) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    for &v in s.values() {
        let double = v.checked_add(v)?;
        if !s.values().iter().any(|&t| v < t && t <= double) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Classes of `d <= s`, an equivalence relation when `s` is critical for
/// the distances of `x`. Singletons are dropped.
fn critical_classes(x: &FiniteMetricSpace, s: Rational) -> Vec<Vec<usize>> {
    let mut seen = vec![false; x.len()];
    let mut out = Vec::new();
    for p in 0..x.len() {
        if seen[p] {
            continue;
        }
        let class: Vec<usize> = (0..x.len()).filter(|&q| x.dist(p, q) <= s).collect();
        for &q in &class {
            seen[q] = true;
        }
        if class.len() > 1 {
            out.push(class);
        }
    }
    out
}

/// The point sets an ordering of the class must keep convex.
pub fn convexity_family(x: &FiniteMetricSpace, class: &OrderingClass) -> Result<Vec<Vec<usize>>> {
    let mut family: BTreeSet<Vec<usize>> = BTreeSet::new();
    match class {
        OrderingClass::All => {}
        OrderingClass::Convex => {
            for node in tree_of_space(x)?.nodes() {
                if node.points.len() > 1 {
                    family.insert(node.points.clone());
                }
            }
        }
        OrderingClass::Metric(s) => {
            x.check_distances_in(s)?;
            for c in critical_distances(s)? {
                family.extend(critical_classes(x, c));
            }
        }
    }
    Ok(family.into_iter().collect())
}

fn is_convex_under(positions: &[usize], family: &[Vec<usize>]) -> bool {
    family.iter().all(|set| {
        let (lo, hi) = set.iter().fold((usize::MAX, 0), |(lo, hi), &p| (lo.min(positions[p]), hi.max(positions[p])));
        hi - lo + 1 == set.len()
    })
}

pub fn ordering_in_class(x: &FiniteMetricSpace, order: &LinearOrdering, class: &OrderingClass) -> Result<bool> {
    Ok(is_convex_under(order.positions(), &convexity_family(x, class)?))
}

fn check_ordering_bound(n: usize) -> Result<()> {
    let bound = SearchBounds::from_env().orderings;
    if n > bound {
        return Err(Error::SearchTooLarge {
            what: "ordering enumeration (points)",
            size: n as u128,
            bound: bound as u128,
        });
    }
    Ok(())
}

/// Calls `f` with the position vector of every ordering in the class, in
/// lexicographic order of point sequences, until it returns `false`.
fn for_each_ordering(
    x: &FiniteMetricSpace,
    class: &OrderingClass,
    mut f: impl FnMut(&[usize], &[usize]) -> bool,
) -> Result<()> {
    check_ordering_bound(x.len())?;
    let family = convexity_family(x, class)?;
    let mut pos = vec![0; x.len()];
    for_each_permutation(x.len(), |seq| {
        for (i, &p) in seq.iter().enumerate() {
            pos[p] = i;
        }
        if is_convex_under(&pos, &family) {
            f(seq, &pos)
        } else {
            true
        }
    });
    Ok(())
}

/// Number of orderings of `x` in the class, by enumeration.
pub fn count_orderings(x: &FiniteMetricSpace, class: &OrderingClass) -> Result<u128> {
    let mut count = 0u128;
    for_each_ordering(x, class, |_, _| {
        count += 1;
        true
    })?;
    Ok(count)
}

/// `|mLO(x)|` over `S`.
pub fn metric_orderings_count(x: &FiniteMetricSpace, s: &DistanceSet) -> Result<u128> {
    count_orderings(x, &OrderingClass::Metric(s.clone()))
}

/// `|mLO(x)| / |iso(x)|`.
pub fn ramsey_degree_metric_ordered(x: &FiniteMetricSpace, s: &DistanceSet) -> Result<DegreeRecord> {
    let mlo = metric_orderings_count(x, s)?;
    let iso = isometries_bounded(x, SearchBounds::from_env().isometries)?.order() as u128;
    DegreeRecord::from_counts(mlo, iso)
}

/// One ordering per orbit of orderings in the class under `iso(x)`: the
/// lexicographically least point sequence of each orbit.
pub fn order_types(x: &FiniteMetricSpace, class: &OrderingClass) -> Result<Vec<LinearOrdering>> {
    let iso = isometries_bounded(x, SearchBounds::from_env().isometries)?;
    let mut reps: BTreeSet<Vec<usize>> = BTreeSet::new();
    for_each_ordering(x, class, |seq, _| {
        let least = iso.perms.iter().map(|g| seq.iter().map(|&p| g[p]).collect::<Vec<usize>>()).min().unwrap();
        reps.insert(least);
        true
    })?;
    reps.into_iter().map(|s| LinearOrdering::from_sequence(&s)).collect()
}

/// Subsets of `z` carrying an order-preserving isometric copy of `x`, each
/// listed in `z`-order.
pub fn ordered_copies(z: &OrderedSpace, x: &OrderedSpace) -> Result<Vec<Vec<usize>>> {
    let seq = x.order.sequence();
    let mut out = Vec::new();
    for mut set in copies_bounded(&z.space, &x.space, SearchBounds::from_env().copies)? {
        set.sort_by_key(|&p| z.order.position(p));
        let ok = (0..seq.len()).all(|i| (0..i).all(|j| z.space.dist(set[i], set[j]) == x.space.dist(seq[i], seq[j])));
        if ok {
            out.push(set);
        }
    }
    out.sort();
    Ok(out)
}

/// Most colorings `verify_arrow` will enumerate.
pub const ARROW_COLORING_BUDGET: u128 = 1 << 23;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArrowVerdict {
    pub holds: bool,
    /// Copies of `X` in `Z`, the coloring positions.
    pub x_copies: Vec<Vec<usize>>,
    pub y_copies: usize,
    pub colorings_checked: u128,
    /// Least coloring (lexicographic, first copy fixed to color 0) under
    /// which every copy of `Y` sees more than `l` colors.
    pub counterexample: Option<Vec<usize>>,
    /// Least coloring maximizing the fewest colors any copy of `Y` sees,
    /// with that number.
    pub worst: (Vec<usize>, usize),
}

/// Decides `Z -> (Y)^X_{k,l}` for unordered spaces by trying every coloring.
pub fn verify_arrow(
    z: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    x: &FiniteMetricSpace,
    k: usize,
    l: usize,
) -> Result<ArrowVerdict> {
    let bound = SearchBounds::from_env().copies;
    let xs = copies_bounded(z, x, bound)?;
    let ys = copies_bounded(z, y, bound)?;
    arrow_over(xs, ys, k, l)
}

/// The same for ordered spaces, copies being order-preserving.
pub fn verify_arrow_ordered(
    z: &OrderedSpace,
    y: &OrderedSpace,
    x: &OrderedSpace,
    k: usize,
    l: usize,
) -> Result<ArrowVerdict> {
    let xs = ordered_copies(z, x)?;
    let ys = ordered_copies(z, y)?;
    arrow_over(xs, ys, k, l)
}

fn arrow_over(xs: Vec<Vec<usize>>, ys: Vec<Vec<usize>>, k: usize, l: usize) -> Result<ArrowVerdict> {
    if k == 0 || k > 64 {
        return Err(Error::Invalid(format!("color count {k} must lie in 1..=64")));
    }
    let n = xs.len();
    let free = n.saturating_sub(1) as u32;
    let total = (k as u128).checked_pow(free).filter(|t| *t <= ARROW_COLORING_BUDGET).ok_or(Error::SearchTooLarge {
        what: "arrow colorings",
        size: (k as u128).saturating_pow(free),
        bound: ARROW_COLORING_BUDGET,
    })?;
    // copies of X inside each copy of Y, as indices into xs
    let inside: Vec<Vec<usize>> =
        ys.iter().map(|yc| (0..n).filter(|&i| xs[i].iter().all(|p| yc.contains(p))).collect()).collect();
    let mut coloring = vec![0usize; n];
    let mut counterexample = None;
    let mut worst: Option<(Vec<usize>, usize)> = None;
    for code in 0..total {
        let mut c = code;
        for i in (1..n).rev() {
            coloring[i] = (c % k as u128) as usize;
            c /= k as u128;
        }
        let fewest = inside
            .iter()
            .map(|ids| ids.iter().fold(0u64, |m, &i| m | 1 << coloring[i]).count_ones() as usize)
            .min()
            .unwrap_or(usize::MAX);
        if fewest > l && counterexample.is_none() {
            counterexample = Some(coloring.clone());
        }
        if worst.as_ref().is_none_or(|w| fewest > w.1) {
            worst = Some((coloring.clone(), fewest));
        }
    }
    Ok(ArrowVerdict {
        holds: counterexample.is_none(),
        y_copies: ys.len(),
        x_copies: xs,
        colorings_checked: total,
        counterexample,
        worst: worst.unwrap(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderingPropertyVerdict {
    pub holds: bool,
    pub orderings_checked: u128,
    /// First ordering of `y` in the class with no ordered copy of `xo`.
    pub failing_ordering: Option<LinearOrdering>,
}

/// Whether every ordering of `y` in the class contains an order-preserving
/// isometric copy of `xo`.
pub fn verify_ordering_property_witness(
    y: &FiniteMetricSpace,
    xo: &OrderedSpace,
    class: &OrderingClass,
) -> Result<OrderingPropertyVerdict> {
    let sets = copies_bounded(y, &xo.space, SearchBounds::from_env().copies)?;
    let seq_x = xo.order.sequence();
    let mut checked = 0u128;
    let mut failing = None;
    for_each_ordering(y, class, |seq, pos| {
        checked += 1;
        let found = sets.iter().any(|set| {
            let mut s = set.clone();
            s.sort_by_key(|&p| pos[p]);
            (0..s.len()).all(|i| (0..i).all(|j| y.dist(s[i], s[j]) == xo.space.dist(seq_x[i], seq_x[j])))
        });
        if !found {
            failing = Some(seq.to_vec());
        }
        found
    })?;
    Ok(OrderingPropertyVerdict {
        holds: failing.is_none(),
        orderings_checked: checked,
        failing_ordering: failing.map(|s| LinearOrdering::from_sequence(&s)).transpose()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::ultrametric::ramsey_degree_ultrametric;

    fn set(v: &[i64]) -> DistanceSet {
        DistanceSet::from_integers(v).unwrap()
    }

    fn scalene() -> FiniteMetricSpace {
        FiniteMetricSpace::from_integers(&[&[0, 2, 3], &[2, 0, 4], &[3, 4, 0]]).unwrap()
    }

    #[test]
    fn general_degrees() {
        for n in 1..=5 {
            assert_eq!(ramsey_degree_general(&FiniteMetricSpace::equilateral(n, q(1, 1))).unwrap().degree, 1);
        }
        assert_eq!(ramsey_degree_general(&scalene()).unwrap().degree, 6);
    }

    #[test]
    fn critical_examples() {
        assert_eq!(critical_distances(&set(&[1, 2, 5])).unwrap(), vec![q(2, 1), q(5, 1)]);
        assert_eq!(critical_distances(&set(&[1, 3, 4])).unwrap(), vec![q(1, 1), q(4, 1)]);
        assert_eq!(critical_distances(&set(&[1])).unwrap(), vec![q(1, 1)]);
    }

    #[test]
    fn metric_ordering_examples() {
        // two blocks {0,1}, {2,3} at distance <= 2, blocks 5 apart
        let x =
            FiniteMetricSpace::from_integers(&[&[0, 1, 5, 5], &[1, 0, 5, 5], &[5, 5, 0, 2], &[5, 5, 2, 0]]).unwrap();
        assert_eq!(metric_orderings_count(&x, &set(&[1, 2, 5])).unwrap(), 8);
        // {1,2}: only 2 is critical and everything is within 2
        let y = FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap();
        assert_eq!(metric_orderings_count(&y, &set(&[1, 2])).unwrap(), 6);
        assert!(metric_orderings_count(&y, &set(&[1, 3])).is_err());
    }

    #[test]
    fn metric_degree_matches_ultrametric_when_all_critical() {
        let s = set(&[1, 3, 9]);
        for n in 1..=5 {
            for x in crate::ultrametric::ultrametric_spaces(n, &s) {
                let m = ramsey_degree_metric_ordered(&x, &s).unwrap();
                let u = ramsey_degree_ultrametric(&x).unwrap().record;
                assert_eq!(m, u);
            }
        }
        let one = FiniteMetricSpace::equilateral(1, q(1, 1));
        assert_eq!(ramsey_degree_metric_ordered(&one, &s).unwrap().degree, 1);
    }

    #[test]
    fn order_type_examples() {
        assert_eq!(order_types(&FiniteMetricSpace::equilateral(3, q(1, 1)), &OrderingClass::All).unwrap().len(), 1);
        assert_eq!(order_types(&scalene(), &OrderingClass::All).unwrap().len(), 6);
        let comb = FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]]).unwrap();
        assert_eq!(order_types(&comb, &OrderingClass::All).unwrap().len(), 3);
        assert_eq!(order_types(&comb, &OrderingClass::Convex).unwrap().len(), 2);
    }

    #[test]
    fn arrow_pigeonhole_and_trivial() {
        let eq = |n| FiniteMetricSpace::equilateral(n, q(1, 1));
        assert!(verify_arrow(&eq(5), &eq(3), &eq(1), 2, 1).unwrap().holds);
        let v = verify_arrow(&eq(4), &eq(3), &eq(1), 2, 1).unwrap();
        assert!(!v.holds);
        assert_eq!(v.counterexample, Some(vec![0, 0, 1, 1]));
        for k in 1..=3 {
            assert!(verify_arrow(&scalene(), &scalene(), &scalene(), k, 1).unwrap().holds);
        }
    }

    #[test]
    fn arrow_is_r33() {
        let eq = |n| FiniteMetricSpace::equilateral(n, q(1, 1));
        let six = verify_arrow(&eq(6), &eq(3), &eq(2), 2, 1).unwrap();
        assert!(six.holds);
        assert_eq!(six.colorings_checked, 1 << 14);
        let five = verify_arrow(&eq(5), &eq(3), &eq(2), 2, 1).unwrap();
        assert!(!five.holds);
        assert_eq!(five.worst.1, 2);
    }

    #[test]
    fn ordered_arrow() {
        let eq = |n| FiniteMetricSpace::equilateral(n, q(1, 1));
        let o = |n| OrderedSpace::new(eq(n), LinearOrdering::identity(n)).unwrap();
        assert!(verify_arrow_ordered(&o(5), &o(3), &o(1), 2, 1).unwrap().holds);
    }

    #[test]
    fn ordering_property_examples() {
        let two = FiniteMetricSpace::equilateral(2, q(1, 1));
        let xo = OrderedSpace::new(two.clone(), LinearOrdering::identity(2)).unwrap();
        assert!(verify_ordering_property_witness(&two, &xo, &OrderingClass::All).unwrap().holds);

        // 0 and 2 close, 1 far, ordered 0 < 1 < 2: the ball {0,2} is split
        let x = FiniteMetricSpace::from_integers(&[&[0, 2, 1], &[2, 0, 2], &[1, 2, 0]]).unwrap();
        let xo = OrderedSpace::new(x, LinearOrdering::identity(3)).unwrap();
        let y = crate::katetov::ultrametric_urysohn_grid(&set(&[1, 2]), 2).unwrap();
        let v = verify_ordering_property_witness(&y, &xo, &OrderingClass::Convex).unwrap();
        assert!(!v.holds);
        assert!(!verify_ordering_property_witness(&y, &xo, &OrderingClass::All).unwrap().holds);

        let so = OrderedSpace::new(scalene(), LinearOrdering::identity(3)).unwrap();
        let v = verify_ordering_property_witness(&scalene(), &so, &OrderingClass::All).unwrap();
        assert!(!v.holds);
        assert_eq!(v.failing_ordering.unwrap().sequence(), vec![0, 2, 1]);
    }
}
