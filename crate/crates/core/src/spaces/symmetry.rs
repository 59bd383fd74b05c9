//! Isometry groups, isometric copies and canonical forms by backtracking.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{FiniteMetricSpace, SearchBounds};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Isometries {
    /// Each entry maps point `i` to `perm[i]`; listed lexicographically.
    pub perms: Vec<Vec<usize>>,
}

impl Isometries {
    pub fn order(&self) -> usize {
        self.perms.len()
    }
}

fn sorted_rows(x: &FiniteMetricSpace) -> Vec<Vec<Rational>> {
    (0..x.len())
        .map(|i| {
            let mut r = x.row(i).to_vec();
            r.sort();
            r
        })
        .collect()
}

fn too_large(what: &'static str, size: usize, bound: usize) -> Error {
    Error::SearchTooLarge { what, size: size as u128, bound: bound as u128 }
}

pub fn isometries(x: &FiniteMetricSpace) -> Result<Isometries> {
    isometries_bounded(x, SearchBounds::from_env().isometries)
}

/// All distance-preserving permutations of `x`.
pub fn isometries_bounded(x: &FiniteMetricSpace, bound: usize) -> Result<Isometries> {
    if x.len() > bound {
        return Err(too_large("isometry search (points)", x.len(), bound));
    }
    let inv = sorted_rows(x);
    let mut perms = Vec::new();
    let mut perm = Vec::with_capacity(x.len());
    let mut used = vec![false; x.len()];
    extend_maps(x, x, &mut perm, &mut used, &|i, j| inv[i] == inv[j], &mut |p| perms.push(p.to_vec()));
    Ok(Isometries { perms })
}

/// Enumerates injective distance-preserving maps from `x` into `y`,
/// extending `map` point by point in lexicographic order of images.
fn extend_maps(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    map: &mut Vec<usize>,
    used: &mut [bool],
    compatible: &dyn Fn(usize, usize) -> bool,
    emit: &mut dyn FnMut(&[usize]),
) {
    let i = map.len();
    if i == x.len() {
        emit(map);
        return;
    }
    for c in 0..y.len() {
        if used[c] || !compatible(i, c) {
            continue;
        }
        if (0..i).all(|k| y.dist(map[k], c) == x.dist(k, i)) {
            used[c] = true;
            map.push(c);
            extend_maps(x, y, map, used, compatible, emit);
            map.pop();
            used[c] = false;
        }
    }
}

pub fn copies(y: &FiniteMetricSpace, x: &FiniteMetricSpace) -> Result<Vec<Vec<usize>>> {
    copies_bounded(y, x, SearchBounds::from_env().copies)
}

/// Point subsets of `y` (sorted, listed lexicographically) whose induced
/// metric is isometric to `x`.
pub fn copies_bounded(y: &FiniteMetricSpace, x: &FiniteMetricSpace, bound: usize) -> Result<Vec<Vec<usize>>> {
    if y.len() > bound {
        return Err(too_large("copy search (points)", y.len(), bound));
    }
    if x.len() > y.len() {
        return Ok(Vec::new());
    }
    let mut found = BTreeSet::new();
    let mut map = Vec::with_capacity(x.len());
    let mut used = vec![false; y.len()];
    // every isometry of x yields the same image set; the set dedups them
    extend_maps(x, y, &mut map, &mut used, &|_, _| true, &mut |m| {
        let mut s = m.to_vec();
        s.sort_unstable();
        found.insert(s);
    });
    Ok(found.into_iter().collect())
}

/// The first isometric embedding of `x` into `y` (in lexicographic order of
/// image sequences) whose images all satisfy `allowed`. Unlike `copies` this
/// stops at the first hit, so it has no bound on the size of `y`.
pub fn first_embedding(
    y: &FiniteMetricSpace,
    x: &FiniteMetricSpace,
    allowed: &dyn Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    fn go(
        x: &FiniteMetricSpace,
        y: &FiniteMetricSpace,
        map: &mut Vec<usize>,
        used: &mut [bool],
        allowed: &dyn Fn(usize) -> bool,
    ) -> bool {
        let i = map.len();
        if i == x.len() {
            return true;
        }
        for c in 0..y.len() {
            if used[c] || !allowed(c) || (0..i).any(|k| y.dist(map[k], c) != x.dist(k, i)) {
                continue;
            }
            used[c] = true;
            map.push(c);
            if go(x, y, map, used, allowed) {
                return true;
            }
            map.pop();
            used[c] = false;
        }
        false
    }
    let mut map = Vec::with_capacity(x.len());
    let mut used = vec![false; y.len()];
    go(x, y, &mut map, &mut used, allowed).then_some(map)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Canonical {
    /// New point `i` is old point `relabel[i]`.
    pub relabel: Vec<usize>,
    /// Point count followed by the distances `d(p_j, p_i)` for `j < i`,
    /// column by column in the canonical order. Equal certificates mean
    /// isometric spaces and conversely.
    pub certificate: Vec<Rational>,
}

pub fn canonicalize(x: &FiniteMetricSpace) -> Result<Canonical> {
    canonicalize_bounded(x, SearchBounds::from_env().isometries)
}

/// Lexicographically least distance sequence among orderings that list
/// points by nondecreasing sorted row. Twin points (swappable by a
/// transposition that is an isometry) are tried only once per step.
pub fn canonicalize_bounded(x: &FiniteMetricSpace, bound: usize) -> Result<Canonical> {
    let n = x.len();
    if n > bound {
        return Err(too_large("canonical form (points)", n, bound));
    }
    let inv = sorted_rows(x);
    let mut class_seq = inv.clone();
    class_seq.sort();
    let twins = |a: usize, b: usize| (0..n).all(|z| z == a || z == b || x.dist(a, z) == x.dist(b, z));
    let mut st = CanonSearch {
        x,
        inv: &inv,
        class_seq: &class_seq,
        twins: &twins,
        best: None,
        order: Vec::with_capacity(n),
        seq: Vec::new(),
        used: vec![false; n],
    };
    st.search(false);
    let (seq, relabel) = st.best.unwrap_or_default();
    let mut certificate = vec![Rational::integer(n as i64)];
    certificate.extend(seq);
    Ok(Canonical { relabel, certificate })
}

struct CanonSearch<'a> {
    x: &'a FiniteMetricSpace,
    inv: &'a [Vec<Rational>],
    class_seq: &'a [Vec<Rational>],
    twins: &'a dyn Fn(usize, usize) -> bool,
    best: Option<(Vec<Rational>, Vec<usize>)>,
    order: Vec<usize>,
    seq: Vec<Rational>,
    used: Vec<bool>,
}

impl CanonSearch<'_> {
    /// `below` is true once the current prefix is already strictly smaller
    /// than the best sequence's prefix.
    fn search(&mut self, below: bool) {
        let i = self.order.len();
        let n = self.x.len();
        if i == n {
            if self.best.as_ref().is_none_or(|(b, _)| self.seq < *b) {
                self.best = Some((self.seq.clone(), self.order.clone()));
            }
            return;
        }
        let start = self.seq.len();
        let mut tried: Vec<usize> = Vec::new();
        for c in 0..n {
            if self.used[c] || self.inv[c] != self.class_seq[i] {
                continue;
            }
            if tried.iter().any(|&t| (self.twins)(t, c)) {
                continue;
            }
            tried.push(c);
            for k in 0..i {
                self.seq.push(self.x.dist(self.order[k], c));
            }
            let mut now_below = below;
            let mut prune = false;
            if !below {
                if let Some((b, _)) = &self.best {
                    match self.seq[start..].cmp(&b[start..start + i]) {
                        std::cmp::Ordering::Less => now_below = true,
                        std::cmp::Ordering::Greater => prune = true,
                        std::cmp::Ordering::Equal => {}
                    }
                }
            }
            if !prune {
                self.used[c] = true;
                self.order.push(c);
                self.search(now_below);
                self.order.pop();
                self.used[c] = false;
            }
            self.seq.truncate(start);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::spaces::{complete, for_each_permutation, CompletionMode, EdgeLabelledGraph};

    fn brute_force_isometries(x: &FiniteMetricSpace) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for_each_permutation(x.len(), |p| {
            if x.is_isometric_map(x, p) {
                out.push(p.to_vec());
            }
            true
        });
        out
    }

    fn brute_force_copies(y: &FiniteMetricSpace, x: &FiniteMetricSpace) -> Vec<Vec<usize>> {
        let target = canonicalize(x).unwrap().certificate;
        let n = y.len();
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != x.len() {
                continue;
            }
            let pts: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let sub = y.subspace(&pts);
            // independent of canonicalize on purpose: try every bijection
            let mut ok = false;
            for_each_permutation(x.len(), |p| {
                ok = x.is_isometric_map(&sub, p);
                !ok
            });
            assert_eq!(ok, canonicalize(&sub).unwrap().certificate == target);
            if ok {
                out.push(pts);
            }
        }
        out.sort();
        out
    }

    fn five_cycle() -> FiniteMetricSpace {
        let mut g = EdgeLabelledGraph::new(5);
        for i in 0..5 {
            g.set(i, (i + 1) % 5, Rational::ONE).unwrap();
        }
        complete(&g, CompletionMode::Sum { cap: None }).unwrap()
    }

    #[test]
    fn isometry_examples() {
        assert_eq!(isometries(&FiniteMetricSpace::equilateral(3, Rational::ONE)).unwrap().order(), 6);
        let scalene = FiniteMetricSpace::from_integers(&[&[0, 2, 3], &[2, 0, 4], &[3, 4, 0]]).unwrap();
        assert_eq!(isometries(&scalene).unwrap().perms, vec![vec![0, 1, 2]]);
        let binary =
            FiniteMetricSpace::from_integers(&[&[0, 1, 3, 3], &[1, 0, 3, 3], &[3, 3, 0, 1], &[3, 3, 1, 0]]).unwrap();
        let iso = isometries(&binary).unwrap();
        assert_eq!(iso.order(), 8);
        assert_eq!(iso.perms, brute_force_isometries(&binary));
        assert_eq!(isometries(&five_cycle()).unwrap().perms, brute_force_isometries(&five_cycle()));
    }

    #[test]
    fn isometry_bound_is_enforced() {
        let x = FiniteMetricSpace::equilateral(11, Rational::ONE);
        assert!(matches!(isometries(&x), Err(Error::SearchTooLarge { .. })));
        assert_eq!(isometries_bounded(&FiniteMetricSpace::equilateral(5, q(2, 1)), 5).unwrap().order(), 120);
    }

    #[test]
    fn copy_examples() {
        let scalene = FiniteMetricSpace::from_integers(&[&[0, 2, 3], &[2, 0, 4], &[3, 4, 0]]).unwrap();
        assert_eq!(copies(&scalene, &scalene).unwrap(), vec![vec![0, 1, 2]]);
        let k4 = FiniteMetricSpace::equilateral(4, Rational::ONE);
        let k2 = FiniteMetricSpace::equilateral(2, Rational::ONE);
        assert_eq!(copies(&k4, &k2).unwrap().len(), 6);
        let c5 = five_cycle();
        let tri = FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap();
        let found = copies(&c5, &tri).unwrap();
        // three consecutive vertices of the cycle, one triple per vertex
        assert_eq!(found, vec![vec![0, 1, 2], vec![0, 1, 4], vec![0, 3, 4], vec![1, 2, 3], vec![2, 3, 4]]);
        assert_eq!(found, brute_force_copies(&c5, &tri));
    }

    #[test]
    fn canonical_forms_separate_and_identify() {
        let a = FiniteMetricSpace::from_integers(&[&[0, 1, 1], &[1, 0, 2], &[1, 2, 0]]).unwrap();
        let b = FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]]).unwrap();
        assert_ne!(canonicalize(&a).unwrap().certificate, canonicalize(&b).unwrap().certificate);
        let c = a.relabel(&[2, 0, 1]);
        assert_eq!(canonicalize(&a).unwrap().certificate, canonicalize(&c).unwrap().certificate);
        let canon = canonicalize(&c).unwrap();
        let relabelled = c.relabel(&canon.relabel);
        let columns: Vec<Rational> =
            (1..3).flat_map(|i| (0..i).map(move |j| (j, i))).map(|(j, i)| relabelled.dist(j, i)).collect();
        assert_eq!(canon.certificate[1..], columns[..]);
    }

    #[test]
    fn equilateral_canonical_form_is_fast() {
        let x = FiniteMetricSpace::equilateral(10, Rational::ONE);
        assert_eq!(canonicalize(&x).unwrap().certificate.len(), 46);
    }
}
