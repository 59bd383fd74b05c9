//! Property tests over randomly generated spaces, graphs and distance sets.

use proptest::prelude::*;

use katetov::four_values::{check_four_values, similar};
use katetov::katetov::{extend_with, is_katetov, realizers, shortest_extension, KatetovMap};
use katetov::partitions::{band_index, divisibility_coloring, lambda_epsilon, NetSystem};
use katetov::spaces::{canonicalize, complete, factorial, isometries, validate, CompletionMode, ValidationMode};
use katetov::ultrametric::{hook_length_count, linear_extensions_brute};
use katetov::{q, DistanceSet, EdgeLabelledGraph, FiniteMetricSpace, Rational};

/// Integer points of the plane under the l1 norm, offset so no two coincide.
fn plane_space(max: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    prop::collection::vec((0i64..5, 0i64..5), 1..=max).prop_map(|pts| {
        let pts: Vec<(i64, i64)> = pts.iter().enumerate().map(|(i, &(x, y))| (x + 7 * i as i64, y)).collect();
        FiniteMetricSpace::from_fn(pts.len(), |i, j| {
            Rational::integer((pts[i].0 - pts[j].0).abs() + (pts[i].1 - pts[j].1).abs())
        })
        .unwrap()
    })
}

/// `{1,2}`-valued spaces: always metric, often highly symmetric.
fn graph_space(max: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(1i64..=2, n * (n - 1) / 2).prop_map(move |labels| {
            let mut it = labels.into_iter();
            let mut rows = vec![vec![Rational::ZERO; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let v = Rational::integer(it.next().unwrap());
                    rows[i][j] = v;
                    rows[j][i] = v;
                }
            }
            FiniteMetricSpace::new(rows).unwrap()
        })
    })
}

fn any_space(max: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    prop_oneof![plane_space(max), graph_space(max)]
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn space_and_perm(max: usize) -> impl Strategy<Value = (FiniteMetricSpace, Vec<usize>)> {
    any_space(max).prop_flat_map(|x| {
        let n = x.len();
        (Just(x), permutation(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn isometry_order_divides_factorial(x in any_space(6)) {
        let order = isometries(&x).unwrap().order() as u128;
        prop_assert_eq!(factorial(x.len()) % order, 0);
    }

    #[test]
    fn isometries_are_isometric(x in any_space(6)) {
        for p in isometries(&x).unwrap().perms {
            prop_assert!(x.is_isometric_map(&x, &p));
        }
    }

    #[test]
    fn canonical_form_ignores_labelling((x, perm) in space_and_perm(6)) {
        let y = x.relabel(&perm);
        let (cx, cy) = (canonicalize(&x).unwrap(), canonicalize(&y).unwrap());
        prop_assert_eq!(&cx.certificate, &cy.certificate);
        prop_assert_eq!(x.relabel(&cx.relabel), y.relabel(&cy.relabel));
    }

    #[test]
    fn completion_keeps_labels_of_metric_subgraphs(x in any_space(6), mask in any::<u32>()) {
        let n = x.len();
        let mut g = EdgeLabelledGraph::from_space(&x);
        let mut bit = 0;
        for a in 0..n {
            for b in a + 2..n {
                if mask >> (bit % 32) & 1 == 1 {
                    g.unset(a, b);
                }
                bit += 1;
            }
        }
        prop_assert!(validate(&g, ValidationMode::LMetric(n)).unwrap().ok);
        let c = complete(&g, CompletionMode::Sum { cap: None }).unwrap();
        for (a, b, l) in g.edges() {
            prop_assert_eq!(c.dist(a, b), l);
        }
        // the shortest-path metric is the largest one extending the labels
        for a in 0..n {
            for b in 0..n {
                prop_assert!(c.dist(a, b) >= x.dist(a, b));
            }
        }
    }

    #[test]
    fn lambda_is_monotone_in_eps(x in plane_space(7), p in 0usize..7, a in 1i64..12, b in 1i64..12) {
        let p = p % x.len();
        let (lo, hi) = (a.min(b), a.max(b));
        let small = lambda_epsilon(&x, p, Rational::integer(lo)).unwrap();
        let large = lambda_epsilon(&x, p, Rational::integer(hi)).unwrap();
        prop_assert!(small <= large);
    }

    #[test]
    fn shortest_extension_is_realized_after_extending(x in any_space(6), base_mask in 1u32..64, vals in prop::collection::vec(1i64..=4, 6)) {
        let n = x.len();
        let base: Vec<usize> = (0..n).filter(|&i| base_mask >> i & 1 == 1).collect();
        prop_assume!(!base.is_empty());
        let values: Vec<Rational> = base.iter().map(|&i| Rational::integer(vals[i])).collect();
        let f = KatetovMap::new(base.clone(), values.clone()).unwrap();
        let sub = x.subspace(&base);
        let ok_on_base = is_katetov(&sub, &values).unwrap().ok;
        match shortest_extension(&x, &f) {
            Ok(total) => {
                prop_assert!(ok_on_base);
                prop_assert!(is_katetov(&x, &total).unwrap().ok);
                for (k, &p) in base.iter().enumerate() {
                    prop_assert_eq!(total[p], values[k]);
                }
                let y = extend_with(&x, &total).unwrap();
                let point = KatetovMap::new(base.clone(), values.clone()).unwrap();
                prop_assert!(realizers(&y, &point).contains(&n));
            }
            Err(_) => prop_assert!(!ok_on_base),
        }
    }

    #[test]
    fn divisibility_color_follows_band_parity(pts in prop::collection::vec(1i64..12, 1..10)) {
        // points on a line at multiples of 1/35 inside radius 1/3 around 0;
        // the radius denominator is coprime to every distance denominator
        let r = q(1, 3);
        let mut pos: Vec<Rational> = vec![Rational::ZERO];
        for p in pts {
            let v = q(p, 35);
            if !pos.contains(&v) {
                pos.push(v);
            }
        }
        let x = FiniteMetricSpace::from_fn(pos.len(), |i, j| pos[i].abs_diff(pos[j]).unwrap()).unwrap();
        let net = NetSystem::new(&x, vec![0], vec![r]).unwrap();
        let chi = divisibility_coloring(&x, &net).unwrap();
        for p in 0..x.len() {
            let j = band_index(x.dist(0, p), r).unwrap();
            let expected = if p == 0 { 1 } else { usize::from(j % 2 == 1) };
            prop_assert_eq!(chi.color(p), expected, "point {} band {}", p, j);
            prop_assert_eq!(net.cell(&x, p).unwrap(), (0, j));
        }
    }

    #[test]
    fn hook_length_matches_enumeration(parents in prop::collection::vec(any::<prop::sample::Index>(), 0..11)) {
        // node i > 0 hangs below an earlier node
        let mut parent = vec![None];
        for (i, ix) in parents.iter().enumerate() {
            parent.push(Some(ix.index(i + 1)));
        }
        prop_assert_eq!(hook_length_count(&parent).unwrap(), linear_extensions_brute(&parent).unwrap());
    }
}

#[test]
fn similar_sets_share_the_verdict() {
    let sets: Vec<DistanceSet> = (1u32..(1 << 6))
        .filter(|m| m.count_ones() <= 4)
        .map(|m| {
            DistanceSet::from_integers(&(0..6).filter(|b| m >> b & 1 == 1).map(|b| b + 1).collect::<Vec<i64>>())
                .unwrap()
        })
        .collect();
    for s in &sets {
        let vs = check_four_values(s).unwrap().holds;
        for t in &sets {
            if similar(s, t).unwrap() {
                assert_eq!(vs, check_four_values(t).unwrap().holds, "{s:?} ~ {t:?}");
            }
        }
    }
}

#[test]
fn initial_segments_satisfy_the_condition() {
    for m in 1..=10 {
        let s = DistanceSet::from_integers(&(1..=m).collect::<Vec<i64>>()).unwrap();
        assert!(check_four_values(&s).unwrap().holds, "{{1..{m}}}");
    }
}
