use std::collections::BTreeSet;

use petgraph::unionfind::UnionFind;
use proptest::prelude::*;
use urysohn::gen;
use urysohn::hyperspace::{hausdorff_ballmin, hausdorff_supinf};
use urysohn::model::{avoidant_witness, ball_key, seed_point};
use urysohn::petals::{distance_to_petal, duplicate_endpoint, generate_heirs, in_piece};
use urysohn::predicates::{is_avoidant, is_haloed};
use urysohn::spaces::{distance_set, validate_ultrametric, Violation};
use urysohn::{delta, embed_space, FiniteSubset, FiniteUltrametricSpace, RangeSet, Rational, UrysohnPoint};

fn pool() -> Vec<Rational> {
    [(1, 12), (1, 6), (1, 4), (1, 3), (1, 2), (2, 3), (1, 1), (2, 1)]
        .iter()
        .map(|&(n, d)| Rational::new(n, d))
        .collect()
}

fn point() -> impl Strategy<Value = UrysohnPoint> {
    prop::collection::btree_map(0usize..8, 1u64..4, 0..5).prop_map(|m| {
        let pool = pool();
        m.into_iter()
            .fold(UrysohnPoint::origin(), |p, (i, v)| p.with(pool[i].clone(), v))
    })
}

fn radius() -> impl Strategy<Value = Rational> {
    (0usize..8).prop_map(|i| pool()[i].clone())
}

fn subset() -> impl Strategy<Value = FiniteSubset> {
    prop::collection::vec(point(), 1..6).prop_map(|v| FiniteSubset::new(v).unwrap())
}

fn piece() -> impl Strategy<Value = RangeSet> {
    prop::collection::btree_set(0usize..8, 0..8)
        .prop_map(|idx| RangeSet::from_values(idx.into_iter().map(|i| pool()[i].clone())))
}

/// A seeded random ultrametric together with its distance set and a few
/// extra values.
fn space(max_points: usize) -> impl Strategy<Value = (FiniteUltrametricSpace, RangeSet)> {
    (any::<u64>(), 1..=max_points, 1usize..5).prop_map(|(seed, n, levels)| {
        let mut rng = gen::rng(seed);
        let values = gen::random_values(&mut rng, levels);
        let s = gen::random_ultrametric(&mut rng, n, &values);
        let range = distance_set(&s).union(&RangeSet::from_values(values));
        (s, range)
    })
}

fn max(a: &Rational, b: &Rational) -> Rational {
    a.max(b).clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn delta_is_an_ultrametric(f in point(), g in point(), h in point()) {
        let fg = delta(&f, &g);
        prop_assert_eq!(&fg, &delta(&g, &f));
        prop_assert_eq!(fg.is_zero(), f == g);
        prop_assert!(delta(&f, &h) <= max(&fg, &delta(&g, &h)));
    }

    #[test]
    fn ball_keys_match_closed_balls(a in point(), b in point(), r in radius()) {
        prop_assert_eq!(ball_key(&a, &r) == ball_key(&b, &r), delta(&a, &b) <= r);
    }

    #[test]
    fn seeds_are_equidistant_inside_the_ball(a in point(), r in radius(), k in 0u64..5, l in 0u64..5) {
        let p = seed_point(&a, &r, k).unwrap();
        let q = seed_point(&a, &r, l).unwrap();
        prop_assert!(delta(&a, &p) <= r);
        prop_assert_eq!(delta(&p, &q), if k == l { Rational::zero() } else { r.clone() });
    }

    #[test]
    fn avoidant_witness_avoids(a in point(), r in radius(), others in prop::collection::vec(point(), 0..6)) {
        let inside: Vec<UrysohnPoint> = others.into_iter().filter(|p| delta(&a, p) <= r).collect();
        let w = avoidant_witness(&a, &r, &inside).unwrap();
        prop_assert!(delta(&a, &w) <= r);
        for p in &inside {
            prop_assert!(delta(&w, p) >= r);
        }
    }

    #[test]
    fn hausdorff_routes_agree(e in subset(), f in subset()) {
        let d = hausdorff_supinf(&e, &f);
        prop_assert_eq!(&d, &hausdorff_ballmin(&e, &f));
        prop_assert_eq!(&d, &hausdorff_supinf(&f, &e));
        prop_assert_eq!(d.is_zero(), e == f);
    }

    #[test]
    fn hausdorff_of_singletons_is_delta(a in point(), b in point()) {
        let d = hausdorff_ballmin(&FiniteSubset::singleton(a.clone()), &FiniteSubset::singleton(b.clone()));
        prop_assert_eq!(d, delta(&a, &b));
    }

    #[test]
    fn petal_projection_is_a_nearest_point(x in point(), s in piece(), ys in prop::collection::vec(point(), 0..6)) {
        let proj = distance_to_petal(&x, &s);
        prop_assert!(in_piece(&proj.nearest, &s));
        prop_assert_eq!(&delta(&x, &proj.nearest), &proj.distance);
        for y in ys.iter().map(|y| y.restrict(|c| s.contains(c))) {
            prop_assert!(delta(&x, &y) >= proj.distance);
        }
    }

    #[test]
    fn petal_retraction_is_one_lipschitz(x in point(), y in point(), s in piece()) {
        let px = distance_to_petal(&x, &s).nearest;
        let py = distance_to_petal(&y, &s).nearest;
        prop_assert!(delta(&px, &py) <= delta(&x, &y));
    }

    #[test]
    fn closed_balls_do_not_depend_on_the_center((s, range) in space(8)) {
        for r in range.nonzero() {
            for a in s.labels() {
                let ball: BTreeSet<&str> = s.closed_ball(a, r).unwrap().into_iter().collect();
                for b in &ball {
                    let other: BTreeSet<&str> = s.closed_ball(b, r).unwrap().into_iter().collect();
                    prop_assert_eq!(&ball, &other);
                }
            }
        }
    }

    #[test]
    fn ball_partition_matches_threshold_components((s, range) in space(8)) {
        for r in range.values() {
            for strict in [false, true] {
                if strict && r.is_zero() {
                    continue;
                }
                let mut uf = UnionFind::<usize>::new(s.len());
                for i in 0..s.len() {
                    for j in 0..s.len() {
                        if if strict { s.d(i, j) < r } else { s.d(i, j) <= r } {
                            uf.union(i, j);
                        }
                    }
                }
                let expected: BTreeSet<BTreeSet<usize>> = (0..s.len())
                    .map(|i| (0..s.len()).filter(|&j| uf.equiv(i, j)).collect())
                    .collect();
                let got: BTreeSet<BTreeSet<usize>> = s
                    .ball_partition_indices(r, strict)
                    .unwrap()
                    .into_iter()
                    .map(|b| b.into_iter().collect())
                    .collect();
                prop_assert_eq!(got, expected);
            }
        }
    }

    #[test]
    fn validation_matches_triple_scan(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let values = gen::random_values(&mut rng, 3);
        let s = gen::random_matrix_space(&mut rng, 4, &values);
        let mut bad = BTreeSet::new();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    if *s.d(i, k) > max(s.d(i, j), s.d(j, k)) {
                        bad.insert((i.min(k), i.max(k)));
                    }
                }
            }
        }
        let report = validate_ultrametric(&s);
        prop_assert_eq!(report.is_ok(), bad.is_empty());
        let only_triangles = report.violations.iter().all(|v| matches!(v, Violation::StrongTriangle { .. }));
        prop_assert!(only_triangles);
    }

    #[test]
    fn embedding_is_isometric((s, _) in space(10), base in point()) {
        let e = embed_space(&s, Some(&base)).unwrap();
        let images: Vec<&UrysohnPoint> = e.points().collect();
        prop_assert_eq!(images[0], &base);
        for i in 0..s.len() {
            for j in 0..s.len() {
                prop_assert_eq!(&delta(images[i], images[j]), s.d(i, j));
            }
        }
    }

    #[test]
    fn predicates_are_monotone_in_n((s, range) in space(8)) {
        let mut prev = (true, true);
        for n in 1..=9 {
            let now = (is_haloed(&s, &range, n).unwrap().holds, is_avoidant(&s, &range, n).unwrap().holds);
            prop_assert!(prev.0 || !now.0);
            prop_assert!(prev.1 || !now.1);
            prev = now;
        }
    }

    #[test]
    fn haloed_two_matches_pair_search((s, range) in space(8)) {
        // n = 2 asks for one point at distance exactly r inside every ball.
        let expected = (0..s.len()).all(|a| range.nonzero().all(|r| (0..s.len()).any(|b| s.d(a, b) == r)));
        prop_assert_eq!(is_haloed(&s, &range, 2).unwrap().holds, expected);
    }

    #[test]
    fn heir_endpoints_are_unique(levels in prop::collection::btree_set(0usize..8, 1..5), depth in 1usize..4, branching in 1usize..4) {
        let s = RangeSet::from_values(levels.into_iter().map(|i| pool()[i].clone()));
        let tree = generate_heirs(&s, depth, branching).unwrap();
        prop_assert_eq!(duplicate_endpoint(&tree), None);
        for node in &tree.nodes {
            prop_assert!(in_piece(node.point(), &s));
        }
    }

    #[test]
    fn points_round_trip_through_json(p in point()) {
        let text = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<UrysohnPoint>(&text).unwrap(), p);
    }

    #[test]
    fn spaces_round_trip_through_json((s, _) in space(6)) {
        let text = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(serde_json::from_str::<FiniteUltrametricSpace>(&text).unwrap(), s);
    }

    #[test]
    fn rationals_round_trip_through_text(n in 0u64..1000, d in 1u64..1000) {
        let q = Rational::new(n, d);
        prop_assert_eq!(q.to_string().parse::<Rational>().unwrap(), q);
    }
}
