use hdisc_core::coarse::*;
use hdisc_core::models::{cycle_graph, free_tree_ball, line_graph, line_shift, rotation, B};
use hdisc_core::Q;
use hdisc_oracle::{floyd_warshall, four_point_delta_doubled};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn path(n: usize) -> MetricGraph {
    MetricGraph::unit(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>())
}

/// Binary tree of the given depth, vertices in breadth-first order.
fn binary_tree(depth: u32) -> MetricGraph {
    let n = (1usize << (depth + 1)) - 1;
    MetricGraph::unit(n, &(1..n).map(|v| ((v - 1) / 2, v)).collect::<Vec<_>>())
}

fn oracle_matrix(g: &MetricGraph) -> Vec<Vec<Option<i64>>> {
    let edges: Vec<(usize, usize, i64)> = g.edges().iter().map(|&(u, v, l)| (u, v, l as i64)).collect();
    floyd_warshall(g.n(), &edges)
}

/// Random connected graph: a random tree plus extra edges, doubled lengths in 1..=4.
fn arb_graph(max_n: usize) -> impl Strategy<Value = MetricGraph> {
    (2..=max_n).prop_flat_map(|n| {
        let tree = proptest::collection::vec((0usize..1000, 1u64..=4), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n, 1u64..=4), 0..n);
        (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
            let mut g = MetricGraph::new((0..n).map(|i| format!("v{i}")).collect());
            for (i, &(p, l)) in tree.iter().enumerate() {
                g.add_edge(p % (i + 1), i + 1, l).unwrap();
            }
            for (u, v, l) in extra {
                if u != v {
                    g.add_edge(u, v, l).unwrap();
                }
            }
            g
        })
    })
}

fn arb_graph_with_family() -> impl Strategy<Value = (MetricGraph, SubsetFamily)> {
    arb_graph(12).prop_flat_map(|g| {
        let n = g.n();
        let sets = proptest::collection::vec(proptest::collection::vec(0..n, 1..4), 0..4);
        (Just(g), sets).prop_map(|(g, sets)| (g, SubsetFamily::new(sets)))
    })
}

#[test]
fn coned_path_collapses() {
    let g = path(5);
    let e = electrify(&g, &SubsetFamily::new(vec![(0..5).collect()])).unwrap();
    assert_eq!(distance(&e.graph, 0, 4).unwrap(), Q::from_integer(1));
    assert_eq!(distance(&g, 0, 4).unwrap(), Q::from_integer(4));
    // the cone edge is the integer 1 in doubled units
    assert!(e.graph.edges().iter().filter(|e| e.0 >= 5 || e.1 >= 5).all(|e| e.2 == 1));
    assert_eq!(CONE_EDGE_LEN2, 1);
}

#[test]
fn empty_family_is_isometric() {
    let g = cycle_graph(7);
    let e = electrify(&g, &SubsetFamily::default()).unwrap();
    for u in 0..7 {
        for v in 0..7 {
            assert_eq!(distance(&e.graph, u, v).unwrap(), distance(&g, u, v).unwrap());
        }
    }
}

#[test]
fn empty_subset_rejected() {
    let e = electrify(&path(3), &SubsetFamily::new(vec![vec![]])).unwrap_err();
    assert_eq!(e, CoarseError::EmptySubset("Y0".into()));
}

#[test]
fn six_cycle_antipodes() {
    let g = cycle_graph(6);
    assert_eq!(distance(&g, 2, 2).unwrap(), Q::from_integer(0));
    let dag = geodesic_dag(&g, 0, 3).unwrap();
    assert_eq!(dag.length, Q::from_integer(3));
    assert_eq!(dag.count, 2);
    assert_eq!(dag.vertices.len(), 6);
}

#[test]
fn disconnected_reported() {
    let g = MetricGraph::unit(3, &[(0, 1)]);
    assert_eq!(distance(&g, 0, 2).unwrap_err(), CoarseError::Disconnected(0, 2));
    assert!(matches!(delta_four_point(&g, DeltaMode::Exhaustive), Err(CoarseError::Disconnected(..))));
}

#[test]
fn trees_are_zero_hyperbolic() {
    for g in [path(9), binary_tree(3)] {
        assert_eq!(delta_four_point(&g, DeltaMode::Exhaustive).unwrap().delta, Q::from_integer(0));
    }
    let ball = free_tree_ball(2).unwrap();
    assert_eq!(delta_four_point(&ball.graph, DeltaMode::Exhaustive).unwrap().delta, Q::from_integer(0));
}

#[test]
fn eight_cycle_delta_matches_brute_force() {
    let g = cycle_graph(8);
    let d: Vec<Vec<i64>> = oracle_matrix(&g).into_iter().map(|r| r.into_iter().map(Option::unwrap).collect()).collect();
    let r = delta_four_point(&g, DeltaMode::Exhaustive).unwrap();
    assert_eq!(r.delta, q(four_point_delta_doubled(&d), 4));
    assert_eq!(r.delta, Q::from_integer(2));
    assert_eq!(r.quadruples, 70);
}

#[test]
fn sampling_needs_a_budget() {
    let e = delta_four_point(&cycle_graph(5), DeltaMode::Sampled { samples: 0, seed: 1 }).unwrap_err();
    assert_eq!(e, CoarseError::SampleBudgetZero);
}

#[test]
fn gromov_product_on_a_tripod() {
    // centre 0 with legs of length 2, 3, 4
    let mut g = MetricGraph::new((0..4).map(|i| i.to_string()).collect());
    g.add_edge(0, 1, 4).unwrap();
    g.add_edge(0, 2, 6).unwrap();
    g.add_edge(0, 3, 8).unwrap();
    let m = Metric::new(&g);
    assert_eq!(gromov_product(&m, 1, 2, 3).unwrap(), Q::from_integer(2));
    assert_eq!(gromov_product(&m, 0, 2, 3).unwrap(), Q::from_integer(0));
}

#[test]
fn quasiconvexity_examples() {
    let g = cycle_graph(10);
    assert_eq!(quasiconvexity_constant(&g, &(0..10).collect::<Vec<_>>()).unwrap(), Q::from_integer(0));
    let t = binary_tree(3);
    // the geodesic from leaf 7 to leaf 10 runs 7-3-1-0-2-... no: 7-3-1-4-10
    let seg = [7, 3, 1, 4, 10];
    assert_eq!(quasiconvexity_constant(&t, &seg).unwrap(), Q::from_integer(0));
    for n in 2..9usize {
        let c = cycle_graph(2 * n);
        assert_eq!(quasiconvexity_constant(&c, &[0, n]).unwrap(), Q::from_integer((n / 2) as i64), "n = {n}");
    }
}

#[test]
fn projections() {
    let t = binary_tree(3);
    let m = Metric::new(&t);
    let left = [1, 3, 4, 7, 8, 9, 10];
    assert_eq!(nearest_point_projection(&m, &left, &left).unwrap(), left.to_vec());
    assert_eq!(projection_diameter(&m, &left).unwrap(), Q::from_integer(4));
    // the right subtree projects to its root
    let right = [2, 5, 6, 11, 12, 13, 14];
    let p = nearest_point_projection(&m, &left, &right).unwrap();
    assert_eq!(p, vec![2]);
    assert_eq!(projection_diameter(&m, &p).unwrap(), Q::from_integer(0));
    // separated subtrees in a longer tree
    let deep = [3, 7, 8];
    let far = [6, 13, 14];
    assert_eq!(nearest_point_projection(&m, &deep, &far).unwrap(), vec![6]);
    assert_eq!(nearest_point_projection(&m, &far, &deep).unwrap(), vec![3]);
}

/// Sets `{10k .. 10k + 3}` along a path, so consecutive sets are 7 apart.
fn spaced_path_family(k: usize) -> (MetricGraph, Vec<Vec<usize>>) {
    let g = path(10 * k);
    let z = (0..k).map(|i| (10 * i..10 * i + 4).collect()).collect();
    (g, z)
}

#[test]
fn separation_examples() {
    let g = path(10);
    let e = electrify(&g, &SubsetFamily::default()).unwrap();
    let overlapping = vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 6]];
    assert_eq!(separation_report(&g, &overlapping, &e).unwrap().l_star, Q::from_integer(0));
    assert_eq!(separation_report(&g, &overlapping[..2], &e).unwrap_err(), CoarseError::FamilyTooSmall(2, 3));

    let (g, z) = spaced_path_family(4);
    let e = electrify(&g, &SubsetFamily::new(z.clone())).unwrap();
    let r = separation_report(&g, &z, &e).unwrap();
    assert_eq!(r.consecutive, vec![Q::from_integer(7); 3]);
    assert_eq!(r.projection_gaps, vec![Q::from_integer(3); 2]);
    assert_eq!(r.l_star, Q::from_integer(3));
    assert_eq!(r.m_star, Q::from_integer(7));
    // coning the whole path puts every pair of sets within one
    let all = electrify(&g, &SubsetFamily::new(vec![(0..40).collect()])).unwrap();
    assert!(separation_report(&g, &z, &all).unwrap().m_star <= Q::from_integer(1));
}

#[test]
fn piecewise_geodesics() {
    let (g, z) = spaced_path_family(2);
    let r = piecewise_geodesic(&g, &z).unwrap();
    assert_eq!(r.vertices, (3..=10).collect::<Vec<_>>());
    assert_eq!(r.segment_lengths, vec![Q::from_integer(7)]);

    let (g, z) = spaced_path_family(4);
    let r = piecewise_geodesic(&g, &z).unwrap();
    assert_eq!(r.vertices, (3..=30).collect::<Vec<_>>());
    assert_eq!((r.constants.k, r.constants.c), (Q::from_integer(1), Q::from_integer(0)));
    assert!(r.corner_products.iter().all(|x| *x == Q::from_integer(0)));
    assert!(piecewise_geodesic(&g, &z[..1]).is_err());
}

#[test]
fn backtracking_costs_twice_its_depth() {
    let g = path(10);
    assert_eq!(quasigeodesic_constants(&g, &[0, 1, 2, 3]).unwrap().c, Q::from_integer(0));
    for depth in 1..4usize {
        let mut p: Vec<usize> = (0..=5).collect();
        p.extend((5 - depth..5).rev());
        let k = quasigeodesic_constants(&g, &p).unwrap();
        assert!(k.c >= Q::from_integer(2 * depth as i64));
        assert_eq!(k.k_without_c, None);
    }
    assert_eq!(quasigeodesic_constants(&g, &[3]).unwrap_err(), CoarseError::PathTooShort);
}

#[test]
fn local_check_windows() {
    let g = path(10);
    let p = [0, 1, 2, 3, 2, 1];
    assert!(local_qg_check(&g, &p, Q::from_integer(1), Q::from_integer(0), Q::from_integer(1)).unwrap());
    assert!(!local_qg_check(&g, &p, Q::from_integer(1), Q::from_integer(0), Q::from_integer(2)).unwrap());
}

#[test]
fn electrified_tree_image_is_a_reparameterised_quasigeodesic() {
    let ball = free_tree_ball(6).unwrap();
    let e = electrify(&ball.graph, &ball.all_cosets(hdisc_core::models::A)).unwrap();
    // the base geodesic a a b b a a
    let word = |s: &str| ball.vertex(&hdisc_core::models::parse_word(s).unwrap()).unwrap();
    let p: Vec<usize> = ["e", "a", "aa", "aab", "aabb", "aabba", "aabbaa"].iter().map(|s| word(s)).collect();
    let r = reparam_constants(&e, &p).unwrap();
    assert!(reparam_qg_check(&e, &p, r.k, r.c).unwrap());
    // contracted image e, aab, aabba with electrified steps 2, 2 and span 4
    assert_eq!(r.c, Q::from_integer(2));
    assert_eq!(r.k_without_c, Some(Q::from_integer(2)));
    assert!(!reparam_qg_check(&e, &p, Q::from_integer(1), Q::from_integer(1)).unwrap());
}

#[test]
fn translations() {
    let r = 20;
    let t = translation_length(&line_graph(r), &line_shift(r, 1), 0, 2 * r, Q::from_integer(0)).unwrap();
    assert_eq!(t.tail_slope, Q::from_integer(1));
    assert!(t.loxodromic);
    let rot = translation_length(&cycle_graph(12), &rotation(12, 5), 0, 120, Q::from_integer(0)).unwrap();
    assert_eq!(rot.tail_slope, Q::from_integer(0));
    assert!(!rot.loxodromic);
    assert_eq!(*rot.estimates.last().unwrap(), Q::from_integer(0));
    let e = translation_length(&line_graph(3), &line_shift(3, 1), 0, 10, Q::from_integer(0)).unwrap_err();
    assert_eq!(e, CoarseError::OrbitEscapesDomain { valid: 6 });
}

#[test]
fn b_translates_the_electrified_tree() {
    let ball = free_tree_ball(6).unwrap();
    let e = electrify(&ball.graph, &ball.all_cosets(hdisc_core::models::A)).unwrap();
    let b = ball.left_mult(&[B]);
    let t = translation_length(&e.graph, &extend(&b, e.graph.n()), 0, 6, Q::from_integer(0)).unwrap();
    assert!(t.loxodromic);
    assert_eq!(t.tail_slope, Q::from_integer(1));
}

/// A map on the base vertices, undefined on cone vertices.
fn extend(f: &GraphAutomorphism, n: usize) -> GraphAutomorphism {
    let mut map = f.map.clone();
    map.resize(n, None);
    GraphAutomorphism { map }
}

#[test]
fn automorphisms_preserve_edges() {
    assert!(rotation(9, 4).preserves(&cycle_graph(9)));
    assert!(!GraphAutomorphism::total(vec![0, 2, 1, 3]).preserves(&path(4)));
    let ball = free_tree_ball(3).unwrap();
    assert!(ball.left_mult(&[B]).preserves(&ball.graph));
}

#[test]
fn cutoff_examples() {
    let x = |v: &[i64]| v.iter().map(|&a| Q::from_integer(a)).collect::<Vec<_>>();
    assert_eq!(cutoff_sum(&x(&[3, 7, 2]), Q::from_integer(5)).unwrap(), Q::from_integer(7));
    assert_eq!(cutoff_sum(&x(&[3, 7, 2]), Q::from_integer(0)).unwrap(), Q::from_integer(12));
    assert_eq!(cutoff_sum(&[], Q::from_integer(3)).unwrap(), Q::from_integer(0));
    assert_eq!(cutoff_sum(&x(&[1, -1]), Q::from_integer(0)).unwrap_err(), CoarseError::NegativeEntry(1));
}

#[test]
fn graph_file_round_trip() {
    let json = r#"{"vertices":["x","y","z"],"edges":[{"u":"x","v":"y"},{"u":"y","v":"z","length":1.5}],
        "subsets":[{"name":"ends","members":["x","z"]}]}"#;
    let file: GraphFile = serde_json::from_str(json).unwrap();
    let (g, fam) = file.build().unwrap();
    assert_eq!(distance(&g, 0, 2).unwrap(), q(5, 2));
    assert_eq!(fam.sets, vec![vec![0, 2]]);
    let back = GraphFile::from_graph(&g, &fam);
    assert_eq!(back, file);
    let bad: GraphFile = serde_json::from_str(r#"{"vertices":["x","y"],"edges":[{"u":"x","v":"y","length":0.3}]}"#).unwrap();
    assert!(matches!(bad.build(), Err(CoarseError::BadEdge(_))));
    let missing: GraphFile = serde_json::from_str(r#"{"vertices":["x"],"edges":[{"u":"x","v":"w"}]}"#).unwrap();
    assert_eq!(missing.build().unwrap_err(), CoarseError::UnknownVertex("w".into()));
}

#[test]
fn dot_marks_cones() {
    let e = electrify(&path(3), &SubsetFamily::new(vec![vec![0, 2]])).unwrap();
    let dot = e.to_dot();
    assert!(dot.contains("cone:Y0"));
    assert!(dot.contains("fillcolor"));
    assert!(dot.contains("label=\"1/2\""));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn electrification_contract((g, fam) in arb_graph_with_family()) {
        let e = electrify(&g, &fam).unwrap();
        let (m, me) = (Metric::new(&g), Metric::new(&e.graph));
        for u in 0..g.n() {
            for v in 0..g.n() {
                prop_assert!(me.d2(u, v).unwrap() <= m.d2(u, v).unwrap());
            }
        }
        for set in &fam.sets {
            for &u in set {
                for &v in set {
                    prop_assert!(me.d(u, v).unwrap() <= Q::from_integer(1));
                }
            }
        }
    }

    #[test]
    fn distances_match_floyd_warshall(g in arb_graph(12)) {
        let d = oracle_matrix(&g);
        let m = Metric::new(&g);
        for u in 0..g.n() {
            for v in 0..g.n() {
                prop_assert_eq!(Some(m.d2(u, v).unwrap() as i64), d[u][v]);
            }
        }
    }

    #[test]
    fn triangle_inequality(g in arb_graph(12), a in 0usize..12, b in 0usize..12, c in 0usize..12) {
        let n = g.n();
        let (a, b, c) = (a % n, b % n, c % n);
        let m = Metric::new(&g);
        prop_assert!(m.d2(a, c).unwrap() <= m.d2(a, b).unwrap() + m.d2(b, c).unwrap());
    }

    #[test]
    fn delta_matches_brute_force(g in arb_graph(12)) {
        let d: Vec<Vec<i64>> = oracle_matrix(&g).into_iter().map(|r| r.into_iter().map(Option::unwrap).collect()).collect();
        let ours = delta_four_point(&g, DeltaMode::Exhaustive).unwrap().delta;
        prop_assert_eq!(ours, q(four_point_delta_doubled(&d), 4));
    }

    #[test]
    fn sampled_delta_bounded(g in arb_graph(10), seed in 0u64..1000) {
        let ex = delta_four_point(&g, DeltaMode::Exhaustive).unwrap().delta;
        let s = delta_four_point(&g, DeltaMode::Sampled { samples: 50, seed }).unwrap();
        prop_assert!(s.delta <= ex);
        prop_assert_eq!(s.quadruples, 50);
    }

    #[test]
    fn geodesics_are_one_one(g in arb_graph(10), u in 0usize..10, v in 0usize..10) {
        let (u, v) = (u % g.n(), v % g.n());
        let m = Metric::new(&g);
        let p = m.geodesic(u, v).unwrap();
        if p.len() >= 2 {
            let k = quasigeodesic_constants(&g, &p).unwrap();
            prop_assert_eq!(k.c, Q::from_integer(0));
        }
        let dag = geodesic_dag(&g, u, v).unwrap();
        prop_assert!(dag.count >= 1);
        prop_assert!(p.iter().all(|x| dag.vertices.contains(x)));
    }

    #[test]
    fn subtree_sets_are_convex(depth in 2u32..5, root in 0usize..7) {
        let t = binary_tree(depth);
        // all descendants of `root`
        let mut set = vec![root];
        let mut i = 0;
        while i < set.len() {
            for c in [2 * set[i] + 1, 2 * set[i] + 2] {
                if c < t.n() {
                    set.push(c);
                }
            }
            i += 1;
        }
        prop_assert_eq!(quasiconvexity_constant(&t, &set).unwrap(), Q::from_integer(0));
    }
}
