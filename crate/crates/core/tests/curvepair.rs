use hdisc_core::curvepair::*;
use hdisc_core::generate::{random_pair, random_separating_pair, sample_pairs, PairSpec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn rot(positive: bool) -> Vec<String> {
    let r = if positive { ["a+", "b+", "a-", "b-"] } else { ["a+", "b-", "a-", "b+"] };
    r.iter().map(|s| s.to_string()).collect()
}

fn raw(a: &[u32], b: &[u32], signs: &[bool], regions: Vec<RawRegion>) -> RawCurvePair {
    let mut vertices = a.to_vec();
    vertices.sort_unstable();
    RawCurvePair {
        rotations: vertices.iter().map(|&v| rot(signs[v as usize])).collect(),
        vertices,
        a_cycle: a.to_vec(),
        b_cycle: b.to_vec(),
        genus: None,
        regions,
    }
}

/// Two curves meeting twice with opposite signs; the four faces are joined in pairs by
/// annuli, giving genus two and no bigons.
fn genus_two_double() -> CurvePair {
    let regions = vec![RawRegion { faces: vec![0, 1], genus: 0 }, RawRegion { faces: vec![2, 3], genus: 0 }];
    build_curve_pair(&raw(&[0, 1], &[0, 1], &[true, false], regions)).unwrap()
}

/// Four crossings with signs `+ + - -` along both curves; the two would-be bigons are the
/// ends of one annulus, giving genus two.
fn genus_two_four() -> CurvePair {
    let regions = vec![RawRegion { faces: vec![2, 3], genus: 0 }];
    build_curve_pair(&raw(&[0, 1, 2, 3], &[0, 1, 2, 3], &[true, true, false, false], regions)).unwrap()
}

fn torus() -> CurvePair {
    build_curve_pair(&raw(&[0], &[0], &[true], vec![])).unwrap()
}

fn oracle_faces(cp: &CurvePair) -> usize {
    let signs: BTreeMap<u32, bool> = cp.ids().iter().map(|&v| (v, cp.sign_of(v) == Some(1))).collect();
    hdisc_oracle::curve_pair_faces(&cp.a_order(), &cp.b_order(), &signs)
}

#[test]
fn torus_face_census_matches_oracle() {
    let cp = torus();
    assert_eq!(oracle_faces(&cp), 1);
    let faces = cp.faces();
    assert_eq!(faces.len(), 1);
    assert_eq!(faces[0].class, FaceClass::Rectangle);
}

#[test]
fn sphere_double_crossing_is_all_bigons() {
    let err = build_curve_pair(&raw(&[0, 1], &[0, 1], &[true, false], vec![])).unwrap_err();
    assert!(matches!(err, CurveError::BigonPresent { face: 0 }));
    let cp = CurvePair::from_raw_unreduced(&raw(&[0, 1], &[0, 1], &[true, false], vec![])).unwrap();
    assert_eq!(cp.genus(), 0);
    assert_eq!(oracle_faces(&cp), 4);
    assert!(cp.faces().iter().all(|f| f.class == FaceClass::Bigon));
}

#[test]
fn reduce_one_bigon_to_disjoint() {
    // two circles on the sphere: every face is a bigon
    let cp = CurvePair::from_raw_unreduced(&raw(&[0, 1], &[0, 1], &[true, false], vec![])).unwrap();
    let red = reduce_to_minimal_position(&cp).unwrap();
    assert_eq!(red.intersection_number(), 0);
    assert_eq!(red.genus(), 0);
}

#[test]
fn reduce_is_identity_without_bigons() {
    let cp = genus_two_four();
    let red = reduce_to_minimal_position(&cp).unwrap();
    assert_eq!(red.to_raw(), cp.to_raw());
}

#[test]
fn reduce_keeps_genus_for_bigon_pair_on_torus() {
    // signs + + - - on a torus: two bigons, one hexagon pair
    let cp = CurvePair::from_raw_unreduced(&raw(&[0, 1, 2, 3], &[0, 1, 2, 3], &[true, true, false, false], vec![]))
        .unwrap();
    assert_eq!(cp.genus(), 1);
    assert!(!cp.is_minimal());
    let red = reduce_to_minimal_position(&cp).unwrap();
    assert!(red.is_minimal());
    assert!(red.intersection_number() < 4);
    assert_eq!(red.genus(), 1);
}

#[test]
fn torus_has_no_returning_arcs() {
    assert!(returning_arcs(&torus()).unwrap().is_empty());
    let empty = build_curve_pair(&RawCurvePair { genus: Some(1), ..raw(&[], &[], &[], vec![]) }).unwrap();
    assert_eq!(returning_arcs(&empty), Err(CurveError::NoIntersections));
}

#[test]
fn returning_arcs_report_sides() {
    let cp = genus_two_four();
    let arcs = returning_arcs(&cp).unwrap();
    let got: Vec<(u32, u32, Side)> = arcs.iter().map(|(a, s)| (a.start, a.end, *s)).collect();
    assert_eq!(got, vec![(1, 2, Side::Left), (3, 0, Side::Right)]);
}

#[test]
fn crossing_arc_is_rejected_by_arc_surgery() {
    let cp = genus_two_four();
    let arc = Subarc { curve: Curve::B, start: 0, end: 1, forward: true, interior: vec![] };
    assert!(matches!(arc_surgery(&cp, &arc, ArcChoice::LeftPiece), Err(CurveError::NotReturning { .. })));
}

#[test]
fn double_crossing_surgery_both_pieces() {
    let cp = genus_two_double();
    let (arc, _) = returning_arcs(&cp).unwrap().remove(0);
    for piece in [ArcChoice::LeftPiece, ArcChoice::RightPiece] {
        match arc_surgery(&cp, &arc, piece) {
            Ok(rec) => {
                assert!(rec.i_c_b <= 1);
                assert!(rec.c_vs_a_disjoint);
            }
            Err(e) => assert_eq!(e, CurveError::InessentialResult),
        }
    }
}

#[test]
fn disjoint_pair_has_empty_sequence() {
    let cp = build_curve_pair(&RawCurvePair { genus: Some(2), ..raw(&[], &[], &[], vec![]) }).unwrap();
    assert_eq!(curve_surgery_sequence(&cp, &default_strategy).unwrap().len(), 0);
}

#[test]
fn torus_sequence_is_short() {
    let seq = curve_surgery_sequence(&torus(), &default_strategy).unwrap();
    assert!(seq.len() <= 1);
    assert_eq!(*seq.intersections().last().unwrap(), 0);
}

#[test]
fn stuck_strategy_is_reported() {
    let r = curve_surgery_sequence(&torus(), &|_| None);
    assert_eq!(r.unwrap_err(), CurveError::StrategyStuck(1));
}

#[test]
fn pairing_empty_and_single_chord() {
    let cp = build_curve_pair(&RawCurvePair { genus: Some(1), ..raw(&[], &[], &[], vec![]) }).unwrap();
    let r = casson_long_pairing(&cp).unwrap();
    assert_eq!(r.count, 1);
    assert_eq!(r.pairing.unwrap().matching, vec![]);
    // a single chord can never be linked
    let r = casson_long_pairing(&genus_two_double()).unwrap();
    assert_eq!(r.count, 1);
}

#[test]
fn pairing_same_order_four_points() {
    let cp = genus_two_four();
    let r = casson_long_pairing(&cp).unwrap();
    let (count, first) = hdisc_oracle::unlinked_matchings(&cp.a_order(), &cp.b_order());
    assert_eq!(r.count, count);
    assert_eq!(r.count, 2);
    assert_eq!(r.pairing.clone().unwrap().matching, first.unwrap());
    assert!(is_unlinked(&cp, &Pairing { matching: vec![(0, 1), (2, 3)] }));
}

#[test]
fn pairing_errors() {
    assert_eq!(casson_long_pairing(&torus()).unwrap_err(), CurveError::OddIntersection(1));
    assert_eq!(casson_long_pairing_bounded(&genus_two_four(), 2).unwrap_err(), CurveError::TooLarge(4, 2));
}

#[test]
fn pairing_can_be_impossible() {
    // six crossings whose unlinked matchings on a and on b have nothing in common
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let found = (0..2000).filter_map(|_| random_separating_pair(&mut rng, 6)).find(|cp| {
        hdisc_oracle::unlinked_matchings(&cp.a_order(), &cp.b_order()).0 == 0
    });
    let cp = found.expect("an unpairable instance among random six-crossing pairs");
    let r = casson_long_pairing(&cp).unwrap();
    assert_eq!(r.count, 0);
    assert!(r.pairing.is_none());
}

#[test]
fn bicorns_on_genus_two_four() {
    let cp = genus_two_four();
    let nb = nested_bicorn_sequence(&cp).unwrap();
    nb.verify(&cp).unwrap();
    assert!(nb.steps.len() <= 4);
    for w in nb.steps.windows(2) {
        let outer = w[0].bicorn.a_arc.points();
        assert!(w[1].bicorn.a_arc.points().iter().all(|v| outer.contains(v)));
    }
}

#[test]
fn torus_has_no_bicorn_sequence() {
    assert_eq!(nested_bicorn_sequence(&torus()).unwrap_err(), CurveError::NoNonRectangularFace);
}

#[test]
fn dot_export_lists_edges() {
    let dot = genus_two_four().to_dot();
    assert_eq!(dot.matches(" -- ").count(), 8);
}

fn separating_pair() -> impl Strategy<Value = CurvePair> {
    (any::<u64>(), 3usize..=6).prop_filter_map("no valid pair", |(seed, half)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..50).find_map(|_| random_separating_pair(&mut rng, 2 * half))
    })
}

fn any_pair() -> impl Strategy<Value = CurvePair> {
    (any::<u64>(), 1usize..=9).prop_filter_map("no valid pair", |(seed, n)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..50).find_map(|_| random_pair(&mut rng, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn surgery_steps_shrink_and_avoid_a(cp in separating_pair()) {
        let n0 = cp.intersection_number();
        let seq = curve_surgery_sequence(&cp, &default_strategy).unwrap();
        prop_assert!(seq.len() <= n0);
        let is = seq.intersections();
        for w in is.windows(2) {
            prop_assert!(w[1] < w[0]);
        }
        prop_assert_eq!(*is.last().unwrap(), 0);
        for s in &seq.steps {
            prop_assert!(s.c_vs_a_disjoint);
            prop_assert_eq!(s.i_c_a, 0);
            prop_assert!(s.new_curve_pair.is_minimal());
        }
    }

    #[test]
    fn general_sequences_terminate(cp in any_pair()) {
        let n0 = cp.intersection_number();
        let seq = curve_surgery_sequence(&cp, &default_strategy).unwrap();
        prop_assert!(seq.len() <= n0);
        prop_assert_eq!(*seq.intersections().last().unwrap(), 0);
    }

    #[test]
    fn euler_formula_holds(cp in any_pair()) {
        let v = cp.intersection_number() as i64;
        let f = oracle_faces(&cp) as i64;
        prop_assert_eq!(v - 2 * v + f, 2 - 2 * cp.genus() as i64);
        prop_assert_eq!(cp.faces().len() as i64, f);
    }

    #[test]
    fn pairing_matches_oracle(cp in separating_pair()) {
        prop_assume!(cp.intersection_number() <= 10);
        let r = casson_long_pairing(&cp).unwrap();
        let (count, first) = hdisc_oracle::unlinked_matchings(&cp.a_order(), &cp.b_order());
        prop_assert_eq!(r.count, count);
        prop_assert_eq!(r.pairing.map(|p| p.matching), first);
    }

    #[test]
    fn reduction_removes_vertices_or_is_idempotent(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a: Vec<u32> = (0..n as u32).collect();
        rand::seq::SliceRandom::shuffle(a.as_mut_slice(), &mut rng);
        let signs: Vec<bool> = (0..n).map(|_| rand::Rng::gen_bool(&mut rng, 0.5)).collect();
        let b: Vec<u32> = (0..n as u32).collect();
        let cp = CurvePair::from_raw_unreduced(&raw(&a, &b, &signs, vec![])).unwrap();
        let red = reduce_to_minimal_position(&cp).unwrap();
        if cp.is_minimal() {
            prop_assert_eq!(red.to_raw(), cp.to_raw());
        } else {
            prop_assert!(red.intersection_number() < n);
        }
        prop_assert!(red.is_minimal());
        prop_assert_eq!(red.genus(), cp.genus());
        let again = reduce_to_minimal_position(&red).unwrap();
        prop_assert_eq!(again.to_raw(), red.to_raw());
    }

    #[test]
    fn bicorn_arcs_end_on_previous_arc(cp in separating_pair()) {
        let nb = nested_bicorn_sequence(&cp).unwrap();
        prop_assert!(nb.verify(&cp).is_ok());
        for w in nb.steps.windows(2) {
            let prev = &w[0].bicorn.a_arc;
            let next = &w[1].bicorn;
            prop_assert!(prev.interior.contains(&next.b_arc.start));
            prop_assert!(prev.interior.contains(&next.b_arc.end));
            let mut ea = [next.a_arc.start, next.a_arc.end];
            let mut eb = [next.b_arc.start, next.b_arc.end];
            ea.sort_unstable();
            eb.sort_unstable();
            prop_assert_eq!(ea, eb);
        }
    }
}

#[test]
fn generated_pairs_respect_spec() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let spec = PairSpec::default();
    for cp in sample_pairs(&mut rng, &spec, 40, 100_000) {
        assert!((2..=3).contains(&cp.genus()));
        assert!(cp.separates(Curve::B));
        assert!(cp.is_minimal());
    }
}
