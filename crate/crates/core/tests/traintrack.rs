use hdisc_core::curvepair::{nested_bicorn_sequence, Curve, RawRegion, Subarc};
use hdisc_core::generate::{sample_pairs, sample_tracks, PairSpec};
use hdisc_core::traintrack::*;
use hdisc_core::Q;
use hdisc_oracle::{minimal_supports, strand_cycles, switch_solutions};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn port(switch: usize, side: TrackSide, pos: usize) -> Port {
    Port { switch, side, pos }
}

fn br(from: Port, to: Port) -> RawBranch {
    RawBranch { from, to }
}

use TrackSide::{Left as L, Right as R};

/// One switch, two loops each running from the left side to the right.
fn two_loops(regions: Vec<RawRegion>) -> RawTrack {
    RawTrack {
        switches: 1,
        branches: vec![br(port(0, L, 0), port(0, R, 0)), br(port(0, L, 1), port(0, R, 1))],
        regions,
        weights: None,
    }
}

/// Two trivalent switches: `a` alone on one side at each, `b` and `c` opposite. The single
/// face carries a handle, so the surface has genus two.
fn theta() -> TrackGraph {
    let raw = RawTrack {
        switches: 2,
        branches: vec![
            br(port(0, L, 0), port(1, L, 0)),
            br(port(0, R, 0), port(1, R, 0)),
            br(port(0, R, 1), port(1, R, 1)),
        ],
        regions: vec![RawRegion { faces: vec![0], genus: 1 }],
        weights: None,
    };
    TrackGraph::from_raw(&raw).unwrap()
}

fn tracks(seed: u64, count: usize) -> Vec<TrainTrack> {
    sample_tracks(&mut ChaCha8Rng::seed_from_u64(seed), &[2, 4, 6], count, 100_000)
}

/// Switch lists in the oracle's format, read back from the file form.
fn oracle_switches(t: &TrackGraph) -> Vec<(Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    let raw = t.to_raw();
    let mut ends = vec![[Vec::new(), Vec::new()]; raw.switches];
    for (b, x) in raw.branches.iter().enumerate() {
        for (k, p) in [x.from, x.to].into_iter().enumerate() {
            ends[p.switch][p.side.index()].push((p.pos, b, k));
        }
    }
    ends.into_iter()
        .map(|[mut l, mut r]| {
            l.sort();
            r.sort();
            (l.iter().map(|e| (e.1, e.2)).collect(), r.iter().map(|e| (e.1, e.2)).collect())
        })
        .collect()
}

fn oracle_vertex_cycles(t: &TrackGraph) -> Vec<Vec<u8>> {
    let sw = oracle_switches(t);
    let plain: Vec<(Vec<usize>, Vec<usize>)> =
        sw.iter().map(|(l, r)| (l.iter().map(|e| e.0).collect(), r.iter().map(|e| e.0).collect())).collect();
    let single: Vec<Vec<u8>> = switch_solutions(t.branch_count(), &plain, 2)
        .into_iter()
        .filter(|w| strand_cycles(&sw, &w.iter().map(|&x| x as u32).collect::<Vec<_>>()) == Some(1))
        .collect();
    let mut v = minimal_supports(&single);
    v.sort();
    v
}

fn as_bytes(w: &WeightVector) -> Vec<u8> {
    w.weights.iter().map(|x| x.to_integer() as u8).collect()
}

/// Mirror image: rotations reversed, sides exchanged. Only for tracks without regions.
fn mirror(t: &TrackGraph) -> TrackGraph {
    let mut raw = t.to_raw();
    assert!(raw.regions.is_empty());
    let len: Vec<[usize; 2]> = (0..raw.switches).map(|s| [L, R].map(|k| t.side(s, k).len())).collect();
    let flip = |p: Port| {
        let k = 1 - p.side.index();
        Port { switch: p.switch, side: TrackSide::from_index(k), pos: len[p.switch][p.side.index()] - 1 - p.pos }
    };
    for b in raw.branches.iter_mut() {
        *b = br(flip(b.from), flip(b.to));
    }
    TrackGraph::from_raw(&raw).unwrap()
}

fn census(t: &TrackGraph) -> Vec<(usize, bool, usize)> {
    let mut v: Vec<_> = t.faces().iter().map(|f| (f.cusps, f.disc, f.corners.len())).collect();
    v.sort();
    v
}

#[test]
fn two_loops_with_a_handle_region_is_valid() {
    let t = validate_track(&two_loops(vec![RawRegion { faces: vec![0], genus: 1 }])).unwrap();
    assert_eq!(t.switch_count(), 1);
    assert_eq!(t.genus(), 2);
    let f = &t.faces()[0];
    assert_eq!(f.cusps, 2);
    assert!(!f.disc);
}

#[test]
fn closed_torus_two_loops_is_a_bigon() {
    let e = validate_track(&two_loops(vec![])).unwrap_err();
    assert!(matches!(e, TrackError::BigonFace { .. }), "{e:?}");
}

#[test]
fn one_sided_switch_rejected() {
    let raw = RawTrack { switches: 1, branches: vec![br(port(0, L, 0), port(0, L, 1))], regions: vec![], weights: None };
    assert_eq!(validate_track(&raw).unwrap_err(), TrackError::EmptySide(0));
}

#[test]
fn valence_two_rejected() {
    let raw = RawTrack { switches: 1, branches: vec![br(port(0, L, 0), port(0, R, 0))], regions: vec![], weights: None };
    assert_eq!(validate_track(&raw).unwrap_err(), TrackError::ValenceTwoSwitch(0));
}

#[test]
fn switch_equality_examples() {
    let t = theta();
    assert!(check_switch_equality(&t, &WeightVector::from_ints(&[3, 1, 2])).unwrap());
    assert!(!check_switch_equality(&t, &WeightVector::from_ints(&[3, 1, 1])).unwrap());
    assert!(check_switch_equality(&t, &WeightVector::from_ints(&[0, 0, 0])).unwrap());
    assert!(matches!(
        check_switch_equality(&t, &WeightVector::from_ints(&[3, 1])),
        Err(TrackError::MissingBranchWeight(_))
    ));
}

#[test]
fn file_form_round_trip() {
    for t in tracks(3, 20) {
        let raw = t.to_raw();
        let json = serde_json::to_string(&raw).unwrap();
        let back: RawTrack = serde_json::from_str(&json).unwrap();
        assert_eq!(TrackGraph::from_raw(&back).unwrap(), *t.graph());
    }
    let t = validate_track(&two_loops(vec![RawRegion { faces: vec![0], genus: 1 }])).unwrap();
    assert_eq!(validate_track(&t.to_raw()).unwrap(), t);
}

#[test]
fn handle_track_vertex_cycles() {
    // the loops are single curves; their sum is a second solution with larger support
    let t = validate_track(&two_loops(vec![RawRegion { faces: vec![0], genus: 1 }])).unwrap();
    let vc: Vec<Vec<u8>> = vertex_cycles(&t).unwrap().iter().map(as_bytes).collect();
    assert_eq!(vc, vec![vec![0, 1], vec![1, 0]]);
    assert_eq!(multicurve_components(&t, &[1, 1]), 1);
}

#[test]
fn vertex_cycles_match_oracle() {
    for t in tracks(7, 120) {
        let core: Vec<Vec<u8>> = vertex_cycles(&t).unwrap().iter().map(as_bytes).collect();
        assert_eq!(core, oracle_vertex_cycles(&t));
        for w in vertex_cycles(&t).unwrap() {
            assert!(check_switch_equality(&t, &w).unwrap());
            assert!(w.max_weight() <= Q::from_integer(2));
        }
    }
}

#[test]
fn strand_count_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for t in tracks(9, 60) {
        let sw = oracle_switches(&t);
        for _ in 0..10 {
            let w: Vec<u32> = (0..t.branch_count()).map(|_| rand::Rng::gen_range(&mut rng, 0..4)).collect();
            let ours = multicurve_components(&t, &w);
            match strand_cycles(&sw, &w) {
                Some(n) => assert_eq!(ours, n),
                None => assert_eq!(ours, usize::MAX),
            }
        }
    }
}

#[test]
fn too_many_branches_rejected() {
    let t = sample_tracks(&mut ChaCha8Rng::seed_from_u64(13), &[10], 1, 100_000).remove(0);
    assert!(matches!(vertex_cycles(&t), Err(TrackError::TooLarge(15, 14))));
}

#[test]
fn splits_are_carried() {
    let mut seen = [0usize; 3];
    for t in tracks(21, 80) {
        for b in 0..t.branch_count() {
            for (i, c) in [SplitChoice::Left, SplitChoice::Right, SplitChoice::Central].into_iter().enumerate() {
                let Ok((s, m)) = split(&t, b, c) else { continue };
                seen[i] += 1;
                assert!(verify_carrying(&s, &t, &m).unwrap());
                let expect = if i == 2 { t.branch_count() - 3 } else { t.branch_count() };
                assert_eq!(s.branch_count(), expect);
                for w in vertex_cycles(&s).unwrap() {
                    let pushed = push_forward(&m, t.branch_count(), &w);
                    assert!(check_switch_equality(&t, &pushed).unwrap());
                }
            }
        }
    }
    assert!(seen.iter().all(|&n| n > 10), "{seen:?}");
}

#[test]
fn theta_split_at_its_large_branch() {
    let t = validate_graph(theta()).unwrap();
    assert_eq!((t.genus(), t.faces().len()), (2, 1));
    assert!(split(&t, 1, SplitChoice::Left).is_err());
    let (l, m) = split(&t, 0, SplitChoice::Left).unwrap();
    assert_eq!((l.switch_count(), l.branch_count()), (2, 3));
    assert!(verify_carrying(&l, &t, &m).unwrap());
    let (r, _) = split(&t, 0, SplitChoice::Right).unwrap();
    assert_eq!(r.branch_count(), 3);
    assert!(matches!(split(&t, 0, SplitChoice::Central), Err(TrackError::InvalidResult(_))));
}

#[test]
fn left_and_right_are_mirror_images() {
    let mut checked = 0;
    for t in tracks(23, 60) {
        let m = validate_graph(mirror(&t)).unwrap();
        for b in 0..t.branch_count() {
            let (Ok((l, _)), Ok((r, _))) = (split(&t, b, SplitChoice::Left), split(&m, b, SplitChoice::Right)) else {
                continue;
            };
            assert!(mirror(&l).is_isomorphic(&r));
            checked += 1;
        }
    }
    assert!(checked > 10);
}

#[test]
fn small_branch_is_not_large() {
    let t = tracks(5, 10).remove(0);
    let b = (0..t.branch_count()).find(|&b| split(&t, b, SplitChoice::Left).is_err()).unwrap();
    assert!(matches!(split(&t, b, SplitChoice::Left), Err(TrackError::NotLargeBranch(_))));
}

#[test]
fn shifts_return_and_keep_faces() {
    let mut count = 0;
    for t in tracks(31, 60) {
        for b in 0..t.branch_count() {
            let Ok((s, m)) = shift(&t, b) else { continue };
            count += 1;
            assert!(verify_carrying(&s, &t, &m).unwrap());
            assert_eq!(census(&s), census(&t));
            let (back, _) = shift(&s, b).unwrap();
            assert!(back.is_isomorphic(&t));
            for w in vertex_cycles(&s).unwrap() {
                assert!(check_switch_equality(&t, &push_forward(&m, t.branch_count(), &w)).unwrap());
            }
        }
    }
    assert!(count > 20);
}

#[test]
fn shift_needs_the_pattern() {
    let t = validate_track(&two_loops(vec![RawRegion { faces: vec![0], genus: 1 }])).unwrap();
    assert_eq!(shift(&t, 0).unwrap_err(), TrackError::PatternMismatch(0));
}

#[test]
fn identity_carries_and_wrong_side_does_not() {
    for t in tracks(41, 20) {
        let id = RouteMap::identity(&t);
        assert!(verify_carrying(&t, &t, &id).unwrap());
        let mut bad = id.clone();
        bad.switch_map[0].1 = true;
        assert!(!verify_carrying(&t, &t, &bad).unwrap());
    }
}

#[test]
fn route_through_a_gap_is_broken() {
    let t = tracks(43, 10).into_iter().find(|t| t.switch_count() >= 4).unwrap();
    // two consecutive branches that do not share a switch
    let ports = |b: usize| [t.port(2 * b).switch, t.port(2 * b + 1).switch];
    let (x, y) = (0..t.branch_count())
        .flat_map(|x| (0..t.branch_count()).map(move |y| (x, y)))
        .find(|&(x, y)| !ports(y).contains(&ports(x)[1]))
        .unwrap();
    let mut m = RouteMap::identity(&t);
    m.branch_paths[x] = vec![(x, true), (y, true)];
    assert_eq!(verify_carrying(&t, &t, &m), Err(TrackError::BrokenRoute(x)));
}

#[test]
fn search_finds_a_split() {
    let t = validate_graph(theta()).unwrap();
    let (s, _) = split(&t, 0, SplitChoice::Left).unwrap();
    // the theta track splits back to itself
    assert!(s.is_isomorphic(&t));
    match find_carrying(&s, &t, DEFAULT_SEARCH_DEPTH, 10_000) {
        SearchOutcome::Found { moves, map } => {
            assert!(moves.is_empty());
            assert!(verify_carrying(&s, &t, &map).unwrap());
        }
        other => panic!("{other:?}"),
    }
    let (t, s) = tracks(51, 40)
        .into_iter()
        .find_map(|t| {
            let b = (0..t.branch_count()).find(|&b| split(&t, b, SplitChoice::Left).is_ok())?;
            let s = split(&t, b, SplitChoice::Left).unwrap().0;
            (!s.is_isomorphic(&t)).then_some((t, s))
        })
        .unwrap();
    match find_carrying(&s, &t, DEFAULT_SEARCH_DEPTH, 100_000) {
        SearchOutcome::Found { moves, map } => {
            assert!(!moves.is_empty());
            assert!(verify_carrying(&s, &t, &map).unwrap());
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(find_carrying(&s, &t, 3, 1), SearchOutcome::BudgetExhausted);
}

#[test]
fn vertex_cycles_invariant_under_relabelling() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for t in tracks(61, 40) {
        let mut raw = t.to_raw();
        let nb = raw.branches.len();
        let mut perm: Vec<usize> = (0..nb).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let mut branches = vec![raw.branches[0].clone(); nb];
        for (old, &new) in perm.iter().enumerate() {
            let b = &raw.branches[old];
            branches[new] = if new % 2 == 0 { b.clone() } else { br(b.to, b.from) };
        }
        raw.branches = branches;
        let u = validate_track(&raw).unwrap();
        assert!(u.is_isomorphic(&t));
        let mut moved: Vec<Vec<u8>> = vertex_cycles(&t)
            .unwrap()
            .iter()
            .map(|w| {
                let mut v = vec![0u8; nb];
                for (old, &new) in perm.iter().enumerate() {
                    v[new] = w.weights[old].to_integer() as u8;
                }
                v
            })
            .collect();
        moved.sort();
        let direct: Vec<Vec<u8>> = vertex_cycles(&u).unwrap().iter().map(as_bytes).collect();
        assert_eq!(moved, direct);
    }
}

fn separating_pairs(seed: u64, count: usize) -> Vec<hdisc_core::curvepair::CurvePair> {
    let spec = PairSpec { min_n: 4, max_n: 12, min_genus: 2, max_genus: 3, separating_b: true };
    sample_pairs(&mut ChaCha8Rng::seed_from_u64(seed), &spec, count, 100_000)
}

#[test]
fn whole_a_gives_one_branch_per_point() {
    for cp in separating_pairs(71, 20) {
        let order = cp.a_order();
        let n = order.len();
        let arc = Subarc { curve: Curve::A, start: order[0], end: order[0], forward: true, interior: order[1..].to_vec() };
        let p = pretrack_from_bicorn(&cp, &arc).unwrap();
        assert!(p.single_switch);
        assert_eq!(p.graph.branch_count(), n);
        // b leaves each point on the side given by its sign
        for (j, &id) in p.labels.iter().enumerate() {
            let side = p.graph.port(2 * j).side;
            assert_eq!(side == L, cp.sign_of(id).unwrap() > 0);
        }
    }
}

#[test]
fn pretrack_needs_an_arc_of_a() {
    let cp = separating_pairs(73, 1).remove(0);
    let arc = Subarc { curve: Curve::B, start: cp.ids()[0], end: cp.ids()[1], forward: true, interior: vec![] };
    assert_eq!(pretrack_from_bicorn(&cp, &arc).unwrap_err(), TrackError::EmptyArc);
}

#[test]
fn collapse_fixes_a_track() {
    for t in tracks(75, 10) {
        let p = PreTrack::new(t.graph().clone()).unwrap();
        let c = bigon_collapse(&p).unwrap();
        assert_eq!(c.track, t);
        assert_eq!(c.merge, RouteMap::identity(&t));
    }
}

#[test]
fn collapse_merges_parallel_loops() {
    let p = PreTrack::new(TrackGraph::from_raw(&two_loops(vec![])).unwrap()).unwrap();
    let err = bigon_collapse(&p).unwrap_err();
    // the two loops merge into a single loop at a valence-two switch
    assert!(matches!(err, TrackError::CollapseFailed(_)), "{err:?}");
}

fn one_switch(branches: &[((TrackSide, usize), (TrackSide, usize))], regions: Vec<RawRegion>) -> PreTrack {
    let raw = RawTrack {
        switches: 1,
        branches: branches.iter().map(|&((s, i), (t, j))| br(port(0, s, i), port(0, t, j))).collect(),
        regions,
        weights: None,
    };
    PreTrack::new(TrackGraph::from_raw(&raw).unwrap()).unwrap()
}

#[test]
fn collapse_across_both_smooth_corners() {
    // the bigon between b3 and the path b1 b0 b5 passes both smooth corners, L5|R0 and R5|L0
    let p = one_switch(
        &[((L, 0), (L, 5)), ((R, 0), (R, 3)), ((L, 2), (L, 1)), ((R, 4), (L, 3)), ((R, 2), (R, 1)), ((L, 4), (R, 5))],
        vec![RawRegion { faces: vec![0, 2], genus: 0 }, RawRegion { faces: vec![3, 4], genus: 0 }],
    );
    let c = bigon_collapse(&p).unwrap();
    assert_eq!(c.track.branch_count(), 5);
    assert_eq!(c.kept, vec![0, 1, 2, 4, 5]);
    assert_eq!(c.merge.branch_paths[3], vec![(1, false), (0, false), (4, false)]);
    assert_eq!(c.track.euler(), p.graph.euler());
}

#[test]
fn collapse_into_a_face_bounded_by_one_loop() {
    // b5 is a small loop inside the loop b2; the face inside b5 has no other boundary
    let p = one_switch(
        &[((L, 1), (R, 0)), ((L, 5), (L, 0)), ((R, 5), (R, 2)), ((L, 3), (L, 4)), ((R, 1), (L, 2)), ((R, 3), (R, 4))],
        vec![RawRegion { faces: vec![0, 3, 4], genus: 0 }],
    );
    let c = bigon_collapse(&p).unwrap();
    assert_eq!(c.kept, vec![0, 1, 2, 3, 4]);
    assert_eq!(c.merge.branch_paths[5].len(), 1);
    assert_eq!(c.track.euler(), p.graph.euler());
}

#[test]
fn pipeline_on_separating_pairs() {
    let pairs = separating_pairs(81, 60);
    assert!(pairs.len() >= 50);
    for cp in &pairs {
        let nb = nested_bicorn_sequence(cp).unwrap();
        assert_eq!(pipeline_ok(cp, &nb), Ok(()));
        let ts = bicorn_tracks(cp, &nb).unwrap();
        for bt in &ts {
            let t = &bt.collapse.track;
            assert!(verify_carrying(&bt.pre.graph, t, &bt.collapse.merge).unwrap());
            let r = recurrence_report(t, &[]).unwrap();
            assert!(r.recurrent);
            assert_eq!(r.transversely_recurrent, None);
            for w in vertex_cycles(t).unwrap() {
                assert!(!is_switch_dual(&TrackCurve::Carried(vec![(w.support()[0], true)]), t).unwrap());
            }
        }
    }
}

#[test]
fn crossing_two_branches_is_not_dual() {
    let cp = separating_pairs(83, 1).remove(0);
    let nb = nested_bicorn_sequence(&cp).unwrap();
    let t = bicorn_tracks(&cp, &nb).unwrap().remove(0).collapse.track;
    let c = TrackCurve::Transverse(vec![Crossing::Branch { branch: 0 }, Crossing::Branch { branch: 0 }]);
    assert!(!is_switch_dual(&c, &t).unwrap());
    let off = TrackCurve::Transverse(vec![Crossing::Switch { switch: 3, corner: 0 }]);
    assert_eq!(is_switch_dual(&off, &t), Err(TrackError::EmbeddingMismatch));
}

#[test]
fn non_recurrent_track_exists() {
    let t = tracks(91, 200).into_iter().find(|t| !recurrence_report(t, &[]).unwrap().recurrent);
    let t = t.expect("a random track with an uncarried branch");
    let dead: Vec<usize> = (0..t.branch_count())
        .filter(|&b| oracle_vertex_cycles(&t).iter().all(|w| w[b] == 0))
        .collect();
    assert!(!dead.is_empty());
}

#[test]
fn all_disc_tracks_are_large() {
    for t in tracks(93, 20) {
        assert!(recurrence_report(&t, &[]).unwrap().large);
    }
}

#[test]
fn pipeline_is_deterministic() {
    let run = || {
        separating_pairs(95, 10)
            .iter()
            .map(|cp| {
                let nb = nested_bicorn_sequence(cp).unwrap();
                bicorn_tracks(cp, &nb).unwrap().iter().map(|b| b.collapse.track.canonical_code()).collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pipeline_property(seed in 0u64..1_000_000) {
        for cp in separating_pairs(seed, 2) {
            let nb = nested_bicorn_sequence(&cp).unwrap();
            prop_assert_eq!(pipeline_ok(&cp, &nb), Ok(()));
        }
    }

    #[test]
    fn split_pushforward_property(seed in 0u64..1_000_000) {
        for t in tracks(seed, 2) {
            for b in 0..t.branch_count() {
                for c in [SplitChoice::Left, SplitChoice::Right] {
                    if let Ok((s, m)) = split(&t, b, c) {
                        for w in vertex_cycles(&s).unwrap() {
                            prop_assert!(check_switch_equality(&t, &push_forward(&m, t.branch_count(), &w)).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn valid_tracks_have_even_euler(seed in 0u64..1_000_000) {
        for t in tracks(seed, 2) {
            prop_assert!(t.euler() <= 2 && t.euler() % 2 == 0);
            prop_assert!(t.faces().iter().filter(|f| f.disc).all(|f| f.cusps >= 3));
        }
    }
}
