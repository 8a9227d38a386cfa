//! Acceptance criteria 1-10. Each criterion returns a verdict with deterministic metrics;
//! wall-clock time is checked but never written out.

use crate::commands::models::{drift, loxodromy, shadows, TreeSetting};
use crate::fixtures::{self, Frozen};
use crate::output::{q, Emitter, Header};
use crate::{Failure, RunConfig};
use anyhow::{anyhow, Context};
use hdisc_core::coarse::{
    delta_four_point, electrify, DeltaMode, Metric, MetricGraph, SubsetFamily, CONE_EDGE_LEN2,
};
use hdisc_core::curvepair::{casson_long_pairing, curve_surgery_sequence, default_strategy, nested_bicorn_sequence};
use hdisc_core::models::free_tree_ball;
use hdisc_core::traintrack::{
    check_switch_equality, pipeline_ok, push_forward, shift, split, verify_carrying, vertex_cycles, SplitChoice,
    TrackSide, TrainTrack, WeightVector,
};
use hdisc_core::Q;
use hdisc_oracle::{floyd_warshall, four_point_delta_doubled, switch_solutions, unlinked_matchings};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

pub const SURGERY_PAIRS: usize = 200;
pub const SURGERY_TIME_LIMIT: Duration = Duration::from_secs(60);
pub const PAIRING_INSTANCES: usize = 120;
pub const PAIRING_MAX_POINTS: usize = 10;
pub const BICORN_PAIRS: usize = 80;
pub const MIN_BICORNS: usize = 100;
pub const TRACKS: usize = 40;
/// Enumerated weights per branch for the pushforward check.
pub const ENUM_WEIGHT_MAX: u8 = 2;
pub const GRAPHS: usize = 150;
pub const TREES: usize = 60;
/// Criterion 8: the `b` slope must reach this fraction of the frozen value.
pub const LOXODROMIC_FRACTION: (i64, i64) = (1, 2);
pub const ROTATION_MAX_SLOPE: (i64, i64) = (1, 20);

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub group: &'static str,
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "surgery-monotonicity", group: "curvepair" },
    Criterion { id: 2, name: "pairing-oracle", group: "curvepair" },
    Criterion { id: 3, name: "bicorn-pipeline", group: "traintrack" },
    Criterion { id: 4, name: "track-algebra", group: "traintrack" },
    Criterion { id: 5, name: "electrification-contract", group: "coarse" },
    Criterion { id: 6, name: "delta-oracle", group: "coarse" },
    Criterion { id: 7, name: "separated-family-shadows", group: "coarse" },
    Criterion { id: 8, name: "loxodromy-shadow", group: "coarse" },
    Criterion { id: 9, name: "drift-regression", group: "models" },
    Criterion { id: 10, name: "determinism", group: "determinism" },
];

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub name: String,
    pub group: String,
    pub pass: bool,
    pub detail: String,
    pub metrics: BTreeMap<String, Value>,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!("{} {} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

struct Verdict {
    pass: bool,
    detail: String,
    metrics: BTreeMap<String, Value>,
}

fn verdict(pass: bool, detail: String, metrics: Value) -> Verdict {
    let metrics = match metrics {
        Value::Object(m) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    };
    Verdict { pass, detail, metrics }
}

/// Criterion ids selected by a comma-separated list of groups, names or numbers.
pub fn select(filter: Option<&str>) -> anyhow::Result<Vec<usize>> {
    let Some(f) = filter else { return Ok((1..=10).collect()) };
    let mut ids = Vec::new();
    for tok in f.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let hits: Vec<usize> = CRITERIA
            .iter()
            .filter(|c| c.group == tok || c.name == tok || c.id.to_string() == tok)
            .map(|c| c.id)
            .collect();
        if hits.is_empty() {
            return Err(anyhow!("filter {tok:?} matches no criterion"));
        }
        ids.extend(hits);
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

fn c1(seed: u64) -> Verdict {
    let start = Instant::now();
    let pairs = fixtures::surgery_corpus(seed, SURGERY_PAIRS);
    let per: Vec<Result<(usize, usize), String>> = pairs
        .par_iter()
        .map(|cp| {
            let seq = curve_surgery_sequence(cp, &default_strategy).map_err(|e| e.to_string())?;
            let mut prev = cp.intersection_number();
            let mut bad = 0;
            for r in &seq.steps {
                if r.i_c_a != 0 || !r.c_vs_a_disjoint || r.i_c_b >= prev {
                    bad += 1;
                }
                prev = r.i_c_b;
            }
            if seq.len() > cp.intersection_number() || prev != 0 {
                bad += 1;
            }
            Ok((seq.len(), bad))
        })
        .collect();
    let errors = per.iter().filter(|r| r.is_err()).count();
    let steps: usize = per.iter().flatten().map(|r| r.0).sum();
    let violations: usize = per.iter().flatten().map(|r| r.1).sum();
    let max_n = pairs.iter().map(|p| p.intersection_number()).max().unwrap_or(0);
    let mut genus = BTreeMap::new();
    for p in &pairs {
        *genus.entry(p.genus().to_string()).or_insert(0usize) += 1;
    }
    let in_time = start.elapsed() < SURGERY_TIME_LIMIT;
    let pass = pairs.len() >= SURGERY_PAIRS && errors == 0 && violations == 0 && in_time;
    let first_err = per.iter().find_map(|r| r.as_ref().err().cloned());
    let mut detail = format!("{} pairs, {steps} steps, {violations} violations, {errors} errors", pairs.len());
    if let Some(e) = first_err {
        detail.push_str(&format!(" (first: {e})"));
    }
    if !in_time {
        detail.push_str(", over the time limit");
    }
    verdict(pass, detail, json!({ "pairs": pairs.len(), "steps": steps, "violations": violations, "errors": errors, "max_intersections": max_n, "genus": genus }))
}

fn c2(seed: u64) -> Verdict {
    let pairs = fixtures::pairing_corpus(seed, PAIRING_INSTANCES);
    let results: Vec<Result<bool, String>> = pairs
        .par_iter()
        .map(|cp| {
            let r = casson_long_pairing(cp).map_err(|e| e.to_string())?;
            let (count, first) = unlinked_matchings(&cp.a_order(), &cp.b_order());
            Ok(r.count == count && r.pairing.map(|p| p.matching) == first)
        })
        .collect();
    let small = pairs.iter().filter(|p| p.intersection_number() <= PAIRING_MAX_POINTS).count();
    let agree = results.iter().filter(|r| matches!(r, Ok(true))).count();
    let with_pairing = pairs.iter().filter(|p| casson_long_pairing(p).map_or(false, |r| r.count > 0)).count();
    let pass = pairs.len() >= 100 && small == pairs.len() && agree == pairs.len();
    verdict(
        pass,
        format!("{agree}/{} instances agree with the brute-force matcher", pairs.len()),
        json!({ "instances": pairs.len(), "agree": agree, "with_pairing": with_pairing }),
    )
}

fn c3(seed: u64) -> Verdict {
    let pairs = fixtures::bicorn_corpus(seed, BICORN_PAIRS);
    let per: Vec<Result<usize, String>> = pairs
        .par_iter()
        .map(|cp| {
            let nb = nested_bicorn_sequence(cp).map_err(|e| format!("no bicorn sequence: {e}"))?;
            pipeline_ok(cp, &nb)?;
            Ok(nb.steps.len())
        })
        .collect();
    let bicorns: usize = per.iter().flatten().sum();
    let failures: Vec<&String> = per.iter().filter_map(|r| r.as_ref().err()).collect();
    let pass = failures.is_empty() && bicorns >= MIN_BICORNS;
    let mut detail = format!("{} pairs, {bicorns} bicorns, {} failures", pairs.len(), failures.len());
    if let Some(f) = failures.first() {
        detail.push_str(&format!(" (first: {f})"));
    }
    verdict(pass, detail, json!({ "pairs": pairs.len(), "bicorns": bicorns, "failures": failures.len() }))
}

fn oracle_switches(t: &TrainTrack) -> Vec<(Vec<usize>, Vec<usize>)> {
    (0..t.switch_count())
        .map(|s| {
            let side = |k| t.side(s, k).iter().map(|&d| d / 2).collect();
            (side(TrackSide::Left), side(TrackSide::Right))
        })
        .collect()
}

#[derive(Default)]
struct AlgebraCount {
    cycles: usize,
    bad_cycles: usize,
    moves: usize,
    weights: usize,
    bad_moves: usize,
}

fn track_algebra(t: &TrainTrack) -> Result<AlgebraCount, String> {
    let mut c = AlgebraCount::default();
    let two = Q::from_integer(2);
    for w in vertex_cycles(t).map_err(|e| e.to_string())? {
        c.cycles += 1;
        if w.max_weight() > two || !check_switch_equality(t, &w).map_err(|e| e.to_string())? {
            c.bad_cycles += 1;
        }
    }
    for b in 0..t.branch_count() {
        let moves = [
            split(t, b, SplitChoice::Left),
            split(t, b, SplitChoice::Right),
            split(t, b, SplitChoice::Central),
            shift(t, b),
        ];
        for (s, m) in moves.into_iter().flatten() {
            c.moves += 1;
            let mut ok = verify_carrying(&s, t, &m).map_err(|e| e.to_string())?;
            for w in switch_solutions(s.branch_count(), &oracle_switches(&s), ENUM_WEIGHT_MAX) {
                c.weights += 1;
                let w = WeightVector::from_ints(&w.iter().map(|&x| x as i64).collect::<Vec<_>>());
                ok &= check_switch_equality(t, &push_forward(&m, t.branch_count(), &w)).map_err(|e| e.to_string())?;
            }
            if !ok {
                c.bad_moves += 1;
            }
        }
    }
    Ok(c)
}

fn c4(seed: u64) -> Verdict {
    let tracks = fixtures::track_corpus(seed, TRACKS);
    let per: Vec<Result<AlgebraCount, String>> = tracks.par_iter().map(track_algebra).collect();
    let ok: Vec<&AlgebraCount> = per.iter().flatten().collect();
    let errors = per.len() - ok.len();
    let sum = |f: fn(&AlgebraCount) -> usize| ok.iter().map(|c| f(c)).sum::<usize>();
    let (cycles, bad_cycles, moves, weights, bad_moves) =
        (sum(|c| c.cycles), sum(|c| c.bad_cycles), sum(|c| c.moves), sum(|c| c.weights), sum(|c| c.bad_moves));
    let pass = tracks.len() == TRACKS && errors == 0 && bad_cycles == 0 && bad_moves == 0 && moves > 0;
    verdict(
        pass,
        format!(
            "{} tracks, {cycles} vertex cycles ({bad_cycles} bad), {moves} moves over {weights} weights ({bad_moves} bad)",
            tracks.len()
        ),
        json!({ "tracks": tracks.len(), "errors": errors, "cycles": cycles, "bad_cycles": bad_cycles, "moves": moves, "weights": weights, "bad_moves": bad_moves }),
    )
}

fn named_graphs() -> anyhow::Result<Vec<(String, MetricGraph, SubsetFamily)>> {
    let path = MetricGraph::unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
    let tree = free_tree_ball(3)?;
    let cosets = tree.all_cosets(hdisc_core::models::A);
    let farey = hdisc_core::models::farey_ball(3)?;
    let fam = SubsetFamily::new(vec![(0..farey.graph.n()).step_by(3).collect()]);
    Ok(vec![
        ("coned-path".into(), path, SubsetFamily::new(vec![(0..5).collect()])),
        ("free-tree-3".into(), tree.graph, cosets),
        ("farey-3".into(), farey.graph, fam),
    ])
}

fn electrification_ok(g: &MetricGraph, fam: &SubsetFamily) -> Result<bool, String> {
    let e = electrify(g, fam).map_err(|e| e.to_string())?;
    let (m, me) = (Metric::new(g), Metric::new(&e.graph));
    for u in 0..g.n() {
        for v in 0..g.n() {
            if me.d2(u, v).map_err(|e| e.to_string())? > m.d2(u, v).map_err(|e| e.to_string())? {
                return Ok(false);
            }
        }
    }
    for s in &fam.sets {
        for &u in s {
            for &v in s {
                if me.d2(u, v).map_err(|e| e.to_string())? > 2 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(e.graph.edges().iter().filter(|x| x.0 >= e.base_n || x.1 >= e.base_n).all(|x| x.2 == 1))
}

fn c5(seed: u64) -> Verdict {
    let mut graphs: Vec<(String, MetricGraph, SubsetFamily)> = match named_graphs() {
        Ok(g) => g,
        Err(e) => return verdict(false, e.to_string(), json!({})),
    };
    let coned = electrify(&graphs[0].1, &graphs[0].2).and_then(|e| Metric::new(&e.graph).d(0, 4));
    for (i, (g, f)) in fixtures::graph_corpus(seed, GRAPHS).into_iter().enumerate() {
        graphs.push((format!("random-{i}"), g, f));
    }
    let results: Vec<Result<bool, String>> = graphs.par_iter().map(|(_, g, f)| electrification_ok(g, f)).collect();
    let bad: Vec<&str> = graphs.iter().zip(&results).filter(|(_, r)| !matches!(r, Ok(true))).map(|(g, _)| g.0.as_str()).collect();
    let coned_one = coned == Ok(Q::from_integer(1));
    let pass = bad.is_empty() && CONE_EDGE_LEN2 == 1 && coned_one;
    let mut detail = format!("{} graphs, {} violations, cone edge 1/2, coned path d(v0,v4) = {}", graphs.len(), bad.len(), coned.map_or("-".into(), q));
    if let Some(b) = bad.first() {
        detail.push_str(&format!(" (first: {b})"));
    }
    verdict(pass, detail, json!({ "graphs": graphs.len(), "violations": bad.len(), "cone_edge_len2": CONE_EDGE_LEN2 }))
}

fn oracle_delta(g: &MetricGraph) -> Option<Q> {
    let edges: Vec<(usize, usize, i64)> = g.edges().iter().map(|&(u, v, l)| (u, v, l as i64)).collect();
    let d: Option<Vec<Vec<i64>>> = floyd_warshall(g.n(), &edges).into_iter().map(|r| r.into_iter().collect()).collect();
    d.map(|d| Q::new(four_point_delta_doubled(&d), 4))
}

fn c6(seed: u64) -> Verdict {
    let graphs: Vec<MetricGraph> = fixtures::graph_corpus(seed, GRAPHS).into_iter().map(|p| p.0).collect();
    let agree: Vec<bool> = graphs
        .par_iter()
        .map(|g| delta_four_point(g, DeltaMode::Exhaustive).ok().map(|r| r.delta) == oracle_delta(g))
        .collect();
    let mut trees = fixtures::tree_corpus(seed, TREES);
    trees.push(free_tree_ball(2).map(|b| b.graph).unwrap_or_else(|_| MetricGraph::unit(1, &[])));
    let tree_ok: Vec<bool> = trees
        .par_iter()
        .map(|t| delta_four_point(t, DeltaMode::Exhaustive).map_or(false, |r| r.delta == Q::from_integer(0)))
        .collect();
    let (a, t) = (agree.iter().filter(|&&x| x).count(), tree_ok.iter().filter(|&&x| x).count());
    let max_delta = graphs.iter().filter_map(oracle_delta).max().unwrap_or(Q::from_integer(0));
    verdict(
        a == graphs.len() && t == trees.len(),
        format!("{a}/{} graphs match the brute-force delta, {t}/{} trees have delta 0", graphs.len(), trees.len()),
        json!({ "graphs": graphs.len(), "agree": a, "trees": trees.len(), "trees_zero": t, "max_delta": q(max_delta) }),
    )
}

fn c7(frozen: &Frozen) -> Verdict {
    let run = || -> anyhow::Result<_> { shadows(&TreeSetting::new(frozen.shadows.radius)?, &frozen.shadows) };
    match run() {
        Err(e) => verdict(false, format!("{e:#}"), json!({})),
        Ok(s) => {
            let pass = s.k <= frozen.k_max && s.c <= frozen.c_max && s.slope >= frozen.shadow_slope && s.l_star > Q::from_integer(0);
            verdict(
                pass,
                format!(
                    "K* = {} (<= {}), c* = {} (<= {}), electrified slope {} (>= {}), L = {}, M = {}",
                    s.k, frozen.k_max, s.c, frozen.c_max, s.slope, frozen.shadow_slope, s.l_star, s.m_star
                ),
                json!({ "k": q(s.k), "c": q(s.c), "slope": q(s.slope), "l_star": q(s.l_star), "m_star": q(s.m_star),
                        "electrified_lengths": s.electrified_lengths.iter().map(|&x| q(x)).collect::<Vec<_>>() }),
            )
        }
    }
}

fn c8(frozen: &Frozen) -> Verdict {
    let run = || -> anyhow::Result<_> { loxodromy(&TreeSetting::new(frozen.loxodromy.radius)?, &frozen.loxodromy) };
    match run() {
        Err(e) => verdict(false, format!("{e:#}"), json!({})),
        Ok(l) => {
            let floor = frozen.b_slope * Q::new(LOXODROMIC_FRACTION.0, LOXODROMIC_FRACTION.1);
            let cap = Q::new(ROTATION_MAX_SLOPE.0, ROTATION_MAX_SLOPE.1);
            let pass = l.b.tail_slope > Q::from_integer(0) && l.b.tail_slope >= floor && l.rotation.tail_slope <= cap;
            verdict(
                pass,
                format!("b slope {} (>= {floor}), rotation slope {} (<= {cap})", l.b.tail_slope, l.rotation.tail_slope),
                json!({ "b_slope": q(l.b.tail_slope), "rotation_slope": q(l.rotation.tail_slope),
                        "b_distances": l.b.distances.iter().map(|&x| q(x)).collect::<Vec<_>>() }),
            )
        }
    }
}

fn c9(frozen: &Frozen) -> Verdict {
    let p = &frozen.drift;
    let run = || -> anyhow::Result<_> { Ok(drift(&free_tree_ball(p.radius)?, p, p.seed, p.trials)?) };
    match run() {
        Err(e) => verdict(false, format!("{e:#}"), json!({})),
        Ok(r) => {
            let curve: Vec<String> = r.mean_distance.iter().map(|&x| q(x)).collect();
            let same = curve == frozen.mean_distance;
            let pass = same && r.fraction_above >= frozen.fraction_above;
            let first_diff = curve.iter().zip(&frozen.mean_distance).position(|(a, b)| a != b);
            let mut detail = format!(
                "drift curve {} the frozen curve, fraction above {} = {} (>= {})",
                if same { "reproduces" } else { "differs from" },
                r.threshold,
                r.fraction_above,
                frozen.fraction_above
            );
            if let Some(i) = first_diff {
                detail.push_str(&format!(" (first difference at n = {})", i + 1));
            }
            verdict(pass, detail, json!({ "mean_distance": curve, "fraction_above": q(r.fraction_above), "completed": r.completed }))
        }
    }
}

/// Criteria other than 10, in id order.
pub fn evaluate(ids: &[usize], seed: u64, frozen: &Frozen) -> Vec<Outcome> {
    ids.iter()
        .filter(|&&id| id != 10)
        .map(|&id| {
            let v = match id {
                1 => c1(seed),
                2 => c2(seed),
                3 => c3(seed),
                4 => c4(seed),
                5 => c5(seed),
                6 => c6(seed),
                7 => c7(frozen),
                8 => c8(frozen),
                _ => c9(frozen),
            };
            let c = &CRITERIA[id - 1];
            Outcome { id, name: c.name.into(), group: c.group.into(), pass: v.pass, detail: v.detail, metrics: v.metrics }
        })
        .collect()
}

fn determinism(first: &[Outcome], ids: &[usize], seed: u64, frozen: &Frozen) -> Outcome {
    let rerun_ids: Vec<usize> = if ids.iter().all(|&i| i == 10) { (1..10).collect() } else { ids.to_vec() };
    let (a, b) = if first.is_empty() {
        (evaluate(&rerun_ids, seed, frozen), evaluate(&rerun_ids, seed, frozen))
    } else {
        (first.to_vec(), evaluate(&rerun_ids, seed, frozen))
    };
    let (ba, bb) = (serde_json::to_vec(&a).unwrap_or_default(), serde_json::to_vec(&b).unwrap_or_default());
    let same = ba == bb && !ba.is_empty();
    let c = &CRITERIA[9];
    Outcome {
        id: 10,
        name: c.name.into(),
        group: c.group.into(),
        pass: same,
        detail: format!("rerun of {} criteria is {}", a.len(), if same { "byte-identical" } else { "different" }),
        metrics: [("criteria".to_string(), json!(a.len())), ("bytes".to_string(), json!(ba.len()))].into_iter().collect(),
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    seed: u64,
    selected: &'a [usize],
    passed: usize,
    failed: usize,
    first_failure: Option<usize>,
    criteria: &'a [Outcome],
}

/// Runs the selected criteria and returns the outcomes in id order.
pub fn outcomes(ids: &[usize], seed: u64, frozen: &Frozen) -> Vec<Outcome> {
    let mut out = evaluate(ids, seed, frozen);
    if ids.contains(&10) {
        let first = out.clone();
        out.push(determinism(&first, ids, seed, frozen));
    }
    out
}

pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, Failure> {
    let (frozen, input) = match &cfg.input {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            (Frozen::parse(&text).with_context(|| p.display().to_string())?, Some(text))
        }
        None => (Frozen::builtin(), None),
    };
    let ids = select(cfg.filter.as_deref())?;
    let results = outcomes(&ids, cfg.seed, &frozen);
    let passed = results.iter().filter(|o| o.pass).count();
    let first = results.iter().find(|o| !o.pass);
    let mut em = Emitter::new(&cfg.out, Header::new(cfg, input.as_deref().map(str::as_bytes)))?;
    em.json(
        "summary.json",
        &Summary {
            seed: cfg.seed,
            selected: &ids,
            passed,
            failed: results.len() - passed,
            first_failure: first.map(|o| o.id),
            criteria: &results,
        },
    )?;
    let lines: String = results.iter().map(|o| o.line() + "\n").collect();
    em.text("summary.txt", "#", &lines)?;
    let files = em.finish()?;
    eprint!("{lines}");
    match first {
        Some(o) => Err(Failure::Criterion { id: o.id, name: o.name.clone(), detail: o.detail.clone() }),
        None => Ok(files),
    }
}
