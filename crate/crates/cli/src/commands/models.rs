use crate::fixtures::{Frozen, DriftParams, LoxodromyParams, ShadowParams};
use crate::output::{q, sha256_hex, Emitter, Header};
use crate::{Failure, RunConfig, TOOL, VERSION};
use anyhow::{anyhow, Context, Result};
use hdisc_core::coarse::*;
use hdisc_core::models::*;
use hdisc_core::Q;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub const FAREY_BOUND: usize = 8;

/// Shared geometry of the free-tree experiments: the ball and its `<a>`-coset cone-off.
pub struct TreeSetting {
    pub ball: FreeTreeBall,
    pub cosets: SubsetFamily,
    pub electrified: ElectrifiedGraph,
}

impl TreeSetting {
    pub fn new(radius: usize) -> Result<TreeSetting> {
        let ball = free_tree_ball(radius)?;
        let cosets = ball.all_cosets(A);
        let electrified = electrify(&ball.graph, &cosets)?;
        Ok(TreeSetting { ball, cosets, electrified })
    }
}

fn power(g: &[u8], i: i64) -> Vec<u8> {
    let step: Vec<u8> = if i < 0 { g.iter().rev().map(|&x| x ^ 1).collect() } else { g.to_vec() };
    (0..i.unsigned_abs()).fold(Vec::new(), |w, _| reduce_product(&w, &step))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ShadowData {
    pub sets: Vec<String>,
    pub l_star: Q,
    pub m_star: Q,
    pub k: Q,
    pub c: Q,
    pub k_without_c: Option<Q>,
    pub path: Vec<String>,
    /// Electrified distance between the ends of the piecewise geodesic over the first
    /// `k + 1` sets, for `k = 1, 2, ...`.
    pub electrified_lengths: Vec<Q>,
    pub slope: Q,
}

/// Exact least-squares slope of `y` against `1, 2, ..`.
pub fn exact_slope(y: &[Q]) -> Q {
    let n = y.len() as i64;
    if n < 2 {
        return Q::from_integer(0);
    }
    let xbar = Q::new(n + 1, 2);
    let ybar = y.iter().fold(Q::from_integer(0), |a, &b| a + b) / Q::from_integer(n);
    let (mut num, mut den) = (Q::from_integer(0), Q::from_integer(0));
    for (i, &v) in y.iter().enumerate() {
        let dx = Q::from_integer(i as i64 + 1) - xbar;
        num += dx * (v - ybar);
        den += dx * dx;
    }
    num / den
}

pub fn shadows(s: &TreeSetting, p: &ShadowParams) -> Result<ShadowData> {
    let g = parse_word(&p.generator).ok_or_else(|| anyhow!("bad generator word {:?}", p.generator))?;
    let translates: Vec<Vec<u8>> = p.translates.iter().map(|&i| power(&g, i)).collect();
    let fam = s.ball.coset_family(A, &translates);
    if fam.len() != translates.len() {
        return Err(anyhow!("a translate of the coset leaves the radius {} ball", s.ball.radius));
    }
    let z = &fam.sets;
    let graph = &s.ball.graph;
    let sep = separation_report(graph, z, &s.electrified)?;
    let rec = piecewise_geodesic(graph, z)?;
    let me = Metric::new(&s.electrified.graph);
    let mut electrified_lengths = Vec::new();
    for k in 1..z.len() {
        let r = piecewise_geodesic(graph, &z[..=k])?;
        electrified_lengths.push(me.d(r.vertices[0], *r.vertices.last().unwrap())?);
    }
    Ok(ShadowData {
        sets: fam.names.clone(),
        l_star: sep.l_star,
        m_star: sep.m_star,
        k: rec.constants.k,
        c: rec.constants.c,
        k_without_c: rec.constants.k_without_c,
        path: rec.vertices.iter().map(|&v| graph.names()[v].clone()).collect(),
        slope: exact_slope(&electrified_lengths),
        electrified_lengths,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LoxodromyData {
    pub b: TranslationReport,
    pub rotation: TranslationReport,
}

pub fn loxodromy(s: &TreeSetting, p: &LoxodromyParams) -> Result<LoxodromyData> {
    let mut map = s.ball.left_mult(&[B]).map;
    map.resize(s.electrified.graph.n(), None);
    let b = translation_length(&s.electrified.graph, &GraphAutomorphism { map }, 0, p.steps, Q::from_integer(0))?;
    let r = &p.rotation;
    let rotation = translation_length(&cycle_graph(r.n), &rotation(r.n, r.k), 0, r.steps, Q::from_integer(0))?;
    Ok(LoxodromyData { b, rotation })
}

pub fn drift(ball: &FreeTreeBall, p: &DriftParams, seed: u64, trials: usize) -> Result<DriftReport> {
    let steps = [A, A_INV, B, B_INV].iter().map(|&g| (ball.left_mult(&[g]), 0.25)).collect();
    let spec = WalkSpec { steps, length: p.length, trials, seed };
    Ok(estimate_drift(&ball.graph, &spec, 0, p.threshold()?)?)
}

/// Writes the regression CSVs for the frozen parameters into `dir`. The header depends
/// only on the model parameters, so `models` and `coarse --model-suite` agree byte for
/// byte.
pub fn write_regression(dir: &Path, frozen: &Frozen, seed: u64, trials: usize) -> Result<Vec<PathBuf>> {
    let params = format!("{} seed={seed} trials={trials}", serde_json::to_string(&frozen.parameters())?);
    let header = Header {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: "models".into(),
        seed,
        input_sha256: sha256_hex(params.as_bytes()),
    };
    let mut em = Emitter::new(dir, header)?;
    let setting = TreeSetting::new(frozen.shadows.radius)?;
    let sh = shadows(&setting, &frozen.shadows)?;
    let rows: Vec<Vec<String>> =
        sh.electrified_lengths.iter().enumerate().map(|(i, &d)| vec![(i + 1).to_string(), q(d)]).collect();
    em.csv("shadows.csv", &["segments", "electrified_length"], &rows)?;
    em.json("shadows.json", &sh)?;

    let setting = if frozen.loxodromy.radius == frozen.shadows.radius {
        setting
    } else {
        TreeSetting::new(frozen.loxodromy.radius)?
    };
    let lx = loxodromy(&setting, &frozen.loxodromy)?;
    let mut rows = Vec::new();
    for (name, r) in [("b", &lx.b), ("rotation", &lx.rotation)] {
        for (i, (d, e)) in r.distances.iter().zip(&r.estimates).enumerate() {
            rows.push(vec![name.to_string(), (i + 1).to_string(), q(*d), q(*e)]);
        }
    }
    em.csv("translation.csv", &["map", "n", "distance", "estimate"], &rows)?;
    em.json("translation.json", &lx)?;

    let ball = if frozen.drift.radius == setting.ball.radius { setting.ball } else { free_tree_ball(frozen.drift.radius)? };
    let dr = drift(&ball, &frozen.drift, seed, trials)?;
    let rows: Vec<Vec<String>> = dr
        .mean_distance
        .iter()
        .zip(&dr.drift)
        .enumerate()
        .map(|(i, (m, d))| vec![(i + 1).to_string(), q(*m), q(*d), format!("{:.6}", to_f64(*d))])
        .collect();
    em.csv("drift.csv", &["n", "mean_distance", "drift", "drift_decimal"], &rows)?;
    em.json("drift.json", &dr)?;
    em.finish()
}

#[derive(Serialize)]
struct FareyRow {
    bound: usize,
    vertices: usize,
    edges: usize,
    delta_bound_4: Q,
}

pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, Failure> {
    let frozen = Frozen::builtin();
    let mut em = Emitter::new(&cfg.out, Header::new(cfg, None))?;
    let f = farey_ball(FAREY_BOUND).context("farey ball")?;
    let (inf, zero) = (f.vertex(1, 0).unwrap(), f.vertex(0, 1).unwrap());
    let (di, dz) = (f.graph.dist_from(inf), f.graph.dist_from(zero));
    let rows: Vec<Vec<String>> = f
        .slopes
        .iter()
        .enumerate()
        .map(|(i, (p, qq))| {
            let h = |d: Option<u64>| d.map_or("-".into(), |x| q(half(x)));
            vec![format!("{p}/{qq}"), h(di[i]), h(dz[i])]
        })
        .collect();
    em.csv("farey.csv", &["slope", "d_from_1/0", "d_from_0/1"], &rows)?;
    let small = farey_ball(4).context("farey ball")?;
    let delta = delta_four_point(&small.graph, DeltaMode::Exhaustive).context("farey delta")?.delta;
    em.json(
        "farey.json",
        &FareyRow { bound: FAREY_BOUND, vertices: f.graph.n(), edges: f.graph.edges().len(), delta_bound_4: delta },
    )?;
    let tree = free_tree_ball(3).context("free tree")?;
    let tree_delta = delta_four_point(&tree.graph, DeltaMode::Exhaustive).context("tree delta")?.delta;
    em.json(
        "free_tree.json",
        &serde_json::json!({
            "radius": 3,
            "vertices": tree.graph.n(),
            "delta": q(tree_delta),
            "a_cosets": tree.all_cosets(A).len(),
        }),
    )?;
    let mut files = em.finish()?;
    let trials = cfg.sample.unwrap_or(frozen.drift.trials);
    files.extend(write_regression(&cfg.out.join("regression"), &frozen, cfg.seed, trials)?);
    Ok(files)
}
