use crate::commands::models::write_regression;
use crate::fixtures::Frozen;
use crate::output::{parse_json, q, read_input, Emitter, Header};
use crate::{Failure, RunConfig};
use anyhow::{anyhow, Context};
use hdisc_core::coarse::*;
use hdisc_core::Q;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::result::Result;

/// Exhaustive delta up to this many vertices unless `--sample` is given.
pub const EXHAUSTIVE_DELTA_MAX: usize = 60;
pub const DEFAULT_DELTA_SAMPLES: usize = 100_000;
/// Distance tables list all pairs up to this many vertices.
pub const TABLE_MAX: usize = 200;

#[derive(Deserialize)]
struct CoarseInput {
    #[serde(flatten)]
    graph: GraphFile,
    #[serde(default)]
    translations: Vec<TranslationSpec>,
}

/// A vertex map given as `[from, to]` name pairs, iterated from `start`.
#[derive(Deserialize)]
struct TranslationSpec {
    name: String,
    map: Vec<[String; 2]>,
    start: String,
    steps: usize,
}

#[derive(Serialize)]
struct DeltaEntry {
    graph: &'static str,
    mode: String,
    report: Result<DeltaReport, String>,
}

#[derive(Serialize)]
struct SubsetEntry {
    name: String,
    size: usize,
    quasiconvexity: Result<Q, String>,
    declared: Option<f64>,
}

fn delta_mode(cfg: &RunConfig, n: usize) -> DeltaMode {
    match cfg.sample {
        Some(samples) => DeltaMode::Sampled { samples, seed: cfg.seed },
        None if n <= EXHAUSTIVE_DELTA_MAX => DeltaMode::Exhaustive,
        None => DeltaMode::Sampled { samples: DEFAULT_DELTA_SAMPLES, seed: cfg.seed },
    }
}

fn mode_name(m: &DeltaMode) -> String {
    match m {
        DeltaMode::Exhaustive => "exhaustive".into(),
        DeltaMode::Sampled { samples, seed } => format!("sampled samples={samples} seed={seed}"),
    }
}

fn resolve(g: &MetricGraph, name: &str) -> anyhow::Result<usize> {
    g.index_of(name).ok_or_else(|| anyhow!("unknown vertex {name:?} in translation"))
}

pub fn run(cfg: &RunConfig, model_suite: bool) -> Result<Vec<PathBuf>, Failure> {
    if cfg.input.is_none() && model_suite {
        let frozen = Frozen::builtin();
        let trials = cfg.sample.unwrap_or(frozen.drift.trials);
        return Ok(write_regression(&cfg.out.join("regression"), &frozen, cfg.seed, trials)?);
    }
    let (path, bytes) = read_input(cfg)?;
    let input: CoarseInput = parse_json(&path, &bytes)?;
    let (g, fam) = input.graph.build().map_err(|e| anyhow!("{}: {e:?}: {e}", path.display()))?;
    let maps: Vec<(String, GraphAutomorphism, usize, usize)> = input
        .translations
        .iter()
        .map(|t| {
            let mut map = vec![None; g.n()];
            for [u, v] in &t.map {
                map[resolve(&g, u)?] = Some(resolve(&g, v)?);
            }
            Ok((t.name.clone(), GraphAutomorphism { map }, resolve(&g, &t.start)?, t.steps))
        })
        .collect::<anyhow::Result<_>>()
        .with_context(|| path.display().to_string())?;

    let e = electrify(&g, &fam).map_err(|e| anyhow!("{}: {e:?}: {e}", path.display()))?;
    let mut em = Emitter::new(&cfg.out, Header::new(cfg, Some(&bytes)))?;
    em.json("electrified.json", &GraphFile::from_graph(&e.graph, &SubsetFamily::default()))?;
    em.text("electrified.dot", "//", &e.to_dot())?;

    let (m, me) = (Metric::new(&g), Metric::new(&e.graph));
    let k = g.n().min(TABLE_MAX);
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|u| (u + 1..k).map(move |v| (u, v))).collect();
    let fmt = |r: hdisc_core::coarse::Result<Q>| r.map_or("-".to_string(), q);
    let rows: Vec<Vec<String>> = pairs
        .iter()
        .map(|&(u, v)| {
            let names = g.names();
            vec![names[u].clone(), names[v].clone(), fmt(m.d(u, v)), fmt(me.d(u, v))]
        })
        .collect();
    em.csv("distances.csv", &["u", "v", "d", "d_electrified"], &rows)?;

    let deltas: Vec<DeltaEntry> = [("input", &g), ("electrified", &e.graph)]
        .par_iter()
        .map(|&(name, graph)| {
            let mode = delta_mode(cfg, graph.n());
            DeltaEntry { graph: name, mode: mode_name(&mode), report: delta_four_point(graph, mode).map_err(|e| e.to_string()) }
        })
        .collect();
    em.json("delta.json", &deltas)?;

    let subsets: Vec<SubsetEntry> = fam
        .sets
        .par_iter()
        .enumerate()
        .map(|(i, s)| SubsetEntry {
            name: fam.names[i].clone(),
            size: s.len(),
            quasiconvexity: quasiconvexity_constant(&g, s).map_err(|e| e.to_string()),
            declared: input.graph.subsets.get(i).and_then(|s| s.q),
        })
        .collect();
    em.json("subsets.json", &subsets)?;
    if fam.len() >= 3 {
        em.json("separation.json", &separation_report(&g, &fam.sets, &e).map_err(|e| e.to_string()))?;
    }
    if fam.len() >= 2 {
        let rec = piecewise_geodesic(&g, &fam.sets).map_err(|e| e.to_string());
        em.json("geodesic.json", &rec)?;
        if let Ok(r) = &rec {
            let names: Vec<&str> = r.vertices.iter().map(|&v| g.names()[v].as_str()).collect();
            em.json(
                "geodesic_electrified.json",
                &serde_json::json!({
                    "path": names,
                    "constants": reparam_constants(&e, &r.vertices).map_err(|e| e.to_string()),
                }),
            )?;
        }
    }
    if !maps.is_empty() {
        let mut rows = Vec::new();
        let mut reports = Vec::new();
        for (name, f, x0, steps) in &maps {
            let graphs = [("input", &g), ("electrified", &e.graph)];
            for (which, graph) in graphs {
                let mut f = f.clone();
                f.map.resize(graph.n(), None);
                let r = translation_length(graph, &f, *x0, *steps, Q::from_integer(0)).map_err(|e| e.to_string());
                if let Ok(r) = &r {
                    for (i, (d, est)) in r.distances.iter().zip(&r.estimates).enumerate() {
                        rows.push(vec![name.clone(), which.to_string(), (i + 1).to_string(), q(*d), q(*est)]);
                    }
                }
                reports.push(serde_json::json!({ "name": name, "graph": which, "report": r }));
            }
        }
        em.csv("translation.csv", &["map", "graph", "n", "distance", "estimate"], &rows)?;
        em.json("translation.json", &reports)?;
    }
    let mut files = em.finish()?;
    if model_suite {
        let frozen = Frozen::builtin();
        let trials = cfg.sample.unwrap_or(frozen.drift.trials);
        files.extend(write_regression(&cfg.out.join("regression"), &frozen, cfg.seed, trials)?);
    }
    Ok(files)
}
