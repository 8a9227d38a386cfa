use crate::output::{parse_json, q, read_input, Emitter, Header};
use crate::{Failure, RunConfig};
use anyhow::anyhow;
use hdisc_core::traintrack::*;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use std::result::Result;
use std::path::PathBuf;

type Res<T> = hdisc_core::traintrack::Result<T>;

/// Stop enumerating reachable tracks past this many.
pub const MAX_REACHABLE: usize = 20_000;

#[derive(Serialize)]
struct Summary {
    switches: usize,
    branches: usize,
    euler: i64,
    genus: u32,
    faces: Vec<TrackFace>,
    canonical_code: Vec<usize>,
}

#[derive(Serialize)]
struct MoveEntry {
    branch: usize,
    kind: &'static str,
    result: Result<MoveResult, String>,
}

#[derive(Serialize)]
struct MoveResult {
    switches: usize,
    branches: usize,
    isomorphic_to_input: bool,
    carried: bool,
    pushed_cycles_balanced: bool,
    map: RouteMap,
}

fn all_moves(t: &TrainTrack) -> Vec<(usize, &'static str, Res<(TrainTrack, RouteMap)>)> {
    let mut out = Vec::new();
    for b in 0..t.branch_count() {
        out.push((b, "split-left", split(t, b, SplitChoice::Left)));
        out.push((b, "split-right", split(t, b, SplitChoice::Right)));
        out.push((b, "split-central", split(t, b, SplitChoice::Central)));
        out.push((b, "shift", shift(t, b)));
    }
    out
}

fn describe(t: &TrainTrack, s: &TrainTrack, m: &RouteMap) -> Res<MoveResult> {
    let carried = verify_carrying(s, t, m)?;
    let pushed_cycles_balanced = match vertex_cycles(s) {
        Ok(cs) => cs
            .iter()
            .map(|w| check_switch_equality(t, &push_forward(m, t.branch_count(), w)))
            .collect::<Res<Vec<bool>>>()?
            .into_iter()
            .all(|x| x),
        Err(TrackError::TooLarge(..)) => true,
        Err(e) => return Err(e),
    };
    Ok(MoveResult {
        switches: s.switch_count(),
        branches: s.branch_count(),
        isomorphic_to_input: s.is_isomorphic(t),
        carried,
        pushed_cycles_balanced,
        map: m.clone(),
    })
}

/// Number of new isomorphism classes first reached at each depth.
fn reachable(t: &TrainTrack, depth: usize) -> (Vec<usize>, bool) {
    let mut seen = BTreeSet::new();
    seen.insert(t.canonical_code());
    let mut frontier = vec![t.clone()];
    let mut counts = vec![1];
    for _ in 0..depth {
        let found: Vec<Vec<TrainTrack>> = frontier
            .par_iter()
            .map(|x| all_moves(x).into_iter().filter_map(|(_, _, r)| r.ok().map(|p| p.0)).collect())
            .collect();
        let mut next = Vec::new();
        for s in found.into_iter().flatten() {
            if seen.insert(s.canonical_code()) {
                next.push(s);
            }
            if seen.len() >= MAX_REACHABLE {
                counts.push(next.len());
                return (counts, true);
            }
        }
        counts.push(next.len());
        frontier = next;
    }
    (counts, false)
}

pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, Failure> {
    let (path, bytes) = read_input(cfg)?;
    let raw: RawTrack = parse_json(&path, &bytes)?;
    let t = validate_track(&raw).map_err(|e| anyhow!("{}: {e:?}: {e}", path.display()))?;
    let mut em = Emitter::new(&cfg.out, Header::new(cfg, Some(&bytes)))?;

    em.json(
        "track.json",
        &Summary {
            switches: t.switch_count(),
            branches: t.branch_count(),
            euler: t.euler(),
            genus: t.genus(),
            faces: t.faces(),
            canonical_code: t.canonical_code(),
        },
    )?;
    match vertex_cycles(&t) {
        Ok(cycles) => {
            let cols: Vec<String> = (0..t.branch_count()).map(|b| format!("b{b}")).collect();
            let mut head = vec!["cycle", "balanced"];
            head.extend(cols.iter().map(String::as_str));
            let rows = cycles
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let ok = check_switch_equality(&t, w).unwrap_or(false);
                    let mut r = vec![i.to_string(), ok.to_string()];
                    r.extend(w.weights.iter().map(|&x| q(x)));
                    r
                })
                .collect::<Vec<_>>();
            em.csv("vertex_cycles.csv", &head, &rows)?;
        }
        Err(e) => em.json("vertex_cycles.json", &format!("{e:?}: {e}"))?,
    }
    if let Some(w) = &raw.weights {
        let wv = WeightVector { weights: w.clone() };
        let ok = check_switch_equality(&t, &wv).map_err(|e| anyhow!("{}: {e:?}: {e}", path.display()))?;
        em.json("weights.json", &serde_json::json!({ "balanced": ok, "components": if ok { components(&t, w) } else { None } }))?;
    }
    let moves: Vec<MoveEntry> = all_moves(&t)
        .into_par_iter()
        .map(|(branch, kind, r)| MoveEntry {
            branch,
            kind,
            result: r.and_then(|(s, m)| describe(&t, &s, &m)).map_err(|e| e.to_string()),
        })
        .collect();
    em.json("moves.json", &moves)?;
    let (counts, capped) = reachable(&t, cfg.budget_depth);
    let rows: Vec<Vec<String>> = counts.iter().enumerate().map(|(d, c)| vec![d.to_string(), c.to_string()]).collect();
    em.csv("reachable.csv", &["depth", "new_classes"], &rows)?;
    if capped {
        em.json("reachable.json", &format!("stopped after {MAX_REACHABLE} classes"))?;
    }
    em.text("track.dot", "//", &t.to_dot())?;
    Ok(em.finish()?)
}

/// Components of the multicurve for integral weights, `None` otherwise.
fn components(t: &TrainTrack, w: &[hdisc_core::Q]) -> Option<usize> {
    let ints: Option<Vec<u32>> =
        w.iter().map(|x| (x.is_integer() && *x.numer() >= 0).then(|| *x.numer() as u32)).collect();
    ints.map(|v| multicurve_components(t, &v))
}
