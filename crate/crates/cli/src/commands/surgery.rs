use crate::output::{parse_json, read_input, Emitter, Header};
use crate::{Failure, RunConfig};
use anyhow::anyhow;
use hdisc_core::curvepair::*;
use hdisc_core::traintrack::{
    bicorn_tracks, is_switch_dual, nested_route_map, recurrence_report, verify_carrying, RecurrenceReport,
};
use serde::Serialize;
use std::path::PathBuf;
use std::result::Result;

#[derive(Serialize)]
struct PairSummary {
    intersections: usize,
    genus: u32,
    algebraic_intersection: i64,
    a_order: Vec<u32>,
    b_order: Vec<u32>,
    b_separates: bool,
}

impl PairSummary {
    fn of(cp: &CurvePair) -> PairSummary {
        PairSummary {
            intersections: cp.intersection_number(),
            genus: cp.genus(),
            algebraic_intersection: cp.algebraic_intersection(),
            a_order: cp.a_order(),
            b_order: cp.b_order(),
            b_separates: cp.separates(Curve::B),
        }
    }
}

#[derive(Serialize)]
struct Step {
    step: usize,
    arc: Subarc,
    piece: ArcChoice,
    side: Option<Side>,
    i_c_a: usize,
    i_c_b_unreduced: usize,
    i_c_b: usize,
    pair: RawCurvePair,
}

#[derive(Serialize)]
struct Transcript {
    start: PairSummary,
    steps: Vec<Step>,
    intersections: Vec<usize>,
}

#[derive(Serialize)]
struct BicornEntry {
    index: usize,
    bicorn: Bicorn,
    side: Side,
    pretrack_switches: usize,
    pretrack_branches: usize,
    track_branches: usize,
    kept: Vec<usize>,
    switch_dual: Result<bool, String>,
    carried_by_previous: Option<Result<bool, String>>,
    recurrence: Result<RecurrenceReport, String>,
}

#[derive(Serialize)]
struct Pipeline {
    pairing: Result<PairingResult, String>,
    alpha: Option<EdgeRef>,
    /// Why no bicorn sequence exists, when it does not.
    unavailable: Option<String>,
    bicorns: Vec<BicornEntry>,
}

fn pipeline(cp: &CurvePair) -> Pipeline {
    let pairing = casson_long_pairing(cp).map_err(|e| e.to_string());
    let nb = match nested_bicorn_sequence(cp) {
        Ok(nb) => nb,
        Err(e) => return Pipeline { pairing, alpha: None, unavailable: Some(e.to_string()), bicorns: vec![] },
    };
    let tracks = match bicorn_tracks(cp, &nb) {
        Ok(t) => t,
        Err(e) => return Pipeline { pairing, alpha: Some(nb.alpha), unavailable: Some(e.to_string()), bicorns: vec![] },
    };
    let bicorns = tracks
        .iter()
        .enumerate()
        .map(|(i, bt)| {
            let t = &bt.collapse.track;
            let carried = (i > 0).then(|| {
                nested_route_map(bt, &tracks[i - 1])
                    .and_then(|m| verify_carrying(t, &tracks[i - 1].collapse.track, &m))
                    .map_err(|e| e.to_string())
            });
            BicornEntry {
                index: i,
                bicorn: nb.steps[i].bicorn.clone(),
                side: nb.steps[i].side,
                pretrack_switches: bt.pre.graph.switch_count(),
                pretrack_branches: bt.pre.graph.branch_count(),
                track_branches: t.branch_count(),
                kept: bt.collapse.kept.clone(),
                switch_dual: is_switch_dual(&bt.dual, t).map_err(|e| e.to_string()),
                carried_by_previous: carried,
                recurrence: recurrence_report(t, std::slice::from_ref(&bt.dual)).map_err(|e| e.to_string()),
            }
        })
        .collect();
    Pipeline { pairing, alpha: Some(nb.alpha), unavailable: None, bicorns }
}

pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, Failure> {
    let (path, bytes) = read_input(cfg)?;
    let raw: RawCurvePair = parse_json(&path, &bytes)?;
    let cp = build_curve_pair(&raw).map_err(|e| anyhow!("{}: {e:?}: {e}", path.display()))?;
    let seq = curve_surgery_sequence(&cp, &default_strategy).map_err(|e| anyhow!("{}: {e:?}: {e}", path.display()))?;

    let mut em = Emitter::new(&cfg.out, Header::new(cfg, Some(&bytes)))?;
    let steps: Vec<Step> = seq
        .steps
        .iter()
        .enumerate()
        .map(|(i, r)| Step {
            step: i + 1,
            arc: r.arc.clone(),
            piece: r.piece,
            side: r.side,
            i_c_a: r.i_c_a,
            i_c_b_unreduced: r.i_c_b_unreduced,
            i_c_b: r.i_c_b,
            pair: r.new_curve_pair.to_raw(),
        })
        .collect();
    let rows: Vec<Vec<String>> = std::iter::once(vec!["0".into(), cp.intersection_number().to_string(), "".into(), "".into()])
        .chain(steps.iter().map(|s| {
            vec![s.step.to_string(), s.i_c_b.to_string(), s.i_c_a.to_string(), s.i_c_b_unreduced.to_string()]
        }))
        .collect();
    let transcript = Transcript { start: PairSummary::of(&cp), intersections: seq.intersections(), steps };
    em.json("surgery.json", &transcript)?;
    em.csv("counts.csv", &["step", "i_b", "i_a", "i_b_unreduced"], &rows)?;
    if cp.intersection_number() > 0 {
        em.json("pipeline.json", &pipeline(&cp))?;
    }
    em.text("pair.dot", "//", &cp.to_dot())?;
    Ok(em.finish()?)
}
