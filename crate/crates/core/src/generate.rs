//! Seeded random instances for property tests and the acceptance suite.

use crate::curvepair::{build_curve_pair, Curve, CurvePair, RawCurvePair};
use crate::traintrack::{validate_track, Port, RawBranch, RawTrack, TrackSide, TrainTrack};
use rand::seq::SliceRandom;
use rand::Rng;

/// Filters for random filling curve pairs.
#[derive(Clone, Debug)]
pub struct PairSpec {
    pub min_n: usize,
    pub max_n: usize,
    pub min_genus: u32,
    pub max_genus: u32,
    /// Only keep pairs where `b` separates the surface.
    pub separating_b: bool,
}

impl Default for PairSpec {
    fn default() -> Self {
        PairSpec { min_n: 2, max_n: 12, min_genus: 2, max_genus: 3, separating_b: true }
    }
}

/// A random rotation system on `n` vertices: `b` visits them in order, `a` in a random
/// order, each crossing with a random sign. Every face is a disc.
pub fn random_pair<R: Rng>(rng: &mut R, n: usize) -> Option<CurvePair> {
    let mut a: Vec<u32> = (0..n as u32).collect();
    a.shuffle(rng);
    let signs: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    pair_from(a, signs)
}

/// Like [`random_pair`] but `a` crosses `b` alternately from each side, so every face
/// stays on one side of `b` and `b` separates. Needs `n` even.
pub fn random_separating_pair<R: Rng>(rng: &mut R, n: usize) -> Option<CurvePair> {
    if n % 2 == 1 {
        return None;
    }
    let mut a: Vec<u32> = (0..n as u32).collect();
    a.shuffle(rng);
    let mut signs = vec![false; n];
    for (i, &v) in a.iter().enumerate() {
        signs[v as usize] = i % 2 == 0;
    }
    pair_from(a, signs)
}

fn pair_from(a: Vec<u32>, positive: Vec<bool>) -> Option<CurvePair> {
    let n = a.len();
    let rotations = positive
        .iter()
        .map(|&p| {
            let r: [&str; 4] = if p { ["a+", "b+", "a-", "b-"] } else { ["a+", "b-", "a-", "b+"] };
            r.iter().map(|s| s.to_string()).collect()
        })
        .collect();
    let raw = RawCurvePair {
        vertices: (0..n as u32).collect(),
        a_cycle: a,
        b_cycle: (0..n as u32).collect(),
        rotations,
        genus: None,
        regions: vec![],
    };
    build_curve_pair(&raw).ok()
}

pub fn accepts(spec: &PairSpec, cp: &CurvePair) -> bool {
    let n = cp.intersection_number();
    n >= spec.min_n
        && n <= spec.max_n
        && (spec.min_genus..=spec.max_genus).contains(&cp.genus())
        && (!spec.separating_b || cp.separates(Curve::B))
}

/// Rejection sampling; gives up after `max_tries` candidates.
pub fn sample_pairs<R: Rng>(rng: &mut R, spec: &PairSpec, count: usize, max_tries: usize) -> Vec<CurvePair> {
    let mut out = Vec::new();
    for _ in 0..max_tries {
        if out.len() == count {
            break;
        }
        let n = rng.gen_range(spec.min_n..=spec.max_n);
        let cand = if spec.separating_b { random_separating_pair(rng, n) } else { random_pair(rng, n) };
        if let Some(cp) = cand {
            if accepts(spec, &cp) {
                out.push(cp);
            }
        }
    }
    out
}

/// A random track with `switches` trivalent switches whose faces are all discs; `None`
/// when the draw is not a valid track.
pub fn random_track<R: Rng>(rng: &mut R, switches: usize) -> Option<TrainTrack> {
    let mut ports = Vec::new();
    for s in 0..switches {
        let one = rng.gen_range(0..2);
        ports.push(Port { switch: s, side: TrackSide::from_index(one), pos: 0 });
        ports.push(Port { switch: s, side: TrackSide::from_index(1 - one), pos: 0 });
        ports.push(Port { switch: s, side: TrackSide::from_index(1 - one), pos: 1 });
    }
    ports.shuffle(rng);
    let branches = ports.chunks(2).map(|p| RawBranch { from: p[0], to: p[1] }).collect();
    validate_track(&RawTrack { switches, branches, regions: vec![], weights: None }).ok()
}

/// Draws until a valid track appears or `max_tries` runs out.
pub fn sample_tracks<R: Rng>(rng: &mut R, switches: &[usize], count: usize, max_tries: usize) -> Vec<TrainTrack> {
    let mut out = Vec::new();
    for _ in 0..max_tries {
        if out.len() == count {
            break;
        }
        let n = switches[rng.gen_range(0..switches.len())];
        if let Some(t) = random_track(rng, n) {
            out.push(t);
        }
    }
    out
}
