//! Seeded instance corpora for the suite, and the frozen regression values.

use anyhow::{anyhow, Context, Result};
use hdisc_core::coarse::{MetricGraph, SubsetFamily};
use hdisc_core::curvepair::CurvePair;
use hdisc_core::generate::{random_pair, sample_pairs, sample_tracks, PairSpec};
use hdisc_core::traintrack::TrainTrack;
use hdisc_core::Q;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

pub const FROZEN_JSON: &str = include_str!("../fixtures/frozen.json");

/// One generator per corpus, so adding a corpus leaves the others unchanged.
pub fn rng(seed: u64, corpus: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(corpus);
    r
}

/// Filling pairs in genus 2-3 with at most 12 crossings and separating `b`.
pub fn surgery_corpus(seed: u64, count: usize) -> Vec<CurvePair> {
    sample_pairs(&mut rng(seed, 1), &PairSpec::default(), count, 200 * count)
}

/// Pairs with at most 10 crossings, even count, half with separating `b`.
pub fn pairing_corpus(seed: u64, count: usize) -> Vec<CurvePair> {
    let mut r = rng(seed, 2);
    let spec = PairSpec { max_n: 10, min_genus: 1, max_genus: 5, ..PairSpec::default() };
    let mut out = sample_pairs(&mut r, &spec, count / 2, 200 * count);
    let mut tries = 0;
    while out.len() < count && tries < 200 * count {
        tries += 1;
        let n = 2 * r.gen_range(1..=5);
        if let Some(cp) = random_pair(&mut r, n) {
            out.push(cp);
        }
    }
    out
}

pub fn bicorn_corpus(seed: u64, count: usize) -> Vec<CurvePair> {
    sample_pairs(&mut rng(seed, 3), &PairSpec::default(), count, 200 * count)
}

pub fn track_corpus(seed: u64, count: usize) -> Vec<TrainTrack> {
    sample_tracks(&mut rng(seed, 4), &[2, 4, 6], count, 10_000 * count)
}

/// Connected graph on `n` vertices: a random tree plus up to `extra` chords, doubled
/// lengths in `1..=4`.
pub fn random_graph<R: Rng>(r: &mut R, n: usize, extra: usize, unit: bool) -> MetricGraph {
    let mut g = MetricGraph::new((0..n).map(|i| format!("v{i}")).collect());
    let len = |r: &mut R| if unit { 2 } else { r.gen_range(1..=4) };
    for v in 1..n {
        let u = r.gen_range(0..v);
        let l = len(r);
        g.add_edge(u, v, l).expect("fresh vertices");
    }
    for _ in 0..extra {
        let (u, v) = (r.gen_range(0..n), r.gen_range(0..n));
        if u != v {
            let l = len(r);
            g.add_edge(u, v, l).expect("known vertices");
        }
    }
    g
}

pub fn random_family<R: Rng>(r: &mut R, n: usize) -> SubsetFamily {
    let k = r.gen_range(0..4);
    let sets = (0..k)
        .map(|_| {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(r);
            let mut s = all[..r.gen_range(1..=n.min(4))].to_vec();
            s.sort_unstable();
            s
        })
        .collect();
    SubsetFamily::new(sets)
}

/// Random graphs on at most 12 vertices with random families.
pub fn graph_corpus(seed: u64, count: usize) -> Vec<(MetricGraph, SubsetFamily)> {
    let mut r = rng(seed, 5);
    (0..count)
        .map(|i| {
            let n = r.gen_range(2..=12);
            let extra = r.gen_range(0..=n);
            let g = random_graph(&mut r, n, extra, i % 2 == 0);
            let f = random_family(&mut r, n);
            (g, f)
        })
        .collect()
}

pub fn tree_corpus(seed: u64, count: usize) -> Vec<MetricGraph> {
    let mut r = rng(seed, 6);
    (0..count)
        .map(|i| {
            let n = r.gen_range(2..=12);
            random_graph(&mut r, n, 0, i % 2 == 0)
        })
        .collect()
}

fn rational(s: &str) -> Result<Q> {
    Q::from_str(s).map_err(|e| anyhow!("bad rational {s:?}: {e}"))
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ShadowParams {
    pub radius: usize,
    /// Word whose powers translate `<a>`.
    pub generator: String,
    pub translates: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RotationParams {
    pub n: usize,
    pub k: usize,
    pub steps: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LoxodromyParams {
    pub radius: usize,
    pub steps: usize,
    pub rotation: RotationParams,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DriftParams {
    pub radius: usize,
    pub length: usize,
    pub trials: usize,
    pub seed: u64,
    pub threshold: String,
}

impl DriftParams {
    pub fn threshold(&self) -> Result<Q> {
        rational(&self.threshold)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ShadowFrozen {
    #[serde(flatten)]
    pub params: ShadowParams,
    pub k_max: String,
    pub c_max: String,
    pub slope: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LoxodromyFrozen {
    #[serde(flatten)]
    pub params: LoxodromyParams,
    pub b_slope: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DriftFrozen {
    #[serde(flatten)]
    pub params: DriftParams,
    pub mean_distance: Vec<String>,
    pub fraction_above: String,
}

/// Frozen regression values for criteria 7-9 with the parameters that produced them.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FrozenFile {
    pub shadows: ShadowFrozen,
    pub loxodromy: LoxodromyFrozen,
    pub drift: DriftFrozen,
}

/// Parsed frozen values.
#[derive(Clone, Debug)]
pub struct Frozen {
    pub shadows: ShadowParams,
    pub loxodromy: LoxodromyParams,
    pub drift: DriftParams,
    pub k_max: Q,
    pub c_max: Q,
    pub shadow_slope: Q,
    pub b_slope: Q,
    pub mean_distance: Vec<String>,
    pub fraction_above: Q,
}

impl Frozen {
    pub fn parse(text: &str) -> Result<Frozen> {
        let f: FrozenFile = serde_json::from_str(text).context("malformed frozen values")?;
        let mean_distance = f.drift.mean_distance.clone();
        for m in &mean_distance {
            rational(m)?;
        }
        Ok(Frozen {
            k_max: rational(&f.shadows.k_max)?,
            c_max: rational(&f.shadows.c_max)?,
            shadow_slope: rational(&f.shadows.slope)?,
            b_slope: rational(&f.loxodromy.b_slope)?,
            fraction_above: rational(&f.drift.fraction_above)?,
            mean_distance,
            shadows: f.shadows.params,
            loxodromy: f.loxodromy.params,
            drift: f.drift.params,
        })
    }

    pub fn builtin() -> Frozen {
        Frozen::parse(FROZEN_JSON).expect("shipped frozen values parse")
    }

    pub fn parameters(&self) -> (&ShadowParams, &LoxodromyParams, &DriftParams) {
        (&self.shadows, &self.loxodromy, &self.drift)
    }
}
