//! Finite model instances: balls in the Farey graph with the action of integral
//! unimodular matrices, balls in the Cayley tree of the free group on `a, b` with their
//! `<a>`-coset families, and random-walk drift estimates.
//!
//! The Farey graph is a stand-in for low-complexity curve graphs. Coned Farey subsets are
//! not claimed to model disc sets.

use crate::coarse::{half, CoarseError, GraphAutomorphism, MetricGraph, SubsetFamily};
use crate::Q;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("bound {0} is below the minimum {1}")]
    BoundTooSmall(usize, usize),
    #[error("matrix has determinant {0}")]
    NotUnimodular(i64),
    #[error("every trial left the graph")]
    AllTrialsCensored,
    #[error("bad step distribution: {0}")]
    BadDistribution(String),
    #[error(transparent)]
    Coarse(#[from] CoarseError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Reduced slope with `q >= 0`, and `1/0` for infinity.
fn normalize(p: i64, q: i64) -> (i64, i64) {
    let g = gcd(p, q).max(1);
    let (p, q) = (p / g, q / g);
    if q < 0 || (q == 0 && p < 0) {
        (-p, -q)
    } else {
        (p, q)
    }
}

#[derive(Clone, Debug)]
pub struct FareyBall {
    pub graph: MetricGraph,
    pub slopes: Vec<(i64, i64)>,
    index: BTreeMap<(i64, i64), usize>,
}

/// Reduced slopes `p/q` with `|p|, q <= bound`, plus `1/0`, joined when `|ps - qr| = 1`.
pub fn farey_ball(bound: usize) -> Result<FareyBall> {
    if bound < 1 {
        return Err(ModelError::BoundTooSmall(bound, 1));
    }
    let b = bound as i64;
    let mut slopes = vec![(1, 0)];
    for q in 1..=b {
        for p in -b..=b {
            if gcd(p, q) == 1 {
                slopes.push((p, q));
            }
        }
    }
    let mut graph = MetricGraph::new(slopes.iter().map(|(p, q)| format!("{p}/{q}")).collect());
    for i in 0..slopes.len() {
        for j in i + 1..slopes.len() {
            let ((p, q), (r, s)) = (slopes[i], slopes[j]);
            if (p * s - q * r).abs() == 1 {
                graph.add_edge(i, j, 2)?;
            }
        }
    }
    let index = slopes.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    Ok(FareyBall { graph, slopes, index })
}

impl FareyBall {
    pub fn vertex(&self, p: i64, q: i64) -> Option<usize> {
        self.index.get(&normalize(p, q)).copied()
    }

    /// The action of `[[a, b], [c, d]]` on slopes, where the image stays in the ball.
    pub fn matrix_action(&self, m: [[i64; 2]; 2]) -> Result<GraphAutomorphism> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det != 1 {
            return Err(ModelError::NotUnimodular(det));
        }
        let map = self
            .slopes
            .iter()
            .map(|&(p, q)| self.vertex(m[0][0] * p + m[0][1] * q, m[1][0] * p + m[1][1] * q))
            .collect();
        Ok(GraphAutomorphism { map })
    }
}

/// Generators of the free group: `a, A = a^-1, b, B = b^-1`.
pub const A: u8 = 0;
pub const A_INV: u8 = 1;
pub const B: u8 = 2;
pub const B_INV: u8 = 3;

fn inverse(g: u8) -> u8 {
    g ^ 1
}

/// Freely reduced product `x * y`.
pub fn reduce_product(x: &[u8], y: &[u8]) -> Vec<u8> {
    let mut out = x.to_vec();
    for &g in y {
        if out.last() == Some(&inverse(g)) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

pub fn word_name(w: &[u8]) -> String {
    if w.is_empty() {
        return "e".into();
    }
    w.iter().map(|&g| ['a', 'A', 'b', 'B'][g as usize]).collect()
}

pub fn parse_word(s: &str) -> Option<Vec<u8>> {
    if s == "e" {
        return Some(Vec::new());
    }
    let letters: Option<Vec<u8>> = s
        .chars()
        .map(|c| match c {
            'a' => Some(A),
            'A' => Some(A_INV),
            'b' => Some(B),
            'B' => Some(B_INV),
            _ => None,
        })
        .collect();
    letters.map(|l| reduce_product(&[], &l))
}

/// The ball of radius `R` about the identity in the Cayley tree of `F(a, b)`.
#[derive(Clone, Debug)]
pub struct FreeTreeBall {
    pub graph: MetricGraph,
    pub words: Vec<Vec<u8>>,
    pub radius: usize,
    index: BTreeMap<Vec<u8>, usize>,
}

pub fn free_tree_ball(radius: usize) -> Result<FreeTreeBall> {
    if radius < 2 {
        return Err(ModelError::BoundTooSmall(radius, 2));
    }
    let mut words: Vec<Vec<u8>> = vec![Vec::new()];
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &i in &frontier {
            for g in 0..4u8 {
                if words[i].last() == Some(&inverse(g)) {
                    continue;
                }
                let mut w = words[i].clone();
                w.push(g);
                words.push(w);
                edges.push((i, words.len() - 1));
                next.push(words.len() - 1);
            }
        }
        frontier = next;
    }
    let graph = {
        let mut g = MetricGraph::new(words.iter().map(|w| word_name(w)).collect());
        for (u, v) in edges {
            g.add_edge(u, v, 2)?;
        }
        g
    };
    let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    Ok(FreeTreeBall { graph, words, radius, index })
}

impl FreeTreeBall {
    pub fn vertex(&self, w: &[u8]) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// `w -> g w`, defined where the product stays in the ball.
    pub fn left_mult(&self, g: &[u8]) -> GraphAutomorphism {
        GraphAutomorphism { map: self.words.iter().map(|w| self.vertex(&reduce_product(g, w))).collect() }
    }

    /// The cosets `t <g>` for each translate `t`, cut to the ball.
    pub fn coset_family(&self, generator: u8, translates: &[Vec<u8>]) -> SubsetFamily {
        let r = self.radius as i64;
        let mut fam = SubsetFamily::default();
        for t in translates {
            let mut set = Vec::new();
            for k in -(r + t.len() as i64)..=(r + t.len() as i64) {
                let power = vec![if k < 0 { inverse(generator) } else { generator }; k.unsigned_abs() as usize];
                if let Some(v) = self.vertex(&reduce_product(t, &power)) {
                    set.push(v);
                }
            }
            set.sort_unstable();
            if !set.is_empty() {
                fam.names.push(format!("{}<{}>", word_name(t), word_name(&[generator])));
                fam.sets.push(set);
            }
        }
        fam
    }

    /// Every coset of `<generator>` meeting the ball, as a partition of the vertices.
    pub fn all_cosets(&self, generator: u8) -> SubsetFamily {
        let mut by_rep: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
        for (i, w) in self.words.iter().enumerate() {
            let mut rep = w.clone();
            while matches!(rep.last(), Some(&g) if g == generator || g == inverse(generator)) {
                rep.pop();
            }
            by_rep.entry(rep).or_default().push(i);
        }
        let mut reps: Vec<(Vec<u8>, Vec<usize>)> = by_rep.into_iter().collect();
        reps.sort_by(|x, y| (x.0.len(), &x.0).cmp(&(y.0.len(), &y.0)));
        let mut fam = SubsetFamily::default();
        for (rep, set) in reps {
            fam.names.push(format!("{}<{}>", word_name(&rep), word_name(&[generator])));
            fam.sets.push(set);
        }
        fam
    }
}

/// Cycle on `n` unit edges.
pub fn cycle_graph(n: usize) -> MetricGraph {
    MetricGraph::unit(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
}

/// `i -> i + k mod n`.
pub fn rotation(n: usize, k: usize) -> GraphAutomorphism {
    GraphAutomorphism::total((0..n).map(|i| (i + k) % n).collect())
}

/// Path on `2 * r + 1` vertices; vertex `r` is the middle.
pub fn line_graph(r: usize) -> MetricGraph {
    MetricGraph::unit(2 * r + 1, &(0..2 * r).map(|i| (i, i + 1)).collect::<Vec<_>>())
}

/// Translation of the line by `k` (possibly negative), where it stays on the path.
pub fn line_shift(r: usize, k: i64) -> GraphAutomorphism {
    let n = 2 * r as i64 + 1;
    GraphAutomorphism {
        map: (0..n).map(|i| (0..n).contains(&(i + k)).then_some((i + k) as usize)).collect(),
    }
}

/// Random walk by automorphisms chosen independently with the given probabilities.
#[derive(Clone, Debug)]
pub struct WalkSpec {
    pub steps: Vec<(GraphAutomorphism, f64)>,
    pub length: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    /// Mean of `d(x0, w_n x0)` over completed trials, `n = 1..=length`.
    pub mean_distance: Vec<Q>,
    /// `mean_distance[n - 1] / n`.
    pub drift: Vec<Q>,
    /// Least-squares slope of the mean distance over the second half.
    pub tail_fit: f64,
    pub threshold: Q,
    /// Fraction of completed trials with `d(x0, w_N x0) >= threshold * N`.
    pub fraction_above: Q,
    pub completed: usize,
    pub censored: usize,
}

/// Trials run on independent streams of one seeded generator; a trial whose walk leaves
/// the domain of a step is censored.
pub fn estimate_drift(g: &MetricGraph, spec: &WalkSpec, x0: usize, threshold: Q) -> Result<DriftReport> {
    let weights: Vec<f64> = spec.steps.iter().map(|s| s.1).collect();
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-9 {
        return Err(ModelError::BadDistribution(format!("weights sum to {total}")));
    }
    let pick = WeightedIndex::new(&weights).map_err(|e| ModelError::BadDistribution(e.to_string()))?;
    let row = g.dist_from(x0);
    let n = spec.length;
    let mut sums = vec![0u64; n];
    let mut completed = 0;
    let mut above = 0;
    for trial in 0..spec.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(trial as u64);
        let mut x = x0;
        let mut ds = Vec::with_capacity(n);
        let mut ok = true;
        for _ in 0..n {
            match spec.steps[pick.sample(&mut rng)].0.apply(x) {
                Some(y) => x = y,
                None => {
                    ok = false;
                    break;
                }
            }
            match row[x] {
                Some(d) => ds.push(d),
                None => return Err(CoarseError::Disconnected(x0, x).into()),
            }
        }
        if !ok {
            continue;
        }
        completed += 1;
        for (s, d) in sums.iter_mut().zip(&ds) {
            *s += d;
        }
        if n > 0 && half(ds[n - 1]) >= threshold * Q::from_integer(n as i64) {
            above += 1;
        }
    }
    if completed == 0 {
        return Err(ModelError::AllTrialsCensored);
    }
    let mean_distance: Vec<Q> = sums.iter().map(|&s| Q::new(s as i64, 2 * completed as i64)).collect();
    let drift = mean_distance.iter().enumerate().map(|(i, &m)| m / Q::from_integer(i as i64 + 1)).collect();
    let tail_fit = least_squares_slope(
        &(n / 2..n).map(|i| ((i + 1) as f64, to_f64(mean_distance[i]))).collect::<Vec<_>>(),
    );
    Ok(DriftReport {
        mean_distance,
        drift,
        tail_fit,
        threshold,
        fraction_above: Q::new(above, completed as i64),
        completed,
        censored: spec.trials - completed,
    })
}

pub fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let num: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    num / den
}
