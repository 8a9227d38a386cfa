use super::{Result, TrackError, TrackGraph};
use crate::dsu::Dsu;
use crate::Q;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Weights indexed by branch.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WeightVector {
    pub weights: Vec<Q>,
}

impl WeightVector {
    pub fn from_ints(w: &[i64]) -> WeightVector {
        WeightVector { weights: w.iter().map(|&x| Q::from_integer(x)).collect() }
    }
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&b| !self.weights[b].is_zero()).collect()
    }
    pub fn max_weight(&self) -> Q {
        self.weights.iter().copied().max().unwrap_or_else(Q::zero)
    }
}

/// Row per switch: `+1` per end on the left side, `-1` per end on the right.
pub(crate) fn switch_matrix(t: &TrackGraph) -> Vec<Vec<i64>> {
    let nb = t.branch_count();
    (0..t.switch_count())
        .map(|s| {
            let mut row = vec![0i64; nb];
            for &d in &t.sides[s][0] {
                row[d / 2] += 1;
            }
            for &d in &t.sides[s][1] {
                row[d / 2] -= 1;
            }
            row
        })
        .collect()
}

pub fn check_switch_equality(t: &TrackGraph, w: &WeightVector) -> Result<bool> {
    if w.weights.len() < t.branch_count() {
        return Err(TrackError::MissingBranchWeight(w.weights.len()));
    }
    if w.weights.iter().any(|x| x.is_negative()) {
        return Ok(false);
    }
    Ok(switch_matrix(t).iter().all(|row| {
        row.iter().zip(&w.weights).fold(Q::zero(), |acc, (&c, &x)| acc + x * Q::from_integer(c)).is_zero()
    }))
}

/// Rank of an integer matrix over the rationals.
pub(crate) fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c];
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c] / pivot;
                for j in c..ncols {
                    let v = m[r][j];
                    m[i][j] -= f * v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Basis of the solution space of the switch equations (signs unrestricted).
pub(crate) fn nullspace(t: &TrackGraph) -> Vec<Vec<Q>> {
    let nb = t.branch_count();
    let mut m: Vec<Vec<Q>> =
        switch_matrix(t).into_iter().map(|r| r.into_iter().map(Q::from_integer).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..nb {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pivot = m[r][c];
        for j in 0..nb {
            m[r][j] /= pivot;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..nb {
                    let v = m[r][j];
                    m[i][j] -= f * v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..nb)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Q::zero(); nb];
            v[free] = Q::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][free];
            }
            v
        })
        .collect()
}

/// Number of closed curves in the multicurve realising integral weights `w`.
///
/// Each branch of weight `k` carries `k` parallel strands; at a switch the strands on
/// the two sides are stacked in rotation order and joined top to top.
pub fn multicurve_components(t: &TrackGraph, w: &[u32]) -> usize {
    let nb = t.branch_count();
    let mut base = vec![0usize; 2 * nb];
    let mut total = 0;
    for b in 0..nb {
        base[2 * b] = total;
        total += w[b] as usize;
        base[2 * b + 1] = total;
        total += w[b] as usize;
    }
    if total == 0 {
        return 0;
    }
    let mut dsu = Dsu::new(total);
    for b in 0..nb {
        let k = w[b] as usize;
        for i in 0..k {
            dsu.union(base[2 * b] + i, base[2 * b + 1] + k - 1 - i);
        }
    }
    for s in 0..t.switch_count() {
        let base = &base;
        let strands = |side: usize| -> Vec<usize> {
            t.sides[s][side].iter().flat_map(|&d| (0..w[d / 2] as usize).map(move |i| base[d] + i)).collect()
        };
        let (l, r) = (strands(0), strands(1));
        if l.len() != r.len() {
            return usize::MAX;
        }
        for (j, &x) in l.iter().enumerate() {
            dsu.union(x, r[r.len() - 1 - j]);
        }
    }
    let mut roots: Vec<usize> = (0..total).map(|x| dsu.find(x)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

pub const VERTEX_CYCLE_BRANCH_BOUND: usize = 14;

/// Vertex cycles: weights in `{0, 1, 2}` that satisfy the switch equations, realise a
/// single closed curve and span an extreme ray of the weight cone. Extremality is tested
/// as a one-dimensional solution space on the support.
pub fn vertex_cycles(t: &TrackGraph) -> Result<Vec<WeightVector>> {
    let nb = t.branch_count();
    if nb > VERTEX_CYCLE_BRANCH_BOUND {
        return Err(TrackError::TooLarge(nb, VERTEX_CYCLE_BRANCH_BOUND));
    }
    let rows = switch_matrix(t);
    // last branch index touching each switch, for early pruning
    let mut last = vec![0usize; rows.len()];
    for (s, row) in rows.iter().enumerate() {
        last[s] = (0..nb).rev().find(|&b| row[b] != 0).unwrap_or(0);
    }
    let mut out = Vec::new();
    let mut w = vec![0u32; nb];
    enumerate(t, &rows, &last, &mut w, 0, &mut out);
    out.sort();
    Ok(out)
}

fn enumerate(t: &TrackGraph, rows: &[Vec<i64>], last: &[usize], w: &mut Vec<u32>, b: usize, out: &mut Vec<WeightVector>) {
    if b == w.len() {
        if w.iter().all(|&x| x == 0) || multicurve_components(t, w) != 1 || !extreme(rows, w) {
            return;
        }
        let v = WeightVector { weights: w.iter().map(|&x| Q::from_integer(x as i64)).collect() };
        out.push(v);
        return;
    }
    for x in 0..=2u32 {
        w[b] = x;
        let ok = rows.iter().zip(last).all(|(row, &l)| {
            l != b || row.iter().zip(w.iter()).map(|(&c, &x)| c * x as i64).sum::<i64>() == 0
        });
        if ok {
            enumerate(t, rows, last, w, b + 1, out);
        }
    }
    w[b] = 0;
}

fn extreme(rows: &[Vec<i64>], w: &[u32]) -> bool {
    let supp: Vec<usize> = (0..w.len()).filter(|&b| w[b] > 0).collect();
    let sub: Vec<Vec<Q>> =
        rows.iter().map(|r| supp.iter().map(|&b| Q::from_integer(r[b])).collect()).collect();
    supp.len() - rank(&sub) == 1
}

/// Pushes weights on the source of a route map forward to the target.
pub fn push_forward(m: &super::RouteMap, target_branches: usize, w: &WeightVector) -> WeightVector {
    let mut out = vec![Q::zero(); target_branches];
    for (b, path) in m.branch_paths.iter().enumerate() {
        for &(tb, _) in path {
            out[tb] += w.weights[b];
        }
    }
    WeightVector { weights: out }
}
