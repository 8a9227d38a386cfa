use super::{half, CoarseError, MetricGraph, Result};
use crate::Q;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// A vertex map, possibly defined only on part of the graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphAutomorphism {
    pub map: Vec<Option<usize>>,
}

impl GraphAutomorphism {
    pub fn total(map: Vec<usize>) -> GraphAutomorphism {
        GraphAutomorphism { map: map.into_iter().map(Some).collect() }
    }
    pub fn apply(&self, v: usize) -> Option<usize> {
        self.map.get(v).copied().flatten()
    }
    pub fn is_partial(&self) -> bool {
        self.map.iter().any(Option::is_none)
    }

    /// Injective where defined and sends edges to edges of the same length.
    pub fn preserves(&self, g: &MetricGraph) -> bool {
        let mut images: Vec<usize> = self.map.iter().flatten().copied().collect();
        let n = images.len();
        images.sort_unstable();
        images.dedup();
        if images.len() != n {
            return false;
        }
        g.edges().iter().all(|&(u, v, l)| match (self.apply(u), self.apply(v)) {
            (Some(a), Some(b)) => g.neighbors(a).iter().any(|&(w, m)| w == b && m == l),
            _ => true,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationReport {
    /// `d(x0, f^n x0)` for `n = 1..=N`.
    pub distances: Vec<Q>,
    /// `d(x0, f^n x0) / n`.
    pub estimates: Vec<Q>,
    /// Growth of the distance over the second half of the orbit.
    pub tail_slope: Q,
    pub loxodromic: bool,
}

pub fn translation_length(g: &MetricGraph, f: &GraphAutomorphism, x0: usize, n: usize, threshold: Q) -> Result<TranslationReport> {
    let row = g.dist_from(x0);
    let mut x = x0;
    let mut distances = Vec::with_capacity(n);
    for step in 1..=n {
        x = f.apply(x).ok_or(CoarseError::OrbitEscapesDomain { valid: step - 1 })?;
        distances.push(half(row[x].ok_or(CoarseError::Disconnected(x0, x))?));
    }
    let estimates = distances.iter().enumerate().map(|(i, &d)| d / Q::from_integer(i as i64 + 1)).collect();
    let h = n / 2;
    let at = |k: usize| if k == 0 { Q::zero() } else { distances[k - 1] };
    let tail_slope = if n == 0 { Q::zero() } else { (at(n) - at(h)) / Q::from_integer((n - h) as i64) };
    Ok(TranslationReport { distances, estimates, tail_slope, loxodromic: tail_slope > threshold })
}

/// Sum of the entries at least `m`.
pub fn cutoff_sum(entries: &[Q], m: Q) -> Result<Q> {
    if let Some(i) = entries.iter().position(|x| x.is_negative()) {
        return Err(CoarseError::NegativeEntry(i));
    }
    Ok(entries.iter().filter(|&&x| x >= m).fold(Q::zero(), |a, &x| a + x))
}
