use super::{CurveError, CurvePair, Pairing, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_PAIRING_BOUND: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingResult {
    /// The lexicographically first unlinked matching, if any.
    pub pairing: Option<Pairing>,
    pub count: u64,
}

pub fn casson_long_pairing(cp: &CurvePair) -> Result<PairingResult> {
    casson_long_pairing_bounded(cp, DEFAULT_PAIRING_BOUND)
}

pub fn casson_long_pairing_bounded(cp: &CurvePair, bound: usize) -> Result<PairingResult> {
    let n = cp.n();
    if n % 2 == 1 {
        return Err(CurveError::OddIntersection(n));
    }
    if n > bound {
        return Err(CurveError::TooLarge(n, bound));
    }
    let mut s = Search {
        a_pos: cp.a_pos.clone(),
        b_pos: cp.b_pos.clone(),
        mate: vec![usize::MAX; n],
        chords: Vec::new(),
        first: None,
        count: 0,
    };
    s.run();
    let pairing = s.first.map(|ch| {
        let mut matching: Vec<(u32, u32)> = ch
            .iter()
            .map(|&(x, y)| {
                let (p, q) = (cp.ids[x], cp.ids[y]);
                (p.min(q), p.max(q))
            })
            .collect();
        matching.sort_unstable();
        Pairing { matching }
    });
    Ok(PairingResult { pairing, count: s.count })
}

struct Search {
    a_pos: Vec<usize>,
    b_pos: Vec<usize>,
    mate: Vec<usize>,
    chords: Vec<(usize, usize)>,
    first: Option<Vec<(usize, usize)>>,
    count: u64,
}

/// Chords `{p, q}` and `{r, s}` on one circle cross when exactly one of `r, s` lies
/// strictly between `p` and `q`.
fn crosses(pos: &[usize], (p, q): (usize, usize), (r, s): (usize, usize)) -> bool {
    let (lo, hi) = (pos[p].min(pos[q]), pos[p].max(pos[q]));
    let inside = |x: usize| lo < pos[x] && pos[x] < hi;
    inside(r) != inside(s)
}

impl Search {
    fn run(&mut self) {
        let Some(x) = self.mate.iter().position(|&m| m == usize::MAX) else {
            self.count += 1;
            if self.first.is_none() {
                self.first = Some(self.chords.clone());
            }
            return;
        };
        for y in x + 1..self.mate.len() {
            if self.mate[y] != usize::MAX {
                continue;
            }
            let ok = self
                .chords
                .iter()
                .all(|&c| !crosses(&self.a_pos, (x, y), c) && !crosses(&self.b_pos, (x, y), c));
            if !ok {
                continue;
            }
            self.mate[x] = y;
            self.mate[y] = x;
            self.chords.push((x, y));
            self.run();
            self.chords.pop();
            self.mate[x] = usize::MAX;
            self.mate[y] = usize::MAX;
        }
    }
}

/// Checks a matching against both cyclic orders.
pub fn is_unlinked(cp: &CurvePair, pairing: &Pairing) -> bool {
    let mut seen = vec![false; cp.n()];
    let mut chords = Vec::new();
    for &(p, q) in &pairing.matching {
        let (Some(x), Some(y)) = (cp.index_of(p), cp.index_of(q)) else {
            return false;
        };
        if x == y || seen[x] || seen[y] {
            return false;
        }
        seen[x] = true;
        seen[y] = true;
        chords.push((x, y));
    }
    if seen.iter().any(|s| !s) {
        return false;
    }
    for i in 0..chords.len() {
        for j in i + 1..chords.len() {
            if crosses(&cp.a_pos, chords[i], chords[j]) || crosses(&cp.b_pos, chords[i], chords[j]) {
                return false;
            }
        }
    }
    true
}
