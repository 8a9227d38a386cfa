use super::moves::{shift, split, SplitChoice};
use super::weights::{nullspace, push_forward, switch_matrix, WeightVector};
use super::{Result, TrackError, TrackGraph, TrainTrack};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

/// A branch traversed forwards (`true`) or backwards.
pub type Dir = (usize, bool);

/// Carrying certificate from a source track into a target track.
///
/// `switch_map[s] = (t, flip)` sends switch `s` to `t`, exchanging the sides when `flip`
/// is set. A branch may map to an empty path when it is collapsed into a switch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteMap {
    pub switch_map: Vec<(usize, bool)>,
    pub branch_paths: Vec<Vec<Dir>>,
}

impl RouteMap {
    pub fn identity(t: &TrackGraph) -> RouteMap {
        RouteMap {
            switch_map: (0..t.switch_count()).map(|s| (s, false)).collect(),
            branch_paths: (0..t.branch_count()).map(|b| vec![(b, true)]).collect(),
        }
    }
}

/// `second ∘ first`: source of `first` into target of `second`.
pub fn compose(first: &RouteMap, second: &RouteMap) -> RouteMap {
    let switch_map = first
        .switch_map
        .iter()
        .map(|&(s, f)| {
            let (t, g) = second.switch_map[s];
            (t, f != g)
        })
        .collect();
    let branch_paths = first
        .branch_paths
        .iter()
        .map(|p| {
            let mut out = Vec::new();
            for &(b, fwd) in p {
                let q = &second.branch_paths[b];
                if fwd {
                    out.extend(q.iter().copied());
                } else {
                    out.extend(q.iter().rev().map(|&(c, g)| (c, !g)));
                }
            }
            out
        })
        .collect();
    RouteMap { switch_map, branch_paths }
}

fn leave_end((b, fwd): Dir) -> usize {
    if fwd {
        2 * b
    } else {
        2 * b + 1
    }
}

/// Checks that every branch of `sigma` follows a smooth path in `tau` whose ends sit on
/// the sides prescribed by the switch map, then pushes a basis of the weights on `sigma`
/// forward and checks the switch equalities of `tau`.
pub fn verify_carrying(sigma: &TrackGraph, tau: &TrackGraph, m: &RouteMap) -> Result<bool> {
    if m.branch_paths.len() != sigma.branch_count() || m.switch_map.len() != sigma.switch_count() {
        return Ok(false);
    }
    if m.switch_map.iter().any(|&(t, _)| t >= tau.switch_count()) {
        return Ok(false);
    }
    let image = |end: usize| {
        let p = sigma.port(end);
        let (t, flip) = m.switch_map[p.switch];
        (t, p.side.index() ^ usize::from(flip))
    };
    for (b, path) in m.branch_paths.iter().enumerate() {
        if path.iter().any(|&(c, _)| c >= tau.branch_count()) {
            return Err(TrackError::BrokenRoute(b));
        }
        let (start, end) = (image(2 * b), image(2 * b + 1));
        if path.is_empty() {
            if start.0 != end.0 || start.1 == end.1 {
                return Ok(false);
            }
            continue;
        }
        let first = tau.port(leave_end(path[0]));
        if (first.switch, first.side.index()) != start {
            return Ok(false);
        }
        for w in path.windows(2) {
            let arrive = tau.port(leave_end(w[0]) ^ 1);
            let leave = tau.port(leave_end(w[1]));
            if arrive.switch != leave.switch {
                return Err(TrackError::BrokenRoute(b));
            }
            if arrive.side == leave.side {
                return Ok(false);
            }
        }
        let last = tau.port(leave_end(path[path.len() - 1]) ^ 1);
        if (last.switch, last.side.index()) != end {
            return Ok(false);
        }
    }
    for v in nullspace(sigma) {
        let pushed = push_forward(m, tau.branch_count(), &WeightVector { weights: v });
        if !signed_switch_equality(tau, &pushed) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Switch equalities for a weight vector of either sign.
fn signed_switch_equality(t: &TrackGraph, w: &WeightVector) -> bool {
    let zero = crate::Q::from_integer(0);
    switch_matrix(t)
        .iter()
        .all(|row| row.iter().zip(&w.weights).fold(zero, |acc, (&c, &x)| acc + x * crate::Q::from_integer(c)) == zero)
}

pub const DEFAULT_SEARCH_DEPTH: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Moves applied to the carrier, with a certificate from `sigma` into it.
    Found { moves: Vec<String>, map: RouteMap },
    NotFound,
    BudgetExhausted,
}

/// Looks for a sequence of at most `depth` splits and shifts of `tau` ending at a track
/// isomorphic to `sigma`; `budget` bounds the number of moves tried.
pub fn find_carrying(sigma: &TrainTrack, tau: &TrainTrack, depth: usize, budget: usize) -> SearchOutcome {
    let target = sigma.canonical_code();
    let mut seen = BTreeSet::new();
    seen.insert(tau.canonical_code());
    let mut queue = VecDeque::new();
    queue.push_back((tau.clone(), RouteMap::identity(tau), Vec::<String>::new()));
    let mut spent = 0;
    while let Some((cur, to_tau, moves)) = queue.pop_front() {
        if cur.switch_count() == sigma.switch_count() && cur.branch_count() == sigma.branch_count() && cur.canonical_code() == target {
            let iso = isomorphism(sigma, &cur).expect("codes agree");
            return SearchOutcome::Found { moves, map: compose(&iso, &to_tau) };
        }
        if moves.len() == depth {
            continue;
        }
        for b in 0..cur.branch_count() {
            let mut options: Vec<(String, Result<(TrainTrack, RouteMap)>)> = Vec::new();
            for c in [SplitChoice::Left, SplitChoice::Right, SplitChoice::Central] {
                options.push((format!("split {b} {c:?}"), split(&cur, b, c)));
            }
            options.push((format!("shift {b}"), shift(&cur, b)));
            for (name, r) in options {
                spent += 1;
                if spent > budget {
                    return SearchOutcome::BudgetExhausted;
                }
                let Ok((next, m)) = r else { continue };
                if seen.insert(next.canonical_code()) {
                    let mut mv = moves.clone();
                    mv.push(name);
                    queue.push_back((next, compose(&m, &to_tau), mv));
                }
            }
        }
    }
    SearchOutcome::NotFound
}

/// A certificate `a -> b` for isomorphic tracks.
pub(crate) fn isomorphism(a: &TrackGraph, b: &TrackGraph) -> Option<RouteMap> {
    let best = |t: &TrackGraph| {
        (0..t.switch_count())
            .flat_map(|s| [(s, 0), (s, 1)])
            .map(|(s, k)| t.code_from(s, k))
            .min_by(|x, y| x.0.cmp(&y.0))
    };
    let (ca, oa, ba) = best(a)?;
    let (cb, ob, bb) = best(b)?;
    if ca != cb {
        return None;
    }
    let mut switch_map = vec![(0, false); a.switch_count()];
    for (i, &(s, k)) in oa.iter().enumerate() {
        let (t, kt) = ob[i];
        switch_map[s] = (t, k != kt);
    }
    let mut branch_paths = vec![Vec::new(); a.branch_count()];
    for (i, &(x, fx)) in ba.iter().enumerate() {
        let (y, fy) = bb[i];
        branch_paths[x] = vec![(y, fx == fy)];
    }
    Some(RouteMap { switch_map, branch_paths })
}
