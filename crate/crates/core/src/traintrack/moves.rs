use super::carry::RouteMap;
use super::{validate_graph, Result, TrackError, TrackGraph, TrainTrack};
use crate::dsu::Dsu;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Region data for a graph obtained from `old` by a local move.
///
/// `origin(d)` names an end of `old` whose traversal has the same face on its right as
/// the traversal of new end `d`, or `None` when `d` belongs to a branch created by the
/// move. Old faces reached from one new face are merged. `joins` merges the faces of
/// further pairs of old corners; `chi` adds Euler characteristic to the region holding
/// an old corner.
pub(crate) fn rebuild(
    old: &TrackGraph,
    sides: Vec<[Vec<usize>; 2]>,
    n_ends: usize,
    origin: &dyn Fn(usize) -> Option<usize>,
    joins: &[(usize, usize)],
    chi: &[(usize, i64)],
) -> Result<TrackGraph> {
    let mut g = TrackGraph::from_sides(sides, vec![0; n_ends], vec![0])?;
    let old_faces = old.faces_raw();
    let new_faces = g.faces_raw();
    let nr = old.region_genus.len();
    let mut dsu = Dsu::new(nr);
    let mut seen = vec![false; nr];
    let mut face_region = Vec::with_capacity(new_faces.cycles.len());
    for cyc in &new_faces.cycles {
        let mut first = None;
        for &c in cyc {
            let Some(od) = origin(g.rot_next(c)) else { continue };
            let r = old.corner_region[old.rot_prev(od)];
            seen[r] = true;
            match first {
                None => first = Some(r),
                Some(f) => {
                    dsu.union(f, r);
                }
            }
        }
        face_region.push(first.ok_or_else(|| TrackError::InvalidResult("a face has no surviving boundary".into()))?);
    }
    for &(c1, c2) in joins {
        dsu.union(old.corner_region[c1], old.corner_region[c2]);
    }
    let mut k_old = vec![0i64; nr];
    for cyc in &old_faces.cycles {
        k_old[old.corner_region[cyc[0]]] += 1;
    }
    let mut chi_new: BTreeMap<usize, i64> = BTreeMap::new();
    for r in 0..nr {
        if seen[r] {
            *chi_new.entry(dsu.find(r)).or_default() += 2 - 2 * old.region_genus[r] as i64 - k_old[r];
        }
    }
    for &(c, x) in chi {
        *chi_new.entry(dsu.find(old.corner_region[c])).or_default() += x;
    }
    let mut k_new: BTreeMap<usize, i64> = BTreeMap::new();
    for &r in &face_region {
        *k_new.entry(dsu.find(r)).or_default() += 1;
    }
    let classes: Vec<usize> = k_new.keys().copied().collect();
    let mut genus = Vec::new();
    for &cl in &classes {
        let twice = 2 - k_new[&cl] - chi_new.get(&cl).copied().unwrap_or(0);
        if twice < 0 || twice % 2 != 0 {
            return Err(TrackError::InvalidResult(format!("region with Euler characteristic {}", chi_new[&cl])));
        }
        genus.push((twice / 2) as u32);
    }
    g.corner_region = (0..n_ends)
        .map(|c| classes.binary_search(&dsu.find(face_region[new_faces.of[c]])).unwrap())
        .collect();
    g.region_genus = genus;
    g.compact_regions();
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitChoice {
    /// The new diagonal runs from the upper strand on the left to the lower on the right.
    Left,
    Right,
    Central,
}

struct Large {
    s1: usize,
    s2: usize,
    k1: usize,
    k2: usize,
    /// Outer ends at `s1` in counterclockwise order (upper first, looking along the branch).
    ab: [usize; 2],
    /// Outer ends at `s2` in counterclockwise order (lower first).
    dc: [usize; 2],
}

fn large(t: &TrackGraph, e: usize) -> Result<Large> {
    if e >= t.branch_count() {
        return Err(TrackError::NotLargeBranch(e));
    }
    let (p0, p1) = (t.port[2 * e], t.port[2 * e + 1]);
    let (k1, k2) = (p0.side.index(), p1.side.index());
    let ok = p0.switch != p1.switch
        && t.sides[p0.switch][k1].len() == 1
        && t.sides[p1.switch][k2].len() == 1
        && t.sides[p0.switch][1 - k1].len() == 2
        && t.sides[p1.switch][1 - k2].len() == 2;
    if !ok {
        return Err(TrackError::NotLargeBranch(e));
    }
    let o1 = &t.sides[p0.switch][1 - k1];
    let o2 = &t.sides[p1.switch][1 - k2];
    Ok(Large { s1: p0.switch, s2: p1.switch, k1, k2, ab: [o1[0], o1[1]], dc: [o2[0], o2[1]] })
}

pub fn split(t: &TrainTrack, e: usize, choice: SplitChoice) -> Result<(TrainTrack, RouteMap)> {
    let l = large(t, e)?;
    let (graph, map) = match choice {
        SplitChoice::Central => central_split(t, e, &l)?,
        _ => side_split(t, e, &l, choice)?,
    };
    let track = validate_graph(graph).map_err(|err| TrackError::InvalidResult(err.to_string()))?;
    Ok((track, map))
}

fn side_split(t: &TrackGraph, e: usize, l: &Large, choice: SplitChoice) -> Result<(TrackGraph, RouteMap)> {
    let [a, b] = l.ab;
    let [d, c] = l.dc;
    let (diag0, diag1) = (2 * e, 2 * e + 1);
    let mut sides = t.sides.clone();
    // ends that move from one old switch to the other
    let moved: [(usize, usize); 2];
    let (west1, east1, west2, east2) = if choice == SplitChoice::Left {
        moved = [(c, l.s2), (b, l.s1)];
        (vec![a], vec![diag0, c], vec![diag1, b], vec![d])
    } else {
        moved = [(d, l.s2), (a, l.s1)];
        (vec![b], vec![d, diag0], vec![a, diag1], vec![c])
    };
    sides[l.s1][1 - l.k1] = west1;
    sides[l.s1][l.k1] = east1;
    sides[l.s2][l.k2] = west2;
    sides[l.s2][1 - l.k2] = east2;
    let nb = t.branch_count();
    let mut paths: Vec<Vec<(usize, bool)>> = (0..nb).map(|b| vec![(b, true)]).collect();
    paths[e] = vec![(e, true)];
    for (end, from) in moved {
        let b = end / 2;
        // leaving s1 along e reaches s2 and the reverse
        let step = (e, from == l.s2);
        if end % 2 == 0 {
            paths[b].insert(0, step);
        } else {
            paths[b].push((e, !step.1));
        }
    }
    let origin = |x: usize| if x / 2 == e { None } else { Some(x) };
    let g = rebuild(t, sides, 2 * nb, &origin, &[], &[])?;
    let map = RouteMap { switch_map: (0..t.switch_count()).map(|s| (s, false)).collect(), branch_paths: paths };
    Ok((g, map))
}

fn central_split(t: &TrackGraph, e: usize, l: &Large) -> Result<(TrackGraph, RouteMap)> {
    let [a, b] = l.ab;
    let [d, c] = l.dc;
    // an end at a removed switch continues through e to its partner
    let mut partner = BTreeMap::new();
    partner.insert(a, (c, true));
    partner.insert(c, (a, false));
    partner.insert(b, (d, true));
    partner.insert(d, (b, false));
    let ns = t.switch_count();
    let keep: Vec<usize> = (0..ns).filter(|&s| s != l.s1 && s != l.s2).collect();
    if keep.is_empty() {
        return Err(TrackError::InvalidResult("central split removes every switch".into()));
    }
    let mut new_end = vec![usize::MAX; 2 * t.branch_count()];
    let mut paths: Vec<Vec<(usize, bool)>> = Vec::new();
    let mut visited = vec![false; t.branch_count()];
    for &s in &keep {
        for k in 0..2 {
            for &start in &t.sides[s][k] {
                if new_end[start] != usize::MAX {
                    continue;
                }
                let nb = paths.len();
                let mut path = Vec::new();
                let mut x = start;
                loop {
                    visited[x / 2] = true;
                    path.push((x / 2, x % 2 == 0));
                    let y = x ^ 1;
                    match partner.get(&y) {
                        Some(&(z, fwd)) => {
                            path.push((e, fwd));
                            x = z;
                        }
                        None => {
                            new_end[start] = 2 * nb;
                            new_end[y] = 2 * nb + 1;
                            break;
                        }
                    }
                }
                paths.push(path);
            }
        }
    }
    if (0..t.branch_count()).any(|b| b != e && !visited[b]) {
        return Err(TrackError::InvalidResult("central split leaves a closed curve".into()));
    }
    let sides: Vec<[Vec<usize>; 2]> = keep
        .iter()
        .map(|&s| [0, 1].map(|k| t.sides[s][k].iter().map(|&x| new_end[x]).collect()))
        .collect();
    let first_piece: Vec<(usize, usize)> = paths
        .iter()
        .map(|p| {
            let (b0, f0) = p[0];
            let (bl, fl) = p[p.len() - 1];
            (if f0 { 2 * b0 } else { 2 * b0 + 1 }, if fl { 2 * bl + 1 } else { 2 * bl })
        })
        .collect();
    let origin = |x: usize| Some(if x % 2 == 0 { first_piece[x / 2].0 } else { first_piece[x / 2].1 });
    let g = rebuild(t, sides, 2 * paths.len(), &origin, &[], &[(a, -1)])?;
    let map = RouteMap { switch_map: keep.iter().map(|&s| (s, false)).collect(), branch_paths: paths };
    Ok((g, map))
}

/// Slides the junction at the far end of `m` past the junction at its near end.
pub fn shift(t: &TrainTrack, m: usize) -> Result<(TrainTrack, RouteMap)> {
    if m >= t.branch_count() {
        return Err(TrackError::PatternMismatch(m));
    }
    let fits = |near: usize| {
        let (p, q) = (t.port[near], t.port[near ^ 1]);
        p.switch != q.switch
            && t.sides[p.switch][p.side.index()].len() == 1
            && t.sides[p.switch][1 - p.side.index()].len() == 2
            && t.sides[q.switch][q.side.index()].len() == 2
            && t.sides[q.switch][1 - q.side.index()].len() == 1
    };
    let near = [2 * m, 2 * m + 1].into_iter().find(|&x| fits(x)).ok_or(TrackError::PatternMismatch(m))?;
    let far = near ^ 1;
    let (p, q) = (t.port[near], t.port[far]);
    let (s1, s2, ka, kb) = (p.switch, q.switch, p.side.index(), q.side.index());
    let [x, y] = [t.sides[s1][1 - ka][0], t.sides[s1][1 - ka][1]];
    let at_s2 = &t.sides[s2][kb];
    let w_below = at_s2[0] == far;
    let w = if w_below { at_s2[1] } else { at_s2[0] };
    // the junction at s1 on the opposite vertical side from w
    let (u, l0) = if w_below { (x, y) } else { (y, x) };
    let mut sides = t.sides.clone();
    if w_below {
        sides[s1][1 - ka] = vec![l0, w];
        sides[s2][kb] = vec![u, far];
    } else {
        sides[s1][1 - ka] = vec![w, l0];
        sides[s2][kb] = vec![far, u];
    }
    let nb = t.branch_count();
    let origin = |d: usize| if d / 2 == m { None } else { Some(d) };
    let g = rebuild(t, sides, 2 * nb, &origin, &[], &[])?;
    let track = validate_graph(g).map_err(|err| TrackError::InvalidResult(err.to_string()))?;
    // every switch collapses onto s2; m collapses to a point there
    let mut paths: Vec<Vec<(usize, bool)>> = (0..nb).map(|b| vec![(b, true)]).collect();
    paths[m] = vec![];
    let toward_s2 = (m, near % 2 == 0);
    for end in [l0, u] {
        let b = end / 2;
        if end % 2 == 0 {
            paths[b].insert(0, (m, !toward_s2.1));
        } else {
            paths[b].push(toward_s2);
        }
    }
    let mut switch_map: Vec<(usize, bool)> = (0..t.switch_count()).map(|s| (s, false)).collect();
    switch_map[s1] = (s2, ka == kb);
    Ok((track, RouteMap { switch_map, branch_paths: paths }))
}
