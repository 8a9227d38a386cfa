use super::carry::{Dir, RouteMap};
use super::moves::rebuild;
use super::weights::vertex_cycles;
use super::{validate_graph, PreTrack, Result, TrackError, TrackGraph, TrainTrack};
use crate::curvepair::{Curve, CurvePair, NestedBicorns, Side, Subarc, A_IN, A_OUT, B_IN, B_OUT};
use crate::dsu::Dsu;
use crate::Q;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A curve drawn against a track: either a train route, or a transverse curve listed by
/// the places where it meets the track.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrackCurve {
    Carried(Vec<Dir>),
    Transverse(Vec<Crossing>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Crossing {
    /// Passes through a switch, leaving it into the corner after end `corner` and
    /// following that face until it re-enters the switch.
    Switch { switch: usize, corner: usize },
    Branch { branch: usize },
}

/// Collapses `a_i` to a point and keeps all of `b`. The switch sides are the two sides of
/// `a`; branches are the arcs of `b` between consecutive points of `a_i`, numbered in
/// order along `b`.
pub fn pretrack_from_bicorn(cp: &CurvePair, a_i: &Subarc) -> Result<PreTrack> {
    if cp.n() == 0 || a_i.curve != Curve::A {
        return Err(TrackError::EmptyArc);
    }
    let mut along_a: Vec<usize> = a_i.points().iter().map(|&id| cp.index_of(id)).collect::<Option<_>>().ok_or(TrackError::EmptyArc)?;
    if !a_i.forward {
        along_a.reverse();
    }
    if along_a.len() > 1 && along_a[0] == along_a[along_a.len() - 1] {
        along_a.pop();
    }
    let m = along_a.len();
    let mut along_b = along_a.clone();
    along_b.sort_by_key(|&v| cp.b_pos[v]);
    let branch_of: BTreeMap<usize, usize> = along_b.iter().enumerate().map(|(j, &v)| (v, j)).collect();
    // ends at each point: (end on the left of a, end on the right)
    let mut left_end = vec![0; cp.n()];
    let mut right_end = vec![0; cp.n()];
    for (j, &v) in along_b.iter().enumerate() {
        let w = along_b[(j + 1) % m];
        let out = 2 * j;
        let inn = 2 * ((branch_of[&w] + m - 1) % m) + 1;
        debug_assert_eq!(branch_of[&w], (j + 1) % m);
        let _ = inn;
        if cp.b_out_side(v) == Side::Left {
            left_end[v] = out;
        } else {
            right_end[v] = out;
        }
    }
    for (j, &w) in along_b.iter().enumerate() {
        let inn = 2 * ((j + m - 1) % m) + 1;
        if cp.b_out_side(w) == Side::Left {
            right_end[w] = inn;
        } else {
            left_end[w] = inn;
        }
    }
    let left: Vec<usize> = along_a.iter().rev().map(|&v| left_end[v]).collect();
    let right: Vec<usize> = along_a.iter().map(|&v| right_end[v]).collect();

    let faces = cp.map.faces();
    let right_b = |v: usize| if cp.sign[v] > 0 { B_IN } else { B_OUT };
    let mut corner_face = vec![0usize; 2 * m];
    for j in 0..m {
        let v = along_a[j];
        corner_face[right_end[v]] = if j + 1 < m { faces.of[4 * v + right_b(v)] } else { faces.of[4 * v + A_OUT] };
        corner_face[left_end[v]] = if j > 0 { faces.of[4 * along_a[j - 1] + A_OUT] } else { faces.of[4 * v + A_IN] };
    }

    // complement of b ∪ a_i: faces of a ∪ b glued across the discarded a edges
    let nf = faces.cycles.len();
    let mut dsu = Dsu::new(nf);
    let kept: Vec<bool> = (0..cp.n()).map(|v| {
        let j = along_a.iter().position(|&x| x == v);
        matches!(j, Some(j) if j + 1 < m)
    }).collect();
    for v in 0..cp.n() {
        if !kept[v] {
            let d = 4 * v + A_OUT;
            dsu.union(faces.of[d], faces.of[cp.map.prev(d)]);
        }
    }
    let regions = cp.map.regions(&faces);
    for (_, fs) in &regions {
        for &f in fs {
            dsu.union(fs[0], f);
        }
    }
    let mut chi: BTreeMap<usize, i64> = BTreeMap::new();
    for (r, fs) in &regions {
        *chi.entry(dsu.find(fs[0])).or_default() += 2 - 2 * cp.map.region_genus(*r) as i64 - fs.len() as i64;
    }
    for v in 0..cp.n() {
        if !kept[v] {
            *chi.entry(dsu.find(faces.of[4 * v + A_OUT])).or_default() -= 1;
        }
    }
    let comp: Vec<usize> = corner_face.iter().map(|&f| dsu.find(f)).collect();
    let mut g = TrackGraph::from_sides(vec![[left, right]], comp.clone(), vec![0; nf])?;
    let tf = g.faces_raw();
    let mut k: BTreeMap<usize, i64> = BTreeMap::new();
    for cyc in &tf.cycles {
        if cyc.iter().any(|&c| comp[c] != comp[cyc[0]]) {
            return Err(TrackError::EmbeddingMismatch);
        }
        *k.entry(comp[cyc[0]]).or_default() += 1;
    }
    let mut genus = vec![0u32; nf];
    for (&c, &kc) in &k {
        let twice = 2 - kc - chi[&c];
        if twice < 0 || twice % 2 != 0 {
            return Err(TrackError::EmbeddingMismatch);
        }
        genus[c] = (twice / 2) as u32;
    }
    g.corner_region = comp;
    g.region_genus = genus;
    g.compact_regions();
    if g.euler() != 2 - 2 * cp.genus() as i64 {
        return Err(TrackError::EmbeddingMismatch);
    }
    let mut p = PreTrack::new(g)?;
    p.labels = along_b.iter().map(|&v| cp.ids[v]).collect();
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collapse {
    pub track: TrainTrack,
    /// Pre-track branches onto track paths.
    pub merge: RouteMap,
    /// For each track branch, the pre-track branch it continues.
    pub kept: Vec<usize>,
}

/// Collapses bigon faces, first face first, until none remain. A side of the bigon that
/// is a single branch is pushed across the bigon onto the other side, which may run
/// through the smooth corners of the switch; with two single-branch sides the larger
/// index goes.
pub fn bigon_collapse(p: &PreTrack) -> Result<Collapse> {
    let mut g = p.graph.clone();
    let mut merge = RouteMap::identity(&g);
    let mut kept: Vec<usize> = (0..g.branch_count()).collect();
    loop {
        let faces = g.faces();
        let Some((drop_dart, other)) = faces.iter().filter(|f| f.disc && f.cusps == 2).find_map(|f| bigon_sides(&g, &f.corners)) else {
            break;
        };
        let drop = drop_dart / 2;
        let renum = |b: usize| if b > drop { b - 1 } else { b };
        let end_map = |d: usize| 2 * renum(d / 2) + d % 2;
        // the other side runs back against the dropped branch
        let mut path: Vec<Dir> = other.iter().rev().map(|&d| (renum(d / 2), d % 2 == 1)).collect();
        if drop_dart % 2 == 1 {
            path = path.into_iter().rev().map(|(b, f)| (b, !f)).collect();
        }
        let sides: Vec<[Vec<usize>; 2]> = g
            .sides
            .iter()
            .map(|sw| [0, 1].map(|k| sw[k].iter().filter(|&&d| d / 2 != drop).map(|&d| end_map(d)).collect()))
            .collect();
        let nb = g.branch_count() - 1;
        // the kept side now borders the face beyond the dropped branch
        let origin = |d: usize| {
            let old = if d / 2 >= drop { d + 2 } else { d };
            Some(if other.contains(&old) { drop_dart ^ 1 } else { old })
        };
        let next = rebuild(&g, sides, 2 * nb, &origin, &[], &[])?;
        let step = RouteMap {
            switch_map: (0..g.switch_count()).map(|s| (s, false)).collect(),
            branch_paths: (0..=nb).map(|b| if b == drop { path.clone() } else { vec![(renum(b), true)] }).collect(),
        };
        merge = super::carry::compose(&merge, &step);
        kept.remove(drop);
        g = next;
    }
    match validate_graph(g) {
        Ok(track) => Ok(Collapse { track, merge, kept }),
        Err(e) => Err(TrackError::CollapseFailed(e.to_string())),
    }
}

/// Splits a two-cusp face at its cusps. Returns the traversal of a side that is a single
/// branch, and the traversals of the other side in boundary order.
fn bigon_sides(g: &TrackGraph, corners: &[usize]) -> Option<(usize, Vec<usize>)> {
    let k = corners.iter().position(|&c| g.is_cusp(c))?;
    let mut sides: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    let mut side = 0;
    for i in 0..corners.len() {
        let c = corners[(k + i) % corners.len()];
        if i > 0 && g.is_cusp(c) {
            side = 1;
        }
        sides[side].push(g.rot_next(c));
    }
    let [s0, s1] = sides;
    if s0.iter().any(|&d| s1.contains(&(d ^ 1))) {
        return None;
    }
    match (s0.len(), s1.len()) {
        (1, 1) => Some(if s0[0] / 2 > s1[0] / 2 { (s0[0], s1) } else { (s1[0], s0) }),
        (1, _) => Some((s0[0], s1)),
        (_, 1) => Some((s1[0], s0)),
        _ => None,
    }
}

/// True iff the curve meets the track once, transversely at a switch, with no bigon.
pub fn is_switch_dual(c: &TrackCurve, t: &TrackGraph) -> Result<bool> {
    let crossings = match c {
        TrackCurve::Carried(_) => return Ok(false),
        TrackCurve::Transverse(x) => x,
    };
    let [Crossing::Switch { switch, corner }] = crossings.as_slice() else { return Ok(false) };
    let (s, c0) = (*switch, *corner);
    if s >= t.switch_count() || c0 >= 2 * t.branch_count() || t.port(c0).switch != s {
        return Err(TrackError::EmbeddingMismatch);
    }
    let smooth = t.smooth_corners(s);
    if !smooth.contains(&c0) {
        return Ok(false);
    }
    let c1 = if smooth[0] == c0 { smooth[1] } else { smooth[0] };
    let walk = |from: usize, to: usize| -> Option<Vec<usize>> {
        let mut path = Vec::new();
        let mut c = from;
        loop {
            let d = t.rot_next(c);
            path.push(d);
            c = d ^ 1;
            if c == to {
                return Some(path);
            }
            if c == from {
                return None;
            }
        }
    };
    let Some(p) = walk(c0, c1) else { return Ok(false) };
    if bigon_side(t, &p) {
        return Ok(false);
    }
    let faces = t.faces();
    let face = faces.iter().find(|f| f.corners.contains(&c0)).unwrap();
    if face.disc {
        let q = walk(c1, c0).expect("same face");
        if bigon_side(t, &q) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A boundary path between the two crossing corners closes into a smooth arc through the
/// crossing when it has no cusps and leaves and re-enters on opposite sides.
fn bigon_side(t: &TrackGraph, path: &[usize]) -> bool {
    let inner_cusp = path[..path.len() - 1].iter().any(|&d| t.is_cusp(d ^ 1));
    let first = t.port(path[0]).side;
    let last = t.port(path[path.len() - 1] ^ 1).side;
    !inner_cusp && first != last
}

/// One nested bicorn with its pre-track, collapsed track and the bicorn as a curve.
#[derive(Clone, Debug)]
pub struct BicornTrack {
    pub pre: PreTrack,
    pub collapse: Collapse,
    pub dual: TrackCurve,
}

fn bicorn_curve(col: &Collapse, pre: &PreTrack, b_start: u32) -> TrackCurve {
    let t = &col.track;
    let j = pre.labels.iter().position(|&l| l == b_start).unwrap_or(0);
    let (k, o) = col.merge.branch_paths[j][0];
    let leave = |(b, f): Dir| if f { 2 * b } else { 2 * b + 1 };
    let smooth = t.smooth_corners(0);
    let pick = [(k, o), (k, !o)]
        .into_iter()
        .map(leave)
        .find(|&d| smooth.contains(&t.rot_prev(d)) && smooth.contains(&(d ^ 1)))
        .unwrap_or(leave((k, o)));
    TrackCurve::Transverse(vec![Crossing::Switch { switch: 0, corner: t.rot_prev(pick) }])
}

pub fn bicorn_tracks(cp: &CurvePair, nb: &NestedBicorns) -> Result<Vec<BicornTrack>> {
    nb.steps
        .iter()
        .map(|step| {
            let pre = pretrack_from_bicorn(cp, &step.bicorn.a_arc)?;
            let collapse = bigon_collapse(&pre)?;
            let dual = bicorn_curve(&collapse, &pre, step.bicorn.b_arc.start);
            Ok(BicornTrack { pre, collapse, dual })
        })
        .collect()
}

/// The natural map from the track of a later bicorn into the track of an earlier one:
/// each arc of `b` between points of the shorter arc runs over the arcs between points
/// of the longer one.
pub fn nested_route_map(inner: &BicornTrack, outer: &BicornTrack) -> Result<RouteMap> {
    let out_labels = &outer.pre.labels;
    let m = out_labels.len();
    let index: BTreeMap<u32, usize> = out_labels.iter().enumerate().map(|(j, &l)| (l, j)).collect();
    let in_labels = &inner.pre.labels;
    let mut pre_paths = Vec::new();
    for (j, &p) in in_labels.iter().enumerate() {
        let q = in_labels[(j + 1) % in_labels.len()];
        let mut cur = *index.get(&p).ok_or(TrackError::BrokenRoute(j))?;
        let mut path = vec![(cur, true)];
        cur = (cur + 1) % m;
        while out_labels[cur] != q {
            path.push((cur, true));
            cur = (cur + 1) % m;
            if path.len() > m {
                return Err(TrackError::BrokenRoute(j));
            }
        }
        pre_paths.push(path);
    }
    let pre_map = RouteMap { switch_map: vec![(0, false)], branch_paths: pre_paths };
    let into_outer = super::carry::compose(&pre_map, &outer.collapse.merge);
    Ok(RouteMap {
        switch_map: vec![(0, false)],
        branch_paths: inner.collapse.kept.iter().map(|&b| into_outer.branch_paths[b].clone()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub recurrent: bool,
    /// `None` when no dual curves were supplied.
    pub transversely_recurrent: Option<bool>,
    pub large: bool,
    pub filling: bool,
}

pub fn recurrence_report(t: &TrainTrack, duals: &[TrackCurve]) -> Result<RecurrenceReport> {
    let cycles = vertex_cycles(t)?;
    let nb = t.branch_count();
    let mut total = vec![Q::zero(); nb];
    for c in &cycles {
        for b in 0..nb {
            total[b] += c.weights[b];
        }
    }
    let support: Vec<bool> = total.iter().map(|x| !x.is_zero()).collect();
    let recurrent = support.iter().all(|&s| s);
    let transversely_recurrent = if duals.is_empty() {
        None
    } else {
        let mut hit = vec![false; nb];
        for d in duals {
            if let TrackCurve::Transverse(xs) = d {
                for x in xs {
                    if let Crossing::Branch { branch } = x {
                        if *branch < nb {
                            hit[*branch] = true;
                        }
                    }
                }
            }
        }
        Some(hit.iter().all(|&h| h))
    };
    let large = t.faces().iter().all(|f| f.disc);
    let filling = support.iter().any(|&s| s) && restricted_all_discs(t, &support)?;
    Ok(RecurrenceReport { recurrent, transversely_recurrent, large, filling })
}

/// Whether every complementary region of the branches in `support` is a disc.
fn restricted_all_discs(t: &TrackGraph, support: &[bool]) -> Result<bool> {
    let nb = t.branch_count();
    let renum: Vec<usize> = support.iter().scan(0, |n, &s| {
        let r = *n;
        if s {
            *n += 1;
        }
        Some(r)
    }).collect();
    let keep_count = support.iter().filter(|&&s| s).count();
    let sides: Vec<[Vec<usize>; 2]> = t
        .sides
        .iter()
        .map(|sw| [0, 1].map(|k| sw[k].iter().filter(|&&d| support[d / 2]).map(|&d| 2 * renum[d / 2] + d % 2).collect()))
        .collect();
    let back: Vec<usize> = (0..nb).filter(|&b| support[b]).collect();
    let origin = |d: usize| Some(2 * back[d / 2] + d % 2);
    let mut joins = Vec::new();
    let mut chi = Vec::new();
    for b in (0..nb).filter(|&b| !support[b]) {
        joins.push((t.rot_prev(2 * b), t.rot_prev(2 * b + 1)));
        chi.push((t.rot_prev(2 * b), -1));
    }
    for s in 0..t.switch_count() {
        let ends: Vec<usize> = t.sides[s].iter().flatten().copied().collect();
        if ends.iter().all(|&d| !support[d / 2]) {
            chi.push((ends[0], 1));
        }
    }
    let live: Vec<[Vec<usize>; 2]> = sides.into_iter().filter(|sw| !sw[0].is_empty() || !sw[1].is_empty()).collect();
    let g = rebuild(t, live, 2 * keep_count, &origin, &joins, &chi)?;
    Ok(g.faces().iter().all(|f| f.disc))
}

/// Pre-track, collapse and carrying data along a nested bicorn sequence.
pub fn pipeline_ok(cp: &CurvePair, nb: &NestedBicorns) -> std::result::Result<(), String> {
    let tracks = bicorn_tracks(cp, nb).map_err(|e| e.to_string())?;
    for (i, bt) in tracks.iter().enumerate() {
        if bt.collapse.track.switch_count() != 1 {
            return Err(format!("track {i} has {} switches", bt.collapse.track.switch_count()));
        }
        if !is_switch_dual(&bt.dual, &bt.collapse.track).map_err(|e| e.to_string())? {
            return Err(format!("bicorn {i} is not switch dual"));
        }
    }
    for i in 0..tracks.len().saturating_sub(1) {
        let m = nested_route_map(&tracks[i + 1], &tracks[i]).map_err(|e| e.to_string())?;
        if !super::verify_carrying(&tracks[i + 1].collapse.track, &tracks[i].collapse.track, &m).map_err(|e| e.to_string())? {
            return Err(format!("track {} is not carried by track {i}", i + 1));
        }
    }
    Ok(())
}
