//! Combinatorial train tracks on closed oriented surfaces.
//!
//! A switch has two sides, each holding branch ends in counterclockwise order; the full
//! rotation at a switch is side 0 followed by side 1. Ends are numbered `2 * branch + k`
//! with `k = 0` the start of the branch. The complement is recorded per corner: the
//! corner after end `d` (between `d` and its counterclockwise successor) lies in region
//! `corner_region[d]`, and every region carries a genus.

mod carry;
mod moves;
mod pipeline;
mod weights;

pub use carry::{compose, find_carrying, verify_carrying, Dir, RouteMap, SearchOutcome, DEFAULT_SEARCH_DEPTH};
pub use moves::{shift, split, SplitChoice};
pub use pipeline::{
    bicorn_tracks, bigon_collapse, is_switch_dual, nested_route_map, pretrack_from_bicorn, recurrence_report,
    pipeline_ok, BicornTrack, Collapse, Crossing, RecurrenceReport, TrackCurve,
};
pub use weights::{check_switch_equality, multicurve_components, push_forward, vertex_cycles, WeightVector};

use crate::curvepair::RawRegion;
use crate::dsu::Dsu;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TrackError {
    #[error("malformed track: {0}")]
    Malformed(String),
    #[error("switch {0} has valence two")]
    ValenceTwoSwitch(usize),
    #[error("switch {0} has an empty side")]
    EmptySide(usize),
    #[error("face {face} is a monogon")]
    MonogonFace { face: usize },
    #[error("face {face} is a bigon")]
    BigonFace { face: usize },
    #[error("face {face} is a disc without cusps")]
    NullgonFace { face: usize },
    #[error("Euler characteristic {0} does not come from a closed oriented surface")]
    EulerMismatch(i64),
    #[error("no weight for branch {0}")]
    MissingBranchWeight(usize),
    #[error("branch {0} is not large")]
    NotLargeBranch(usize),
    #[error("move produced an invalid track: {0}")]
    InvalidResult(String),
    #[error("branch {0} does not sit in a shift configuration")]
    PatternMismatch(usize),
    #[error("route of branch {0} is broken")]
    BrokenRoute(usize),
    #[error("subarc has no intersection points")]
    EmptyArc,
    #[error("bigon collapse failed: {0}")]
    CollapseFailed(String),
    #[error("curve does not match the track embedding")]
    EmbeddingMismatch,
    #[error("{0} branches exceed the enumeration bound {1}")]
    TooLarge(usize, usize),
}

pub type Result<T> = std::result::Result<T, TrackError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrackSide {
    Left,
    Right,
}

impl TrackSide {
    pub fn index(self) -> usize {
        match self {
            TrackSide::Left => 0,
            TrackSide::Right => 1,
        }
    }
    pub fn from_index(k: usize) -> TrackSide {
        if k == 0 {
            TrackSide::Left
        } else {
            TrackSide::Right
        }
    }
}

/// Where a branch end sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Port {
    pub switch: usize,
    pub side: TrackSide,
    pub pos: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawBranch {
    pub from: Port,
    pub to: Port,
}

/// File form of a track. Regions name faces in tracing order; unnamed faces are discs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTrack {
    pub switches: usize,
    pub branches: Vec<RawBranch>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<RawRegion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<crate::Q>>,
}

/// One complementary face: its corners in boundary order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackFace {
    pub id: usize,
    /// Corner ids; corner `d` follows end `d` counterclockwise.
    pub corners: Vec<usize>,
    pub cusps: usize,
    pub region: usize,
    pub region_genus: u32,
    pub disc: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Faces {
    pub of: Vec<usize>,
    pub cycles: Vec<Vec<usize>>,
}

/// Ribbon structure shared by pre-tracks and tracks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackGraph {
    pub(crate) sides: Vec<[Vec<usize>; 2]>,
    pub(crate) port: Vec<Port>,
    pub(crate) corner_region: Vec<usize>,
    pub(crate) region_genus: Vec<u32>,
}

impl TrackGraph {
    /// Assembles a graph from side lists; ports are derived. Regions are renumbered in
    /// order of first use.
    pub(crate) fn from_sides(sides: Vec<[Vec<usize>; 2]>, corner_region: Vec<usize>, region_genus: Vec<u32>) -> Result<TrackGraph> {
        let nd = corner_region.len();
        if nd % 2 == 1 {
            return Err(TrackError::Malformed("odd number of ends".into()));
        }
        let unset = Port { switch: usize::MAX, side: TrackSide::Left, pos: 0 };
        let mut port = vec![unset; nd];
        for (s, sw) in sides.iter().enumerate() {
            for (k, list) in sw.iter().enumerate() {
                for (pos, &d) in list.iter().enumerate() {
                    if d >= nd || port[d].switch != usize::MAX {
                        return Err(TrackError::Malformed(format!("end {d} is placed twice or out of range")));
                    }
                    port[d] = Port { switch: s, side: TrackSide::from_index(k), pos };
                }
            }
        }
        if let Some(d) = port.iter().position(|p| p.switch == usize::MAX) {
            return Err(TrackError::Malformed(format!("end {d} is not attached")));
        }
        let mut g = TrackGraph { sides, port, corner_region, region_genus };
        g.compact_regions();
        Ok(g)
    }

    fn compact_regions(&mut self) {
        let mut map = BTreeMap::new();
        let mut genus = Vec::new();
        for r in self.corner_region.iter_mut() {
            let next = map.len();
            let id = *map.entry(*r).or_insert_with(|| {
                genus.push(self.region_genus[*r]);
                next
            });
            *r = id;
        }
        self.region_genus = genus;
    }

    pub fn switch_count(&self) -> usize {
        self.sides.len()
    }
    pub fn branch_count(&self) -> usize {
        self.port.len() / 2
    }
    pub fn port(&self, end: usize) -> Port {
        self.port[end]
    }
    /// Ends on one side of a switch, counterclockwise.
    pub fn side(&self, switch: usize, side: TrackSide) -> &[usize] {
        &self.sides[switch][side.index()]
    }
    pub fn valence(&self, s: usize) -> usize {
        self.sides[s][0].len() + self.sides[s][1].len()
    }

    /// Counterclockwise successor of an end around its switch.
    pub(crate) fn rot_next(&self, d: usize) -> usize {
        let p = self.port[d];
        let [l, r] = &self.sides[p.switch];
        let (own, other) = if p.side == TrackSide::Left { (l, r) } else { (r, l) };
        if p.pos + 1 < own.len() {
            own[p.pos + 1]
        } else if !other.is_empty() {
            other[0]
        } else {
            own[0]
        }
    }

    pub(crate) fn rot_prev(&self, d: usize) -> usize {
        let p = self.port[d];
        let [l, r] = &self.sides[p.switch];
        let (own, other) = if p.side == TrackSide::Left { (l, r) } else { (r, l) };
        if p.pos > 0 {
            own[p.pos - 1]
        } else if !other.is_empty() {
            other[other.len() - 1]
        } else {
            own[own.len() - 1]
        }
    }

    /// The corner after `d` lies between two ends on the same side.
    pub fn is_cusp(&self, d: usize) -> bool {
        let e = self.rot_next(d);
        e != d && self.port[e].side == self.port[d].side && self.port[e].pos == self.port[d].pos + 1
    }

    /// Corners after which the rotation passes from one side to the other.
    pub fn smooth_corners(&self, s: usize) -> [usize; 2] {
        let [l, r] = &self.sides[s];
        [*l.last().unwrap(), *r.last().unwrap()]
    }

    pub(crate) fn faces_raw(&self) -> Faces {
        let nd = self.port.len();
        let mut of = vec![usize::MAX; nd];
        let mut cycles = Vec::new();
        for start in 0..nd {
            if of[start] != usize::MAX {
                continue;
            }
            let f = cycles.len();
            let mut cyc = Vec::new();
            let mut c = start;
            while of[c] == usize::MAX {
                of[c] = f;
                cyc.push(c);
                c = self.rot_next(c) ^ 1;
            }
            cycles.push(cyc);
        }
        Faces { of, cycles }
    }

    /// Face census with cusp counts and region data.
    pub fn faces(&self) -> Vec<TrackFace> {
        let faces = self.faces_raw();
        let mut per_region = vec![0usize; self.region_genus.len()];
        for cyc in &faces.cycles {
            per_region[self.corner_region[cyc[0]]] += 1;
        }
        faces
            .cycles
            .iter()
            .enumerate()
            .map(|(f, cyc)| {
                let r = self.corner_region[cyc[0]];
                TrackFace {
                    id: f,
                    corners: cyc.clone(),
                    cusps: cyc.iter().filter(|&&c| self.is_cusp(c)).count(),
                    region: r,
                    region_genus: self.region_genus[r],
                    disc: per_region[r] == 1 && self.region_genus[r] == 0,
                }
            })
            .collect()
    }

    /// `V - E + sum chi(R)` over the regions.
    pub fn euler(&self) -> i64 {
        let faces = self.faces_raw();
        let mut k = vec![0i64; self.region_genus.len()];
        for cyc in &faces.cycles {
            k[self.corner_region[cyc[0]]] += 1;
        }
        let regions: i64 = self.region_genus.iter().zip(&k).map(|(&g, &k)| 2 - 2 * g as i64 - k).sum();
        self.switch_count() as i64 - self.branch_count() as i64 + regions
    }

    pub fn genus(&self) -> u32 {
        ((2 - self.euler()) / 2) as u32
    }

    fn connected(&self) -> bool {
        let n = self.switch_count();
        if n == 0 {
            return false;
        }
        let mut dsu = Dsu::new(n);
        for b in 0..self.branch_count() {
            dsu.union(self.port[2 * b].switch, self.port[2 * b + 1].switch);
        }
        (0..n).all(|s| dsu.find(s) == dsu.find(0))
    }

    /// Structural checks shared by pre-tracks and tracks.
    pub(crate) fn check_structure(&self) -> Result<()> {
        for s in 0..self.switch_count() {
            if self.sides[s][0].is_empty() || self.sides[s][1].is_empty() {
                return Err(TrackError::EmptySide(s));
            }
        }
        for s in 0..self.switch_count() {
            if self.valence(s) == 2 {
                return Err(TrackError::ValenceTwoSwitch(s));
            }
        }
        if !self.connected() {
            return Err(TrackError::Malformed("track is disconnected".into()));
        }
        let faces = self.faces_raw();
        for cyc in &faces.cycles {
            if cyc.iter().any(|&c| self.corner_region[c] != self.corner_region[cyc[0]]) {
                return Err(TrackError::Malformed("regions disagree along a face".into()));
            }
        }
        let chi = self.euler();
        if chi > 2 || chi % 2 != 0 {
            return Err(TrackError::EulerMismatch(chi));
        }
        Ok(())
    }

    /// First disc face that is a nullgon, monogon or bigon.
    pub(crate) fn bad_face(&self) -> Option<TrackError> {
        self.faces().into_iter().filter(|f| f.disc).find_map(|f| match f.cusps {
            0 => Some(TrackError::NullgonFace { face: f.id }),
            1 => Some(TrackError::MonogonFace { face: f.id }),
            2 => Some(TrackError::BigonFace { face: f.id }),
            _ => None,
        })
    }

    pub fn from_raw(raw: &RawTrack) -> Result<TrackGraph> {
        let nb = raw.branches.len();
        let mut slots: Vec<[BTreeMap<usize, usize>; 2]> = vec![Default::default(); raw.switches];
        for (b, br) in raw.branches.iter().enumerate() {
            for (k, p) in [br.from, br.to].into_iter().enumerate() {
                if p.switch >= raw.switches {
                    return Err(TrackError::Malformed(format!("branch {b} names switch {}", p.switch)));
                }
                if slots[p.switch][p.side.index()].insert(p.pos, 2 * b + k).is_some() {
                    return Err(TrackError::Malformed(format!("position {} used twice at switch {}", p.pos, p.switch)));
                }
            }
        }
        let sides: Vec<[Vec<usize>; 2]> = slots
            .into_iter()
            .map(|[l, r]| [l.into_values().collect(), r.into_values().collect()])
            .collect();
        let mut g = TrackGraph::from_sides(sides, vec![0; 2 * nb], vec![0])?;
        let faces = g.faces_raw();
        let nf = faces.cycles.len();
        let mut face_region: Vec<usize> = (0..nf).collect();
        let mut genus = vec![0u32; nf];
        let mut used = vec![false; nf];
        for (i, reg) in raw.regions.iter().enumerate() {
            for &f in &reg.faces {
                if f >= nf || used[f] {
                    return Err(TrackError::Malformed(format!("region {i} names face {f}")));
                }
                used[f] = true;
                face_region[f] = nf + i;
            }
        }
        genus.extend(raw.regions.iter().map(|r| r.genus));
        g.corner_region = (0..2 * nb).map(|c| face_region[faces.of[c]]).collect();
        g.region_genus = genus;
        g.compact_regions();
        Ok(g)
    }

    pub fn to_raw(&self) -> RawTrack {
        let branches = (0..self.branch_count())
            .map(|b| RawBranch { from: self.port[2 * b], to: self.port[2 * b + 1] })
            .collect();
        let faces = self.faces();
        let mut by_region: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for f in &faces {
            by_region.entry(f.region).or_default().push(f.id);
        }
        let regions = by_region
            .into_iter()
            .filter(|(r, fs)| fs.len() > 1 || self.region_genus[*r] > 0)
            .map(|(r, faces)| RawRegion { faces, genus: self.region_genus[r] })
            .collect();
        RawTrack { switches: self.switch_count(), branches, regions, weights: None }
    }

    /// Graphviz rendering; ports are named `l<pos>` and `r<pos>` after the side.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph track {\n  node [shape=record];\n");
        for (i, [l, r]) in self.sides.iter().enumerate() {
            let lp: Vec<String> = (0..l.len()).map(|p| format!("<l{p}>")).collect();
            let rp: Vec<String> = (0..r.len()).map(|p| format!("<r{p}>")).collect();
            s.push_str(&format!("  s{i} [label=\"{{{}}}|s{i}|{{{}}}\"];\n", lp.join("|"), rp.join("|")));
        }
        let name = |p: Port| {
            let c = if p.side == TrackSide::Left { 'l' } else { 'r' };
            format!("s{}:{c}{}", p.switch, p.pos)
        };
        for b in 0..self.branch_count() {
            s.push_str(&format!("  {} -- {} [label=\"{b}\"];\n", name(self.port[2 * b]), name(self.port[2 * b + 1])));
        }
        s.push_str("}\n");
        s
    }

    /// Canonical code up to orientation-preserving isomorphism.
    pub fn canonical_code(&self) -> Vec<usize> {
        (0..self.switch_count())
            .flat_map(|s| [(s, 0), (s, 1)])
            .map(|(s, k)| self.code_from(s, k).0)
            .min()
            .unwrap_or_default()
    }

    /// Relabelling from a root: returns the code, the new switch order with the side
    /// taken as side 0, and the new branch order with orientation.
    pub(crate) fn code_from(&self, s0: usize, k0: usize) -> (Vec<usize>, Vec<(usize, usize)>, Vec<(usize, bool)>) {
        let ns = self.switch_count();
        let mut sw_id = vec![usize::MAX; ns];
        let mut sw_first = vec![0usize; ns];
        let mut order = vec![(s0, k0)];
        sw_id[s0] = 0;
        sw_first[s0] = k0;
        let mut br_id = vec![usize::MAX; self.branch_count()];
        let mut branches: Vec<(usize, bool)> = Vec::new();
        let mut code = Vec::new();
        let faces = self.faces_raw();
        let mut face_id = vec![usize::MAX; faces.cycles.len()];
        let mut region_id = BTreeMap::new();
        let mut i = 0;
        while i < order.len() {
            let (s, k) = order[i];
            code.push(usize::MAX);
            for side in [k, 1 - k] {
                code.push(self.sides[s][side].len());
                for &d in &self.sides[s][side] {
                    let b = d / 2;
                    if br_id[b] == usize::MAX {
                        br_id[b] = branches.len();
                        branches.push((b, d % 2 == 0));
                    }
                    let other = self.port[d ^ 1];
                    if sw_id[other.switch] == usize::MAX {
                        sw_id[other.switch] = order.len();
                        sw_first[other.switch] = other.side.index();
                        order.push((other.switch, other.side.index()));
                    }
                    let rel_side = usize::from(other.side.index() != sw_first[other.switch]);
                    let f = faces.of[d];
                    if face_id[f] == usize::MAX {
                        face_id[f] = face_id.iter().filter(|&&x| x != usize::MAX).count();
                    }
                    let r = self.corner_region[d];
                    let next = region_id.len();
                    let rid = *region_id.entry(r).or_insert(next);
                    code.extend([br_id[b], sw_id[other.switch], rel_side, other.pos, face_id[f], rid, self.region_genus[r] as usize]);
                }
            }
            i += 1;
        }
        (code, order, branches)
    }

    pub fn is_isomorphic(&self, other: &TrackGraph) -> bool {
        self.switch_count() == other.switch_count()
            && self.branch_count() == other.branch_count()
            && self.canonical_code() == other.canonical_code()
    }
}

/// A pre-track: switch sides are valid but bigons and monogons may remain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreTrack {
    pub graph: TrackGraph,
    pub single_switch: bool,
    /// For a pre-track built from a curve pair: the intersection point where each branch
    /// starts along `b`.
    pub labels: Vec<u32>,
}

impl PreTrack {
    pub fn new(graph: TrackGraph) -> Result<PreTrack> {
        for s in 0..graph.switch_count() {
            if graph.sides[s][0].is_empty() || graph.sides[s][1].is_empty() {
                return Err(TrackError::EmptySide(s));
            }
        }
        let single_switch = graph.switch_count() == 1;
        Ok(PreTrack { graph, single_switch, labels: Vec::new() })
    }
}

/// A validated train track.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainTrack {
    graph: TrackGraph,
}

impl std::ops::Deref for TrainTrack {
    type Target = TrackGraph;
    fn deref(&self) -> &TrackGraph {
        &self.graph
    }
}

impl TrainTrack {
    pub fn graph(&self) -> &TrackGraph {
        &self.graph
    }
    pub fn into_graph(self) -> TrackGraph {
        self.graph
    }
}

impl fmt::Display for TrainTrack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "track(switches={}, branches={}, genus={})", self.switch_count(), self.branch_count(), self.genus())
    }
}

pub fn validate_graph(graph: TrackGraph) -> Result<TrainTrack> {
    graph.check_structure()?;
    if let Some(e) = graph.bad_face() {
        return Err(e);
    }
    Ok(TrainTrack { graph })
}

pub fn validate_track(raw: &RawTrack) -> Result<TrainTrack> {
    validate_graph(TrackGraph::from_raw(raw)?)
}
