//! Pairs of simple closed curves in minimal position, encoded as 4-valent ribbon graphs.
//!
//! Every intersection point carries a sign: `+1` when the counterclockwise rotation
//! reads `a+ b+ a- b-` (the outgoing end of `b` lies to the left of `a`), `-1` when it
//! reads `a+ b- a- b+`.

mod bicorn;
mod build;
mod pairing;
mod surgery;

pub use bicorn::{nested_bicorn_sequence, BicornStep, NestedBicorns};
pub use build::{build_curve_pair, RawCurvePair, RawRegion};
pub use pairing::{casson_long_pairing, casson_long_pairing_bounded, is_unlinked, PairingResult, DEFAULT_PAIRING_BOUND};
pub use surgery::{
    arc_surgery, curve_surgery_sequence, default_strategy, general_arc_surgery, reduce_to_minimal_position,
    returning_arcs,
    ArcChoice, SurgeryChoice, SurgeryRecord, SurgerySequence,
};

use crate::surface::SurfaceMap;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("vertex {vertex}: rotation {rotation:?} does not alternate a, b, a, b")]
    NonAlternatingRotation { vertex: u32, rotation: Vec<String> },
    #[error("curve {curve} does not visit vertex {vertex} exactly once")]
    DisconnectedCurve { curve: char, vertex: u32 },
    #[error("unknown or repeated vertex {0}")]
    UnknownVertex(u32),
    #[error("face {face} is a bigon")]
    BigonPresent { face: usize },
    #[error("Euler characteristic {computed} does not match genus {genus}")]
    EulerMismatch { genus: u32, computed: i64 },
    #[error("resmoothing near vertices {0} and {1} breaks the rotation alternation")]
    NonOrientableSmoothing(u32, u32),
    #[error("the curves do not intersect")]
    NoIntersections,
    #[error("arc from {start} to {end} is not a returning arc")]
    NotReturning { start: u32, end: u32 },
    #[error("the surgery curve bounds a disc")]
    InessentialResult,
    #[error("strategy returned no arc with {0} intersections left")]
    StrategyStuck(usize),
    #[error("odd number of intersections ({0})")]
    OddIntersection(usize),
    #[error("{0} intersections exceed the search bound {1}")]
    TooLarge(usize, usize),
    #[error("every complementary region is a rectangle")]
    NoNonRectangularFace,
    #[error("no returning arc for bicorn {0}")]
    NoReturningArcForBicorn(usize),
    #[error("invalid region declaration: {0}")]
    BadRegions(String),
}

pub type Result<T> = std::result::Result<T, CurveError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Curve {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A subarc of one curve between two intersection points, traversed forward or
/// backward along the curve; `interior` lists the intersection points strictly inside.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subarc {
    pub curve: Curve,
    pub start: u32,
    pub end: u32,
    pub forward: bool,
    pub interior: Vec<u32>,
}

impl Subarc {
    pub fn is_innermost(&self) -> bool {
        self.interior.is_empty()
    }

    /// All intersection points on the arc, endpoints included, in traversal order.
    pub fn points(&self) -> Vec<u32> {
        let mut v = vec![self.start];
        v.extend(&self.interior);
        v.push(self.end);
        v
    }
}

/// A simple closed curve made of one subarc of `a` and one subarc of `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bicorn {
    pub a_arc: Subarc,
    pub b_arc: Subarc,
}

/// A perfect matching on the intersection points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub matching: Vec<(u32, u32)>,
}

/// Slot of a dart in the per-vertex numbering `4v + k`.
pub(crate) const A_OUT: usize = 0;
pub(crate) const B_OUT: usize = 1;
pub(crate) const A_IN: usize = 2;
pub(crate) const B_IN: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaceClass {
    Bigon,
    Rectangle,
    NonRectangle,
}

/// One edge of a face boundary: an innermost subarc named by curve and index along it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRef {
    pub curve: Curve,
    pub index: usize,
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.curve {
            Curve::A => 'a',
            Curve::B => 'b',
        };
        write!(f, "{c}{}", self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceInfo {
    pub id: usize,
    pub boundary: Vec<EdgeRef>,
    pub class: FaceClass,
    pub region: usize,
    pub region_genus: u32,
    pub disc: bool,
}

/// A validated pair of curves. Vertex ids are kept sorted; `a_cycle`/`b_cycle` hold
/// vertex indices and start at the smallest id.
#[derive(Clone, Debug)]
pub struct CurvePair {
    pub(crate) ids: Vec<u32>,
    pub(crate) a_cycle: Vec<usize>,
    pub(crate) b_cycle: Vec<usize>,
    pub(crate) a_pos: Vec<usize>,
    pub(crate) b_pos: Vec<usize>,
    pub(crate) sign: Vec<i8>,
    pub(crate) genus: u32,
    pub(crate) map: SurfaceMap,
    pub(crate) minimal: bool,
}

impl CurvePair {
    pub fn intersection_number(&self) -> usize {
        self.ids.len()
    }
    pub fn genus(&self) -> u32 {
        self.genus
    }
    pub fn ids(&self) -> &[u32] {
        &self.ids
    }
    pub fn is_minimal(&self) -> bool {
        self.minimal
    }
    pub fn a_order(&self) -> Vec<u32> {
        self.a_cycle.iter().map(|&v| self.ids[v]).collect()
    }
    pub fn b_order(&self) -> Vec<u32> {
        self.b_cycle.iter().map(|&v| self.ids[v]).collect()
    }
    pub fn sign_of(&self, id: u32) -> Option<i8> {
        self.index_of(id).map(|v| self.sign[v])
    }
    pub fn algebraic_intersection(&self) -> i64 {
        self.sign.iter().map(|&s| s as i64).sum()
    }
    pub(crate) fn index_of(&self, id: u32) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }
    pub(crate) fn n(&self) -> usize {
        self.ids.len()
    }
    pub(crate) fn next_a(&self, v: usize) -> usize {
        self.a_cycle[(self.a_pos[v] + 1) % self.n()]
    }
    pub(crate) fn prev_a(&self, v: usize) -> usize {
        self.a_cycle[(self.a_pos[v] + self.n() - 1) % self.n()]
    }
    pub(crate) fn next_b(&self, v: usize) -> usize {
        self.b_cycle[(self.b_pos[v] + 1) % self.n()]
    }

    /// Side of `a` on which the outgoing end of `b` leaves vertex `v`.
    pub(crate) fn b_out_side(&self, v: usize) -> Side {
        if self.sign[v] > 0 {
            Side::Left
        } else {
            Side::Right
        }
    }

    fn edge_of_dart(&self, d: usize) -> EdgeRef {
        let (v, slot) = (d / 4, d % 4);
        match slot {
            A_OUT => EdgeRef { curve: Curve::A, index: self.a_pos[v] },
            A_IN => EdgeRef { curve: Curve::A, index: self.a_pos[self.prev_a(v)] },
            B_OUT => EdgeRef { curve: Curve::B, index: self.b_pos[v] },
            _ => EdgeRef { curve: Curve::B, index: (self.b_pos[v] + self.n() - 1) % self.n() },
        }
    }

    /// Face census: boundary words, classes and regions.
    pub fn faces(&self) -> Vec<FaceInfo> {
        if self.n() == 0 {
            return (0..2)
                .map(|i| FaceInfo {
                    id: i,
                    boundary: vec![EdgeRef { curve: if i == 0 { Curve::A } else { Curve::B }, index: 0 }],
                    class: FaceClass::NonRectangle,
                    region: i,
                    region_genus: 0,
                    disc: false,
                })
                .collect();
        }
        let faces = self.map.faces();
        let regions = self.map.regions(&faces);
        let mut rindex = std::collections::BTreeMap::new();
        for (i, (r, _)) in regions.iter().enumerate() {
            rindex.insert(*r, i);
        }
        faces
            .cycles
            .iter()
            .enumerate()
            .map(|(f, cyc)| {
                let disc = self.map.face_is_disc(&faces, f);
                let class = match (disc, cyc.len()) {
                    (true, 2) => FaceClass::Bigon,
                    (true, 4) => FaceClass::Rectangle,
                    _ => FaceClass::NonRectangle,
                };
                let r = self.map.region_of(cyc[0]);
                FaceInfo {
                    id: f,
                    boundary: cyc.iter().map(|&c| self.edge_of_dart(self.map.next(c))).collect(),
                    class,
                    region: rindex[&r],
                    region_genus: self.map.region_genus(r),
                    disc,
                }
            })
            .collect()
    }

    /// Graphviz rendering of the 4-valent graph, `a` edges red and `b` edges blue.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph curvepair {\n  node [shape=circle];\n");
        for &id in &self.ids {
            s.push_str(&format!("  v{id};\n"));
        }
        for (curve, cyc, color) in [("a", &self.a_cycle, "red"), ("b", &self.b_cycle, "blue")] {
            for j in 0..cyc.len() {
                let (u, w) = (self.ids[cyc[j]], self.ids[cyc[(j + 1) % cyc.len()]]);
                s.push_str(&format!("  v{u} -- v{w} [color={color}, label=\"{curve}{j}\"];\n"));
            }
        }
        s.push_str("}\n");
        s
    }
}


impl CurvePair {
    pub(crate) fn disjoint(genus: u32) -> CurvePair {
        CurvePair {
            ids: vec![],
            a_cycle: vec![],
            b_cycle: vec![],
            a_pos: vec![],
            b_pos: vec![],
            sign: vec![],
            genus,
            map: SurfaceMap::new(),
            minimal: true,
        }
    }

    pub(crate) fn prev_b(&self, v: usize) -> usize {
        self.b_cycle[(self.b_pos[v] + self.n() - 1) % self.n()]
    }

    /// Vertex indices strictly inside the subarc of `a` from `u` to `w`.
    pub(crate) fn a_interior(&self, u: usize, w: usize, forward: bool) -> Vec<usize> {
        let mut out = Vec::new();
        let mut v = if forward { self.next_a(u) } else { self.prev_a(u) };
        while v != w {
            out.push(v);
            v = if forward { self.next_a(v) } else { self.prev_a(v) };
        }
        out
    }

    /// True when curve `a` is separating and one side is a disc.
    pub(crate) fn a_bounds_disc(&self) -> bool {
        if self.n() == 0 {
            return false;
        }
        let faces = self.map.faces();
        let nf = faces.cycles.len();
        let mut dsu = crate::dsu::Dsu::new(nf);
        for v in 0..self.n() {
            let d = 4 * v + B_OUT;
            dsu.union(faces.of[d], faces.of[self.map.prev(d)]);
        }
        let regions = self.map.regions(&faces);
        for (_, fs) in &regions {
            for f in fs {
                dsu.union(fs[0], *f);
            }
        }
        let d0 = A_OUT;
        let (s1, s2) = (dsu.find(faces.of[d0]), dsu.find(faces.of[self.map.prev(d0)]));
        if s1 == s2 {
            return false;
        }
        let mut chi = [0i64; 2];
        let side = |dsu: &mut crate::dsu::Dsu, f: usize| if dsu.find(f) == s1 { 0 } else { 1 };
        for v in 0..self.n() {
            let k = side(&mut dsu, faces.of[4 * v + B_OUT]);
            chi[k] -= 1;
        }
        for (r, fs) in &regions {
            let k = side(&mut dsu, fs[0]);
            chi[k] += 2 - 2 * self.map.region_genus(*r) as i64 - fs.len() as i64;
        }
        chi.contains(&1)
    }
}

impl CurvePair {
    /// True when cutting along the curve disconnects the surface.
    pub fn separates(&self, curve: Curve) -> bool {
        if self.n() == 0 {
            return false;
        }
        let (own, other) = match curve {
            Curve::A => (A_OUT, B_OUT),
            Curve::B => (B_OUT, A_OUT),
        };
        let faces = self.map.faces();
        let mut dsu = crate::dsu::Dsu::new(faces.cycles.len());
        for v in 0..self.n() {
            let d = 4 * v + other;
            dsu.union(faces.of[d], faces.of[self.map.prev(d)]);
        }
        for (_, fs) in self.map.regions(&faces) {
            for f in &fs {
                dsu.union(fs[0], *f);
            }
        }
        let d = own;
        dsu.find(faces.of[d]) != dsu.find(faces.of[self.map.prev(d)])
    }
}
