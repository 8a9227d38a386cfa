//! Finite metric graphs with half-integer edge lengths, coned-off subset families and
//! coarse diagnostics.
//!
//! Lengths are stored doubled, so a cone edge of length 1/2 is the integer 1 and every
//! distance computation is exact. Reported values are halved back into [`Q`].

mod dynamics;
mod paths;

pub use dynamics::{cutoff_sum, translation_length, GraphAutomorphism, TranslationReport};
pub use paths::{
    local_qg_check, piecewise_geodesic, quasigeodesic_constants, reparam_constants, reparam_qg_check,
    separation_report, PathRecord, QgConstants, SeparationReport,
};

use crate::Q;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoarseError {
    #[error("subset {0} is empty")]
    EmptySubset(String),
    #[error("vertices {0} and {1} are in different components")]
    Disconnected(usize, usize),
    #[error("sample budget is zero")]
    SampleBudgetZero,
    #[error("family has {0} sets, need at least {1}")]
    FamilyTooSmall(usize, usize),
    #[error("projection onto set {0} is empty")]
    EmptyProjection(usize),
    #[error("path has fewer than two vertices")]
    PathTooShort,
    #[error("orbit leaves the domain after {valid} steps")]
    OrbitEscapesDomain { valid: usize },
    #[error("entry {0} is negative")]
    NegativeEntry(usize),
    #[error("bad edge: {0}")]
    BadEdge(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
}

pub type Result<T> = std::result::Result<T, CoarseError>;

/// A doubled length as a rational.
pub fn half(x: u64) -> Q {
    Q::new(x as i64, 2)
}

/// Undirected graph with positive half-integer edge lengths, stored doubled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricGraph {
    names: Vec<String>,
    edges: Vec<(usize, usize, u64)>,
    adj: Vec<Vec<(usize, u64)>>,
}

impl MetricGraph {
    pub fn new(names: Vec<String>) -> MetricGraph {
        let adj = vec![Vec::new(); names.len()];
        MetricGraph { names, edges: Vec::new(), adj }
    }

    /// Vertices `v0..v{n-1}` joined by unit edges.
    pub fn unit(n: usize, edges: &[(usize, usize)]) -> MetricGraph {
        let mut g = MetricGraph::new((0..n).map(|i| format!("v{i}")).collect());
        for &(u, v) in edges {
            g.add_edge(u, v, 2).expect("unit edge");
        }
        g
    }

    pub fn add_vertex(&mut self, name: String) -> usize {
        self.names.push(name);
        self.adj.push(Vec::new());
        self.names.len() - 1
    }

    /// Adds an edge of doubled length `len2`.
    pub fn add_edge(&mut self, u: usize, v: usize, len2: u64) -> Result<()> {
        if u >= self.n() || v >= self.n() || len2 == 0 {
            return Err(CoarseError::BadEdge(format!("{u}-{v} doubled length {len2}")));
        }
        self.edges.push((u, v, len2));
        self.adj[u].push((v, len2));
        if u != v {
            self.adj[v].push((u, len2));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }
    pub fn neighbors(&self, v: usize) -> &[(usize, u64)] {
        &self.adj[v]
    }
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|x| x == name)
    }

    /// Doubled distances from a set of sources.
    pub fn dist_from_set(&self, sources: &[usize]) -> Vec<Option<u64>> {
        let mut dist = vec![None; self.n()];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = Some(0);
            heap.push(Reverse((0u64, s)));
        }
        while let Some(Reverse((d, u))) = heap.pop() {
            if dist[u] != Some(d) {
                continue;
            }
            for &(v, l) in &self.adj[u] {
                let nd = d + l;
                if dist[v].map_or(true, |old| nd < old) {
                    dist[v] = Some(nd);
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        dist
    }

    pub fn dist_from(&self, s: usize) -> Vec<Option<u64>> {
        self.dist_from_set(&[s])
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.dist_from(0).iter().all(Option::is_some)
    }

    pub fn to_dot(&self, cones: &[usize]) -> String {
        let mut s = String::from("graph g {\n");
        for (i, name) in self.names.iter().enumerate() {
            let style = if cones.contains(&i) { " shape=box style=filled fillcolor=lightgrey" } else { "" };
            s.push_str(&format!("  {i} [label=\"{name}\"{style}];\n"));
        }
        for &(u, v, l) in &self.edges {
            s.push_str(&format!("  {u} -- {v} [label=\"{}\"];\n", half(l)));
        }
        s.push_str("}\n");
        s
    }
}

/// Lazily filled table of doubled single-source distances.
pub struct Metric<'a> {
    g: &'a MetricGraph,
    rows: RefCell<BTreeMap<usize, Vec<Option<u64>>>>,
}

impl<'a> Metric<'a> {
    pub fn new(g: &'a MetricGraph) -> Metric<'a> {
        Metric { g, rows: RefCell::new(BTreeMap::new()) }
    }
    pub fn graph(&self) -> &'a MetricGraph {
        self.g
    }

    /// Doubled distance.
    pub fn d2(&self, u: usize, v: usize) -> Result<u64> {
        let mut rows = self.rows.borrow_mut();
        let row = rows.entry(u).or_insert_with(|| self.g.dist_from(u));
        row[v].ok_or(CoarseError::Disconnected(u, v))
    }

    pub fn d(&self, u: usize, v: usize) -> Result<Q> {
        self.d2(u, v).map(half)
    }

    /// Doubled distance between two sets.
    pub fn set_d2(&self, a: &[usize], b: &[usize]) -> Result<u64> {
        let row = self.g.dist_from_set(a);
        b.iter().filter_map(|&v| row[v]).min().ok_or(CoarseError::Disconnected(a[0], b[0]))
    }

    /// A shortest path from `u` to `v`, stepping to the smallest-index neighbour that
    /// stays on a geodesic.
    pub fn geodesic(&self, u: usize, v: usize) -> Result<Vec<usize>> {
        let total = self.d2(v, u)?;
        let mut path = vec![u];
        let mut cur = u;
        let mut left = total;
        while cur != v {
            let next = self
                .g
                .neighbors(cur)
                .iter()
                .filter(|&&(w, l)| l <= left && self.d2(v, w).ok() == Some(left - l))
                .map(|&(w, l)| (w, l))
                .min()
                .expect("geodesic continues");
            cur = next.0;
            left -= next.1;
            path.push(cur);
        }
        Ok(path)
    }
}

pub fn distance(g: &MetricGraph, u: usize, v: usize) -> Result<Q> {
    Metric::new(g).d(u, v)
}

/// Union of all geodesics from `u` to `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicDag {
    pub length: Q,
    /// Vertices on some geodesic, by distance from `u`.
    pub vertices: Vec<usize>,
    /// Directed edges `(x, y)` with `x` nearer to `u`.
    pub arcs: Vec<(usize, usize)>,
    pub count: u64,
}

pub fn geodesic_dag(g: &MetricGraph, u: usize, v: usize) -> Result<GeodesicDag> {
    let du = g.dist_from(u);
    let dv = g.dist_from(v);
    let total = du[v].ok_or(CoarseError::Disconnected(u, v))?;
    let on = |w: usize| matches!((du[w], dv[w]), (Some(a), Some(b)) if a + b == total);
    let mut vertices: Vec<usize> = (0..g.n()).filter(|&w| on(w)).collect();
    vertices.sort_by_key(|&w| (du[w], w));
    let mut arcs = Vec::new();
    for &x in &vertices {
        for &(y, l) in g.neighbors(x) {
            if on(y) && du[x].unwrap() + l == du[y].unwrap() {
                arcs.push((x, y));
            }
        }
    }
    arcs.sort();
    arcs.dedup();
    let mut count: BTreeMap<usize, u64> = BTreeMap::new();
    count.insert(u, 1);
    for &x in &vertices {
        let c = count.get(&x).copied().unwrap_or(0);
        for &(a, b) in arcs.iter().filter(|&&(a, _)| a == x) {
            let _ = a;
            *count.entry(b).or_default() += c;
        }
    }
    Ok(GeodesicDag { length: half(total), vertices, arcs, count: count.get(&v).copied().unwrap_or(0) })
}

/// Named subsets of the vertices of a base graph.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SubsetFamily {
    pub names: Vec<String>,
    pub sets: Vec<Vec<usize>>,
    /// Declared quasiconvexity constant, if any.
    pub declared_q: Option<Q>,
}

impl SubsetFamily {
    pub fn new(sets: Vec<Vec<usize>>) -> SubsetFamily {
        let names = (0..sets.len()).map(|i| format!("Y{i}")).collect();
        SubsetFamily { names, sets, declared_q: None }
    }
    pub fn len(&self) -> usize {
        self.sets.len()
    }
    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// The base graph with one cone vertex per subset, joined to its members by edges of
/// length 1/2. Base vertices keep their indices; cones follow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElectrifiedGraph {
    pub graph: MetricGraph,
    pub base_n: usize,
    pub cones: Vec<usize>,
}

impl ElectrifiedGraph {
    /// The projection from the base: vertex inclusion.
    pub fn project(&self, v: usize) -> usize {
        debug_assert!(v < self.base_n);
        v
    }
    pub fn to_dot(&self) -> String {
        self.graph.to_dot(&self.cones)
    }
}

pub const CONE_EDGE_LEN2: u64 = 1;

pub fn electrify(x: &MetricGraph, ys: &SubsetFamily) -> Result<ElectrifiedGraph> {
    let mut graph = x.clone();
    let mut cones = Vec::new();
    for (name, set) in ys.names.iter().zip(&ys.sets) {
        if set.is_empty() {
            return Err(CoarseError::EmptySubset(name.clone()));
        }
        if let Some(&bad) = set.iter().find(|&&v| v >= x.n()) {
            return Err(CoarseError::UnknownVertex(bad.to_string()));
        }
        let c = graph.add_vertex(format!("cone:{name}"));
        let mut members = set.clone();
        members.sort_unstable();
        members.dedup();
        for v in members {
            graph.add_edge(v, c, CONE_EDGE_LEN2)?;
        }
        cones.push(c);
    }
    Ok(ElectrifiedGraph { graph, base_n: x.n(), cones })
}

/// `(x . y)_p`.
pub fn gromov_product(m: &Metric, p: usize, x: usize, y: usize) -> Result<Q> {
    let s = m.d2(p, x)? as i64 + m.d2(p, y)? as i64 - m.d2(x, y)? as i64;
    Ok(Q::new(s, 4))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub delta: Q,
    pub quadruples: u64,
    pub witness: Option<[usize; 4]>,
}

/// Doubled-length defect of one quadruple: largest pair sum minus the middle one.
fn defect(d: &[Vec<u64>], q: [usize; 4]) -> u64 {
    let [x, y, z, w] = q;
    let mut s = [d[x][y] + d[z][w], d[x][z] + d[y][w], d[x][w] + d[y][z]];
    s.sort_unstable();
    s[2] - s[1]
}

/// Four-point hyperbolicity constant: the largest half-defect over quadruples.
pub fn delta_four_point(g: &MetricGraph, mode: DeltaMode) -> Result<DeltaReport> {
    let n = g.n();
    let mut d = Vec::with_capacity(n);
    for u in 0..n {
        let row = g.dist_from(u);
        let row: Vec<u64> = row.into_iter().enumerate().map(|(v, x)| x.ok_or(CoarseError::Disconnected(u, v))).collect::<Result<_>>()?;
        d.push(row);
    }
    let mut best = (0u64, None);
    let mut count = 0u64;
    let mut consider = |q: [usize; 4]| {
        count += 1;
        let x = defect(&d, q);
        if x > best.0 {
            best = (x, Some(q));
        }
    };
    match mode {
        DeltaMode::Exhaustive => {
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        for e in c + 1..n {
                            consider([a, b, c, e]);
                        }
                    }
                }
            }
        }
        DeltaMode::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(CoarseError::SampleBudgetZero);
            }
            if n > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..samples {
                    consider([0; 4].map(|_| rng.gen_range(0..n)));
                }
            }
        }
    }
    Ok(DeltaReport { delta: Q::new(best.0 as i64, 4), quadruples: count, witness: best.1 })
}

/// Smallest `Q` such that every vertex on every geodesic between points of `y` lies
/// within `Q` of `y`.
pub fn quasiconvexity_constant(g: &MetricGraph, y: &[usize]) -> Result<Q> {
    let m = Metric::new(g);
    let to_y = g.dist_from_set(y);
    let mut worst = 0u64;
    for (i, &a) in y.iter().enumerate() {
        for &b in &y[i + 1..] {
            let ab = m.d2(a, b)?;
            for w in 0..g.n() {
                let (Ok(aw), Ok(wb)) = (m.d2(a, w), m.d2(b, w)) else { continue };
                if aw + wb == ab {
                    worst = worst.max(to_y[w].expect("w is connected to y"));
                }
            }
        }
    }
    Ok(half(worst))
}

/// Points of `to` nearest to some point of `from`, sorted.
pub fn nearest_point_projection(m: &Metric, from: &[usize], to: &[usize]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for &f in from {
        let ds: Vec<(u64, usize)> = to.iter().filter_map(|&t| m.d2(f, t).ok().map(|d| (d, t))).collect();
        let Some(&(best, _)) = ds.iter().min() else { continue };
        out.extend(ds.iter().filter(|&&(d, _)| d == best).map(|&(_, t)| t));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn projection_diameter(m: &Metric, set: &[usize]) -> Result<Q> {
    let mut best = 0;
    for (i, &a) in set.iter().enumerate() {
        for &b in &set[i + 1..] {
            best = best.max(m.d2(a, b)?);
        }
    }
    Ok(half(best))
}

/// Graph file: named vertices, edges with optional half-integer lengths, named subsets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub subsets: Vec<SubsetSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub u: String,
    pub v: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetSpec {
    pub name: String,
    pub members: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

impl GraphFile {
    pub fn build(&self) -> Result<(MetricGraph, SubsetFamily)> {
        let mut g = MetricGraph::new(self.vertices.clone());
        let idx = |name: &str| g.index_of(name).ok_or_else(|| CoarseError::UnknownVertex(name.to_string()));
        let mut edges = Vec::new();
        for e in &self.edges {
            let len = e.length.unwrap_or(1.0);
            let len2 = 2.0 * len;
            if !(len2 >= 1.0 && len2.fract() == 0.0) {
                return Err(CoarseError::BadEdge(format!("{}-{} length {len}", e.u, e.v)));
            }
            edges.push((idx(&e.u)?, idx(&e.v)?, len2 as u64));
        }
        let mut fam = SubsetFamily::default();
        for s in &self.subsets {
            fam.names.push(s.name.clone());
            fam.sets.push(s.members.iter().map(|m| idx(m)).collect::<Result<_>>()?);
            if let Some(q) = s.q {
                let q2 = (2.0 * q).round() as i64;
                let q = Q::new(q2, 2);
                fam.declared_q = Some(fam.declared_q.map_or(q, |old: Q| old.max(q)));
            }
        }
        for (u, v, l) in edges {
            g.add_edge(u, v, l)?;
        }
        Ok((g, fam))
    }

    pub fn from_graph(g: &MetricGraph, fam: &SubsetFamily) -> GraphFile {
        let name = |v: usize| g.names()[v].clone();
        GraphFile {
            vertices: g.names().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|&(u, v, l)| EdgeSpec { u: name(u), v: name(v), length: (l != 2).then_some(l as f64 / 2.0) })
                .collect(),
            subsets: fam
                .names
                .iter()
                .zip(&fam.sets)
                .map(|(n, s)| SubsetSpec { name: n.clone(), members: s.iter().map(|&v| name(v)).collect(), q: None })
                .collect(),
        }
    }
}
