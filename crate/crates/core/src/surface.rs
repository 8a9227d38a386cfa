//! Ribbon graphs on a closed oriented surface whose complementary regions carry a genus.
//!
//! A region of the complement is a compact surface with one boundary component per
//! traced face; its genus is tracked through every local move so that Euler
//! characteristics stay exact even when the graph does not fill the surface.

use serde::{Deserialize, Serialize};

/// Which curve an edge belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strand {
    A,
    B,
    C,
}

#[derive(Clone, Debug)]
pub(crate) struct Dart {
    pub vert: usize,
    pub next: usize,
    pub prev: usize,
    pub twin: usize,
    pub strand: Strand,
    /// The curve leaves `vert` along this dart.
    pub out: bool,
    pub alive: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct Vertex {
    pub tag: u32,
    pub first: usize,
    pub alive: bool,
}

/// Faces of a ribbon graph: `of[d]` is the face of the corner that follows dart `d`
/// counterclockwise; `cycles[f]` lists the corners of face `f` in boundary order.
#[derive(Clone, Debug, Default)]
pub struct Faces {
    pub of: Vec<usize>,
    pub cycles: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default)]
pub struct SurfaceMap {
    pub(crate) darts: Vec<Dart>,
    pub(crate) verts: Vec<Vertex>,
    /// Region of the corner following each dart.
    pub(crate) region: Vec<usize>,
    pub(crate) genus: Vec<u32>,
}

impl SurfaceMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add_vertex(&mut self, tag: u32) -> usize {
        self.verts.push(Vertex { tag, first: usize::MAX, alive: true });
        self.verts.len() - 1
    }

    /// Appends a dart at `v` after the current last dart of its rotation.
    pub(crate) fn push_dart(&mut self, v: usize, strand: Strand, out: bool) -> usize {
        let id = self.darts.len();
        let first = self.verts[v].first;
        if first == usize::MAX {
            self.darts.push(Dart { vert: v, next: id, prev: id, twin: usize::MAX, strand, out, alive: true });
            self.verts[v].first = id;
        } else {
            let last = self.darts[first].prev;
            self.darts.push(Dart { vert: v, next: first, prev: last, twin: usize::MAX, strand, out, alive: true });
            self.darts[last].next = id;
            self.darts[first].prev = id;
        }
        self.region.push(usize::MAX);
        id
    }

    pub(crate) fn pair(&mut self, d: usize, e: usize) {
        self.darts[d].twin = e;
        self.darts[e].twin = d;
    }

    pub(crate) fn new_region(&mut self, genus: u32) -> usize {
        self.genus.push(genus);
        self.genus.len() - 1
    }

    pub fn next(&self, d: usize) -> usize {
        self.darts[d].next
    }
    pub fn prev(&self, d: usize) -> usize {
        self.darts[d].prev
    }
    pub fn twin(&self, d: usize) -> usize {
        self.darts[d].twin
    }
    pub fn vert(&self, d: usize) -> usize {
        self.darts[d].vert
    }
    pub fn strand(&self, d: usize) -> Strand {
        self.darts[d].strand
    }
    pub fn is_out(&self, d: usize) -> bool {
        self.darts[d].out
    }
    pub fn tag(&self, v: usize) -> u32 {
        self.verts[v].tag
    }
    pub fn region_of(&self, d: usize) -> usize {
        self.region[d]
    }
    pub fn region_genus(&self, r: usize) -> u32 {
        self.genus[r]
    }

    /// Corner successor: the corner reached by leaving along `next(d)`.
    pub fn psi(&self, d: usize) -> usize {
        self.twin(self.next(d))
    }

    pub fn live_darts(&self) -> impl Iterator<Item = usize> + '_ {
        self.darts.iter().enumerate().filter(|(_, d)| d.alive).map(|(i, _)| i)
    }

    pub fn live_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.verts.iter().enumerate().filter(|(_, v)| v.alive).map(|(i, _)| i)
    }

    pub fn darts_at(&self, v: usize) -> Vec<usize> {
        let first = self.verts[v].first;
        let mut out = vec![first];
        let mut d = self.next(first);
        while d != first {
            out.push(d);
            d = self.next(d);
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.darts_at(v).len()
    }

    pub fn vertex_count(&self) -> usize {
        self.live_vertices().count()
    }

    pub fn edge_count(&self) -> usize {
        self.live_darts().count() / 2
    }

    pub fn faces(&self) -> Faces {
        let mut of = vec![usize::MAX; self.darts.len()];
        let mut cycles = Vec::new();
        for d in self.live_darts() {
            if of[d] != usize::MAX {
                continue;
            }
            let f = cycles.len();
            let mut cyc = Vec::new();
            let mut c = d;
            loop {
                of[c] = f;
                cyc.push(c);
                c = self.psi(c);
                if c == d {
                    break;
                }
            }
            cycles.push(cyc);
        }
        Faces { of, cycles }
    }

    /// Live regions with their boundary faces (sorted region ids).
    pub fn regions(&self, faces: &Faces) -> Vec<(usize, Vec<usize>)> {
        let mut map: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (f, cyc) in faces.cycles.iter().enumerate() {
            map.entry(self.region[cyc[0]]).or_default().push(f);
        }
        map.into_iter().collect()
    }

    /// Euler characteristic of the closed surface, `V - E + sum chi(R)`.
    pub fn euler(&self) -> i64 {
        let faces = self.faces();
        let mut chi = self.vertex_count() as i64 - self.edge_count() as i64;
        for (r, fs) in self.regions(&faces) {
            chi += 2 - 2 * self.genus[r] as i64 - fs.len() as i64;
        }
        chi
    }

    /// Region ids are consistent along every face.
    pub fn regions_consistent(&self) -> bool {
        let faces = self.faces();
        faces.cycles.iter().all(|cyc| cyc.iter().all(|&c| self.region[c] == self.region[cyc[0]]))
    }

    /// True when the face is alone in a genus-zero region.
    pub fn face_is_disc(&self, faces: &Faces, f: usize) -> bool {
        let r = self.region[faces.cycles[f][0]];
        if self.genus[r] != 0 {
            return false;
        }
        faces.cycles.iter().enumerate().all(|(g, cyc)| g == f || self.region[cyc[0]] != r)
    }

    fn relabel(&mut self, from: usize, to: usize) {
        for r in self.region.iter_mut() {
            if *r == from {
                *r = to;
            }
        }
    }

    fn unlink(&mut self, d: usize) {
        let (p, n, v) = (self.prev(d), self.next(d), self.vert(d));
        self.darts[p].next = n;
        self.darts[n].prev = p;
        self.darts[d].alive = false;
        self.region[d] = usize::MAX;
        if self.verts[v].first == d {
            self.verts[v].first = if n == d { usize::MAX } else { n };
        }
        if n == d {
            self.verts[v].alive = false;
        }
    }

    /// Deletes the edge of `d`, updating the regions on its two sides.
    pub fn delete_edge(&mut self, d: usize) {
        let t = self.twin(d);
        self.band(self.prev(d), d);
        self.unlink(d);
        self.unlink(t);
        debug_assert!(self.verts[self.darts[d].vert].alive && self.verts[self.darts[t].vert].alive);
    }

    /// Region bookkeeping for joining the corners after `c1` and `c2` by a band.
    pub(crate) fn band(&mut self, c1: usize, c2: usize) {
        let faces = self.faces();
        let (r1, r2) = (self.region[c1], self.region[c2]);
        if faces.of[c1] != faces.of[c2] {
            if r1 != r2 {
                self.genus[r1] += self.genus[r2];
                self.relabel(r2, r1);
            } else {
                self.genus[r1] += 1;
            }
        }
    }

    /// Kills a vertex and its darts; twins elsewhere are left for the caller to re-pair.
    pub(crate) fn drop_vertex(&mut self, v: usize) {
        for d in self.darts_at(v) {
            self.darts[d].alive = false;
            self.region[d] = usize::MAX;
        }
        self.verts[v].alive = false;
        self.verts[v].first = usize::MAX;
    }

    /// Deletes every edge of one strand.
    pub fn delete_strand(&mut self, strand: Strand) {
        for d in 0..self.darts.len() {
            if self.darts[d].alive && self.darts[d].strand == strand {
                self.delete_edge(d);
            }
        }
    }

    /// Inserts a degree-two vertex on the edge of `d`, adjacent to `vert(d)`.
    /// Returns `(vertex, dart toward vert(d), dart away)`.
    pub fn subdivide(&mut self, d: usize, tag: u32) -> (usize, usize, usize) {
        let t = self.twin(d);
        let (strand, out) = (self.strand(d), self.is_out(d));
        let (rp, rq) = (self.region[self.prev(d)], self.region[self.prev(t)]);
        let m = self.add_vertex(tag);
        let p = self.push_dart(m, strand, !out);
        let q = self.push_dart(m, strand, out);
        self.pair(d, p);
        self.pair(t, q);
        self.region[p] = rp;
        self.region[q] = rq;
        (m, p, q)
    }

    /// Adds an edge from the corner after `x` to the corner after `y`, both in one face.
    /// The part of that face running from `x` forward to `y` becomes a new disc region.
    /// Returns the darts `(p at vert(x), q at vert(y))`.
    pub fn add_chord(&mut self, x: usize, y: usize, strand: Strand, out_at_x: bool) -> (usize, usize) {
        let faces = self.faces();
        assert_eq!(faces.of[x], faces.of[y], "chord corners lie in different faces");
        assert_ne!(x, y, "chord corners coincide");
        let r = self.region[x];
        let p = self.insert_after(x, strand, out_at_x);
        let q = self.insert_after(y, strand, !out_at_x);
        self.pair(p, q);
        self.region[p] = r;
        self.region[q] = r;
        let disc = self.new_region(0);
        let mut c = p;
        loop {
            self.region[c] = disc;
            c = self.psi(c);
            if c == p {
                break;
            }
        }
        (p, q)
    }

    fn insert_after(&mut self, x: usize, strand: Strand, out: bool) -> usize {
        let v = self.vert(x);
        let n = self.next(x);
        let id = self.darts.len();
        self.darts.push(Dart { vert: v, next: n, prev: x, twin: usize::MAX, strand, out, alive: true });
        self.region.push(usize::MAX);
        self.darts[x].next = id;
        self.darts[n].prev = id;
        id
    }

    /// Removes a degree-two vertex by merging its two edges. Returns false for a loop.
    pub fn smooth(&mut self, v: usize) -> bool {
        let ds = self.darts_at(v);
        assert_eq!(ds.len(), 2);
        let (d1, d2) = (ds[0], ds[1]);
        if self.twin(d1) == d2 {
            return false;
        }
        let (t1, t2) = (self.twin(d1), self.twin(d2));
        self.pair(t1, t2);
        for d in [d1, d2] {
            self.darts[d].alive = false;
            self.region[d] = usize::MAX;
        }
        self.verts[v].alive = false;
        self.verts[v].first = usize::MAX;
        true
    }

    /// Smooths every degree-two vertex that is not a loop base.
    pub fn smooth_all(&mut self) {
        let vs: Vec<usize> = self.live_vertices().collect();
        for v in vs {
            if self.verts[v].alive && self.degree(v) == 2 {
                self.smooth(v);
            }
        }
    }

    /// Finds the corner at `start` whose face walk traverses the given `(strand, vertex)`
    /// steps. Returns the corner at `start` and the corner reached at the final vertex.
    pub fn find_walk(&self, start: usize, steps: &[(Strand, usize)]) -> Vec<(usize, usize)> {
        let mut hits = Vec::new();
        for c0 in self.darts_at(start) {
            let mut c = c0;
            let mut ok = true;
            for &(s, v) in steps {
                let d = self.next(c);
                if self.strand(d) != s {
                    ok = false;
                    break;
                }
                c = self.twin(d);
                if self.vert(c) != v {
                    ok = false;
                    break;
                }
            }
            if ok {
                hits.push((c0, c));
            }
        }
        hits
    }

    /// Adds a curve edge from vertex `from` to vertex `to` parallel to the boundary walk
    /// `steps` (which ends at `to`), cutting off the disc between the edge and the walk.
    /// The walk may be found in either direction. Returns the dart at `from`.
    pub fn add_parallel(&mut self, from: usize, steps: &[(Strand, usize)], strand: Strand) -> Option<usize> {
        let fwd = self.find_walk(from, steps);
        if fwd.len() == 1 {
            let (x, y) = fwd[0];
            let (p, _) = self.add_chord(x, y, strand, true);
            return Some(p);
        }
        let to = steps.last()?.1;
        let mut rev: Vec<(Strand, usize)> = Vec::with_capacity(steps.len());
        for i in (0..steps.len()).rev() {
            let v = if i == 0 { from } else { steps[i - 1].1 };
            rev.push((steps[i].0, v));
        }
        let back = self.find_walk(to, &rev);
        if back.len() == 1 {
            let (x, y) = back[0];
            let (_, q) = self.add_chord(x, y, strand, false);
            return Some(q);
        }
        None
    }

    /// Drops region ids no live corner uses.
    pub(crate) fn renumber_regions(&mut self) {
        let mut rmap = std::collections::BTreeMap::new();
        let mut genus = Vec::new();
        for d in 0..self.darts.len() {
            if !self.darts[d].alive {
                continue;
            }
            let r = self.region[d];
            let nr = *rmap.entry(r).or_insert_with(|| {
                genus.push(self.genus[r]);
                genus.len() - 1
            });
            self.region[d] = nr;
        }
        self.genus = genus;
    }

    /// Drops dead darts and vertices, renumbering everything compactly.
    pub fn compact(&self) -> (SurfaceMap, Vec<usize>) {
        let mut vmap = vec![usize::MAX; self.verts.len()];
        let mut out = SurfaceMap::new();
        for v in self.live_vertices() {
            vmap[v] = out.add_vertex(self.verts[v].tag);
        }
        let mut dmap = vec![usize::MAX; self.darts.len()];
        for v in self.live_vertices() {
            for d in self.darts_at(v) {
                dmap[d] = out.push_dart(vmap[v], self.strand(d), self.is_out(d));
            }
        }
        let mut rmap = std::collections::BTreeMap::new();
        for d in self.live_darts() {
            let e = dmap[d];
            out.darts[e].twin = dmap[self.twin(d)];
            let r = self.region[d];
            let nr = *rmap.entry(r).or_insert_with(|| {
                out.genus.push(self.genus[r]);
                out.genus.len() - 1
            });
            out.region[e] = nr;
        }
        (out, vmap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Torus with the (1,0) and (0,1) curves meeting once.
    fn torus() -> SurfaceMap {
        let mut m = SurfaceMap::new();
        let v = m.add_vertex(0);
        let ap = m.push_dart(v, Strand::A, true);
        let bp = m.push_dart(v, Strand::B, true);
        let am = m.push_dart(v, Strand::A, false);
        let bm = m.push_dart(v, Strand::B, false);
        m.pair(ap, am);
        m.pair(bp, bm);
        let r = m.new_region(0);
        for d in 0..4 {
            m.region[d] = r;
        }
        m
    }

    #[test]
    fn torus_single_square() {
        let m = torus();
        let f = m.faces();
        assert_eq!(f.cycles.len(), 1);
        assert_eq!(f.cycles[0].len(), 4);
        assert_eq!(m.euler(), 0);
    }

    #[test]
    fn deleting_an_edge_adds_genus() {
        let mut m = torus();
        m.delete_edge(0);
        // one vertex with a single b-loop; the region is a one-holed torus minus the loop
        assert_eq!(m.euler(), 0);
        assert!(m.regions_consistent());
    }

    #[test]
    fn subdivide_and_chord_preserve_euler() {
        let mut m = torus();
        let (x, _, _) = m.subdivide(1, 7);
        assert_eq!(m.euler(), 0);
        let ds = m.darts_at(x);
        let faces = m.faces();
        assert_eq!(faces.of[ds[0]], faces.of[ds[1]]);
        m.add_chord(ds[0], ds[1], Strand::C, true);
        assert_eq!(m.euler(), 0);
        assert!(m.regions_consistent());
    }
}
