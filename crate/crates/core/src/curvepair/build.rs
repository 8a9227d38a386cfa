use super::{CurveError, CurvePair, Result, A_IN, A_OUT, B_IN, B_OUT};
use crate::surface::{Strand, SurfaceMap};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Instance document for a curve pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCurvePair {
    pub vertices: Vec<u32>,
    pub a_cycle: Vec<u32>,
    pub b_cycle: Vec<u32>,
    /// Counterclockwise order of the four ends at each vertex, aligned with `vertices`,
    /// using the labels `a+`, `a-`, `b+`, `b-` (`+` is the outgoing end).
    pub rotations: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    /// Complementary regions that are not discs, by face id; unlisted faces are discs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<RawRegion>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRegion {
    pub faces: Vec<usize>,
    pub genus: u32,
}

/// Validates a raw instance and requires minimal position.
pub fn build_curve_pair(raw: &RawCurvePair) -> Result<CurvePair> {
    let cp = CurvePair::from_raw_unreduced(raw)?;
    if let Some(face) = cp.first_bigon() {
        return Err(CurveError::BigonPresent { face });
    }
    Ok(cp)
}

fn slot_of(label: &str) -> Option<usize> {
    match label {
        "a+" => Some(A_OUT),
        "b+" => Some(B_OUT),
        "a-" => Some(A_IN),
        "b-" => Some(B_IN),
        _ => None,
    }
}

fn cycle_indices(
    curve: char,
    cycle: &[u32],
    index: &BTreeMap<u32, usize>,
    ids: &[u32],
) -> Result<Vec<usize>> {
    let mut seen = vec![false; ids.len()];
    let mut out = Vec::with_capacity(cycle.len());
    for id in cycle {
        let &v = index.get(id).ok_or(CurveError::UnknownVertex(*id))?;
        if seen[v] {
            return Err(CurveError::DisconnectedCurve { curve, vertex: *id });
        }
        seen[v] = true;
        out.push(v);
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(CurveError::DisconnectedCurve { curve, vertex: ids[v] });
    }
    Ok(out)
}

impl CurvePair {
    /// Validates everything except minimal position.
    pub fn from_raw_unreduced(raw: &RawCurvePair) -> Result<CurvePair> {
        let mut ids = raw.vertices.clone();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            let dup = ids.windows(2).find(|w| w[0] == w[1]).map(|w| w[0]).unwrap_or(0);
            return Err(CurveError::UnknownVertex(dup));
        }
        let index: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        if raw.rotations.len() != raw.vertices.len() {
            return Err(CurveError::NonAlternatingRotation { vertex: u32::MAX, rotation: vec![] });
        }
        let mut sign = vec![0i8; ids.len()];
        for (k, rot) in raw.rotations.iter().enumerate() {
            let id = raw.vertices[k];
            let bad = || CurveError::NonAlternatingRotation { vertex: id, rotation: rot.clone() };
            if rot.len() != 4 {
                return Err(bad());
            }
            let slots: Vec<usize> = rot.iter().map(|l| slot_of(l)).collect::<Option<_>>().ok_or_else(bad)?;
            let mut sorted = slots.clone();
            sorted.sort_unstable();
            if sorted != [0, 1, 2, 3] {
                return Err(bad());
            }
            let is_a = |s: usize| s == A_OUT || s == A_IN;
            if (0..4).any(|i| is_a(slots[i]) == is_a(slots[(i + 1) % 4])) {
                return Err(bad());
            }
            let i = slots.iter().position(|&s| s == A_OUT).unwrap();
            sign[index[&id]] = if slots[(i + 1) % 4] == B_OUT { 1 } else { -1 };
        }
        let a = cycle_indices('a', &raw.a_cycle, &index, &ids)?;
        let b = cycle_indices('b', &raw.b_cycle, &index, &ids)?;
        let mut cp = CurvePair::assemble(ids, a, b, sign, raw.genus.unwrap_or(0), None)?;
        if !raw.regions.is_empty() {
            cp.apply_regions(&raw.regions)?;
        }
        cp.settle_genus(raw.genus)?;
        Ok(cp)
    }

    /// Builds the ribbon graph from orders and signs. Regions default to one disc per face
    /// unless `regions` supplies `(region per dart, genus per region)`.
    pub(crate) fn assemble(
        ids: Vec<u32>,
        a_cycle: Vec<usize>,
        b_cycle: Vec<usize>,
        sign: Vec<i8>,
        genus: u32,
        regions: Option<(Vec<usize>, Vec<u32>)>,
    ) -> Result<CurvePair> {
        let n = ids.len();
        let rotate = |c: Vec<usize>| -> Vec<usize> {
            if c.is_empty() {
                return c;
            }
            let k = (0..c.len()).min_by_key(|&i| c[i]).unwrap();
            c[k..].iter().chain(&c[..k]).copied().collect()
        };
        let a_cycle = rotate(a_cycle);
        let b_cycle = rotate(b_cycle);
        let mut a_pos = vec![0; n];
        let mut b_pos = vec![0; n];
        for (i, &v) in a_cycle.iter().enumerate() {
            a_pos[v] = i;
        }
        for (i, &v) in b_cycle.iter().enumerate() {
            b_pos[v] = i;
        }
        let mut map = SurfaceMap::new();
        for (v, &id) in ids.iter().enumerate() {
            map.add_vertex(id);
            let order: [usize; 4] = if sign[v] > 0 { [A_OUT, B_OUT, A_IN, B_IN] } else { [A_OUT, B_IN, A_IN, B_OUT] };
            // darts are numbered 4v + slot, linked in rotation order
            for slot in 0..4 {
                let strand = if slot == A_OUT || slot == A_IN { Strand::A } else { Strand::B };
                map.push_dart(v, strand, slot == A_OUT || slot == B_OUT);
            }
            for i in 0..4 {
                let d = 4 * v + order[i];
                map.darts[d].next = 4 * v + order[(i + 1) % 4];
                map.darts[d].prev = 4 * v + order[(i + 3) % 4];
            }
            map.verts[v].first = 4 * v + A_OUT;
        }
        let mut cp = CurvePair { ids, a_cycle, b_cycle, a_pos, b_pos, sign, genus, map, minimal: true };
        for v in 0..n {
            let (na, nb) = (cp.next_a(v), cp.next_b(v));
            cp.map.pair(4 * v + A_OUT, 4 * na + A_IN);
            cp.map.pair(4 * v + B_OUT, 4 * nb + B_IN);
        }
        match regions {
            Some((per_dart, genera)) => {
                cp.map.region = per_dart;
                cp.map.genus = genera;
            }
            None => {
                let faces = cp.map.faces();
                for cyc in &faces.cycles {
                    let r = cp.map.new_region(0);
                    for &c in cyc {
                        cp.map.region[c] = r;
                    }
                }
            }
        }
        cp.minimal = cp.first_bigon().is_none();
        Ok(cp)
    }

    fn apply_regions(&mut self, regions: &[RawRegion]) -> Result<()> {
        let faces = self.map.faces();
        let mut used = vec![false; faces.cycles.len()];
        for reg in regions {
            if reg.faces.is_empty() {
                return Err(CurveError::BadRegions("empty region".into()));
            }
            let r = self.map.new_region(reg.genus);
            for &f in &reg.faces {
                if f >= faces.cycles.len() || used[f] {
                    return Err(CurveError::BadRegions(format!("face {f} unknown or listed twice")));
                }
                used[f] = true;
                for &c in &faces.cycles[f] {
                    self.map.region[c] = r;
                }
            }
        }
        self.map.renumber_regions();
        self.minimal = self.first_bigon().is_none();
        Ok(())
    }

    fn settle_genus(&mut self, declared: Option<u32>) -> Result<()> {
        if self.n() == 0 {
            let g = declared.unwrap_or(1);
            if g == 0 {
                return Err(CurveError::EulerMismatch { genus: 0, computed: 2 });
            }
            self.genus = g;
            return Ok(());
        }
        let chi = self.map.euler();
        match declared {
            Some(g) if 2 - 2 * g as i64 == chi => self.genus = g,
            Some(g) => return Err(CurveError::EulerMismatch { genus: g, computed: chi }),
            None if chi <= 2 && chi % 2 == 0 => self.genus = ((2 - chi) / 2) as u32,
            None => return Err(CurveError::EulerMismatch { genus: 0, computed: chi }),
        }
        Ok(())
    }

    /// First face (by id) that is a disc bounded by one `a` edge and one `b` edge.
    pub(crate) fn first_bigon(&self) -> Option<usize> {
        if self.n() == 0 {
            return None;
        }
        let faces = self.map.faces();
        (0..faces.cycles.len()).find(|&f| faces.cycles[f].len() == 2 && self.map.face_is_disc(&faces, f))
    }

    /// Serializes back to an instance document, listing non-disc regions.
    pub fn to_raw(&self) -> RawCurvePair {
        let label = |slot: usize| match slot {
            A_OUT => "a+",
            B_OUT => "b+",
            A_IN => "a-",
            _ => "b-",
        };
        let rotations = (0..self.n())
            .map(|v| {
                let order = if self.sign[v] > 0 { [A_OUT, B_OUT, A_IN, B_IN] } else { [A_OUT, B_IN, A_IN, B_OUT] };
                order.iter().map(|&s| label(s).to_string()).collect()
            })
            .collect();
        let mut regions = Vec::new();
        if self.n() > 0 {
            let faces = self.map.faces();
            for (r, fs) in self.map.regions(&faces) {
                if fs.len() > 1 || self.map.region_genus(r) > 0 {
                    regions.push(RawRegion { faces: fs, genus: self.map.region_genus(r) });
                }
            }
        }
        RawCurvePair {
            vertices: self.ids.clone(),
            a_cycle: self.a_order(),
            b_cycle: self.b_order(),
            rotations,
            genus: Some(self.genus),
            regions,
        }
    }

    /// Reads a curve pair back from a ribbon graph whose two curves use strands
    /// `a_strand` and `B`. Degree-two loop markers are ignored.
    pub(crate) fn from_map(map: &SurfaceMap, genus: u32, a_strand: Strand) -> Result<CurvePair> {
        let verts: Vec<usize> = map.live_vertices().filter(|&v| map.degree(v) == 4).collect();
        let mut ids: Vec<u32> = verts.iter().map(|&v| map.tag(v)).collect();
        ids.sort_unstable();
        if ids.is_empty() {
            return Ok(CurvePair {
                ids: vec![],
                a_cycle: vec![],
                b_cycle: vec![],
                a_pos: vec![],
                b_pos: vec![],
                sign: vec![],
                genus,
                map: SurfaceMap::new(),
                minimal: true,
            });
        }
        let index: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut slot_dart = vec![[usize::MAX; 4]; ids.len()];
        let mut sign = vec![0i8; ids.len()];
        for &v in &verts {
            let i = index[&map.tag(v)];
            let ds = map.darts_at(v);
            for &d in &ds {
                let slot = match (map.strand(d) == a_strand, map.is_out(d)) {
                    (true, true) => A_OUT,
                    (true, false) => A_IN,
                    (false, true) => B_OUT,
                    (false, false) => B_IN,
                };
                if slot_dart[i][slot] != usize::MAX {
                    return Err(CurveError::NonOrientableSmoothing(map.tag(v), map.tag(v)));
                }
                slot_dart[i][slot] = d;
            }
            let ao = slot_dart[i][A_OUT];
            let (n1, n2) = (map.next(ao), map.next(map.next(ao)));
            if n2 != slot_dart[i][A_IN] {
                return Err(CurveError::NonOrientableSmoothing(map.tag(v), map.tag(v)));
            }
            sign[i] = if n1 == slot_dart[i][B_OUT] { 1 } else { -1 };
        }
        let follow = |slot_out: usize| -> Vec<usize> {
            let mut cyc = vec![0usize];
            let mut v = 0usize;
            loop {
                let d = map.twin(slot_dart[v][slot_out]);
                let w = index[&map.tag(map.vert(d))];
                if w == 0 {
                    break;
                }
                cyc.push(w);
                v = w;
            }
            cyc
        };
        let a_cycle = follow(A_OUT);
        let b_cycle = follow(B_OUT);
        if a_cycle.len() != ids.len() || b_cycle.len() != ids.len() {
            return Err(CurveError::DisconnectedCurve { curve: 'a', vertex: ids[0] });
        }
        let mut region = vec![0usize; 4 * ids.len()];
        let mut rmap = BTreeMap::new();
        let mut genera = Vec::new();
        for i in 0..ids.len() {
            for slot in 0..4 {
                let r = map.region_of(slot_dart[i][slot]);
                let nr = *rmap.entry(r).or_insert_with(|| {
                    genera.push(map.region_genus(r));
                    genera.len() - 1
                });
                region[4 * i + slot] = nr;
            }
        }
        let cp = CurvePair::assemble(ids, a_cycle, b_cycle, sign, genus, Some((region, genera)))?;
        if cp.map.euler() != 2 - 2 * genus as i64 {
            return Err(CurveError::EulerMismatch { genus, computed: cp.map.euler() });
        }
        Ok(cp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvepair::{CurveError, FaceClass};

    fn rot(labels: [&str; 4]) -> Vec<String> {
        labels.iter().map(|s| s.to_string()).collect()
    }

    pub(crate) fn torus_raw() -> RawCurvePair {
        RawCurvePair {
            vertices: vec![0],
            a_cycle: vec![0],
            b_cycle: vec![0],
            rotations: vec![rot(["a+", "b+", "a-", "b-"])],
            genus: None,
            regions: vec![],
        }
    }

    #[test]
    fn torus_pair_has_one_square() {
        let cp = build_curve_pair(&torus_raw()).unwrap();
        assert_eq!(cp.genus(), 1);
        let faces = cp.faces();
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].boundary.len(), 4);
        assert_eq!(faces[0].class, FaceClass::Rectangle);
    }

    #[test]
    fn disjoint_pair_accepts_any_positive_genus() {
        let raw = RawCurvePair { vertices: vec![], a_cycle: vec![], b_cycle: vec![], rotations: vec![], genus: Some(3), regions: vec![] };
        let cp = build_curve_pair(&raw).unwrap();
        assert_eq!(cp.intersection_number(), 0);
        assert_eq!(cp.genus(), 3);
        let faces = cp.faces();
        assert_eq!(faces.len(), 2);
        assert!(faces.iter().all(|f| f.class == FaceClass::NonRectangle));
    }

    #[test]
    fn doubled_intersection_is_a_bigon() {
        // b crosses a and immediately crosses back: signs opposite, consecutive on both
        let raw = RawCurvePair {
            vertices: vec![0, 1],
            a_cycle: vec![0, 1],
            b_cycle: vec![0, 1],
            rotations: vec![rot(["a+", "b+", "a-", "b-"]), rot(["a+", "b-", "a-", "b+"])],
            genus: None,
            regions: vec![],
        };
        let err = build_curve_pair(&raw).unwrap_err();
        assert!(matches!(err, CurveError::BigonPresent { .. } | CurveError::EulerMismatch { .. }));
    }

    #[test]
    fn non_alternating_rotation_rejected() {
        let mut raw = torus_raw();
        raw.rotations = vec![rot(["a+", "a-", "b+", "b-"])];
        assert!(matches!(build_curve_pair(&raw), Err(CurveError::NonAlternatingRotation { .. })));
    }

    #[test]
    fn missing_vertex_on_b_rejected() {
        let mut raw = torus_raw();
        raw.b_cycle = vec![];
        assert!(matches!(build_curve_pair(&raw), Err(CurveError::DisconnectedCurve { curve: 'b', .. })));
    }

    #[test]
    fn declared_genus_must_match() {
        let mut raw = torus_raw();
        raw.genus = Some(2);
        assert!(matches!(build_curve_pair(&raw), Err(CurveError::EulerMismatch { .. })));
    }

    #[test]
    fn raw_roundtrip() {
        let cp = build_curve_pair(&torus_raw()).unwrap();
        let back = build_curve_pair(&cp.to_raw()).unwrap();
        assert_eq!(back.to_raw(), cp.to_raw());
    }
}
