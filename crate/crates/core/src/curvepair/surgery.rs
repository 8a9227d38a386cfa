use super::{Curve, CurveError, CurvePair, Result, Side, Subarc, A_IN, A_OUT, B_IN, B_OUT};
use crate::surface::{Strand, SurfaceMap};
use serde::{Deserialize, Serialize};

/// Which of the two subarcs of `a` cut off by the endpoints of the arc joins it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArcChoice {
    /// The subarc leaving the start of the arc in the direction of `a`.
    LeftPiece,
    /// The subarc leaving it against the direction of `a`.
    RightPiece,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryChoice {
    pub arc: Subarc,
    pub piece: ArcChoice,
}

#[derive(Clone, Debug)]
pub struct SurgeryRecord {
    pub arc: Subarc,
    pub piece: ArcChoice,
    /// Side of `a` holding a returning arc; `None` when the arc crosses `a`.
    pub side: Option<Side>,
    /// The pair `(c, b)`, reduced to minimal position.
    pub new_curve_pair: CurvePair,
    pub c_vs_a_disjoint: bool,
    pub i_c_a: usize,
    pub i_c_b_unreduced: usize,
    pub i_c_b: usize,
}

#[derive(Clone, Debug)]
pub struct SurgerySequence {
    pub start: CurvePair,
    pub steps: Vec<SurgeryRecord>,
}

impl SurgerySequence {
    pub fn len(&self) -> usize {
        self.steps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
    /// The pairs `(a_i, b)` for `i = 0..=n`.
    pub fn pairs(&self) -> Vec<&CurvePair> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.new_curve_pair)).collect()
    }
    /// `i(a_i, b)` along the sequence.
    pub fn intersections(&self) -> Vec<usize> {
        self.pairs().iter().map(|p| p.intersection_number()).collect()
    }
}

/// Innermost arcs of `b` with both ends on the same side of `a`, in order along `b`.
pub fn returning_arcs(cp: &CurvePair) -> Result<Vec<(Subarc, Side)>> {
    if cp.n() == 0 {
        return Err(CurveError::NoIntersections);
    }
    Ok(cp
        .b_cycle
        .iter()
        .filter_map(|&u| {
            let w = cp.next_b(u);
            (cp.sign[u] == -cp.sign[w]).then(|| (b_arc(cp, u), cp.b_out_side(u)))
        })
        .collect())
}

fn b_arc(cp: &CurvePair, u: usize) -> Subarc {
    Subarc { curve: Curve::B, start: cp.ids[u], end: cp.ids[cp.next_b(u)], forward: true, interior: vec![] }
}

fn resolve_b_arc(cp: &CurvePair, arc: &Subarc) -> Result<(usize, usize)> {
    let bad = CurveError::NotReturning { start: arc.start, end: arc.end };
    if cp.n() == 0 {
        return Err(CurveError::NoIntersections);
    }
    let u = cp.index_of(arc.start).ok_or(CurveError::UnknownVertex(arc.start))?;
    let w = cp.index_of(arc.end).ok_or(CurveError::UnknownVertex(arc.end))?;
    if arc.curve != Curve::B || !arc.forward || !arc.interior.is_empty() || cp.next_b(u) != w {
        return Err(bad);
    }
    Ok((u, w))
}

fn a_start_dart(u: usize, forward: bool) -> usize {
    4 * u + if forward { A_OUT } else { A_IN }
}

/// Surgery of `a` along a returning arc of `b`.
pub fn arc_surgery(cp: &CurvePair, arc: &Subarc, choice: ArcChoice) -> Result<SurgeryRecord> {
    let (u, w) = resolve_b_arc(cp, arc)?;
    if cp.sign[u] != -cp.sign[w] {
        return Err(CurveError::NotReturning { start: arc.start, end: arc.end });
    }
    let side = cp.b_out_side(u);
    let forward = choice == ArcChoice::LeftPiece;
    let interior = cp.a_interior(u, w, forward);
    let unreduced = if interior.is_empty() {
        // c is parallel to the boundary of the face cut off by a' and b'
        let (bd, ad) = (4 * u + B_OUT, a_start_dart(u, forward));
        let corner = if cp.map.next(bd) == ad { bd } else { ad };
        let faces = cp.map.faces();
        if cp.map.face_is_disc(&faces, faces.of[corner]) {
            return Err(CurveError::InessentialResult);
        }
        CurvePair::disjoint(cp.genus)
    } else {
        let pair = returning_overlay(cp, u, w, &interior, side)?;
        if pair.a_bounds_disc() {
            return Err(CurveError::InessentialResult);
        }
        pair
    };
    let i_c_b_unreduced = unreduced.n();
    let reduced = reduce_to_minimal_position(&unreduced)?;
    Ok(SurgeryRecord {
        arc: arc.clone(),
        piece: choice,
        side: Some(side),
        i_c_b: reduced.n(),
        new_curve_pair: reduced,
        c_vs_a_disjoint: true,
        i_c_a: 0,
        i_c_b_unreduced,
    })
}

/// Surgery along any innermost arc of `b`. A crossing arc yields a curve meeting `a` once.
pub fn general_arc_surgery(cp: &CurvePair, arc: &Subarc, choice: ArcChoice) -> Result<SurgeryRecord> {
    let (u, w) = resolve_b_arc(cp, arc)?;
    if cp.sign[u] == -cp.sign[w] {
        return arc_surgery(cp, arc, choice);
    }
    let forward = choice == ArcChoice::LeftPiece;
    let unreduced = if u == w {
        // a single crossing: the arc is all of b and the trivial piece gives c = b
        CurvePair::disjoint(cp.genus)
    } else {
        crossing_overlay(cp, u, w, &cp.a_interior(u, w, forward), forward)?
    };
    let i_c_b_unreduced = unreduced.n();
    let reduced = reduce_to_minimal_position(&unreduced)?;
    Ok(SurgeryRecord {
        arc: arc.clone(),
        piece: choice,
        side: None,
        i_c_b: reduced.n(),
        new_curve_pair: reduced,
        c_vs_a_disjoint: false,
        i_c_a: 1,
        i_c_b_unreduced,
    })
}

fn side_b_dart(cp: &CurvePair, v: usize, side: Side) -> usize {
    if cp.b_out_side(v) == side {
        4 * v + B_OUT
    } else {
        4 * v + B_IN
    }
}

fn chord(m: &mut SurfaceMap, from: usize, steps: &[(Strand, usize)], cp: &CurvePair, v: usize) -> Result<()> {
    m.add_parallel(from, steps, Strand::C).map(|_| ()).ok_or(CurveError::NonOrientableSmoothing(cp.ids[v], cp.ids[v]))
}

/// Overlay of `c` (strand C) on `a ∪ b`, then `a` removed: `c` runs beside `a'` on the side
/// of the returning arc and crosses `b` next to each interior vertex of `a'`.
fn returning_overlay(cp: &CurvePair, u: usize, w: usize, interior: &[usize], side: Side) -> Result<CurvePair> {
    use Strand::{A, B};
    let mut m = cp.map.clone();
    let xs: Vec<usize> = interior.iter().map(|&v| m.subdivide(side_b_dart(cp, v, side), cp.ids[v]).0).collect();
    let k = xs.len();
    for j in 0..k {
        let v = interior[j];
        let steps = if j + 1 < k {
            vec![(B, v), (A, interior[j + 1]), (B, xs[j + 1])]
        } else {
            vec![(B, v), (A, w), (B, u), (A, interior[0]), (B, xs[0])]
        };
        chord(&mut m, xs[j], &steps, cp, v)?;
    }
    m.delete_strand(A);
    m.smooth_all();
    CurvePair::from_map(&m, cp.genus, Strand::C)
}

/// Overlay for an arc whose ends lie on opposite sides of `a`: `c` runs beside `a'` on the
/// side where the arc meets `w`, crosses the arc near `w` and crosses `a'` near `u`.
fn crossing_overlay(cp: &CurvePair, u: usize, w: usize, interior: &[usize], forward: bool) -> Result<CurvePair> {
    use Strand::{A, B};
    let side = cp.b_out_side(w).flip();
    let mut m = cp.map.clone();
    let xs: Vec<usize> = interior.iter().map(|&v| m.subdivide(side_b_dart(cp, v, side), cp.ids[v]).0).collect();
    let y = m.subdivide(4 * w + B_IN, cp.ids[w]).0;
    let z = m.subdivide(a_start_dart(u, forward), cp.ids[u]).0;
    let k = xs.len();
    if k == 0 {
        chord(&mut m, z, &[(A, w), (B, y)], cp, u)?;
    } else {
        chord(&mut m, z, &[(A, interior[0]), (B, xs[0])], cp, u)?;
        for j in 0..k {
            let v = interior[j];
            let steps = if j + 1 < k {
                vec![(B, v), (A, interior[j + 1]), (B, xs[j + 1])]
            } else {
                vec![(B, v), (A, w), (B, y)]
            };
            chord(&mut m, xs[j], &steps, cp, v)?;
        }
    }
    chord(&mut m, y, &[(B, u), (A, z)], cp, w)?;
    m.delete_strand(A);
    m.smooth_all();
    CurvePair::from_map(&m, cp.genus, Strand::C)
}

/// Removes bigons one at a time, smallest face id first, until none remain.
pub fn reduce_to_minimal_position(cp: &CurvePair) -> Result<CurvePair> {
    let mut cur = cp.clone();
    while let Some(f) = cur.first_bigon() {
        cur = remove_bigon(&cur, f)?;
    }
    Ok(cur)
}

/// Pushes one curve across the bigon: both corner vertices disappear and the two faces
/// opposite the bigon are joined by a band.
fn remove_bigon(cp: &CurvePair, f: usize) -> Result<CurvePair> {
    let faces = cp.map.faces();
    let (c1, c2) = (faces.cycles[f][0], faces.cycles[f][1]);
    let m = &cp.map;
    let (x, y) = (m.vert(c1), m.vert(c2));
    if x == y {
        return Err(CurveError::NonOrientableSmoothing(cp.ids[x], cp.ids[y]));
    }
    if cp.n() == 2 {
        return Ok(CurvePair::disjoint(cp.genus));
    }
    let opp = |d: usize| m.next(m.next(d));
    let (e1, e2) = (m.next(c1), m.next(c2));
    let mut map = cp.map.clone();
    map.band(opp(c1), opp(c2));
    map.pair(m.twin(opp(e1)), m.twin(opp(c2)));
    map.pair(m.twin(opp(e2)), m.twin(opp(c1)));
    map.drop_vertex(x);
    map.drop_vertex(y);
    CurvePair::from_map(&map, cp.genus, Strand::A)
        .map_err(|_| CurveError::NonOrientableSmoothing(cp.ids[x], cp.ids[y]))
}

/// First returning arc along `b`; the piece whose surgery curve is essential, then the
/// one with fewer intersections with `b`, then `LeftPiece`. Without returning arcs, the
/// first innermost arc along `b` and the shorter piece.
pub fn default_strategy(cp: &CurvePair) -> Option<SurgeryChoice> {
    if cp.n() == 0 {
        return None;
    }
    let arcs = returning_arcs(cp).ok()?;
    if let Some((arc, _)) = arcs.into_iter().next() {
        let mut best: Option<(usize, ArcChoice)> = None;
        for piece in [ArcChoice::LeftPiece, ArcChoice::RightPiece] {
            if let Ok(rec) = arc_surgery(cp, &arc, piece) {
                if best.map_or(true, |(i, _)| rec.i_c_b < i) {
                    best = Some((rec.i_c_b, piece));
                }
            }
        }
        return Some(SurgeryChoice { arc, piece: best.map_or(ArcChoice::LeftPiece, |b| b.1) });
    }
    let u = cp.b_cycle[0];
    let w = cp.next_b(u);
    let fwd = cp.a_interior(u, w, true).len();
    let bwd = cp.a_interior(u, w, false).len();
    let piece = if fwd <= bwd { ArcChoice::LeftPiece } else { ArcChoice::RightPiece };
    Some(SurgeryChoice { arc: b_arc(cp, u), piece })
}

/// Repeated surgery of `a` along `b` until the curves are disjoint.
pub fn curve_surgery_sequence(
    cp: &CurvePair,
    strategy: &dyn Fn(&CurvePair) -> Option<SurgeryChoice>,
) -> Result<SurgerySequence> {
    if let Some(face) = cp.first_bigon() {
        return Err(CurveError::BigonPresent { face });
    }
    let mut cur = cp.clone();
    let mut steps = Vec::new();
    while cur.n() > 0 {
        let choice = strategy(&cur).ok_or(CurveError::StrategyStuck(cur.n()))?;
        let rec = general_arc_surgery(&cur, &choice.arc, choice.piece)?;
        debug_assert!(rec.i_c_b < cur.n());
        cur = rec.new_curve_pair.clone();
        steps.push(rec);
    }
    Ok(SurgerySequence { start: cp.clone(), steps })
}
