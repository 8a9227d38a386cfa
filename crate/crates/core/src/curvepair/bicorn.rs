use super::{returning_arcs, Bicorn, Curve, CurveError, CurvePair, EdgeRef, FaceClass, Result, Side, Subarc};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BicornStep {
    pub bicorn: Bicorn,
    /// Side of `a` on which the `b` arc leaves its start.
    pub side: Side,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedBicorns {
    /// An `a` edge on a non-rectangular face, avoided by every `a_i`.
    pub alpha: EdgeRef,
    pub steps: Vec<BicornStep>,
}

/// Indices of the `a` edges covered by an `a` subarc.
pub(crate) fn a_edges(cp: &CurvePair, arc: &Subarc) -> Vec<usize> {
    let pts = arc.points();
    (0..pts.len() - 1)
        .map(|j| {
            let (p, q) = (cp.index_of(pts[j]).unwrap(), cp.index_of(pts[j + 1]).unwrap());
            if arc.forward {
                cp.a_pos[p]
            } else {
                cp.a_pos[q]
            }
        })
        .collect()
}

pub fn nested_bicorn_sequence(cp: &CurvePair) -> Result<NestedBicorns> {
    if cp.n() == 0 {
        return Err(CurveError::NoIntersections);
    }
    let alpha = cp
        .faces()
        .into_iter()
        .filter(|f| f.class == FaceClass::NonRectangle)
        .flat_map(|f| f.boundary.into_iter().filter(|e| e.curve == Curve::A))
        .min_by_key(|e| e.index)
        .ok_or(CurveError::NoNonRectangularFace)?;
    let (b1, side) = returning_arcs(cp)?.into_iter().next().ok_or(CurveError::NoReturningArcForBicorn(0))?;
    let (u, w) = (cp.index_of(b1.start).unwrap(), cp.index_of(b1.end).unwrap());
    let mut a1 = a_subarc(cp, u, w, true);
    if a_edges(cp, &a1).contains(&alpha.index) {
        a1 = a_subarc(cp, u, w, false);
    }
    let mut steps = vec![BicornStep { bicorn: Bicorn { a_arc: a1, b_arc: b1 }, side }];
    loop {
        let ai = &steps.last().unwrap().bicorn.a_arc;
        if ai.interior.is_empty() {
            break;
        }
        let mut inner: Vec<usize> = ai.interior.iter().map(|&id| cp.index_of(id).unwrap()).collect();
        inner.sort_by_key(|&v| cp.b_pos[v]);
        let m = inner.len();
        let j = (0..m)
            .find(|&j| m > 1 && cp.sign[inner[j]] == -cp.sign[inner[(j + 1) % m]])
            .ok_or(CurveError::NoReturningArcForBicorn(steps.len()))?;
        let (p, q) = (inner[j], inner[(j + 1) % m]);
        let mut between = Vec::new();
        let mut v = cp.next_b(p);
        while v != q {
            between.push(cp.ids[v]);
            v = cp.next_b(v);
        }
        let b_arc = Subarc { curve: Curve::B, start: cp.ids[p], end: cp.ids[q], forward: true, interior: between };
        let pts = ai.points();
        let ip = pts.iter().position(|&x| x == cp.ids[p]).unwrap();
        let iq = pts.iter().position(|&x| x == cp.ids[q]).unwrap();
        let (lo, hi) = (ip.min(iq), ip.max(iq));
        let a_arc = Subarc {
            curve: Curve::A,
            start: pts[lo],
            end: pts[hi],
            forward: ai.forward,
            interior: pts[lo + 1..hi].to_vec(),
        };
        steps.push(BicornStep { bicorn: Bicorn { a_arc, b_arc }, side: cp.b_out_side(p) });
    }
    Ok(NestedBicorns { alpha, steps })
}

fn a_subarc(cp: &CurvePair, u: usize, w: usize, forward: bool) -> Subarc {
    Subarc {
        curve: Curve::A,
        start: cp.ids[u],
        end: cp.ids[w],
        forward,
        interior: cp.a_interior(u, w, forward).into_iter().map(|v| cp.ids[v]).collect(),
    }
}

/// Checks that the subarc really runs along its curve.
pub(crate) fn subarc_is_valid(cp: &CurvePair, arc: &Subarc) -> bool {
    let pts = arc.points();
    let Some(idx) = pts.iter().map(|&id| cp.index_of(id)).collect::<Option<Vec<_>>>() else {
        return false;
    };
    let step = |v: usize| match (arc.curve, arc.forward) {
        (Curve::A, true) => cp.next_a(v),
        (Curve::A, false) => cp.prev_a(v),
        (Curve::B, true) => cp.next_b(v),
        (Curve::B, false) => cp.prev_b(v),
    };
    let mut seen = std::collections::BTreeSet::new();
    let distinct = idx.iter().all(|v| seen.insert(*v)) || (idx.len() == 2 && idx[0] == idx[1]);
    distinct && idx.windows(2).all(|w| step(w[0]) == w[1])
}

impl Bicorn {
    /// Both arcs are genuine subarcs sharing exactly their endpoints.
    pub fn is_embedded(&self, cp: &CurvePair) -> bool {
        if self.a_arc.curve != Curve::A || self.b_arc.curve != Curve::B {
            return false;
        }
        if !subarc_is_valid(cp, &self.a_arc) || !subarc_is_valid(cp, &self.b_arc) {
            return false;
        }
        let mut ends_a = [self.a_arc.start, self.a_arc.end];
        let mut ends_b = [self.b_arc.start, self.b_arc.end];
        ends_a.sort_unstable();
        ends_b.sort_unstable();
        if ends_a != ends_b || ends_a[0] == ends_a[1] {
            return false;
        }
        !self.b_arc.interior.iter().any(|v| self.a_arc.interior.contains(v))
    }
}

impl NestedBicorns {
    /// Recomputes every structural claim about the sequence.
    pub fn verify(&self, cp: &CurvePair) -> std::result::Result<(), String> {
        let faces = cp.faces();
        let alpha_ok = faces
            .iter()
            .any(|f| f.class == FaceClass::NonRectangle && f.boundary.contains(&self.alpha));
        if !alpha_ok {
            return Err(format!("{} is not on a non-rectangular face", self.alpha));
        }
        for (i, step) in self.steps.iter().enumerate() {
            let c = &step.bicorn;
            if !c.is_embedded(cp) {
                return Err(format!("bicorn {i} is not embedded"));
            }
            if a_edges(cp, &c.a_arc).contains(&self.alpha.index) {
                return Err(format!("bicorn {i} is degenerate"));
            }
            let (p, q) = (cp.index_of(c.b_arc.start).unwrap(), cp.index_of(c.b_arc.end).unwrap());
            if cp.sign[p] != -cp.sign[q] {
                return Err(format!("b arc of bicorn {i} is not returning"));
            }
            if step.side != cp.b_out_side(p) {
                return Err(format!("side of bicorn {i} is wrong"));
            }
            if i == 0 {
                if !c.b_arc.interior.is_empty() {
                    return Err("first b arc is not innermost".into());
                }
                continue;
            }
            let prev = &self.steps[i - 1].bicorn.a_arc;
            let prev_pts = prev.points();
            if !c.a_arc.points().iter().all(|v| prev_pts.contains(v)) || c.a_arc.forward != prev.forward {
                return Err(format!("a arc {i} is not nested in a arc {}", i - 1));
            }
            if !prev.interior.contains(&c.b_arc.start) || !prev.interior.contains(&c.b_arc.end) {
                return Err(format!("b arc {i} does not end on the interior of a arc {}", i - 1));
            }
            if c.b_arc.interior.iter().any(|v| prev.interior.contains(v)) {
                return Err(format!("b arc {i} is not innermost for bicorn {}", i - 1));
            }
        }
        match self.steps.last() {
            Some(s) if s.bicorn.a_arc.interior.is_empty() => Ok(()),
            _ => Err("final bicorn still meets b".into()),
        }
    }
}
