use super::{gromov_product, half, nearest_point_projection, CoarseError, ElectrifiedGraph, Metric, MetricGraph, Result};
use crate::Q;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// Largest `L` for which the family is `L`-well-separated.
    pub l_star: Q,
    /// Largest `M` with consecutive images at electrified distance at least `M`.
    pub m_star: Q,
    pub consecutive: Vec<Q>,
    /// Distance between the projections of the neighbours of each interior set.
    pub projection_gaps: Vec<Q>,
    pub electrified: Vec<Q>,
}

pub fn separation_report(g: &MetricGraph, z: &[Vec<usize>], e: &ElectrifiedGraph) -> Result<SeparationReport> {
    if z.len() < 3 {
        return Err(CoarseError::FamilyTooSmall(z.len(), 3));
    }
    let m = Metric::new(g);
    let me = Metric::new(&e.graph);
    let mut consecutive = Vec::new();
    let mut electrified = Vec::new();
    for w in z.windows(2) {
        consecutive.push(half(m.set_d2(&w[0], &w[1])?));
        let a: Vec<usize> = w[0].iter().map(|&v| e.project(v)).collect();
        let b: Vec<usize> = w[1].iter().map(|&v| e.project(v)).collect();
        electrified.push(half(me.set_d2(&a, &b)?));
    }
    let mut projection_gaps = Vec::new();
    for i in 1..z.len() - 1 {
        let p = nearest_point_projection(&m, &z[i - 1], &z[i])?;
        let q = nearest_point_projection(&m, &z[i + 1], &z[i])?;
        if p.is_empty() {
            return Err(CoarseError::EmptyProjection(i));
        }
        projection_gaps.push(half(m.set_d2(&p, &q)?));
    }
    let l_star = consecutive.iter().chain(&projection_gaps).copied().min().unwrap_or_else(Q::zero);
    let m_star = electrified.iter().copied().min().unwrap_or_else(Q::zero);
    Ok(SeparationReport { l_star, m_star, consecutive, projection_gaps, electrified })
}

/// A path through a graph with the corner points it was assembled from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRecord {
    pub vertices: Vec<usize>,
    pub segment_lengths: Vec<Q>,
    /// Positions in `vertices` of the corner points, in order.
    pub corners: Vec<usize>,
    /// `(prev . next)_corner` at every interior corner.
    pub corner_products: Vec<Q>,
    pub constants: QgConstants,
    pub notes: Vec<String>,
}

/// Concatenates geodesics `[q_0, p_1], [p_1, q_1], ..., [q_{k-2}, p_{k-1}]`, where `p_i`
/// is the first point of the projection of `Z_{i-1}` to `Z_i` and `q_i` that of
/// `Z_{i+1}`.
pub fn piecewise_geodesic(g: &MetricGraph, z: &[Vec<usize>]) -> Result<PathRecord> {
    if z.len() < 2 {
        return Err(CoarseError::FamilyTooSmall(z.len(), 2));
    }
    let m = Metric::new(g);
    let first_of = |from: &[usize], i: usize| -> Result<usize> {
        nearest_point_projection(&m, from, &z[i])?.first().copied().ok_or(CoarseError::EmptyProjection(i))
    };
    let k = z.len();
    let mut points = vec![first_of(&z[1], 0)?];
    let mut notes = Vec::new();
    for i in 1..k {
        let p = first_of(&z[i - 1], i)?;
        points.push(p);
        if i + 1 < k {
            let q = first_of(&z[i + 1], i)?;
            if m.d2(p, q)? == 0 {
                notes.push(format!("corner {i}: projections meet"));
            }
            points.push(q);
        }
    }
    let mut vertices = vec![points[0]];
    let mut corners = vec![0];
    let mut segment_lengths = Vec::new();
    for w in points.windows(2) {
        let seg = m.geodesic(w[0], w[1])?;
        segment_lengths.push(m.d(w[0], w[1])?);
        vertices.extend(&seg[1..]);
        corners.push(vertices.len() - 1);
    }
    let mut corner_products = Vec::new();
    for i in 1..points.len() - 1 {
        corner_products.push(gromov_product(&m, points[i], points[i - 1], points[i + 1])?);
    }
    let constants = quasigeodesic_constants(g, &vertices)?;
    Ok(PathRecord { vertices, segment_lengths, corners, corner_products, constants, notes })
}

/// Measured quasigeodesic constants of a finite path, reported as a Pareto pair: the
/// additive constant at slope one, and the slope needed with no additive constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QgConstants {
    pub k: Q,
    pub c: Q,
    /// `None` when a repeated point makes a zero additive constant impossible.
    pub k_without_c: Option<Q>,
}

fn measure(t: &[Q], d: &dyn Fn(usize, usize) -> Result<Q>) -> Result<QgConstants> {
    let mut c = Q::zero();
    let mut k0 = Some(Q::from_integer(1));
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            let l = t[j] - t[i];
            let dij = d(i, j)?;
            c = c.max((l - dij).abs());
            k0 = match (k0, l.is_zero(), dij.is_zero()) {
                (Some(k), true, true) => Some(k),
                (Some(k), false, false) => Some(k.max(l / dij).max(dij / l)),
                _ => None,
            };
        }
    }
    Ok(QgConstants { k: Q::from_integer(1), c, k_without_c: k0 })
}

/// Arc-length parameter: cumulative distance between consecutive vertices.
fn arc_length(m: &Metric, path: &[usize]) -> Result<Vec<Q>> {
    let mut t = vec![Q::zero()];
    for w in path.windows(2) {
        let last = *t.last().unwrap();
        t.push(last + m.d(w[0], w[1])?);
    }
    Ok(t)
}

pub fn quasigeodesic_constants(g: &MetricGraph, path: &[usize]) -> Result<QgConstants> {
    if path.len() < 2 {
        return Err(CoarseError::PathTooShort);
    }
    let m = Metric::new(g);
    let t = arc_length(&m, path)?;
    measure(&t, &|i, j| m.d(path[i], path[j]))
}

/// `(1/K) l - c <= d <= K l + c` for every pair of points at most `window` apart along
/// the path.
pub fn local_qg_check(g: &MetricGraph, path: &[usize], k: Q, c: Q, window: Q) -> Result<bool> {
    if path.len() < 2 {
        return Err(CoarseError::PathTooShort);
    }
    let m = Metric::new(g);
    let t = arc_length(&m, path)?;
    for i in 0..path.len() {
        for j in i + 1..path.len() {
            let l = t[j] - t[i];
            if l > window {
                break;
            }
            let d = m.d(path[i], path[j])?;
            if l / k - c > d || d > k * l + c {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Collapses maximal runs of electrified diameter at most one to their first point.
fn contract(m: &Metric, path: &[usize]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < path.len() {
        let mut j = i;
        'grow: while j + 1 < path.len() {
            for &x in &path[i..=j] {
                if m.d2(x, path[j + 1])? > 2 {
                    break 'grow;
                }
            }
            j += 1;
        }
        out.push(path[i]);
        i = j + 1;
    }
    Ok(out)
}

/// Constants of the contracted image of `path` in the electrified graph, parameterised by
/// position in the contracted sequence.
pub fn reparam_constants(e: &ElectrifiedGraph, path: &[usize]) -> Result<QgConstants> {
    if path.len() < 2 {
        return Err(CoarseError::PathTooShort);
    }
    let m = Metric::new(&e.graph);
    let image: Vec<usize> = path.iter().map(|&v| e.project(v)).collect();
    let seq = contract(&m, &image)?;
    let t: Vec<Q> = (0..seq.len()).map(|i| Q::from_integer(i as i64)).collect();
    measure(&t, &|i, j| m.d(seq[i], seq[j]))
}

pub fn reparam_qg_check(e: &ElectrifiedGraph, path: &[usize], k: Q, c: Q) -> Result<bool> {
    if path.len() < 2 {
        return Err(CoarseError::PathTooShort);
    }
    let m = Metric::new(&e.graph);
    let image: Vec<usize> = path.iter().map(|&v| e.project(v)).collect();
    let seq = contract(&m, &image)?;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            let l = Q::from_integer((j - i) as i64);
            let d = m.d(seq[i], seq[j])?;
            if l / k - c > d || d > k * l + c {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
