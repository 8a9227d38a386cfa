//! Slow, obviously-correct reference implementations used only to cross-check the main
//! crate. Nothing here is clever on purpose.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// All perfect matchings of `items`, generated without pruning.
pub fn all_matchings(items: &[u32]) -> Vec<Vec<(u32, u32)>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = items[0];
    let mut out = Vec::new();
    for k in 1..items.len() {
        let rest: Vec<u32> = items[1..].iter().enumerate().filter(|(i, _)| i + 1 != k).map(|(_, &x)| x).collect();
        for mut m in all_matchings(&rest) {
            m.push((first.min(items[k]), first.max(items[k])));
            m.sort_unstable();
            out.push(m);
        }
    }
    out
}

/// Two chords interleave on a circle when reading the circle from one endpoint of the
/// first gives the label pattern `x y x y`.
pub fn interleave(circle: &[u32], c1: (u32, u32), c2: (u32, u32)) -> bool {
    let start = circle.iter().position(|&v| v == c1.0).unwrap();
    let labels: Vec<char> = (0..circle.len())
        .map(|i| circle[(start + i) % circle.len()])
        .filter_map(|v| {
            if v == c1.0 || v == c1.1 {
                Some('x')
            } else if v == c2.0 || v == c2.1 {
                Some('y')
            } else {
                None
            }
        })
        .collect();
    labels == ['x', 'y', 'x', 'y']
}

/// Number of matchings unlinked on both circles, and the smallest one in sorted order.
pub fn unlinked_matchings(a_order: &[u32], b_order: &[u32]) -> (u64, Option<Vec<(u32, u32)>>) {
    let mut items = a_order.to_vec();
    items.sort_unstable();
    let mut good: Vec<Vec<(u32, u32)>> = all_matchings(&items)
        .into_iter()
        .filter(|m| {
            m.iter().enumerate().all(|(i, &c1)| {
                m[i + 1..].iter().all(|&c2| !interleave(a_order, c1, c2) && !interleave(b_order, c1, c2))
            })
        })
        .collect();
    good.sort();
    (good.len() as u64, good.into_iter().next())
}

/// Faces of a rotation system given as permutations: `sigma` rotates darts around
/// vertices, `alpha` pairs darts into edges. Faces are cycles of `sigma ∘ alpha`.
pub fn face_count(sigma: &[usize], alpha: &[usize]) -> usize {
    let n = sigma.len();
    let mut seen = vec![false; n];
    let mut faces = 0;
    for d in 0..n {
        if seen[d] {
            continue;
        }
        faces += 1;
        let mut x = d;
        while !seen[x] {
            seen[x] = true;
            x = sigma[alpha[x]];
        }
    }
    faces
}

/// Face count of a curve pair given as cyclic orders and per-vertex signs (`true` for
/// the rotation `a+ b+ a- b-`). Darts are `4i + k` with `k` = a-out, b-out, a-in, b-in.
pub fn curve_pair_faces(a_order: &[u32], b_order: &[u32], positive: &BTreeMap<u32, bool>) -> usize {
    let ids: Vec<u32> = positive.keys().copied().collect();
    let idx = |v: u32| ids.iter().position(|&x| x == v).unwrap();
    let n = ids.len();
    let mut sigma = vec![0; 4 * n];
    let mut alpha = vec![0; 4 * n];
    for (i, &v) in ids.iter().enumerate() {
        let order = if positive[&v] { [0, 1, 2, 3] } else { [0, 3, 2, 1] };
        for j in 0..4 {
            sigma[4 * i + order[j]] = 4 * i + order[(j + 1) % 4];
        }
    }
    for (order, out, inn) in [(a_order, 0, 2), (b_order, 1, 3)] {
        for j in 0..order.len() {
            let (p, q) = (idx(order[j]), idx(order[(j + 1) % order.len()]));
            alpha[4 * p + out] = 4 * q + inn;
            alpha[4 * q + inn] = 4 * p + out;
        }
    }
    face_count(&sigma, &alpha)
}

/// All-pairs distances by Floyd–Warshall on integer edge lengths; `None` is infinity.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, i64)]) -> Vec<Vec<Option<i64>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for &(u, v, w) in edges {
        for (x, y) in [(u, v), (v, u)] {
            if d[x][y].map_or(true, |old| w < old) {
                d[x][y] = Some(w);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].map_or(true, |old| a + b < old) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Four-point hyperbolicity constant, doubled so it stays an integer when the distances
/// are integers: returns `2δ = max over quadruples of (largest sum - middle sum)`.
/// Distances must be finite.
pub fn four_point_delta_doubled(d: &[Vec<i64>]) -> i64 {
    let n = d.len();
    let mut best = 0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    let mut s = [d[x][y] + d[z][w], d[x][z] + d[y][w], d[x][w] + d[y][z]];
                    s.sort_unstable();
                    best = best.max(s[2] - s[1]);
                }
            }
        }
    }
    best
}

/// Breadth-first distances from `src` in an unweighted graph.
pub fn bfs(adj: &[Vec<usize>], src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[src] = Some(0);
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                q.push_back(v);
            }
        }
    }
    dist
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Farey graph distance by breadth-first search over reduced fractions `p/q` with
/// `|p|, q <= bound` (`1/0` included). Edges join `p/q` and `r/s` when `|ps - qr| = 1`.
pub fn farey_distance(from: (i64, i64), to: (i64, i64), bound: i64) -> Option<usize> {
    let mut verts = vec![(1, 0)];
    for q in 1..=bound {
        for p in -bound..=bound {
            if gcd(p, q) == 1 {
                verts.push((p, q));
            }
        }
    }
    let norm = |(p, q): (i64, i64)| if q < 0 || (q == 0 && p < 0) { (-p, -q) } else { (p, q) };
    let (from, to) = (norm(from), norm(to));
    let s = verts.iter().position(|&v| v == from)?;
    let t = verts.iter().position(|&v| v == to)?;
    let adj: Vec<Vec<usize>> = verts
        .iter()
        .map(|&(p, q)| {
            (0..verts.len())
                .filter(|&j| {
                    let (r, s) = verts[j];
                    (p * s - q * r).abs() == 1
                })
                .collect()
        })
        .collect();
    bfs(&adj, s)[t]
}

/// Nonzero weights in `0..=max` per branch satisfying every switch equation.
///
/// `switches[s] = (side0, side1)` lists the branch of each end on that side.
pub fn switch_solutions(n_branches: usize, switches: &[(Vec<usize>, Vec<usize>)], max: u8) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let total = (max as usize + 1).pow(n_branches as u32);
    for code in 1..total {
        let mut w = vec![0u8; n_branches];
        let mut c = code;
        for x in w.iter_mut() {
            *x = (c % (max as usize + 1)) as u8;
            c /= max as usize + 1;
        }
        let ok = switches.iter().all(|(l, r)| {
            let sl: u32 = l.iter().map(|&b| w[b] as u32).sum();
            let sr: u32 = r.iter().map(|&b| w[b] as u32).sum();
            sl == sr
        });
        if ok {
            out.push(w);
        }
    }
    out
}

/// Number of closed curves drawn by `w` parallel strands per branch.
///
/// `switches[s] = (side0, side1)` lists ends `(branch, k)` counterclockwise, `k = 0` for
/// the start of the branch. Strands are walked one at a time: a strand at position `i`
/// of an end leaves through position `w - 1 - i` at the other end of the branch, and at
/// a switch the `j`-th strand of one side (counterclockwise) continues as the
/// `(W - 1 - j)`-th strand of the other side.
pub fn strand_cycles(switches: &[(Vec<(usize, usize)>, Vec<(usize, usize)>)], w: &[u32]) -> Option<usize> {
    // where each end sits: (switch, side, offset of its first strand on that side)
    let mut at: BTreeMap<(usize, usize), (usize, usize, usize)> = BTreeMap::new();
    let mut width = Vec::new();
    for (s, (l, r)) in switches.iter().enumerate() {
        let mut ws = [0usize; 2];
        for (side, list) in [l, r].into_iter().enumerate() {
            for &(b, k) in list {
                at.insert((b, k), (s, side, ws[side]));
                ws[side] += w[b] as usize;
            }
        }
        if ws[0] != ws[1] {
            return None;
        }
        width.push(ws[0]);
    }
    let mut owner: BTreeMap<(usize, usize, usize), (usize, usize, usize)> = BTreeMap::new();
    for (&(b, k), &(s, side, off)) in &at {
        for i in 0..w[b] as usize {
            owner.insert((s, side, off + i), (b, k, i));
        }
    }
    let mut seen: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    let mut cycles = 0;
    for (&start, _) in &owner {
        if seen.contains(&start) {
            continue;
        }
        cycles += 1;
        let mut cur = start;
        while seen.insert(cur) {
            let (b, k, i) = owner[&cur];
            let (s, side, off) = at[&(b, 1 - k)];
            let arrive = (s, side, off + w[b] as usize - 1 - i);
            seen.insert(arrive);
            cur = (s, 1 - side, width[s] - 1 - (arrive.2));
        }
    }
    Some(cycles)
}

/// Keeps the vectors whose support contains no other vector's support strictly.
pub fn minimal_supports(sols: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let supp = |v: &Vec<u8>| -> Vec<bool> { v.iter().map(|&x| x > 0).collect() };
    sols.iter()
        .filter(|v| {
            let sv = supp(v);
            !sols.iter().any(|u| {
                let su = supp(u);
                su != sv && su.iter().zip(&sv).all(|(&a, &b)| !a || b)
            })
        })
        .cloned()
        .collect()
}

/// Exact law of the reduced word length after `n` uniform steps on the free group of
/// rank 2: entry `k` is the number of the `4^n` step sequences ending at length `k`.
pub fn free_group_length_counts(n: usize) -> Vec<u128> {
    let mut c = vec![1u128];
    for _ in 0..n {
        let mut next = vec![0u128; c.len() + 1];
        for (k, &w) in c.iter().enumerate() {
            if k == 0 {
                next[1] += 4 * w;
            } else {
                next[k + 1] += 3 * w;
                next[k - 1] += w;
            }
        }
        c = next;
    }
    c
}
