//! Cut distance from a graph to the constant graphon `p`.
//!
//! The step kernel is `K(u,v) = X_uv - p`, including the diagonal cells where
//! `X_uu = 0`. For a fixed row set `S`, `Σ_{u∈S, v∈T} K(u,v)` is linear in the
//! indicator of `T`, so the supremum over measurable `T` is attained at the
//! union of cells with positive column sum (and, for the other sign, negative
//! column sum). The same argument applied to `S` shows cell-aligned sets are
//! enough, which makes the subset enumeration exact.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{ErgmError, Result};
use crate::graph::Graph;
use crate::rng::stream;

/// Largest `n` for which the exact enumeration is attempted.
pub const N_EXACT_CUT: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutMode {
    Exact,
    /// Greedy lower bound from `starts` random initial sets, spectral upper bound.
    Bounds { starts: usize, seed: u64 },
    /// Exact when `n <= N_EXACT_CUT`, bounds otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum CutDistance {
    Exact(f64),
    Bounds { lower: f64, upper: f64 },
}

impl CutDistance {
    pub fn lower(&self) -> f64 {
        match *self {
            CutDistance::Exact(v) => v,
            CutDistance::Bounds { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            CutDistance::Exact(v) => v,
            CutDistance::Bounds { upper, .. } => upper,
        }
    }
}

fn mask_of(n: usize, removed: &[usize]) -> Result<Vec<bool>> {
    let mut keep = vec![true; n];
    for &u in removed {
        if u >= n {
            return Err(ErgmError::VertexOutOfRange { vertex: u, n });
        }
        keep[u] = false;
    }
    Ok(keep)
}

/// `δ_□(X, p)`.
pub fn cut_distance_const(x: &Graph, p: f64, mode: CutMode) -> Result<CutDistance> {
    restricted_cut_distance(x, &[], p, mode)
}

/// Cut distance after replacing the rows and columns of `s` by the constant `p`.
pub fn restricted_cut_distance(x: &Graph, s: &[usize], p: f64, mode: CutMode) -> Result<CutDistance> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ErgmError::InvalidProbability(p));
    }
    let keep = mask_of(x.n(), s)?;
    match mode {
        CutMode::Exact => Ok(CutDistance::Exact(exact(x, &keep, p)?)),
        CutMode::Auto if x.n() <= N_EXACT_CUT => Ok(CutDistance::Exact(exact(x, &keep, p)?)),
        CutMode::Auto => Ok(bounds(x, &keep, p, 32, 0)),
        CutMode::Bounds { starts, seed } => Ok(bounds(x, &keep, p, starts.max(1), seed)),
    }
}

/// Best `T` against fixed column sums `a_v - p|S|` over kept vertices: returns
/// `max(Σ_{v∈T} (a_v - p s))` over both signs, as `|A_T - p·s·|T||`.
#[inline]
fn best_response(a: &[i64], keep: &[bool], s: usize, p: f64) -> f64 {
    let ps = p * s as f64;
    let (mut pos_a, mut pos_t, mut neg_a, mut neg_t) = (0i64, 0usize, 0i64, 0usize);
    for (v, &av) in a.iter().enumerate() {
        if !keep[v] {
            continue;
        }
        let d = av as f64 - ps;
        if d > 0.0 {
            pos_a += av;
            pos_t += 1;
        } else if d < 0.0 {
            neg_a += av;
            neg_t += 1;
        }
    }
    let pos = pos_a as f64 - p * (s * pos_t) as f64;
    let neg = p * (s * neg_t) as f64 - neg_a as f64;
    pos.max(neg)
}

fn exact(x: &Graph, keep: &[bool], p: f64) -> Result<f64> {
    let n = x.n();
    if n > N_EXACT_CUT {
        return Err(ErgmError::TooLarge { what: "exact cut distance", n, max: N_EXACT_CUT });
    }
    let verts: Vec<usize> = (0..n).filter(|&u| keep[u]).collect();
    let m = verts.len();
    let mut a = vec![0i64; n];
    let mut in_s = vec![false; n];
    let mut size = 0usize;
    let mut best = 0.0f64;
    // Gray code: step i toggles bit trailing_zeros(i)
    for i in 1u64..(1u64 << m) {
        let u = verts[i.trailing_zeros() as usize];
        let sign = if in_s[u] { -1 } else { 1 };
        in_s[u] = !in_s[u];
        if sign > 0 {
            size += 1;
        } else {
            size -= 1;
        }
        for v in x.neighbors(u) {
            a[v] += sign;
        }
        best = best.max(best_response(&a, keep, size, p));
    }
    Ok(best / (n * n) as f64)
}

fn bounds(x: &Graph, keep: &[bool], p: f64, starts: usize, seed: u64) -> CutDistance {
    let lower = greedy_lower(x, keep, p, starts, seed);
    let upper = spectral_upper_masked(x, keep, p);
    CutDistance::Bounds { lower, upper: upper.max(lower) }
}

/// Value of the pair `(S, T)` for the given sign.
fn pair_value(x: &Graph, keep: &[bool], s: &[bool], t: &[bool], p: f64) -> f64 {
    let mut a_total = 0i64;
    let ss = s.iter().zip(keep).filter(|(a, b)| **a && **b).count();
    let tt = t.iter().zip(keep).filter(|(a, b)| **a && **b).count();
    for u in (0..x.n()).filter(|&u| s[u] && keep[u]) {
        a_total += x.neighbors(u).filter(|&v| t[v] && keep[v]).count() as i64;
    }
    (a_total as f64 - p * (ss * tt) as f64).abs()
}

/// Sets `t` to the best response to `s` for sign `sign` (+1 or -1).
fn respond(x: &Graph, keep: &[bool], s: &[bool], p: f64, sign: f64, t: &mut [bool]) {
    let n = x.n();
    let size = (0..n).filter(|&u| s[u] && keep[u]).count();
    let mut a = vec![0i64; n];
    for u in (0..n).filter(|&u| s[u] && keep[u]) {
        for v in x.neighbors(u) {
            a[v] += 1;
        }
    }
    for v in 0..n {
        t[v] = keep[v] && sign * (a[v] as f64 - p * size as f64) > 0.0;
    }
}

/// Alternating maximisation; every value returned is attained by some pair of
/// vertex sets, so it never exceeds the true distance.
fn greedy_lower(x: &Graph, keep: &[bool], p: f64, starts: usize, seed: u64) -> f64 {
    let n = x.n();
    let mut rng = stream(seed, 0xC07);
    let mut best = 0.0f64;
    let mut s = vec![false; n];
    let mut t = vec![false; n];
    for start in 0..starts {
        for sign in [1.0, -1.0] {
            for u in 0..n {
                s[u] = if start == 0 { true } else { rng.random::<bool>() };
            }
            let mut val = -1.0;
            for _ in 0..100 {
                respond(x, keep, &s, p, sign, &mut t);
                respond(x, keep, &t, p, sign, &mut s);
                let v = pair_value(x, keep, &s, &t, p);
                if v <= val {
                    break;
                }
                val = v;
            }
            best = best.max(val.max(0.0));
        }
    }
    best / (n * n) as f64
}

/// `‖K‖_2 / n`, an upper bound on the cut distance since
/// `|1_Sᵀ K 1_T| ≤ ‖K‖_2 ‖1_S‖ ‖1_T‖ ≤ n ‖K‖_2`.
pub fn spectral_upper(x: &Graph, p: f64) -> f64 {
    spectral_upper_masked(x, &vec![true; x.n()], p)
}

fn spectral_upper_masked(x: &Graph, keep: &[bool], p: f64) -> f64 {
    let n = x.n();
    let k = DMatrix::from_fn(n, n, |u, v| {
        if !keep[u] || !keep[v] {
            0.0
        } else if u != v && x.has_edge(u, v) {
            1.0 - p
        } else {
            -p
        }
    });
    let eig = k.symmetric_eigenvalues();
    let norm = eig.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    // relative slack for the eigensolver's rounding
    norm * (1.0 + 1e-12) / n as f64 + 1e-15
}

/// Upper bound on `δ_□(X, p)` that treats the rows of `s` separately: the
/// spectral bound of the kernel with `s` masked, plus the total absolute mass
/// of the masked rows and columns over `n²`. Much tighter than
/// [`spectral_upper`] when a few vertices deviate from an otherwise flat graph.
pub fn split_upper(x: &Graph, s: &[usize], p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ErgmError::InvalidProbability(p));
    }
    let n = x.n();
    let keep = mask_of(n, s)?;
    let mut mass = 0.0;
    for u in (0..n).filter(|&u| !keep[u]) {
        let d = x.degree(u) as f64;
        // row u: d cells at 1 - p, n - d cells at -p (diagonal included)
        mass += d * (1.0 - p) + (n as f64 - d) * p;
    }
    let nn = (n * n) as f64;
    Ok(spectral_upper_masked(x, &keep, p) + 2.0 * mass / nn)
}

/// Exhaustive `2^n × 2^n` enumeration, for cross-checking only.
pub fn cut_distance_naive(x: &Graph, p: f64) -> Result<f64> {
    let n = x.n();
    if n > 10 {
        return Err(ErgmError::TooLarge { what: "naive cut enumeration", n, max: 10 });
    }
    let rows: Vec<u64> = (0..n).map(|u| x.row(u)[0]).collect();
    let mut best = 0.0f64;
    for s in 0u64..(1 << n) {
        let mut col = vec![0i64; n];
        for u in (0..n).filter(|&u| s >> u & 1 == 1) {
            for (v, c) in col.iter_mut().enumerate() {
                *c += (rows[u] >> v & 1) as i64;
            }
        }
        let size = s.count_ones() as usize;
        for t in 0u64..(1 << n) {
            let a: i64 = (0..n).filter(|&v| t >> v & 1 == 1).map(|v| col[v]).sum();
            let val = (a as f64 - p * (size * t.count_ones() as usize) as f64).abs();
            best = best.max(val);
        }
    }
    Ok(best / (n * n) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn split_upper_dominates_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let mut x = Graph::sample_gnp(12, 0.8, &mut rng).unwrap();
            for v in 1..12 {
                x.set_edge(crate::graph::EdgeId::new(0, v).unwrap(), v % 4 == 0);
            }
            let exact = cut_distance_const(&x, 0.8, CutMode::Exact).unwrap().upper();
            assert!(split_upper(&x, &[0], 0.8).unwrap() >= exact);
        }
    }

    #[test]
    fn empty_graph_is_p_away() {
        let g = Graph::new_empty(7).unwrap();
        for p in [0.0, 0.25, 0.5, 0.9] {
            let d = cut_distance_const(&g, p, CutMode::Exact).unwrap();
            assert!((d.upper() - p).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let n = rng.random_range(1..=7);
            let x = Graph::sample_gnp(n, 0.5, &mut rng).unwrap();
            let p = rng.random_range(0.0..1.0);
            let fast = cut_distance_const(&x, p, CutMode::Exact).unwrap().upper();
            assert_eq!(fast, cut_distance_naive(&x, p).unwrap());
        }
    }

    #[test]
    fn bounds_bracket_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..10 {
            let x = Graph::sample_gnp(12, 0.5, &mut rng).unwrap();
            let exact = cut_distance_const(&x, 0.5, CutMode::Exact).unwrap().upper();
            let b = cut_distance_const(&x, 0.5, CutMode::Bounds { starts: 32, seed: 1 }).unwrap();
            assert!(b.lower() <= exact && exact <= b.upper());
        }
    }

    #[test]
    fn restriction_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = Graph::sample_gnp(9, 0.4, &mut rng).unwrap();
        let full = cut_distance_const(&x, 0.3, CutMode::Exact).unwrap();
        assert_eq!(restricted_cut_distance(&x, &[], 0.3, CutMode::Exact).unwrap(), full);
        let all: Vec<usize> = (0..9).collect();
        assert_eq!(restricted_cut_distance(&x, &all, 0.3, CutMode::Exact).unwrap().upper(), 0.0);
        assert!(cut_distance_const(&Graph::new_empty(23).unwrap(), 0.3, CutMode::Exact).is_err());
    }
}
