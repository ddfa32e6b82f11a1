//! Homomorphism densities, edge-flip deltas, and restricted densities.
//!
//! Counts are exact integers (`u128`) up to the final division by `n^k`.
//! Maps are not required to be injective; the zero diagonal of the adjacency
//! kills maps that send adjacent template vertices to the same vertex.

use crate::graph::{EdgeId, Graph};
use crate::template::{TemplateGraph, TemplateKind};

/// How a template edge is checked during a pinned enumeration.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    /// Against the graph as stored.
    Base,
    /// Against `X^{-e}`.
    Minus,
    /// Against `X^{+e}`.
    Plus,
}

struct Counter<'a> {
    x: &'a Graph,
    h: &'a TemplateGraph,
    words: usize,
    allowed: Vec<u64>,
    side: [[Side; 8]; 8],
    flip: (usize, usize),
    order: Vec<usize>,
    /// No later vertex in `order` is adjacent to this one.
    independent: Vec<bool>,
    assign: [usize; 8],
    placed: u16,
    buf: Vec<u64>,
}

impl<'a> Counter<'a> {
    fn new(x: &'a Graph, h: &'a TemplateGraph) -> Self {
        let words = x.row_words();
        let n = x.n();
        let mut allowed = vec![u64::MAX; words];
        if !n.is_multiple_of(64) {
            allowed[words - 1] = (1u64 << (n % 64)) - 1;
        }
        Counter {
            x,
            h,
            words,
            allowed,
            side: [[Side::Base; 8]; 8],
            flip: (usize::MAX, usize::MAX),
            order: Vec::new(),
            independent: Vec::new(),
            assign: [0; 8],
            placed: 0,
            buf: vec![0; words * h.k()],
        }
    }

    fn forbid(&mut self, u: usize) {
        self.allowed[u / 64] &= !(1u64 << (u % 64));
    }

    fn pin(&mut self, i: usize, w: usize) {
        self.assign[i] = w;
        self.placed |= 1 << i;
    }

    fn plan(&mut self) {
        let k = self.h.k();
        let mut placed = self.placed;
        self.order.clear();
        while (placed.count_ones() as usize) < k {
            let next = (0..k)
                .filter(|&i| placed & (1 << i) == 0)
                .max_by_key(|&i| {
                    let a = self.h.adjacency(i);
                    ((a & placed).count_ones(), a.count_ones(), std::cmp::Reverse(i))
                })
                .expect("unplaced vertex");
            self.order.push(next);
            placed |= 1 << next;
        }
        self.independent = (0..self.order.len())
            .map(|d| self.order[d + 1..].iter().all(|&w| self.h.adjacency(self.order[d]) & (1 << w) == 0))
            .collect();
    }

    /// Word `wi` of the adjacency row of `w` as seen on `side`.
    #[inline]
    fn row_word(&self, w: usize, wi: usize, side: Side) -> u64 {
        let mut r = self.x.row(w)[wi];
        if side != Side::Base {
            let (a, b) = self.flip;
            let other = if w == a {
                b
            } else if w == b {
                a
            } else {
                return r;
            };
            if other / 64 == wi {
                let bit = 1u64 << (other % 64);
                if side == Side::Plus {
                    r |= bit;
                } else {
                    r &= !bit;
                }
            }
        }
        r
    }

    fn has(&self, w: usize, z: usize, side: Side) -> bool {
        (self.row_word(w, z / 64, side) >> (z % 64)) & 1 == 1
    }

    /// Checks template edges between already pinned vertices.
    fn pins_consistent(&self) -> bool {
        self.h.edges().iter().all(|&(i, j)| {
            let both = (1u16 << i) | (1u16 << j);
            self.placed & both != both || self.has(self.assign[i], self.assign[j], self.side[i][j])
        })
    }

    fn count(mut self) -> u128 {
        if !self.pins_consistent() {
            return 0;
        }
        for i in 0..self.h.k() {
            if self.placed & (1 << i) != 0 && self.allowed[self.assign[i] / 64] >> (self.assign[i] % 64) & 1 == 0 {
                return 0;
            }
        }
        self.plan();
        if self.order.is_empty() {
            return 1;
        }
        self.level(0, self.placed)
    }

    fn level(&mut self, depth: usize, placed: u16) -> u128 {
        let v = self.order[depth];
        let nbrs = self.h.adjacency(v) & placed;
        let words = self.words;
        let base = depth * words;
        for wi in 0..words {
            let mut acc = self.allowed[wi];
            let mut m = nbrs;
            while m != 0 {
                let x = m.trailing_zeros() as usize;
                m &= m - 1;
                acc &= self.row_word(self.assign[x], wi, self.side[x][v]);
            }
            self.buf[base + wi] = acc;
        }
        if depth + 1 == self.order.len() {
            return self.buf[base..base + words].iter().map(|w| w.count_ones() as u128).sum();
        }
        if self.independent[depth] {
            // later candidate sets do not depend on where v goes
            let here: u128 = self.buf[base..base + words].iter().map(|w| w.count_ones() as u128).sum();
            if here == 0 {
                return 0;
            }
            return here * self.level(depth + 1, placed | (1 << v));
        }
        let mut total = 0u128;
        for wi in 0..words {
            let mut word = self.buf[base + wi];
            while word != 0 {
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                self.assign[v] = wi * 64 + b;
                total += self.level(depth + 1, placed | (1 << v));
            }
        }
        total
    }
}

fn n_pow(n: usize, k: usize) -> f64 {
    (n as f64).powi(k as i32)
}

/// Number of homomorphisms `H -> X`.
pub fn hom_count(h: &TemplateGraph, x: &Graph) -> u128 {
    Counter::new(x, h).count()
}

/// `t(H, X)`.
pub fn hom_density(h: &TemplateGraph, x: &Graph) -> f64 {
    hom_count(h, x) as f64 / n_pow(x.n(), h.k())
}

/// `hom(H, X^{+e}) - hom(H, X^{-e})`, using a closed form when one exists.
pub fn delta_hom_count(h: &TemplateGraph, x: &Graph, e: EdgeId) -> u128 {
    let (u, v) = e.endpoints();
    match h.kind() {
        TemplateKind::Edge => 2,
        TemplateKind::Triangle => 6 * triangle_codegree(x, u, v) as u128,
        TemplateKind::Star(s) => {
            let present = x.contains(e) as usize;
            let du = (x.degree(u) - present) as u128;
            let dv = (x.degree(v) - present) as u128;
            let s = s as u32;
            (du + 1).pow(s) - du.pow(s) + (dv + 1).pow(s) - dv.pow(s)
        }
        TemplateKind::Cycle4 => cycle4_delta(x, u, v),
        TemplateKind::Path4 | TemplateKind::Paw | TemplateKind::Diamond | TemplateKind::Clique4 => {
            four_vertex_delta(h.kind(), x, u, v)
        }
        TemplateKind::General => delta_hom_count_generic(h, x, e),
    }
}

#[cfg(not(feature = "negative-control"))]
#[inline]
fn triangle_codegree(x: &Graph, u: usize, v: usize) -> usize {
    x.codegree(u, v)
}

// Deliberately wrong fast path: the validation suite must catch it.
#[cfg(feature = "negative-control")]
#[inline]
fn triangle_codegree(x: &Graph, u: usize, v: usize) -> usize {
    x.codegree(u, v) + 1
}

/// tr(A^4) difference: `8 (A^3)_uv + 4 (d_u + d_v) + 2`, all in `X^{-e}`.
fn cycle4_delta(x: &Graph, u: usize, v: usize) -> u128 {
    let present = x.has_edge(u, v);
    let mut row_v: Vec<u64> = x.row(v).to_vec();
    row_v[u / 64] &= !(1u64 << (u % 64));
    let mut a3 = 0u128;
    for w in x.neighbors(u) {
        if w == v {
            continue;
        }
        a3 += x
            .row(w)
            .iter()
            .zip(&row_v)
            .map(|(a, b)| (a & b).count_ones() as u128)
            .sum::<u128>();
    }
    let du = (x.degree(u) - present as usize) as u128;
    let dv = (x.degree(v) - present as usize) as u128;
    8 * a3 + 4 * (du + dv) + 2
}

fn popcount_and(a: &[u64], b: &[u64]) -> u128 {
    a.iter().zip(b).map(|(p, q)| (p & q).count_ones() as u128).sum()
}

/// Closed forms for the remaining connected four-vertex templates. Everything
/// is read in `X^{-e}`; `C` is the common neighbourhood of `u` and `v`.
///
/// - path: `2 (s_u + s_v) + 2 (d_u + 1)(d_v + 1)`, `s_u` the degree sum over `N(u)`
/// - paw: `T_u + T_v + 2|C| (d_u + d_v + 2) + 2 Σ_{w∈C} d_w`, `T_u = (A^3)_uu`
/// - diamond: `2|C|^2 + 4|C| + 4 Σ_{w∈C} (codeg(u,w) + codeg(v,w))`
/// - K4: `12 Σ_{w∈C} |N(w) ∩ C|`
fn four_vertex_delta(kind: TemplateKind, x: &Graph, u: usize, v: usize) -> u128 {
    let mut ru = x.row(u).to_vec();
    let mut rv = x.row(v).to_vec();
    ru[v / 64] &= !(1u64 << (v % 64));
    rv[u / 64] &= !(1u64 << (u % 64));
    let common: Vec<u64> = ru.iter().zip(&rv).map(|(a, b)| a & b).collect();
    let c = common.iter().map(|w| w.count_ones() as u128).sum::<u128>();
    let du = ru.iter().map(|w| w.count_ones() as u128).sum::<u128>();
    let dv = rv.iter().map(|w| w.count_ones() as u128).sum::<u128>();
    let members = |row: &[u64]| -> Vec<usize> { crate::graph::iter_bits(row).collect() };
    match kind {
        TemplateKind::Path4 => {
            let s = |row: &[u64]| members(row).into_iter().map(|w| x.degree(w) as u128).sum::<u128>();
            2 * (s(&ru) + s(&rv)) + 2 * (du + 1) * (dv + 1)
        }
        TemplateKind::Paw => {
            let t = |row: &[u64]| members(row).into_iter().map(|w| popcount_and(x.row(w), row)).sum::<u128>();
            let dc: u128 = members(&common).into_iter().map(|w| x.degree(w) as u128).sum();
            t(&ru) + t(&rv) + 2 * c * (du + dv + 2) + 2 * dc
        }
        TemplateKind::Diamond => {
            let s: u128 = members(&common)
                .into_iter()
                .map(|w| popcount_and(x.row(w), &ru) + popcount_and(x.row(w), &rv))
                .sum();
            2 * c * c + 4 * c + 4 * s
        }
        TemplateKind::Clique4 => {
            12 * members(&common).into_iter().map(|w| popcount_and(x.row(w), &common)).sum::<u128>()
        }
        _ => unreachable!("not a four-vertex kind"),
    }
}

/// Exact delta for any template. Uses the orbit-merged inclusion-exclusion
/// terms when the template has them, else the edge-position decomposition.
pub fn delta_hom_count_generic(h: &TemplateGraph, x: &Graph, e: EdgeId) -> u128 {
    let Some(terms) = h.delta_terms() else {
        return delta_hom_count_by_position(h, x, e);
    };
    let (a, b) = e.endpoints();
    let mut total = 0i128;
    for term in terms {
        let mut c = Counter::new(x, h);
        c.flip = (a, b);
        c.side = [[Side::Plus; 8]; 8];
        for &(i, to_v) in &term.pins {
            c.pin(i, if to_v { b } else { a });
        }
        total += term.weight as i128 * c.count() as i128;
    }
    debug_assert!(total >= 0);
    total as u128
}

/// Exact delta for any template: sum over template edges `t` and both
/// orientations of the homomorphisms sending `t` onto `e`, where earlier
/// template edges are checked in `X^{-e}` and later ones in `X^{+e}`.
/// The telescoping sum over edge positions equals the full difference.
pub fn delta_hom_count_by_position(h: &TemplateGraph, x: &Graph, e: EdgeId) -> u128 {
    let (a, b) = e.endpoints();
    let mut total = 0u128;
    for (t, &(i, j)) in h.edges().iter().enumerate() {
        for (wi, wj) in [(a, b), (b, a)] {
            let mut c = Counter::new(x, h);
            c.flip = (a, b);
            for (s, &(p, q)) in h.edges().iter().enumerate() {
                let side = if s < t {
                    Side::Minus
                } else {
                    Side::Plus
                };
                c.side[p][q] = side;
                c.side[q][p] = side;
            }
            c.pin(i, wi);
            c.pin(j, wj);
            total += c.count();
        }
    }
    total
}

/// `N_G(X^{+e}) - N_G(X^{-e})`; independent of the current bit at `e`.
pub fn delta_hom(h: &TemplateGraph, x: &Graph, e: EdgeId) -> f64 {
    delta_hom_count(h, x, e) as f64 / n_pow(x.n(), h.k())
}

/// Reference delta by recounting both graphs from scratch.
pub fn delta_hom_direct(h: &TemplateGraph, x: &Graph, e: EdgeId) -> f64 {
    let plus = hom_count(h, &x.with_edge(e));
    let minus = hom_count(h, &x.without_edge(e));
    (plus - minus) as f64 / n_pow(x.n(), h.k())
}

/// `r_G(X, e) = (n^2 Δ / 2|E|)^{1/(|E|-1)}`. `None` for single-edge templates.
pub fn r_value(h: &TemplateGraph, x: &Graph, e: EdgeId) -> Option<f64> {
    let m = h.edge_count();
    if m < 2 {
        return None;
    }
    let d = delta_hom_count(h, x, e);
    Some(r_from_count(d, x.n(), h.k(), m))
}

pub(crate) fn r_from_count(d: u128, n: usize, k: usize, m: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    // n^2 * d / n^k / (2m), kept as a ratio of exact-ish doubles
    let scaled = d as f64 / n_pow(n, k - 2) / (2 * m) as f64;
    scaled.powf(1.0 / (m - 1) as f64)
}

/// `N_G(X; u)`: density of homomorphisms whose image contains `u`.
pub fn restricted_hom_density(h: &TemplateGraph, x: &Graph, u: usize) -> f64 {
    let all = hom_count(h, x);
    let mut c = Counter::new(x, h);
    c.forbid(u);
    let avoiding = c.count();
    (all - avoiding) as f64 / n_pow(x.n(), h.k())
}

/// `N^0_G(X, u) = n^{-k} Σ_l #{τ : τ(l) = u}`; overcounts maps hitting `u` twice.
pub fn restricted_surrogate(h: &TemplateGraph, x: &Graph, u: usize) -> f64 {
    let mut total = 0u128;
    for l in 0..h.k() {
        let mut c = Counter::new(x, h);
        c.pin(l, u);
        total += c.count();
    }
    total as f64 / n_pow(x.n(), h.k())
}

/// Main term of the delta for a graph near `G(n, p*)` with wedge density `p_uv`:
/// `(2/n^2) Σ_{(i,j)∈E} (p_uv / p*^2)^{d_ij} p*^{|E|-1}`.
pub fn approx_delta(h: &TemplateGraph, n: usize, p_star: f64, p_uv: f64) -> Option<f64> {
    if !(p_star > 0.0 && p_star < 1.0) {
        return None;
    }
    let m = h.edge_count() as i32;
    let ratio = p_uv / (p_star * p_star);
    let s: f64 = h.pair_degrees().iter().map(|&d| ratio.powi(d as i32)).sum();
    Some(2.0 / (n as f64 * n as f64) * s * p_star.powi(m - 1))
}
