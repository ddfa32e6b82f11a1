use nalgebra::DMatrix;
use serde::Serialize;

use super::cut::{cut_distance_const, CutDistance, CutMode};
use crate::counts::{delta_hom_count, r_from_count};
use crate::dynamics::{conditional_prob, CachePolicy, ChainCore};
use crate::error::{ErgmError, Result};
use crate::graph::{EdgeId, Graph};
use crate::model::ModelParams;
use crate::template::TemplateGraph;

/// `p_u(X) = deg(u) / n`.
pub fn normalized_degree(x: &Graph, u: usize) -> Result<f64> {
    x.check_vertex(u)?;
    Ok(x.degree(u) as f64 / x.n() as f64)
}

/// `p_uv(X) = codeg(u, v) / n`.
pub fn normalized_wedge(x: &Graph, u: usize, v: usize) -> Result<f64> {
    x.edge(u, v)?;
    Ok(x.codegree(u, v) as f64 / x.n() as f64)
}

fn check_family(family: &[TemplateGraph]) -> Result<()> {
    if family.is_empty() {
        return Err(ErgmError::InvalidTemplate("empty template family".into()));
    }
    if let Some(t) = family.iter().find(|t| t.edge_count() < 2) {
        return Err(ErgmError::InvalidTemplate(format!("{} has fewer than two edges", t.name())));
    }
    Ok(())
}

/// `r_G(X, e)` extrema over the pairs accepted by `keep` and all templates.
fn r_extrema_where(x: &Graph, family: &[TemplateGraph], keep: impl Fn(EdgeId) -> bool) -> Result<(f64, f64)> {
    check_family(family)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..x.num_pairs() {
        let e = EdgeId::from_index(i);
        if !keep(e) {
            continue;
        }
        for t in family {
            let r = r_from_count(delta_hom_count(t, x, e), x.n(), t.k(), t.edge_count());
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    Ok((lo, hi))
}

/// `(r_min, r_max)` over every pair `e` and every template in `family`.
pub fn r_extrema(x: &Graph, family: &[TemplateGraph]) -> Result<(f64, f64)> {
    r_extrema_where(x, family, |_| true)
}

/// Membership in `Γ_{p*}^ε`: every `r_G(X, e)` lies in `[p* - ε, p* + ε]`.
pub fn gamma_member(x: &Graph, p_star: f64, eps: f64, family: &[TemplateGraph]) -> Result<bool> {
    check_family(family)?;
    for i in 0..x.num_pairs() {
        let e = EdgeId::from_index(i);
        for t in family {
            let r = r_from_count(delta_hom_count(t, x, e), x.n(), t.k(), t.edge_count());
            if r < p_star - eps || r > p_star + eps {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `{u : |p_u - p| > 2 d̂ / δ}` for a cut-distance value or upper bound `d̂`.
pub fn degree_exception_set(x: &Graph, p: f64, delta: f64, d_hat: f64) -> Result<Vec<usize>> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(ErgmError::Domain(format!("delta {delta} outside (0, 1]")));
    }
    let n = x.n() as f64;
    let thr = 2.0 * d_hat / delta;
    Ok((0..x.n()).filter(|&u| (x.degree(u) as f64 / n - p).abs() > thr).collect())
}

/// `g_uv(X) = p_uv - (1/2n) Σ_w (φ_uw X_vw + φ_vw X_uw)`, evaluated directly.
pub fn g_uv_statistic(model: &ModelParams, x: &Graph, u: usize, v: usize) -> Result<f64> {
    x.edge(u, v)?;
    let n = x.n();
    let mut s = 0.0;
    for w in 0..n {
        if w == u || w == v {
            continue;
        }
        if x.has_edge(v, w) {
            s += conditional_prob(model, x, EdgeId::new(u, w)?);
        }
        if x.has_edge(u, w) {
            s += conditional_prob(model, x, EdgeId::new(v, w)?);
        }
    }
    Ok(x.codegree(u, v) as f64 / n as f64 - s / (2 * n) as f64)
}

/// All `g_uv` at once as a dense matrix (diagonal zero).
pub fn g_matrix(model: &ModelParams, x: &Graph) -> Result<DMatrix<f64>> {
    let n = x.n();
    let core = ChainCore::new(model.with_n(n)?, x.clone(), CachePolicy::Auto)?;
    let mut phi = DMatrix::zeros(n, n);
    for i in 0..x.num_pairs() {
        let e = EdgeId::from_index(i);
        let (u, v) = e.endpoints();
        let p = core.prob(e);
        phi[(u, v)] = p;
        phi[(v, u)] = p;
    }
    let a = DMatrix::from_fn(n, n, |u, v| if x.has_edge(u, v) { 1.0 } else { 0.0 });
    let pa = &phi * &a;
    let nn = n as f64;
    Ok(DMatrix::from_fn(n, n, |u, v| {
        if u == v {
            0.0
        } else {
            x.codegree(u, v) as f64 / nn - (pa[(u, v)] + pa[(v, u)]) / (2.0 * nn)
        }
    }))
}

/// `max_{u≠v} |g_uv(X)|`.
pub fn g_max_abs(model: &ModelParams, x: &Graph) -> Result<f64> {
    Ok(g_matrix(model, x)?.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityStats {
    pub r_bar_min: f64,
    pub r_bar_max: f64,
    pub p1_min: f64,
    pub p1_max: f64,
}

/// Statistics that treat vertex 0 as the distinguished vertex: `r̄` ranges
/// over `p_u` for `u ≠ 0` and `r_G(X, e)` for pairs avoiding 0; `p^(1)`
/// ranges over `p_0` and `p_{0u} / p1*`.
pub fn cavity_statistics(x: &Graph, family: &[TemplateGraph], p1_star: f64) -> Result<CavityStats> {
    let n = x.n();
    if n < 3 {
        return Err(ErgmError::Domain(format!("cavity statistics need n >= 3, got {n}")));
    }
    if !(p1_star > 0.0 && p1_star <= 1.0) {
        return Err(ErgmError::InvalidProbability(p1_star));
    }
    let nn = n as f64;
    let (r_lo, r_hi) = r_extrema_where(x, family, |e| e.u != 0)?;
    let degs = (1..n).map(|u| x.degree(u) as f64 / nn);
    let d_lo = degs.clone().fold(f64::INFINITY, f64::min);
    let d_hi = degs.fold(f64::NEG_INFINITY, f64::max);
    let p1 = x.degree(0) as f64 / nn;
    let wedges = (1..n).map(|u| x.codegree(0, u) as f64 / nn / p1_star);
    let w_lo = wedges.clone().fold(f64::INFINITY, f64::min);
    let w_hi = wedges.fold(f64::NEG_INFINITY, f64::max);
    Ok(CavityStats {
        r_bar_min: d_lo.min(r_lo),
        r_bar_max: d_hi.max(r_hi),
        p1_min: p1.min(w_lo),
        p1_max: p1.max(w_hi),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub p_u: Vec<f64>,
    pub max_degree_dev: f64,
    /// `max_{u≠v} (p_uv - p*²)` and `min_{u≠v} (p_uv - p*²)`.
    pub wedge_dev_max: f64,
    pub wedge_dev_min: f64,
    pub exception_set_size: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub gamma_member: bool,
    pub cut_distance: CutDistance,
    pub cavity: Option<CavityStats>,
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub p_star: f64,
    pub eps: f64,
    /// `δ` of the degree exception set.
    pub delta: f64,
    pub cut_mode: CutMode,
    /// Reference `p1*` for the cavity statistics; skipped when `None`.
    pub p1_star: Option<f64>,
}

pub fn concentration_report(x: &Graph, family: &[TemplateGraph], opts: &ReportOptions) -> Result<ConcentrationReport> {
    let n = x.n();
    let nn = n as f64;
    let p = opts.p_star;
    let p_u: Vec<f64> = (0..n).map(|u| x.degree(u) as f64 / nn).collect();
    let max_degree_dev = p_u.iter().fold(0.0f64, |m, &d| m.max((d - p).abs()));
    let (mut w_hi, mut w_lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for u in 0..n {
        for v in u + 1..n {
            let d = x.codegree(u, v) as f64 / nn - p * p;
            w_hi = w_hi.max(d);
            w_lo = w_lo.min(d);
        }
    }
    let (r_min, r_max) = r_extrema(x, family)?;
    let cut = cut_distance_const(x, p, opts.cut_mode)?;
    let exceptions = degree_exception_set(x, p, opts.delta, cut.upper())?;
    let cavity = match opts.p1_star {
        Some(p1) => Some(cavity_statistics(x, family, p1)?),
        None => None,
    };
    Ok(ConcentrationReport {
        p_u,
        max_degree_dev,
        wedge_dev_max: w_hi,
        wedge_dev_min: w_lo,
        exception_set_size: exceptions.len(),
        r_min,
        r_max,
        gamma_member: r_min >= p - opts.eps && r_max <= p + opts.eps,
        cut_distance: cut,
        cavity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn degree_and_wedge_basics() {
        let k = Graph::complete(10).unwrap();
        assert!((normalized_degree(&k, 3).unwrap() - 0.9).abs() < 1e-15);
        assert!((normalized_wedge(&k, 3, 4).unwrap() - 0.8).abs() < 1e-15);
        assert!(normalized_wedge(&k, 3, 3).is_err());
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(normalized_wedge(&star, 0, 1).unwrap(), 0.0);
        assert_eq!(normalized_degree(&Graph::new_empty(4).unwrap(), 2).unwrap(), 0.0);
    }

    #[test]
    fn complete_graph_r_values() {
        let k = Graph::complete(12).unwrap();
        let (lo, hi) = r_extrema(&k, &[TemplateGraph::triangle()]).unwrap();
        let want = (10.0f64 / 12.0).sqrt();
        assert!((lo - want).abs() < 1e-15 && (hi - want).abs() < 1e-15);
        assert!(gamma_member(&k, 0.5, 1.0, &[TemplateGraph::triangle()]).unwrap());
        assert!(r_extrema(&k, &[TemplateGraph::edge()]).is_err());
    }

    #[test]
    fn g_matrix_matches_direct() {
        let m = ModelParams::edge_triangle(14, -0.7, 1.1).unwrap();
        let x = Graph::sample_gnp(14, 0.5, &mut stream(4, 0)).unwrap();
        let g = g_matrix(&m, &x).unwrap();
        for u in 0..14 {
            for v in 0..14 {
                if u != v {
                    assert!((g[(u, v)] - g_uv_statistic(&m, &x, u, v).unwrap()).abs() < 1e-12);
                }
            }
        }
        let empty = Graph::new_empty(6).unwrap();
        assert_eq!(g_uv_statistic(&m.with_n(6).unwrap(), &empty, 1, 2).unwrap(), 0.0);
    }

    #[test]
    fn cavity_ignores_vertex_zero_rewiring() {
        let n = 9;
        let bulk: Vec<(usize, usize)> =
            (1..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let x = Graph::from_edges(n, &bulk).unwrap();
        let fam = [TemplateGraph::triangle()];
        let c = cavity_statistics(&x, &fam, 0.9).unwrap();
        assert_eq!(c.p1_max, 0.0);
        // bulk looks like K_8 seen at scale n = 9
        assert!((c.r_bar_max - (6.0f64 / 9.0).sqrt()).abs() < 1e-15);
        assert!((c.r_bar_min - 7.0 / 9.0).abs() < 1e-15);
        let mut y = x.clone();
        y.set_edge(EdgeId::new(0, 3).unwrap(), true);
        let d = cavity_statistics(&y, &fam, 0.9).unwrap();
        assert!(d.p1_max > 0.0);
        // rewiring vertex 0 moves the bulk statistics by at most one unit of 1/n
        assert!((d.r_bar_max - c.r_bar_max).abs() <= 1.0 / 9.0);
    }
}
