//! Scalar landscape `L_β(p) = Σ β_i p^{|E_i|} - I(p)` and the update map `φ_β`.

use serde::Serialize;

use crate::error::{ErgmError, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy)]
pub struct LandscapeOptions {
    pub grid_size: usize,
    pub tol: f64,
    pub margin: f64,
    pub tol_degenerate: f64,
    pub tol_value: f64,
    pub tol_match: f64,
}

impl Default for LandscapeOptions {
    fn default() -> Self {
        LandscapeOptions {
            grid_size: 4096,
            tol: 1e-12,
            margin: 1e-9,
            tol_degenerate: 1e-6,
            tol_value: 1e-9,
            tol_match: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    High,
    Low,
    Critical,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::High => "high",
            Regime::Low => "low",
            Regime::Critical => "critical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalMax {
    pub p: f64,
    pub value: f64,
    pub second: f64,
    pub is_global: bool,
    pub is_degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub p: f64,
    pub derivative: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LandscapeReport {
    pub maxima: Vec<LocalMax>,
    /// Set when `L'` keeps one sign across the whole interior grid, so the
    /// supremum sits within the margin of an endpoint.
    pub endpoint_supremum: Option<f64>,
    pub regime: Regime,
    pub fixed_points: Vec<FixedPoint>,
}

impl LandscapeReport {
    pub fn global_maxima(&self) -> impl Iterator<Item = &LocalMax> {
        self.maxima.iter().filter(|m| m.is_global)
    }

    /// The global maximizer when it is unique.
    pub fn unique_global(&self) -> Option<f64> {
        let mut g = self.global_maxima();
        match (g.next(), g.next()) {
            (Some(m), None) => Some(m.p),
            _ => None,
        }
    }

    /// Every non-degenerate maximum must be a fixed point of `φ_β` with `φ' ≤ 1`.
    pub fn check_consistency(&self, params: &ModelParams, tol_match: f64) -> Result<()> {
        for m in self.maxima.iter().filter(|m| !m.is_degenerate) {
            let gap = (phi_beta(params, m.p) - m.p).abs();
            if gap > tol_match {
                return Err(ErgmError::Domain(format!("maximum at {} is {gap:e} from a fixed point", m.p)));
            }
            if !self.fixed_points.iter().any(|f| (f.p - m.p).abs() <= tol_match) {
                return Err(ErgmError::Domain(format!("maximum at {} has no matching fixed point", m.p)));
            }
            let d = phi_prime(params, m.p);
            if d > 1.0 + tol_match {
                return Err(ErgmError::Domain(format!("phi' = {d} > 1 at maximum {}", m.p)));
            }
        }
        Ok(())
    }
}

fn check_unit(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ErgmError::InvalidProbability(p))
    }
}

fn check_open(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(ErgmError::Domain(format!("derivative undefined at p = {p}")))
    }
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `I(p) = ½ p log p + ½ (1-p) log(1-p)`, with `I(0) = I(1) = 0`.
pub fn entropy_term(p: f64) -> Result<f64> {
    check_unit(p)?;
    Ok(0.5 * (xlogx(p) + xlogx(1.0 - p)))
}

pub fn l_value(params: &ModelParams, p: f64) -> Result<f64> {
    check_unit(p)?;
    Ok(l_raw(params, p))
}

pub fn l_prime(params: &ModelParams, p: f64) -> Result<f64> {
    check_open(p)?;
    Ok(l_prime_raw(params, p))
}

pub fn l_second(params: &ModelParams, p: f64) -> Result<f64> {
    check_open(p)?;
    Ok(l_second_raw(params, p))
}

fn l_raw(params: &ModelParams, p: f64) -> f64 {
    let poly: f64 = params.terms().map(|(b, m)| b * p.powi(m as i32)).sum();
    poly - 0.5 * (xlogx(p) + xlogx(1.0 - p))
}

/// `Σ 2 β_i |E_i| p^{|E_i|-1}`, the logit of `φ_β`.
fn field(params: &ModelParams, p: f64) -> f64 {
    params.terms().map(|(b, m)| 2.0 * b * m as f64 * p.powi(m as i32 - 1)).sum()
}

fn field_prime(params: &ModelParams, p: f64) -> f64 {
    params
        .terms()
        .filter(|&(_, m)| m >= 2)
        .map(|(b, m)| 2.0 * b * (m * (m - 1)) as f64 * p.powi(m as i32 - 2))
        .sum()
}

fn l_prime_raw(params: &ModelParams, p: f64) -> f64 {
    0.5 * field(params, p) - 0.5 * (p.ln() - (1.0 - p).ln())
}

fn l_second_raw(params: &ModelParams, p: f64) -> f64 {
    0.5 * field_prime(params, p) - 0.5 / (p * (1.0 - p))
}

/// Logistic function, stable for arguments of any magnitude.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let z = x.exp();
        z / (1.0 + z)
    }
}

/// `φ_β(p) = σ(Σ 2 β_i |E_i| p^{|E_i|-1})`.
pub fn phi_beta(params: &ModelParams, p: f64) -> f64 {
    sigmoid(field(params, p))
}

pub fn phi_prime(params: &ModelParams, p: f64) -> f64 {
    let s = phi_beta(params, p);
    s * (1.0 - s) * field_prime(params, p)
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Roots of `f` on a uniform grid over `[a, b]`. With `only_down`, keeps
/// only `+ → -` crossings.
fn scan_roots(f: &impl Fn(f64) -> f64, a: f64, b: f64, grid: usize, tol: f64, only_down: bool) -> Vec<f64> {
    let pts: Vec<f64> = (0..=grid).map(|i| a + (b - a) * i as f64 / grid as f64).collect();
    let vals: Vec<f64> = pts.iter().map(|&p| f(p)).collect();
    let mut roots = Vec::new();
    let mut i = 0;
    while i < grid {
        let (s0, s1) = (vals[i], vals[i + 1]);
        if s0 == 0.0 {
            i += 1;
            continue;
        }
        if s1 == 0.0 {
            // exact zero on the grid: classify by the next nonzero value
            let mut j = i + 1;
            while j <= grid && vals[j] == 0.0 {
                j += 1;
            }
            let after = if j <= grid { vals[j] } else { -s0 };
            if (after > 0.0) != (s0 > 0.0) && (!only_down || s0 > 0.0) {
                roots.push(pts[i + 1]);
            }
            i = j;
            continue;
        }
        if (s0 > 0.0) != (s1 > 0.0) && (!only_down || s0 > 0.0) {
            roots.push(bisect(f, pts[i], pts[i + 1], tol));
        }
        i += 1;
    }
    roots
}

/// Local maxima of `L_β` as `+ → -` sign changes of `L'`.
pub fn find_local_maxima(params: &ModelParams, opts: &LandscapeOptions) -> (Vec<LocalMax>, Option<f64>) {
    let grid = opts.grid_size.max(64);
    let f = |p: f64| l_prime_raw(params, p);
    let (a, b) = (opts.margin, 1.0 - opts.margin);
    let roots = scan_roots(&f, a, b, grid, opts.tol, true);
    let mut maxima: Vec<LocalMax> = roots
        .into_iter()
        .map(|p| {
            let second = l_second_raw(params, p);
            LocalMax {
                p,
                value: l_raw(params, p),
                second,
                is_global: false,
                is_degenerate: second.abs() < opts.tol_degenerate,
            }
        })
        .collect();
    let endpoint = if maxima.is_empty() {
        Some(if f(a) > 0.0 { b } else { a })
    } else {
        None
    };
    let sup = maxima.iter().map(|m| m.value).fold(f64::NEG_INFINITY, f64::max);
    for m in &mut maxima {
        m.is_global = m.value >= sup - opts.tol_value;
    }
    (maxima, endpoint)
}

/// Solutions of `φ_β(p) = p` on `[0, 1]`, with stability `φ'_β(p) < 1`.
pub fn find_phi_fixed_points(params: &ModelParams, opts: &LandscapeOptions) -> Vec<FixedPoint> {
    let f = |p: f64| phi_beta(params, p) - p;
    scan_roots(&f, 0.0, 1.0, opts.grid_size.max(64), opts.tol, false)
        .into_iter()
        .map(|p| {
            let d = phi_prime(params, p);
            FixedPoint { p, derivative: d, stable: d < 1.0 }
        })
        .collect()
}

pub fn classify_regime(maxima: &[LocalMax], tol_degenerate: f64) -> Regime {
    if maxima.iter().any(|m| m.second.abs() < tol_degenerate) {
        Regime::Critical
    } else if maxima.len() <= 1 {
        Regime::High
    } else {
        Regime::Low
    }
}

pub fn analyze(params: &ModelParams, opts: &LandscapeOptions) -> LandscapeReport {
    let (maxima, endpoint_supremum) = find_local_maxima(params, opts);
    let regime = classify_regime(&maxima, opts.tol_degenerate);
    let fixed_points = find_phi_fixed_points(params, opts);
    LandscapeReport { maxima, endpoint_supremum, regime, fixed_points }
}

/// Fixed-point data for the edge-triangle metastability construction.
#[derive(Debug, Clone, Serialize)]
pub struct TergmSolution {
    pub p1: f64,
    pub p2: f64,
    pub q: f64,
    pub f_prime_p1: f64,
    pub f_prime_p2: f64,
    pub g_prime_q: f64,
    pub f_fixed_points: Vec<FixedPoint>,
    pub g_fixed_points: Vec<FixedPoint>,
}

/// For `β = (β_0, β_1)` on edge + triangle: the global maximizer `p1` of `L_β`,
/// the other local maximizer `p2`, and a stable fixed point `q` of
/// `g(x) = σ(2β_0 + 6β_1 x p1)` distinct from both.
pub fn solve_example_tergm(beta0: f64, beta1: f64) -> Result<TergmSolution> {
    let params = ModelParams::edge_triangle(1, beta0, beta1)?;
    let opts = LandscapeOptions::default();
    let report = analyze(&params, &opts);
    let f_fixed = report.fixed_points.clone();
    if f_fixed.len() != 3 {
        return Err(ErgmError::FixedPoint(format!(
            "f has {} fixed points, three required",
            f_fixed.len()
        )));
    }
    let candidates: Vec<&LocalMax> = report.maxima.iter().filter(|m| !m.is_degenerate).collect();
    if candidates.len() != 2 {
        return Err(ErgmError::FixedPoint(format!(
            "L has {} non-degenerate local maxima, two required",
            candidates.len()
        )));
    }
    let (g1, g2) = if candidates[0].value >= candidates[1].value {
        (candidates[0], candidates[1])
    } else {
        (candidates[1], candidates[0])
    };
    let (p1, p2) = (g1.p, g2.p);
    let f_prime_p1 = phi_prime(&params, p1);
    let f_prime_p2 = phi_prime(&params, p2);
    if f_prime_p1 >= 1.0 {
        return Err(ErgmError::FixedPoint(format!("f'(p1) = {f_prime_p1} is not below 1")));
    }

    let slope = 6.0 * beta1 * p1;
    let g = |x: f64| sigmoid(2.0 * beta0 + slope * x);
    let g_prime = |x: f64| {
        let s = g(x);
        s * (1.0 - s) * slope
    };
    let g_fixed: Vec<FixedPoint> = scan_roots(&|x| g(x) - x, 0.0, 1.0, opts.grid_size, opts.tol, false)
        .into_iter()
        .map(|p| {
            let d = g_prime(p);
            FixedPoint { p, derivative: d, stable: d < 1.0 }
        })
        .collect();
    let distinct = 1e-6;
    let q = g_fixed
        .iter()
        .find(|fp| fp.stable && (fp.p - p1).abs() > distinct && (fp.p - p2).abs() > distinct)
        .ok_or_else(|| {
            ErgmError::FixedPoint(format!(
                "g has no stable fixed point distinct from p1 and p2 (fixed points: {:?})",
                g_fixed.iter().map(|f| f.p).collect::<Vec<_>>()
            ))
        })?;
    Ok(TergmSolution {
        p1,
        p2,
        q: q.p,
        f_prime_p1,
        f_prime_p2,
        g_prime_q: q.derivative,
        f_fixed_points: f_fixed,
        g_fixed_points: g_fixed,
    })
}
