//! Oracle suite behind `ergm validate`: exact enumeration, brute-force
//! recounts and Monte Carlo checks, each reported pass/fail.

use std::time::Instant;

use rand::Rng;

use super::output::{fmt_f64, OutputDir};
use super::ExperimentConfig;
use crate::counts::{delta_hom, delta_hom_direct, r_value};
use crate::diagnostics::cut::cut_distance_naive;
use crate::diagnostics::{
    cut_distance_const, gamma_member, normalized_wedge, restricted_cut_distance, CutMode,
};
use crate::dynamics::{
    burn_in, coalescence_time, conditional_prob, sandwich_sample, Ball, CachePolicy, CoupledPair,
};
use crate::error::{ErgmError, Result};
use crate::exact::{exact_tv, gnp_distribution, hitting_time, ExactModel};
use crate::graph::{num_pairs, EdgeId, Graph};
use crate::landscape::{analyze, sigmoid, solve_example_tergm, LandscapeOptions, Regime};
use crate::model::ModelParams;
use crate::rng::{stream, StreamRng};
use crate::template::{TemplateFamily, TemplateGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type CheckFn = fn(u64) -> Result<(bool, String)>;

/// Checks that finish in seconds.
pub const QUICK: &[(&str, CheckFn)] = &[
    ("edge_only_exact", edge_only_exact),
    ("detailed_balance", detailed_balance),
    ("conditional_vs_enumeration", conditional_vs_enumeration),
    ("delta_equivalence", delta_equivalence),
    ("landscape_consistency", landscape_consistency),
    ("tergm_fixed_points", tergm_fixed_points),
    ("phase_threshold_refinement", phase_threshold_refinement),
    ("exact_tv_decay", exact_tv_decay),
    ("restricted_stationarity", restricted_stationarity),
    ("monotone_coupling_order", monotone_coupling_order),
    ("coupon_collector", coupon_collector),
    ("cut_exact_vs_naive", cut_exact_vs_naive),
    ("cut_bounds_bracket", cut_bounds_bracket),
    ("cut_domination", cut_domination),
    ("restricted_cut_sandwich", restricted_cut_sandwich),
    ("triangle_r_identity", triangle_r_identity),
];

/// Monte Carlo checks that take minutes.
pub const SLOW: &[(&str, CheckFn)] = &[
    ("coalescence_scaling", coalescence_scaling),
    ("low_temperature_timeout", low_temperature_timeout),
    ("sandwich_ok_rate", sandwich_ok_rate),
    ("concentration", concentration),
    ("metastability", metastability),
];

/// Model used by the high-temperature Monte Carlo checks.
pub fn high_temperature_model(n: usize) -> ModelParams {
    ModelParams::edge_triangle(n, 1.5, 0.1).expect("valid model")
}

pub fn run_validate(cfg: &ExperimentConfig, seed: u64) -> Vec<CheckResult> {
    let mut checks: Vec<(&str, CheckFn)> = QUICK.to_vec();
    if !cfg.validate.quick {
        checks.extend_from_slice(SLOW);
    }
    checks
        .into_iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let (passed, detail) = match f(seed) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult { name, passed, detail, seconds: t.elapsed().as_secs_f64() }
        })
        .collect()
}

pub fn write_results(results: &[CheckResult], out: &mut OutputDir) -> Result<()> {
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                r.name.to_string(),
                if r.passed { "pass" } else { "fail" }.to_string(),
                fmt_f64((r.seconds * 1000.0).round() / 1000.0),
                r.detail.clone(),
            ]
        })
        .collect();
    out.write_csv("validate.csv", &["check", "status", "seconds", "detail"], &rows)
}

fn rng_for(seed: u64, id: u64) -> StreamRng {
    stream(seed, 0xA11D_0000 + id)
}

fn edge_only_exact(_: u64) -> Result<(bool, String)> {
    let m = ModelParams::edge_only(4, -0.5)?;
    let mu = ExactModel::new(&m)?;
    let tv = exact_tv(mu.measure(), &gnp_distribution(4, sigmoid(-1.0))?)?;
    Ok((tv <= 1e-10, format!("tv = {tv:e}")))
}

fn detailed_balance(_: u64) -> Result<(bool, String)> {
    let ex = ExactModel::new(&ModelParams::edge_triangle(4, -1.8, 2.0)?)?;
    let clean = ex.detailed_balance(0.0)?;
    let perturbed = ex.detailed_balance(1e-3)?;
    // the perturbed kernel must be caught, or the check is vacuous
    let ok = clean.absolute <= 1e-12 && perturbed.relative > 1e-4;
    Ok((ok, format!("violation = {:e}, perturbed relative = {:e}", clean.absolute, perturbed.relative)))
}

fn conditional_vs_enumeration(_: u64) -> Result<(bool, String)> {
    let m = ModelParams::edge_triangle(4, -1.8, 2.0)?;
    let ex = ExactModel::new(&m)?;
    let pairs = num_pairs(4);
    let mut worst = 0.0f64;
    for s in 0..1usize << pairs {
        let g = Graph::from_state_index(4, s as u64)?;
        for i in 0..pairs {
            let e = EdgeId::from_index(i);
            let plus = ex.measure().prob(&g.with_edge(e));
            let minus = ex.measure().prob(&g.without_edge(e));
            worst = worst.max((conditional_prob(&m, &g, e) - plus / (plus + minus)).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max gap = {worst:e}")))
}

/// Templates covering every delta strategy: each fast path plus the generic
/// counter on all connected templates up to five vertices and a few
/// disconnected ones.
fn delta_templates() -> Result<Vec<TemplateGraph>> {
    let mut t = TemplateFamily::connected_up_to(5)?.templates().to_vec();
    t.push(TemplateGraph::edge());
    for spec in ["k_star:4", "0-1,2-3", "0-1,1-2,2-0,3-4"] {
        t.push(TemplateGraph::parse(spec)?);
    }
    Ok(t)
}

fn delta_equivalence(seed: u64) -> Result<(bool, String)> {
    let templates = delta_templates()?;
    let mut rng = rng_for(seed, 1);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for case in 0..1000 {
        let n = rng.random_range(2..=20);
        let p = rng.random::<f64>();
        let x = Graph::sample_gnp(n, p, &mut rng)?;
        let h = &templates[case % templates.len()];
        let e = EdgeId::from_index(rng.random_range(0..num_pairs(n)));
        let gap = (delta_hom(h, &x, e) - delta_hom_direct(h, &x, e)).abs();
        worst = worst.max(gap);
        if gap > 1e-12 {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("1000 cases, {failures} mismatches, max gap = {worst:e}")))
}

/// Random `β` over at most two of {two-star, triangle}.
pub fn random_landscape_model<R: Rng + ?Sized>(rng: &mut R) -> Result<ModelParams> {
    let mut extra = Vec::new();
    let mut beta = vec![rng.random_range(-3.0..3.0)];
    for t in [TemplateGraph::two_star(), TemplateGraph::triangle()] {
        if rng.random::<bool>() {
            extra.push(t);
            beta.push(rng.random_range(0.0..3.0));
        }
    }
    ModelParams::with_templates(1, beta, extra)
}

fn landscape_consistency(seed: u64) -> Result<(bool, String)> {
    let mut rng = rng_for(seed, 2);
    let opts = LandscapeOptions::default();
    let mut bad = Vec::new();
    for _ in 0..100 {
        let m = random_landscape_model(&mut rng)?;
        if let Err(e) = analyze(&m, &opts).check_consistency(&m, 1e-8) {
            bad.push(format!("{:?}: {e}", m.beta()));
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "100 models".into() } else { bad.join("; ") }))
}

fn tergm_fixed_points(_: u64) -> Result<(bool, String)> {
    let s = solve_example_tergm(-1.8, 2.0)?;
    let ok = s.f_fixed_points.len() == 3 && s.f_prime_p1 < 1.0 && s.g_prime_q < 1.0;
    Ok((ok, format!("p1 = {}, p2 = {}, q = {}, g'(q) = {}", s.p1, s.p2, s.q, s.g_prime_q)))
}

fn phase_threshold_refinement(_: u64) -> Result<(bool, String)> {
    let text = |grid: usize| {
        format!(
            "[model]\nn = 1\nbeta = [-1.8, 0.0]\ntemplates = [\"triangle\"]\n[phase]\ngrid = {grid}\nsweep = {{ index = 1, from = 0.0, to = 3.0, points = 31 }}\n"
        )
    };
    let coarse = super::phase::run_phase(&ExperimentConfig::from_toml(&text(4096))?)?;
    let fine = super::phase::run_phase(&ExperimentConfig::from_toml(&text(1 << 16))?)?;
    let first = |o: &super::phase::PhaseOutcome| {
        o.transitions.iter().find(|t| t.from == Regime::High && t.to == Regime::Low).map(|t| t.threshold)
    };
    match (first(&coarse), first(&fine)) {
        (Some(a), Some(b)) => Ok(((a - b).abs() <= 1e-6, format!("threshold {a} vs {b}"))),
        _ => Ok((false, "no high-to-low transition found".into())),
    }
}

fn exact_tv_decay(_: u64) -> Result<(bool, String)> {
    let m = high_temperature_model(5);
    let p = analyze(&m, &LandscapeOptions::default())
        .unique_global()
        .ok_or_else(|| ErgmError::Domain("no unique maximiser".into()))?;
    let ex = ExactModel::new(&m)?;
    let big_n = num_pairs(5) as f64;
    let delta = 1e-4;
    let scale = big_n * (big_n / delta).ln();
    let curve = ex.tv_curve(&gnp_distribution(5, p)?, (20.0 * scale).ceil() as usize)?;
    let monotone = curve.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    let hit = hitting_time(&curve, delta);
    let c = hit.map(|t| t as f64 / scale);
    Ok((monotone && c.is_some_and(|c| c <= 20.0), format!("monotone = {monotone}, fitted C = {c:?}")))
}

fn restricted_stationarity(_: u64) -> Result<(bool, String)> {
    let m = ModelParams::edge_triangle(5, -0.4, 0.6)?;
    let ex = ExactModel::new(&m)?;
    let inside = ex.ball_states(&Ball { p_star: 0.5, eta: 0.2 })?;
    let target = ex.measure().conditioned(&inside)?;
    let next = ex.restricted_transition_apply(&target, &inside)?;
    let tv = exact_tv(&target, &next)?;
    Ok((tv <= 1e-12, format!("tv(mu_B P_B, mu_B) = {tv:e}")))
}

fn ordered_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<(Graph, Graph)> {
    let lower = Graph::sample_gnp(n, rng.random_range(0.0..0.6), rng)?;
    let mut upper = lower.clone();
    for i in 0..upper.num_pairs() {
        if rng.random::<f64>() < 0.4 {
            upper.set_edge(EdgeId::from_index(i), true);
        }
    }
    Ok((lower, upper))
}

fn monotone_coupling_order(seed: u64) -> Result<(bool, String)> {
    let mut rng = rng_for(seed, 3);
    let m = ModelParams::edge_triangle(50, -0.5, 0.8)?;
    let mut violations = 0u64;
    for k in 0..10 {
        let (lower, upper) = ordered_pair(50, &mut rng)?;
        let mut pair = CoupledPair::new(&m, lower, upper, seed, k, CachePolicy::Auto)?;
        for _ in 0..10_000 {
            pair.step();
        }
        violations += pair.violations();
    }
    Ok((violations == 0, format!("100000 steps, {violations} violations")))
}

/// Mean and variance of the coupon-collector time for `big_n` coupons.
pub fn coupon_collector_moments(big_n: usize) -> (f64, f64) {
    let nn = big_n as f64;
    let mut mean = 0.0;
    let mut var = 0.0;
    for k in 1..=big_n {
        let p = k as f64 / nn;
        mean += 1.0 / p;
        var += (1.0 - p) / (p * p);
    }
    (mean, var)
}

fn coupon_collector(seed: u64) -> Result<(bool, String)> {
    let m = ModelParams::edge_only(8, 0.0)?;
    let reps = 400;
    let mut sum = 0.0;
    for r in 0..reps {
        let t = coalescence_time(&m, seed, 0xC0C0 + r, 1 << 20, CachePolicy::Auto)?
            .ok_or_else(|| ErgmError::Domain("zero model timed out".into()))?;
        sum += t as f64;
    }
    let mean = sum / reps as f64;
    let (mu, var) = coupon_collector_moments(num_pairs(8));
    let z = (mean - mu) / (var / reps as f64).sqrt();
    Ok((z.abs() <= 3.0, format!("mean {mean:.2} vs N H_N = {mu:.2}, z = {z:.2}")))
}

fn cut_exact_vs_naive(seed: u64) -> Result<(bool, String)> {
    let mut rng = rng_for(seed, 4);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let x = Graph::sample_gnp(8, rng.random::<f64>(), &mut rng)?;
        let p = rng.random::<f64>();
        if cut_distance_const(&x, p, CutMode::Exact)?.upper() != cut_distance_naive(&x, p)? {
            mismatches += 1;
        }
    }
    Ok((mismatches == 0, format!("1000 graphs at n = 8, {mismatches} mismatches")))
}

fn cut_bounds_bracket(seed: u64) -> Result<(bool, String)> {
    let mut rng = rng_for(seed, 5);
    let mut bad = 0;
    for k in 0..200 {
        let x = Graph::sample_gnp(12, rng.random::<f64>(), &mut rng)?;
        let p = rng.random::<f64>();
        let exact = cut_distance_const(&x, p, CutMode::Exact)?.upper();
        let b = cut_distance_const(&x, p, CutMode::Bounds { starts: 32, seed: k })?;
        if !(b.lower() <= exact && exact <= b.upper()) {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("200 graphs at n = 12, {bad} out of bracket")))
}

fn cut_domination(seed: u64) -> Result<(bool, String)> {
    let mut rng = rng_for(seed, 6);
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rng.random_range(2..=12);
        let p = rng.random::<f64>();
        let x = Graph::sample_gnp(n, rng.random::<f64>(), &mut rng)?;
        let (mut y, mut z) = (x.clone(), x.clone());
        for i in 0..x.num_pairs() {
            let e = EdgeId::from_index(i);
            if rng.random::<f64>() < 0.3 {
                y.set_edge(e, false);
            }
            if rng.random::<f64>() < 0.3 {
                z.set_edge(e, true);
            }
        }
        let d = |g: &Graph| cut_distance_const(g, p, CutMode::Exact).map(|c| c.upper());
        if d(&x)? > d(&y)?.max(d(&z)?) {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("1000 triples, {bad} violations")))
}

fn restricted_cut_sandwich(seed: u64) -> Result<(bool, String)> {
    let mut rng = rng_for(seed, 7);
    let n = 12;
    let mut bad = 0;
    for _ in 0..1000 {
        let x = Graph::sample_gnp(n, rng.random::<f64>(), &mut rng)?;
        let p = rng.random::<f64>();
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n)) % n;
        let full = cut_distance_const(&x, p, CutMode::Exact)?.upper();
        let restricted = restricted_cut_distance(&x, &[a, b], p, CutMode::Exact)?.upper();
        let slack = (2 * (2 * n - 2)) as f64 / (n * n) as f64;
        if !(full - slack <= restricted && restricted <= full) {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("1000 instances, {bad} violations")))
}

fn triangle_r_identity(seed: u64) -> Result<(bool, String)> {
    let mut rng = rng_for(seed, 8);
    let tri = TemplateGraph::triangle();
    let mut worst = 0.0f64;
    let mut mismatched = 0;
    for _ in 0..50 {
        let n = rng.random_range(3..=40);
        let x = Graph::sample_gnp(n, rng.random::<f64>(), &mut rng)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..x.num_pairs() {
            let (u, v) = EdgeId::from_index(i).endpoints();
            let s = normalized_wedge(&x, u, v)?.sqrt();
            let r = r_value(&tri, &x, EdgeId::from_index(i)).unwrap_or(f64::NAN);
            worst = worst.max((r - s).abs());
            lo = lo.min(s);
            hi = hi.max(s);
        }
        let (p, eps) = (rng.random::<f64>(), 0.2);
        let direct = lo >= p - eps && hi <= p + eps;
        if gamma_member(&x, p, eps, std::slice::from_ref(&tri))? != direct {
            mismatched += 1;
        }
    }
    Ok((worst <= 1e-12 && mismatched == 0, format!("max gap = {worst:e}, {mismatched} membership mismatches")))
}

fn coalescence_scaling(seed: u64) -> Result<(bool, String)> {
    let cfg = ExperimentConfig::from_toml(
        "[model]\nn = 8\nbeta = [1.5, 0.1]\ntemplates = [\"triangle\"]\n[mix]\nsizes = [8, 16, 32]\nreplicas = 1000\nexact_n = 0\n",
    )?;
    let out = super::mix::run_mix(&cfg, seed)?;
    let medians: Vec<String> = out.sizes.iter().map(|s| format!("{}:{}", s.n, s.median)).collect();
    match out.fit {
        Some((slope, _)) => Ok(((1.7..=2.5).contains(&slope), format!("slope = {slope:.4}, medians {}", medians.join(" ")))),
        None => Ok((false, "timeouts prevented a fit".into())),
    }
}

fn low_temperature_timeout(seed: u64) -> Result<(bool, String)> {
    let m = ModelParams::edge_triangle(32, -1.8, 2.0)?;
    let t = coalescence_time(&m, seed, 0x10_0000, 10_000_000, CachePolicy::Auto)?;
    Ok((t.is_none(), format!("coalescence time {t:?} with cap 1e7")))
}

fn sandwich_ok_rate(seed: u64) -> Result<(bool, String)> {
    let m = high_temperature_model(64);
    let p = analyze(&m, &LandscapeOptions::default())
        .unique_global()
        .ok_or_else(|| ErgmError::Domain("no unique maximiser".into()))?;
    let mut ok = 0;
    let mut broken = 0;
    for r in 0..100 {
        let mut chain = burn_in(&m, p, 20 * num_pairs(64) as u64, seed, 0x5A00 + r)?;
        let x0 = chain.graph().clone();
        let s = sandwich_sample(&m, &x0, p, 0.1, chain.rng_mut())?;
        if s.ok {
            ok += 1;
            if !(s.under.dominated_by(&s.x)? && s.x.dominated_by(&s.over)?) {
                broken += 1;
            }
        }
    }
    Ok((ok >= 95 && broken == 0, format!("ok in {ok}/100, {broken} order failures")))
}

fn concentration(seed: u64) -> Result<(bool, String)> {
    let cfg = ExperimentConfig::from_toml(
        "[model]\nn = 200\nbeta = [1.5, 0.1]\ntemplates = [\"triangle\"]\n[sample]\nsamples = 100\n",
    )?;
    let out = super::sample::run_sample(&cfg, seed)?;
    let r = out.rates;
    let ok = r.gamma >= 0.95 && r.degree >= 0.95 && r.wedge >= 0.95 && r.g >= 0.95;
    Ok((ok, format!("gamma {} degree {} wedge {} g {}", r.gamma, r.degree, r.wedge, r.g)))
}

fn metastability(seed: u64) -> Result<(bool, String)> {
    let cfg = ExperimentConfig::from_toml(
        "[model]\nn = 200\nbeta = [-1.8, 2.0]\ntemplates = [\"triangle\"]\n[metastable]\nreplicas = 20\nsweeps = 50.0\n",
    )?;
    let out = super::metastable::run_metastable(&cfg, seed)?;
    let t = out.persistence_rate(super::metastable::Arm::Treatment);
    let c = out.persistence_rate(super::metastable::Arm::Control);
    Ok((t >= 0.95 && c >= 0.95, format!("treatment {t}, control {c}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupon_moments_small() {
        let (m, v) = coupon_collector_moments(1);
        assert_eq!((m, v), (1.0, 0.0));
        let (m, _) = coupon_collector_moments(2);
        assert_eq!(m, 3.0);
    }

    #[test]
    fn quick_checks_pass() {
        for (name, f) in QUICK {
            let (ok, detail) = f(crate::rng::DEFAULT_SEED).unwrap();
            assert!(ok, "{name}: {detail}");
        }
    }
}
