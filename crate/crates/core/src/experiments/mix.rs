//! Coalescence-time sweeps over `n` and the exact total-variation arm.

use rayon::prelude::*;

use super::output::{fmt_f64, OutputDir};
use super::{linear_fit, median, quantile, resolve_p_star, ExperimentConfig};
use crate::dynamics::coalescence_time;
use crate::error::Result;
use crate::exact::{gnp_distribution, hitting_time, ExactModel};
use crate::graph::num_pairs;

#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub n: usize,
    /// `None` for runs that hit the cap.
    pub times: Vec<Option<u64>>,
    pub timeouts: usize,
    /// Timeouts count as `+inf`.
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactArm {
    pub n: usize,
    pub p_star: f64,
    pub tv: Vec<f64>,
    pub monotone: bool,
    pub hit: Option<usize>,
    /// `hit / (N ln(N/δ))`.
    pub fitted_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixOutcome {
    pub sizes: Vec<SizeSummary>,
    /// Log-log slope and intercept of median time against `n`; `None` when a
    /// median is infinite or fewer than two sizes were run.
    pub fit: Option<(f64, f64)>,
    pub exact: Option<ExactArm>,
}

pub fn summarize(n: usize, times: Vec<Option<u64>>) -> SizeSummary {
    let mut sorted: Vec<f64> = times.iter().map(|t| t.map_or(f64::INFINITY, |v| v as f64)).collect();
    sorted.sort_by(f64::total_cmp);
    SizeSummary {
        n,
        timeouts: times.iter().filter(|t| t.is_none()).count(),
        median: median(&sorted),
        q25: quantile(&sorted, 0.25),
        q75: quantile(&sorted, 0.75),
        times,
    }
}

/// Log-log least squares of median against `n`.
pub fn scaling_fit(sizes: &[SizeSummary]) -> Option<(f64, f64)> {
    if sizes.len() < 2 || sizes.iter().any(|s| !s.median.is_finite() || s.median <= 0.0) {
        return None;
    }
    let x: Vec<f64> = sizes.iter().map(|s| (s.n as f64).ln()).collect();
    let y: Vec<f64> = sizes.iter().map(|s| s.median.ln()).collect();
    Some(linear_fit(&x, &y))
}

pub fn run_mix(cfg: &ExperimentConfig, seed: u64) -> Result<MixOutcome> {
    let model = cfg.model()?;
    let mc = &cfg.mix;
    let jobs: Vec<(usize, usize)> =
        (0..mc.sizes.len()).flat_map(|i| (0..mc.replicas).map(move |r| (i, r))).collect();
    let results: Vec<Result<Option<u64>>> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let m = model.with_n(mc.sizes[i])?;
            coalescence_time(&m, seed, (i * mc.replicas + r) as u64, mc.cap, mc.cache)
        })
        .collect();
    let mut per_size = vec![Vec::with_capacity(mc.replicas); mc.sizes.len()];
    for (&(i, _), t) in jobs.iter().zip(results) {
        per_size[i].push(t?);
    }
    let sizes: Vec<SizeSummary> = mc.sizes.iter().zip(per_size).map(|(&n, t)| summarize(n, t)).collect();
    let fit = scaling_fit(&sizes);
    let exact = if mc.exact_n == 0 {
        None
    } else {
        let m = model.with_n(mc.exact_n)?;
        let p_star = resolve_p_star(&m, mc.p_star, "mix")?;
        let ex = ExactModel::new(&m)?;
        let big_n = num_pairs(mc.exact_n) as f64;
        let scale = big_n * (big_n / mc.delta).ln();
        let steps = mc.exact_steps.unwrap_or((20.0 * scale).ceil() as usize);
        let tv = ex.tv_curve(&gnp_distribution(mc.exact_n, p_star)?, steps)?;
        let monotone = tv.windows(2).all(|w| w[1] <= w[0] + 1e-15);
        let hit = hitting_time(&tv, mc.delta);
        Some(ExactArm { n: mc.exact_n, p_star, monotone, hit, fitted_c: hit.map(|t| t as f64 / scale), tv })
    };
    Ok(MixOutcome { sizes, fit, exact })
}

impl MixOutcome {
    /// `coalescence.csv`, `mix_summary.csv`, `fit.csv`, and `tv.csv` for the exact arm.
    pub fn write(&self, out: &mut OutputDir) -> Result<()> {
        let mut rows = Vec::new();
        for s in &self.sizes {
            for (r, t) in s.times.iter().enumerate() {
                rows.push(vec![
                    s.n.to_string(),
                    r.to_string(),
                    t.map(|v| v.to_string()).unwrap_or_default(),
                    (t.is_none() as u8).to_string(),
                ]);
            }
        }
        out.write_csv("coalescence.csv", &["n", "replica", "steps", "timeout"], &rows)?;
        let rows: Vec<Vec<String>> = self
            .sizes
            .iter()
            .map(|s| {
                vec![
                    s.n.to_string(),
                    s.times.len().to_string(),
                    s.timeouts.to_string(),
                    fmt_f64(s.median),
                    fmt_f64(s.q25),
                    fmt_f64(s.q75),
                ]
            })
            .collect();
        out.write_csv("mix_summary.csv", &["n", "replicas", "timeouts", "median", "q25", "q75"], &rows)?;
        let fit_row = match self.fit {
            Some((slope, intercept)) => vec![fmt_f64(slope), fmt_f64(intercept)],
            None => vec![String::new(), String::new()],
        };
        out.write_csv("fit.csv", &["slope", "intercept"], &[fit_row])?;
        if let Some(e) = &self.exact {
            let rows: Vec<Vec<String>> =
                e.tv.iter().enumerate().map(|(t, v)| vec![t.to_string(), fmt_f64(*v)]).collect();
            out.write_csv("tv.csv", &["t", "tv"], &rows)?;
            let rows = vec![vec![
                e.n.to_string(),
                fmt_f64(e.p_star),
                (e.monotone as u8).to_string(),
                e.hit.map(|t| t.to_string()).unwrap_or_default(),
                e.fitted_c.map(fmt_f64).unwrap_or_default(),
            ]];
            out.write_csv("tv_summary.csv", &["n", "p_star", "monotone", "hitting_time", "fitted_c"], &rows)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_handles_timeouts() {
        let s = summarize(8, vec![Some(10), None, Some(30)]);
        assert_eq!(s.timeouts, 1);
        assert_eq!(s.median, 30.0);
        assert_eq!(s.q75, f64::INFINITY);
        assert!(scaling_fit(&[s.clone(), summarize(16, vec![None, None])]).is_none());
        let a = summarize(8, vec![Some(64)]);
        let b = summarize(16, vec![Some(256)]);
        let (slope, _) = scaling_fit(&[a, b]).unwrap();
        assert!((slope - 2.0).abs() < 1e-12);
    }
}
