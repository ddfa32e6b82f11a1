//! Regime classification of `L_β` at a single `β` or along a one-parameter sweep.

use super::output::{fmt_f64, OutputDir};
use super::ExperimentConfig;
use crate::error::Result;
use crate::landscape::{analyze, LandscapeOptions, LandscapeReport, Regime};
use crate::model::ModelParams;

#[derive(Debug, Clone)]
pub struct PhasePoint {
    pub beta: Vec<f64>,
    pub report: LandscapeReport,
}

/// A regime change between consecutive sweep points, with the boundary
/// located by bisection on the classification.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub lo: f64,
    pub hi: f64,
    pub from: Regime,
    pub to: Regime,
    pub threshold: f64,
}

#[derive(Debug, Clone)]
pub struct PhaseOutcome {
    pub points: Vec<PhasePoint>,
    pub transitions: Vec<Transition>,
}

fn options(grid: usize) -> LandscapeOptions {
    LandscapeOptions { grid_size: grid, ..LandscapeOptions::default() }
}

fn with_beta(model: &ModelParams, index: usize, value: f64) -> Result<ModelParams> {
    let mut beta = model.beta().to_vec();
    beta[index] = value;
    ModelParams::with_templates(model.n(), beta, model.templates()[1..].to_vec())
}

pub fn run_phase(cfg: &ExperimentConfig) -> Result<PhaseOutcome> {
    let model = cfg.model()?;
    let opts = options(cfg.phase.grid);
    let Some(sweep) = &cfg.phase.sweep else {
        let report = analyze(&model, &opts);
        return Ok(PhaseOutcome {
            points: vec![PhasePoint { beta: model.beta().to_vec(), report }],
            transitions: Vec::new(),
        });
    };
    let values: Vec<f64> = if sweep.points == 1 {
        vec![sweep.from]
    } else {
        (0..sweep.points)
            .map(|i| sweep.from + (sweep.to - sweep.from) * i as f64 / (sweep.points - 1) as f64)
            .collect()
    };
    let mut points = Vec::with_capacity(values.len());
    for &v in &values {
        let m = with_beta(&model, sweep.index, v)?;
        points.push(PhasePoint { beta: m.beta().to_vec(), report: analyze(&m, &opts) });
    }
    let mut transitions = Vec::new();
    for i in 1..points.len() {
        let (from, to) = (points[i - 1].report.regime, points[i].report.regime);
        if from == to {
            continue;
        }
        let (mut lo, mut hi) = (values[i - 1], values[i]);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if analyze(&with_beta(&model, sweep.index, mid)?, &opts).regime == from {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        transitions.push(Transition { lo: values[i - 1], hi: values[i], from, to, threshold: 0.5 * (lo + hi) });
    }
    Ok(PhaseOutcome { points, transitions })
}

impl PhaseOutcome {
    /// `phase.csv` (one row per `β`) and `transitions.csv`.
    pub fn write(&self, out: &mut OutputDir) -> Result<()> {
        let k = self.points.first().map_or(0, |p| p.beta.len());
        let mut header: Vec<String> = (0..k).map(|i| format!("beta_{i}")).collect();
        header.extend(
            ["regime", "num_maxima", "p_star", "maxima", "fixed_points", "endpoint_supremum"]
                .iter()
                .map(|s| s.to_string()),
        );
        let rows: Vec<Vec<String>> = self
            .points
            .iter()
            .map(|pt| {
                let r = &pt.report;
                let mut row: Vec<String> = pt.beta.iter().map(|b| fmt_f64(*b)).collect();
                row.push(r.regime.to_string());
                row.push(r.maxima.len().to_string());
                row.push(r.unique_global().map(fmt_f64).unwrap_or_default());
                row.push(r.maxima.iter().map(|m| fmt_f64(m.p)).collect::<Vec<_>>().join(";"));
                row.push(r.fixed_points.iter().map(|f| fmt_f64(f.p)).collect::<Vec<_>>().join(";"));
                row.push(r.endpoint_supremum.map(fmt_f64).unwrap_or_default());
                row
            })
            .collect();
        let header_ref: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        out.write_csv("phase.csv", &header_ref, &rows)?;
        let rows: Vec<Vec<String>> = self
            .transitions
            .iter()
            .map(|t| vec![fmt_f64(t.lo), fmt_f64(t.hi), t.from.to_string(), t.to.to_string(), fmt_f64(t.threshold)])
            .collect();
        out.write_csv("transitions.csv", &["beta_lo", "beta_hi", "from", "to", "threshold"], &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_is_high() {
        let cfg = ExperimentConfig::from_toml("[model]\nn = 5\nbeta = [0.0]\n").unwrap();
        let out = run_phase(&cfg).unwrap();
        assert_eq!(out.points.len(), 1);
        assert_eq!(out.points[0].report.regime, Regime::High);
        assert!((out.points[0].report.unique_global().unwrap() - 0.5).abs() < 1e-9);
    }
}
