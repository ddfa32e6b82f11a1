//! Thinned samples after burn-in, each with a concentration report.

use rayon::prelude::*;

use super::output::{fmt_f64, OutputDir};
use super::{default_family, resolve_p_star, ExperimentConfig};
use crate::diagnostics::{concentration_report, g_max_abs, CutMode, ReportOptions};
use crate::dynamics::ChainState;
use crate::error::Result;
use crate::graph::Graph;
use crate::rng::stream;

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub replica: usize,
    pub sample: usize,
    pub step: u64,
    pub edge_density: f64,
    pub max_degree_dev: f64,
    /// `max_{u≠v} |p_uv - p*²|`.
    pub wedge_dev: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub gamma_member: bool,
    pub g_max: f64,
    pub cut_lower: f64,
    pub cut_upper: f64,
    pub exception_set_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRates {
    pub gamma: f64,
    pub degree: f64,
    pub wedge: f64,
    pub g: f64,
}

#[derive(Debug, Clone)]
pub struct SampleOutcome {
    pub p_star: f64,
    pub records: Vec<SampleRecord>,
    pub rates: SampleRates,
    /// Snapshot bytes per record, when requested.
    pub snapshots: Vec<Vec<u8>>,
}

fn sweeps_to_steps(sweeps: f64, n: usize) -> u64 {
    (sweeps * crate::graph::num_pairs(n) as f64).round() as u64
}

pub fn run_sample(cfg: &ExperimentConfig, seed: u64) -> Result<SampleOutcome> {
    let model = cfg.model()?;
    let sc = &cfg.sample;
    let p_star = resolve_p_star(&model, sc.p_star, "sample")?;
    let family = default_family(&model, sc.template_cap)?;
    let n = model.n();
    let burn = sweeps_to_steps(sc.burn_in_sweeps, n);
    let thin = sweeps_to_steps(sc.thin_sweeps, n).max(1);
    let per_replica: Vec<Result<Vec<(SampleRecord, Vec<u8>)>>> = (0..sc.replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(seed, r as u64);
            let g = Graph::sample_gnp(n, p_star, &mut rng)?;
            let mut chain = ChainState::new(model.clone(), g, seed, r as u64, sc.cache)?;
            *chain.rng_mut() = rng;
            chain.run(burn);
            let cut_mode = if n <= 16 {
                CutMode::Exact
            } else {
                CutMode::Bounds { starts: sc.cut_starts, seed: seed ^ (r as u64) }
            };
            let opts = ReportOptions { p_star, eps: sc.eps, delta: sc.delta, cut_mode, p1_star: None };
            let mut out = Vec::with_capacity(sc.samples);
            for s in 0..sc.samples {
                chain.run(thin);
                let x = chain.graph();
                let rep = concentration_report(x, family.templates(), &opts)?;
                let g_max = g_max_abs(&model, x)?;
                let record = SampleRecord {
                    replica: r,
                    sample: s,
                    step: chain.steps(),
                    edge_density: x.edge_count() as f64 / x.num_pairs() as f64,
                    max_degree_dev: rep.max_degree_dev,
                    wedge_dev: rep.wedge_dev_max.abs().max(rep.wedge_dev_min.abs()),
                    r_min: rep.r_min,
                    r_max: rep.r_max,
                    gamma_member: rep.gamma_member,
                    g_max,
                    cut_lower: rep.cut_distance.lower(),
                    cut_upper: rep.cut_distance.upper(),
                    exception_set_size: rep.exception_set_size,
                };
                out.push((record, if sc.snapshots { x.to_snapshot() } else { Vec::new() }));
            }
            Ok(out)
        })
        .collect();
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    for rep in per_replica {
        for (rec, snap) in rep? {
            records.push(rec);
            if sc.snapshots {
                snapshots.push(snap);
            }
        }
    }
    let total = records.len() as f64;
    let rate = |f: &dyn Fn(&SampleRecord) -> bool| records.iter().filter(|r| f(r)).count() as f64 / total;
    let rates = SampleRates {
        gamma: rate(&|r| r.gamma_member),
        degree: rate(&|r| r.max_degree_dev <= sc.degree_tol),
        wedge: rate(&|r| r.wedge_dev <= sc.wedge_tol),
        g: rate(&|r| r.g_max <= sc.g_tol),
    };
    Ok(SampleOutcome { p_star, records, rates, snapshots })
}

impl SampleOutcome {
    /// `samples.csv`, `summary.csv`, and `snapshots/*.ergx` when enabled.
    pub fn write(&self, out: &mut OutputDir) -> Result<()> {
        let rows: Vec<Vec<String>> = self
            .records
            .iter()
            .map(|r| {
                vec![
                    r.replica.to_string(),
                    r.sample.to_string(),
                    r.step.to_string(),
                    fmt_f64(r.edge_density),
                    fmt_f64(r.max_degree_dev),
                    fmt_f64(r.wedge_dev),
                    fmt_f64(r.r_min),
                    fmt_f64(r.r_max),
                    (r.gamma_member as u8).to_string(),
                    fmt_f64(r.g_max),
                    fmt_f64(r.cut_lower),
                    fmt_f64(r.cut_upper),
                    r.exception_set_size.to_string(),
                ]
            })
            .collect();
        out.write_csv(
            "samples.csv",
            &[
                "replica",
                "sample",
                "step",
                "edge_density",
                "max_degree_dev",
                "wedge_dev",
                "r_min",
                "r_max",
                "gamma_member",
                "g_max",
                "cut_lower",
                "cut_upper",
                "exception_set_size",
            ],
            &rows,
        )?;
        let rows = vec![
            vec!["p_star".to_string(), fmt_f64(self.p_star)],
            vec!["samples".to_string(), self.records.len().to_string()],
            vec!["gamma_rate".to_string(), fmt_f64(self.rates.gamma)],
            vec!["degree_rate".to_string(), fmt_f64(self.rates.degree)],
            vec!["wedge_rate".to_string(), fmt_f64(self.rates.wedge)],
            vec!["g_rate".to_string(), fmt_f64(self.rates.g)],
        ];
        out.write_csv("summary.csv", &["metric", "value"], &rows)?;
        for (rec, snap) in self.records.iter().zip(&self.snapshots) {
            out.write(&format!("snapshots/r{}_s{}.ergx", rec.replica, rec.sample), snap)?;
        }
        Ok(())
    }
}
