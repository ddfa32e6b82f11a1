//! Concentration report for a stored graph snapshot.

use std::path::Path;

use serde::Serialize;

use super::output::{fmt_f64, OutputDir};
use super::{default_family, resolve_p_star, ExperimentConfig};
use crate::diagnostics::{concentration_report, g_max_abs, ConcentrationReport, CutMode, ReportOptions};
use crate::error::{ErgmError, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Serialize)]
pub struct DiagOutcome {
    pub n: usize,
    pub p_star: f64,
    pub eps: f64,
    pub templates: Vec<String>,
    pub g_max: f64,
    pub report: ConcentrationReport,
}

pub fn read_snapshot(path: &Path) -> Result<Graph> {
    let bytes = std::fs::read(path)
        .map_err(|e| ErgmError::Config(format!("cannot read snapshot {}: {e}", path.display())))?;
    Ok(Graph::from_snapshot(&bytes)?)
}

/// The model is re-sized to the snapshot's vertex count.
pub fn run_diag(cfg: &ExperimentConfig, seed: u64) -> Result<DiagOutcome> {
    let dc = &cfg.diag;
    let path = dc.snapshot.as_ref().ok_or_else(|| ErgmError::Config("diag.snapshot is required".into()))?;
    let x = read_snapshot(path)?;
    let model = cfg.model()?.with_n(x.n())?;
    let p_star = resolve_p_star(&model, dc.p_star, "diag")?;
    let family = default_family(&model, dc.template_cap)?;
    let cut_mode = if x.n() <= 16 { CutMode::Exact } else { CutMode::Bounds { starts: dc.cut_starts, seed } };
    let opts = ReportOptions { p_star, eps: dc.eps, delta: dc.delta, cut_mode, p1_star: dc.p1_star };
    let report = concentration_report(&x, family.templates(), &opts)?;
    Ok(DiagOutcome {
        n: x.n(),
        p_star,
        eps: dc.eps,
        templates: family.templates().iter().map(|t| t.name().to_string()).collect(),
        g_max: g_max_abs(&model, &x)?,
        report,
    })
}

impl DiagOutcome {
    /// `report.json` (everything, including `p_u`) and `report.csv` (scalars).
    pub fn write(&self, out: &mut OutputDir) -> Result<()> {
        out.write_json("report.json", self)?;
        let r = &self.report;
        let mut rows = vec![
            ("n", self.n.to_string()),
            ("p_star", fmt_f64(self.p_star)),
            ("eps", fmt_f64(self.eps)),
            ("max_degree_dev", fmt_f64(r.max_degree_dev)),
            ("wedge_dev_max", fmt_f64(r.wedge_dev_max)),
            ("wedge_dev_min", fmt_f64(r.wedge_dev_min)),
            ("exception_set_size", r.exception_set_size.to_string()),
            ("r_min", fmt_f64(r.r_min)),
            ("r_max", fmt_f64(r.r_max)),
            ("gamma_member", (r.gamma_member as u8).to_string()),
            ("cut_lower", fmt_f64(r.cut_distance.lower())),
            ("cut_upper", fmt_f64(r.cut_distance.upper())),
            ("g_max", fmt_f64(self.g_max)),
        ];
        if let Some(c) = &r.cavity {
            rows.extend([
                ("r_bar_min", fmt_f64(c.r_bar_min)),
                ("r_bar_max", fmt_f64(c.r_bar_max)),
                ("p1_min", fmt_f64(c.p1_min)),
                ("p1_max", fmt_f64(c.p1_max)),
            ]);
        }
        let rows: Vec<Vec<String>> = rows.into_iter().map(|(k, v)| vec![k.to_string(), v]).collect();
        out.write_csv("report.csv", &["metric", "value"], &rows)
    }
}
