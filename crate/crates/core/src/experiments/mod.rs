//! Experiment drivers behind the `ergm` binary: configuration, output files
//! and run manifests.

mod config;
pub mod diag;
pub mod metastable;
pub mod mix;
mod output;
pub mod phase;
pub mod sample;
pub mod validate;

pub use config::{
    DiagConfig, ExperimentConfig, MetastableConfig, MixConfig, PhaseConfig, SampleConfig, SweepConfig, ValidateConfig,
};
pub use output::{sha256_hex, OutputDir, OutputFile, RunManifest};

use crate::error::{ErgmError, Result};
use crate::landscape::{analyze, LandscapeOptions};
use crate::model::ModelParams;
use crate::template::{TemplateFamily, TemplateGraph};

/// The unique global maximiser of `L_β`, unless overridden.
pub(crate) fn resolve_p_star(model: &ModelParams, over: Option<f64>, section: &str) -> Result<f64> {
    if let Some(p) = over {
        return Ok(p);
    }
    analyze(model, &LandscapeOptions::default()).unique_global().ok_or_else(|| {
        ErgmError::Config(format!(
            "model has no unique global maximiser of L; set {section}.p_star explicitly"
        ))
    })
}

/// Connected templates with at least two edges on at most `cap` vertices,
/// `cap` defaulting to one more than the largest model template.
pub(crate) fn default_family(model: &ModelParams, cap: Option<usize>) -> Result<TemplateFamily> {
    TemplateFamily::connected_up_to(cap.unwrap_or(model.max_template_vertices() + 1))
}

/// Model templates usable in `r_G` (at least two edges).
pub(crate) fn model_family(model: &ModelParams) -> Vec<TemplateGraph> {
    model.templates().iter().filter(|t| t.edge_count() >= 2).cloned().collect()
}

pub(crate) fn median(sorted: &[f64]) -> f64 {
    quantile(sorted, 0.5)
}

/// Linear-interpolation quantile of sorted data (`+inf` allowed).
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi || sorted[lo] == sorted[hi] {
        return sorted[lo];
    }
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Least-squares slope and intercept of `y` against `x`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_and_fit() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(median(&v), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&[1.0, f64::INFINITY, f64::INFINITY], 0.5), f64::INFINITY);
        let (s, c) = linear_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((s - 2.0).abs() < 1e-15 && (c - 1.0).abs() < 1e-15);
    }
}
