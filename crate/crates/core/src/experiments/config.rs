use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dynamics::CachePolicy;
use crate::error::{ErgmError, Result};
use crate::model::{ModelParams, ModelSpec};

/// Top-level experiment configuration (TOML). Each subcommand reads
/// `[model]` plus its own section; missing sections take their defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub phase: PhaseConfig,
    #[serde(default)]
    pub sample: SampleConfig,
    #[serde(default)]
    pub mix: MixConfig,
    #[serde(default)]
    pub metastable: MetastableConfig,
    #[serde(default)]
    pub diag: DiagConfig,
    #[serde(default)]
    pub validate: ValidateConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseConfig {
    /// Grid points for the sign scan of `L'`.
    pub grid: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

impl Default for PhaseConfig {
    fn default() -> Self {
        PhaseConfig { grid: 4096, sweep: None }
    }
}

/// Sweeps `β[index]` over `points` evenly spaced values in `[from, to]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub index: usize,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleConfig {
    pub replicas: usize,
    pub samples: usize,
    pub burn_in_sweeps: f64,
    pub thin_sweeps: f64,
    pub eps: f64,
    /// `δ` of the degree exception set.
    pub delta: f64,
    /// Thresholds for the reported concentration rates.
    pub degree_tol: f64,
    pub wedge_tol: f64,
    pub g_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_star: Option<f64>,
    /// Vertex cap of the template family; default one more than the largest model template.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub template_cap: Option<usize>,
    pub cut_starts: usize,
    pub snapshots: bool,
    pub cache: CachePolicy,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            replicas: 1,
            samples: 100,
            burn_in_sweeps: 20.0,
            thin_sweeps: 1.0,
            eps: 0.1,
            delta: 0.5,
            degree_tol: 0.1,
            wedge_tol: 0.1,
            g_tol: 0.05,
            p_star: None,
            template_cap: None,
            cut_starts: 8,
            snapshots: false,
            cache: CachePolicy::Auto,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixConfig {
    pub sizes: Vec<usize>,
    pub replicas: usize,
    /// Step cap per coalescence run; longer runs are recorded as timeouts.
    pub cap: u64,
    /// Size of the exact total-variation arm (0 disables it).
    pub exact_n: usize,
    pub delta: f64,
    /// Steps of the exact arm; default `20 N ln(N/δ)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_star: Option<f64>,
    pub cache: CachePolicy,
}

impl Default for MixConfig {
    fn default() -> Self {
        MixConfig {
            sizes: vec![8, 16, 32],
            replicas: 50,
            cap: 10_000_000,
            exact_n: 5,
            delta: 1e-4,
            exact_steps: None,
            p_star: None,
            cache: CachePolicy::Auto,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetastableConfig {
    pub replicas: usize,
    /// Horizon in sweeps of `N = n(n-1)/2` steps.
    pub sweeps: f64,
    /// Steps between observations; default one sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<u64>,
    /// `η` of the `Ω_{q,p}(η)` surrogate.
    pub eta: f64,
    /// Persistence band for `|p_1(X_t) - target|`.
    pub band: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_star: Option<f64>,
    pub cut_starts: usize,
    pub control: bool,
    pub cache: CachePolicy,
}

impl Default for MetastableConfig {
    fn default() -> Self {
        MetastableConfig {
            replicas: 20,
            sweeps: 50.0,
            stride: None,
            eta: 0.05,
            band: 0.1,
            q_star: None,
            p_star: None,
            cut_starts: 4,
            control: true,
            cache: CachePolicy::Auto,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_star: Option<f64>,
    pub eps: f64,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub template_cap: Option<usize>,
    /// Reference `p1*` for the cavity statistics of vertex 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1_star: Option<f64>,
    pub cut_starts: usize,
}

impl Default for DiagConfig {
    fn default() -> Self {
        DiagConfig { snapshot: None, p_star: None, eps: 0.1, delta: 0.5, template_cap: None, p1_star: None, cut_starts: 32 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[derive(Default)]
pub struct ValidateConfig {
    /// Skips the Monte Carlo checks that take minutes.
    pub quick: bool,
}


fn unit(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ErgmError::Config(format!("{name} = {p} is not a probability")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ErgmError::Config(format!("{name} = {v} must be positive")))
    }
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(ErgmError::Config(format!("{name} = {v} must be nonnegative")))
    }
}

/// `line L, column C: message` instead of the multi-line snippet.
fn one_line(text: &str, e: &toml::de::Error) -> String {
    let msg = e.message().trim().replace('\n', " ");
    match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            format!("line {line}, column {col}: {msg}")
        }
        None => msg,
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ErgmError::Config(one_line(text, &e)))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| ErgmError::Config(e.to_string()))
    }

    pub fn model(&self) -> Result<ModelParams> {
        self.model
            .as_ref()
            .ok_or_else(|| ErgmError::Config("missing [model] section".into()))?
            .build()
            .map_err(|e| ErgmError::Config(format!("[model]: {e}")))
    }

    /// Range checks on every section, and template resolution for `[model]`.
    pub fn check(&self) -> Result<()> {
        if self.model.is_some() {
            self.model()?;
        }
        let p = &self.phase;
        if p.grid < 16 {
            return Err(ErgmError::Config(format!("phase.grid = {} must be at least 16", p.grid)));
        }
        if let Some(s) = &p.sweep {
            if s.points < 1 {
                return Err(ErgmError::Config("phase.sweep.points must be at least 1".into()));
            }
            if !(s.from.is_finite() && s.to.is_finite()) {
                return Err(ErgmError::Config("phase.sweep bounds must be finite".into()));
            }
            if let Some(m) = &self.model {
                if s.index >= m.beta.len() {
                    return Err(ErgmError::Config(format!(
                        "phase.sweep.index = {} but the model has {} parameters",
                        s.index,
                        m.beta.len()
                    )));
                }
            }
        }
        let s = &self.sample;
        if s.replicas < 1 || s.samples < 1 {
            return Err(ErgmError::Config("sample.replicas and sample.samples must be at least 1".into()));
        }
        nonneg("sample.burn_in_sweeps", s.burn_in_sweeps)?;
        positive("sample.thin_sweeps", s.thin_sweeps)?;
        for (name, v) in [("sample.eps", s.eps), ("sample.degree_tol", s.degree_tol), ("sample.wedge_tol", s.wedge_tol)] {
            nonneg(name, v)?;
        }
        nonneg("sample.g_tol", s.g_tol)?;
        unit("sample.delta", s.delta)?;
        positive("sample.delta", s.delta)?;
        if let Some(v) = s.p_star {
            unit("sample.p_star", v)?;
        }
        let m = &self.mix;
        if m.replicas < 1 || m.cap < 1 {
            return Err(ErgmError::Config("mix.replicas and mix.cap must be at least 1".into()));
        }
        if m.sizes.iter().any(|&n| n < 2) {
            return Err(ErgmError::Config("mix.sizes entries must be at least 2".into()));
        }
        if m.exact_n > crate::exact::MAX_EXACT_N || m.exact_n == 1 {
            return Err(ErgmError::Config(format!(
                "mix.exact_n = {} must be 0 (off) or in 2..={}",
                m.exact_n,
                crate::exact::MAX_EXACT_N
            )));
        }
        unit("mix.delta", m.delta)?;
        positive("mix.delta", m.delta)?;
        if let Some(v) = m.p_star {
            unit("mix.p_star", v)?;
        }
        let t = &self.metastable;
        if t.replicas < 1 {
            return Err(ErgmError::Config("metastable.replicas must be at least 1".into()));
        }
        positive("metastable.sweeps", t.sweeps)?;
        if t.stride == Some(0) {
            return Err(ErgmError::Config("metastable.stride must be at least 1".into()));
        }
        positive("metastable.eta", t.eta)?;
        nonneg("metastable.band", t.band)?;
        for (name, v) in [("metastable.q_star", t.q_star), ("metastable.p_star", t.p_star)] {
            if let Some(v) = v {
                unit(name, v)?;
            }
        }
        let d = &self.diag;
        nonneg("diag.eps", d.eps)?;
        unit("diag.delta", d.delta)?;
        positive("diag.delta", d.delta)?;
        for (name, v) in [("diag.p_star", d.p_star), ("diag.p1_star", d.p1_star)] {
            if let Some(v) = v {
                unit(name, v)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_and_rejects_unknown_keys() {
        let cfg = ExperimentConfig::from_toml(
            "seed = 3\n[model]\nn = 10\nbeta = [-1.8, 2.0]\ntemplates = [\"triangle\"]\n[sample]\nsamples = 4\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, Some(3));
        assert_eq!(cfg.sample.samples, 4);
        assert_eq!(cfg.sample.replicas, 1);
        assert!(cfg.model().unwrap().is_edge_triangle());
        let err = ExperimentConfig::from_toml("[model]\nn = 10\nbeta = [0.0]\nbetta = 1\n").unwrap_err();
        assert!(err.to_string().contains("betta"), "{err}");
        let err = ExperimentConfig::from_toml("[sample]\nsampels = 3\n").unwrap_err();
        assert!(err.to_string().contains("sampels"), "{err}");
    }

    #[test]
    fn range_checks() {
        for bad in [
            "[model]\nn = 10\nbeta = [0.0]\ntemplates = [\"pentagon\"]\n",
            "[sample]\neps = -1.0\n",
            "[mix]\nreplicas = 0\n",
            "[mix]\nexact_n = 9\n",
            "[metastable]\nq_star = 1.5\n",
            "[phase]\nsweep = { index = 3, from = 0.0, to = 1.0, points = 4 }\n[model]\nn = 3\nbeta = [0.0]\n",
        ] {
            assert!(matches!(ExperimentConfig::from_toml(bad), Err(ErgmError::Config(_))), "{bad}");
        }
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig::from_toml("[model]\nn = 12\nbeta = [0.5, 0.1]\ntemplates = [\"triangle\"]\n").unwrap();
        let text = cfg.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(back.to_toml().unwrap(), text);
    }
}
