//! Persistence of a vertex held at the cavity fixed point `q*` while the rest
//! of the graph sits at `p1*`, against a control arm started entirely at `p1*`.

use rayon::prelude::*;

use super::model_family;
use super::output::{fmt_f64, OutputDir};
use super::ExperimentConfig;
use crate::diagnostics::{cavity_statistics, cut_distance_const, split_upper, CutMode};
use crate::dynamics::{run_chain, ChainState, FnObserver};
use crate::error::{ErgmError, Result};
use crate::graph::{EdgeId, Graph};
use crate::landscape::{solve_example_tergm, TergmSolution};
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Treatment,
    Control,
}

impl std::fmt::Display for Arm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Arm::Treatment => "treatment",
            Arm::Control => "control",
        })
    }
}

/// One-sided membership certificate for `Ω_{q,p}(η)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    /// `|p_1 - q| ≤ η` and a cut-distance upper bound `≤ η/2`.
    Inside,
    /// `|p_1 - q| > η`, or a cut-distance lower bound `> η/2`.
    Outside,
    Unknown,
}

impl Membership {
    fn code(self) -> &'static str {
        match self {
            Membership::Inside => "in",
            Membership::Outside => "out",
            Membership::Unknown => "unknown",
        }
    }
}

/// `Ω_{q,p}(η)` membership from `p_1` and cut-distance bounds. The lower
/// bound is only computed when the upper bound cannot decide.
pub fn omega_membership(x: &Graph, q: f64, p: f64, eta: f64, starts: usize, seed: u64) -> Result<(Membership, f64)> {
    let p1 = x.degree(0) as f64 / x.n() as f64;
    let upper = split_upper(x, &[0], p)?;
    if (p1 - q).abs() > eta {
        return Ok((Membership::Outside, upper));
    }
    if upper <= eta / 2.0 {
        return Ok((Membership::Inside, upper));
    }
    let lower = cut_distance_const(x, p, CutMode::Bounds { starts, seed })?.lower();
    Ok((if lower > eta / 2.0 { Membership::Outside } else { Membership::Unknown }, upper))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetaRow {
    pub step: u64,
    pub p1: f64,
    pub p1_min: f64,
    pub p1_max: f64,
    pub r_bar_min: f64,
    pub r_bar_max: f64,
    pub cut_upper: f64,
    pub omega: Membership,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaResult {
    pub arm: Arm,
    pub replica: usize,
    pub target: f64,
    pub rows: Vec<MetaRow>,
    /// `|p_1(X_t) - target| ≤ band` at every recorded step.
    pub persisted: bool,
    pub max_dev: f64,
}

#[derive(Debug, Clone)]
pub struct MetastableOutcome {
    pub solution: TergmSolution,
    pub steps: u64,
    pub stride: u64,
    pub replicas: Vec<ReplicaResult>,
}

impl MetastableOutcome {
    pub fn persistence_rate(&self, arm: Arm) -> f64 {
        let of_arm: Vec<&ReplicaResult> = self.replicas.iter().filter(|r| r.arm == arm).collect();
        if of_arm.is_empty() {
            return f64::NAN;
        }
        of_arm.iter().filter(|r| r.persisted).count() as f64 / of_arm.len() as f64
    }
}

/// Vertex 0's pairs `Ber(q)`, all others `Ber(p)`, drawn in linear pair order.
pub fn initial_state<R: rand::Rng + ?Sized>(n: usize, q: f64, p: f64, rng: &mut R) -> Result<Graph> {
    for v in [q, p] {
        if !(0.0..=1.0).contains(&v) {
            return Err(ErgmError::InvalidProbability(v));
        }
    }
    let mut g = Graph::new_empty(n)?;
    for i in 0..g.num_pairs() {
        let e = EdgeId::from_index(i);
        let (a, b) = e.endpoints();
        let prob = if a == 0 || b == 0 { q } else { p };
        let u: f64 = rng.random();
        g.set_edge(e, u < prob);
    }
    Ok(g)
}

pub fn run_metastable(cfg: &ExperimentConfig, seed: u64) -> Result<MetastableOutcome> {
    let model = cfg.model()?;
    if !model.is_edge_triangle() {
        return Err(ErgmError::Config("metastable needs an edge + triangle model".into()));
    }
    let mc = &cfg.metastable;
    let beta = model.beta();
    let solution = solve_example_tergm(beta[0], beta[1])?;
    let p1 = mc.p_star.unwrap_or(solution.p1);
    let q = mc.q_star.unwrap_or(solution.q);
    let n = model.n();
    let big_n = crate::graph::num_pairs(n) as u64;
    let steps = (mc.sweeps * big_n as f64).round() as u64;
    let stride = mc.stride.unwrap_or(big_n.max(1));
    let family = model_family(&model);
    let arms: Vec<Arm> = if mc.control { vec![Arm::Treatment, Arm::Control] } else { vec![Arm::Treatment] };
    let jobs: Vec<(Arm, usize)> = arms.iter().flat_map(|&a| (0..mc.replicas).map(move |r| (a, r))).collect();
    let results: Vec<Result<ReplicaResult>> = jobs
        .par_iter()
        .map(|&(arm, r)| {
            let stream_id = match arm {
                Arm::Treatment => r,
                Arm::Control => mc.replicas + r,
            } as u64;
            let target = if arm == Arm::Treatment { q } else { p1 };
            let mut rng = stream(seed, stream_id);
            let x0 = initial_state(n, target, p1, &mut rng)?;
            let mut chain = ChainState::new(model.clone(), x0, seed, stream_id, mc.cache)?;
            *chain.rng_mut() = rng;
            let mut rows = Vec::new();
            let mut obs = FnObserver::new("metastable", &["p1"], |step, x: &Graph| {
                let cav = cavity_statistics(x, &family, p1).map_err(|e| e.to_string())?;
                let (omega, cut_upper) =
                    omega_membership(x, target, p1, mc.eta, mc.cut_starts, seed ^ step).map_err(|e| e.to_string())?;
                let p = x.degree(0) as f64 / x.n() as f64;
                rows.push(MetaRow {
                    step,
                    p1: p,
                    p1_min: cav.p1_min,
                    p1_max: cav.p1_max,
                    r_bar_min: cav.r_bar_min,
                    r_bar_max: cav.r_bar_max,
                    cut_upper,
                    omega,
                });
                Ok(vec![p])
            });
            run_chain(&mut chain, steps, stride, &mut [&mut obs])?;
            drop(obs);
            let max_dev = rows.iter().fold(0.0f64, |m, row| m.max((row.p1 - target).abs()));
            Ok(ReplicaResult { arm, replica: r, target, persisted: max_dev <= mc.band, max_dev, rows })
        })
        .collect();
    let replicas = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(MetastableOutcome { solution, steps, stride, replicas })
}

impl MetastableOutcome {
    /// `metastable.csv` (time series), `replicas.csv`, and `summary.csv`.
    pub fn write(&self, out: &mut OutputDir) -> Result<()> {
        let mut rows = Vec::new();
        for rep in &self.replicas {
            for row in &rep.rows {
                rows.push(vec![
                    rep.arm.to_string(),
                    rep.replica.to_string(),
                    row.step.to_string(),
                    fmt_f64(row.p1),
                    fmt_f64(row.p1_min),
                    fmt_f64(row.p1_max),
                    fmt_f64(row.r_bar_min),
                    fmt_f64(row.r_bar_max),
                    fmt_f64(row.cut_upper),
                    row.omega.code().to_string(),
                ]);
            }
        }
        out.write_csv(
            "metastable.csv",
            &["arm", "replica", "step", "p1", "p1_min", "p1_max", "rbar_min", "rbar_max", "cut_upper", "omega"],
            &rows,
        )?;
        let rows: Vec<Vec<String>> = self
            .replicas
            .iter()
            .map(|r| {
                let inside = r.rows.iter().filter(|row| row.omega == Membership::Inside).count();
                vec![
                    r.arm.to_string(),
                    r.replica.to_string(),
                    fmt_f64(r.target),
                    (r.persisted as u8).to_string(),
                    fmt_f64(r.max_dev),
                    fmt_f64(inside as f64 / r.rows.len().max(1) as f64),
                ]
            })
            .collect();
        out.write_csv("replicas.csv", &["arm", "replica", "target", "persisted", "max_dev", "omega_in_fraction"], &rows)?;
        let s = &self.solution;
        let mut rows = vec![
            vec!["p1_star".to_string(), fmt_f64(s.p1)],
            vec!["p2_star".to_string(), fmt_f64(s.p2)],
            vec!["q_star".to_string(), fmt_f64(s.q)],
            vec!["steps".to_string(), self.steps.to_string()],
            vec!["stride".to_string(), self.stride.to_string()],
        ];
        for arm in [Arm::Treatment, Arm::Control] {
            let rate = self.persistence_rate(arm);
            if rate.is_finite() {
                rows.push(vec![format!("{arm}_persistence"), fmt_f64(rate)]);
            }
        }
        out.write_csv("summary.csv", &["metric", "value"], &rows)
    }
}
