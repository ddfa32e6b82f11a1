//! Exact enumeration at tiny `n`: the measure, the Glauber kernel applied to
//! distributions, total variation, and detailed balance.

use crate::diagnostics::cut::{cut_distance_const, CutMode};
use crate::dynamics::{conditional_prob, Ball};
use crate::error::{ErgmError, Result};
use crate::graph::{num_pairs, EdgeId, Graph};
use crate::model::ModelParams;

/// Largest `n` for full enumeration.
pub const MAX_EXACT_N: usize = 6;
/// Largest `n` for the all-pairs detailed-balance check.
pub const MAX_BALANCE_N: usize = 5;

/// Probability vector over all graphs on `n` vertices, indexed by edge bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl ExactDistribution {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        check_n(n)?;
        if probs.len() != 1 << num_pairs(n) {
            return Err(ErgmError::SizeMismatch { left: 1 << num_pairs(n), right: probs.len() });
        }
        Ok(ExactDistribution { n, probs })
    }

    pub fn point_mass(g: &Graph) -> Result<Self> {
        let n = g.n();
        check_n(n)?;
        let mut probs = vec![0.0; 1 << num_pairs(n)];
        probs[g.state_index() as usize] = 1.0;
        Ok(ExactDistribution { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, g: &Graph) -> f64 {
        self.probs[g.state_index() as usize]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Distribution conditioned on a set of states.
    pub fn conditioned(&self, keep: &[bool]) -> Result<Self> {
        let mass: f64 = self.probs.iter().zip(keep).filter(|(_, k)| **k).map(|(p, _)| p).sum();
        if mass <= 0.0 {
            return Err(ErgmError::Domain("conditioning on a null set".into()));
        }
        let probs = self.probs.iter().zip(keep).map(|(p, &k)| if k { p / mass } else { 0.0 }).collect();
        Ok(ExactDistribution { n: self.n, probs })
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(ErgmError::EmptyGraph);
    }
    if n > MAX_EXACT_N {
        return Err(ErgmError::TooLarge { what: "exact enumeration", n, max: MAX_EXACT_N });
    }
    Ok(())
}

/// `G(n, p)` as an exact distribution.
pub fn gnp_distribution(n: usize, p: f64) -> Result<ExactDistribution> {
    check_n(n)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(ErgmError::InvalidProbability(p));
    }
    let pairs = num_pairs(n);
    let probs = (0u64..1 << pairs)
        .map(|s| {
            let k = s.count_ones() as i32;
            p.powi(k) * (1.0 - p).powi(pairs as i32 - k)
        })
        .collect();
    Ok(ExactDistribution { n, probs })
}

/// Half the L1 distance.
pub fn exact_tv(a: &ExactDistribution, b: &ExactDistribution) -> Result<f64> {
    if a.n != b.n {
        return Err(ErgmError::SizeMismatch { left: a.n, right: b.n });
    }
    Ok(0.5 * a.probs.iter().zip(&b.probs).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// Enumerated measure with per-state Hamiltonians and conditionals cached.
pub struct ExactModel {
    model: ModelParams,
    n: usize,
    pairs: usize,
    hamiltonian: Vec<f64>,
    mu: ExactDistribution,
    /// `φ_e(x)` at `state * pairs + e`.
    cond: Vec<f64>,
}

impl ExactModel {
    pub fn new(model: &ModelParams) -> Result<Self> {
        let n = model.n();
        check_n(n)?;
        let pairs = num_pairs(n);
        let states = 1usize << pairs;
        let mut hamiltonian = Vec::with_capacity(states);
        let mut cond = Vec::with_capacity(states * pairs);
        for s in 0..states {
            let g = Graph::from_state_index(n, s as u64)?;
            hamiltonian.push(model.hamiltonian(&g));
            for i in 0..pairs {
                cond.push(conditional_prob(model, &g, EdgeId::from_index(i)));
            }
        }
        let top = hamiltonian.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = hamiltonian.iter().map(|h| (h - top).exp()).collect();
        let z: f64 = weights.iter().sum();
        let mu = ExactDistribution { n, probs: weights.into_iter().map(|w| w / z).collect() };
        Ok(ExactModel { model: model.clone(), n, pairs, hamiltonian, mu, cond })
    }

    pub fn model(&self) -> &ModelParams {
        &self.model
    }

    pub fn measure(&self) -> &ExactDistribution {
        &self.mu
    }

    pub fn hamiltonian(&self, state: usize) -> f64 {
        self.hamiltonian[state]
    }

    /// Cached `φ_e` for a state.
    pub fn conditional(&self, state: usize, e: usize) -> f64 {
        self.cond[state * self.pairs + e]
    }

    fn check(&self, d: &ExactDistribution) -> Result<()> {
        if d.n != self.n {
            return Err(ErgmError::SizeMismatch { left: self.n, right: d.n });
        }
        Ok(())
    }

    /// `ν P` for the Glauber kernel.
    pub fn transition_apply(&self, d: &ExactDistribution) -> Result<ExactDistribution> {
        self.check(d)?;
        let mut out = vec![0.0; d.probs.len()];
        if self.pairs == 0 {
            return Ok(d.clone());
        }
        let inv = 1.0 / self.pairs as f64;
        for (x, &mass) in d.probs.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for i in 0..self.pairs {
                let phi = self.conditional(x, i);
                let bit = 1usize << i;
                out[x | bit] += mass * inv * phi;
                out[x & !bit] += mass * inv * (1.0 - phi);
            }
        }
        Ok(ExactDistribution { n: self.n, probs: out })
    }

    /// Exact ball membership for every state.
    pub fn ball_states(&self, ball: &Ball) -> Result<Vec<bool>> {
        (0..self.mu.probs.len())
            .map(|s| {
                let g = Graph::from_state_index(self.n, s as u64)?;
                Ok(cut_distance_const(&g, ball.p_star, CutMode::Exact)?.upper() <= ball.eta)
            })
            .collect()
    }

    /// `ν P_B` for Glauber dynamics targeting `μ(· | B)`, given ball membership.
    pub fn restricted_transition_apply(&self, d: &ExactDistribution, inside: &[bool]) -> Result<ExactDistribution> {
        self.check(d)?;
        let mut out = vec![0.0; d.probs.len()];
        if self.pairs == 0 {
            return Ok(d.clone());
        }
        let inv = 1.0 / self.pairs as f64;
        for (x, &mass) in d.probs.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for i in 0..self.pairs {
                let bit = 1usize << i;
                let y = x ^ bit;
                let w = mass * inv;
                match (inside[x], inside[y]) {
                    (true, true) => {
                        let phi = self.conditional(x, i);
                        out[x | bit] += w * phi;
                        out[x & !bit] += w * (1.0 - phi);
                    }
                    (false, true) => out[y] += w,
                    _ => out[x] += w,
                }
            }
        }
        Ok(ExactDistribution { n: self.n, probs: out })
    }

    /// `TV(π_0 P^t, μ)` for `t = 0..=t_max`.
    pub fn tv_curve(&self, start: &ExactDistribution, t_max: usize) -> Result<Vec<f64>> {
        let mut d = start.clone();
        let mut out = vec![exact_tv(&d, &self.mu)?];
        for _ in 0..t_max {
            d = self.transition_apply(&d)?;
            out.push(exact_tv(&d, &self.mu)?);
        }
        Ok(out)
    }

    /// Largest `|μ(x)P(x,y) - μ(y)P(y,x)|` over single-flip pairs. `offset`
    /// perturbs every conditional, for checking that the test can fail.
    pub fn detailed_balance(&self, offset: f64) -> Result<BalanceReport> {
        if self.n > MAX_BALANCE_N {
            return Err(ErgmError::TooLarge { what: "detailed balance check", n: self.n, max: MAX_BALANCE_N });
        }
        let mut report = BalanceReport { absolute: 0.0, relative: 0.0 };
        if self.pairs == 0 {
            return Ok(report);
        }
        let inv = 1.0 / self.pairs as f64;
        let mu = &self.mu.probs;
        for x in 0..mu.len() {
            for i in 0..self.pairs {
                let bit = 1usize << i;
                if x & bit != 0 {
                    continue;
                }
                let y = x | bit;
                let fwd = mu[x] * inv * (self.conditional(x, i) + offset);
                let back = mu[y] * inv * (1.0 - self.conditional(y, i) - offset);
                let diff = (fwd - back).abs();
                report.absolute = report.absolute.max(diff);
                let scale = fwd.abs().max(back.abs());
                if scale > 0.0 {
                    report.relative = report.relative.max(diff / scale);
                }
            }
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceReport {
    pub absolute: f64,
    /// Violation divided by the larger of the two flows.
    pub relative: f64,
}

pub fn enumerate_measure(model: &ModelParams) -> Result<ExactDistribution> {
    Ok(ExactModel::new(model)?.mu)
}

pub fn verify_detailed_balance(model: &ModelParams) -> Result<f64> {
    Ok(ExactModel::new(model)?.detailed_balance(0.0)?.absolute)
}

/// First `t` with `curve[t] < delta`.
pub fn hitting_time(curve: &[f64], delta: f64) -> Option<usize> {
    curve.iter().position(|&v| v < delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::sigmoid;

    #[test]
    fn zero_model_is_uniform() {
        let m = ModelParams::edge_only(4, 0.0).unwrap();
        let mu = enumerate_measure(&m).unwrap();
        assert!(mu.probs().iter().all(|&p| (p - 1.0 / 64.0).abs() < 1e-15));
    }

    #[test]
    fn edge_only_is_product_law() {
        let m = ModelParams::edge_only(4, 0.7).unwrap();
        let mu = enumerate_measure(&m).unwrap();
        let prod = gnp_distribution(4, sigmoid(1.4)).unwrap();
        assert!(exact_tv(&mu, &prod).unwrap() < 1e-12);
        assert!(verify_detailed_balance(&m).unwrap() < 1e-13);
    }

    #[test]
    fn one_step_from_empty() {
        let m = ModelParams::edge_only(4, 0.0).unwrap();
        let ex = ExactModel::new(&m).unwrap();
        let start = ExactDistribution::point_mass(&Graph::new_empty(4).unwrap()).unwrap();
        let d = ex.transition_apply(&start).unwrap();
        assert!((d.probs()[0] - 0.5).abs() < 1e-15);
        for i in 0..6 {
            assert!((d.probs()[1 << i] - 1.0 / 12.0).abs() < 1e-15);
        }
        assert!((d.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tv_extremes() {
        let a = ExactDistribution::point_mass(&Graph::new_empty(3).unwrap()).unwrap();
        let b = ExactDistribution::point_mass(&Graph::complete(3).unwrap()).unwrap();
        assert_eq!(exact_tv(&a, &a).unwrap(), 0.0);
        assert_eq!(exact_tv(&a, &b).unwrap(), 1.0);
        assert!(gnp_distribution(7, 0.5).is_err());
    }
}
