use serde::{Deserialize, Serialize};

use crate::counts::{delta_hom_count, hom_density};
use crate::error::{ErgmError, Result};
use crate::graph::{EdgeId, Graph};
use crate::template::{TemplateGraph, TemplateKind, TemplateSpec};

/// Parameters `β` with their templates; index 0 is always the single edge.
#[derive(Debug, Clone)]
pub struct ModelParams {
    beta: Vec<f64>,
    templates: Vec<TemplateGraph>,
    n: usize,
}

impl ModelParams {
    pub fn new(n: usize, beta: Vec<f64>, templates: Vec<TemplateGraph>) -> Result<Self> {
        if n == 0 {
            return Err(ErgmError::EmptyGraph);
        }
        if beta.is_empty() || beta.len() != templates.len() {
            return Err(ErgmError::InvalidModel(format!(
                "{} coefficients for {} templates",
                beta.len(),
                templates.len()
            )));
        }
        if templates[0].kind() != TemplateKind::Edge {
            return Err(ErgmError::InvalidModel("template 0 must be the single edge".into()));
        }
        for (i, &b) in beta.iter().enumerate() {
            if !b.is_finite() {
                return Err(ErgmError::InvalidModel(format!("beta[{i}] = {b} is not finite")));
            }
            if i > 0 && b < 0.0 {
                return Err(ErgmError::InvalidModel(format!("beta[{i}] = {b} must be nonnegative")));
            }
        }
        for i in 1..templates.len() {
            if templates[..i].contains(&templates[i]) {
                return Err(ErgmError::InvalidModel(format!(
                    "template {} listed twice",
                    templates[i].name()
                )));
            }
        }
        Ok(ModelParams { beta, templates, n })
    }

    /// Edge term plus the given higher templates.
    pub fn with_templates(n: usize, beta: Vec<f64>, extra: Vec<TemplateGraph>) -> Result<Self> {
        let mut templates = vec![TemplateGraph::edge()];
        templates.extend(extra);
        Self::new(n, beta, templates)
    }

    pub fn edge_only(n: usize, beta0: f64) -> Result<Self> {
        Self::new(n, vec![beta0], vec![TemplateGraph::edge()])
    }

    pub fn edge_triangle(n: usize, beta0: f64, beta1: f64) -> Result<Self> {
        Self::with_templates(n, vec![beta0, beta1], vec![TemplateGraph::triangle()])
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn templates(&self) -> &[TemplateGraph] {
        &self.templates
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Same coefficients for a different graph size.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(n, self.beta.clone(), self.templates.clone())
    }

    /// Coefficients and edge counts `(β_i, |E_i|)`.
    pub fn terms(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.beta.iter().copied().zip(self.templates.iter().map(|t| t.edge_count()))
    }

    /// True when the model is exactly edge + triangle.
    pub fn is_edge_triangle(&self) -> bool {
        self.templates.len() == 2 && self.templates[1].kind() == TemplateKind::Triangle
    }

    /// Largest template vertex count.
    pub fn max_template_vertices(&self) -> usize {
        self.templates.iter().map(|t| t.k()).max().unwrap_or(2)
    }

    /// `H_β(X) = Σ n² β_i N_i(X)`.
    pub fn hamiltonian(&self, x: &Graph) -> f64 {
        let n2 = (x.n() * x.n()) as f64;
        self.beta
            .iter()
            .zip(&self.templates)
            .map(|(&b, t)| if b == 0.0 { 0.0 } else { n2 * b * hom_density(t, x) })
            .sum()
    }

    /// `H_β(X^{+e}) - H_β(X^{-e}) = Σ n² β_i Δ_e N_i(X)`.
    pub fn hamiltonian_delta(&self, x: &Graph, e: EdgeId) -> f64 {
        let n = x.n();
        self.beta
            .iter()
            .zip(&self.templates)
            .map(|(&b, t)| if b == 0.0 { 0.0 } else { field_term(b, delta_hom_count(t, x, e), n, t.k()) })
            .sum()
    }
}

/// `n² β Δ` for a delta count `d` of a `k`-vertex template.
#[inline]
pub(crate) fn field_term(b: f64, d: u128, n: usize, k: usize) -> f64 {
    b * d as f64 / (n as f64).powi(k as i32 - 2)
}

/// Model section of an experiment config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub n: usize,
    /// `β_0, β_1, ...`; `β_0` multiplies the edge density.
    pub beta: Vec<f64>,
    /// Templates for `β_1, ...`.
    #[serde(default)]
    pub templates: Vec<TemplateSpec>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<ModelParams> {
        let extra = self.templates.iter().map(|t| t.build()).collect::<Result<Vec<_>>>()?;
        ModelParams::with_templates(self.n, self.beta.clone(), extra)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ModelParams::edge_triangle(10, -1.8, 2.0).is_ok());
        assert!(ModelParams::edge_triangle(10, -1.8, -2.0).is_err());
        assert!(ModelParams::edge_triangle(10, f64::NAN, 2.0).is_err());
        assert!(ModelParams::new(10, vec![1.0], vec![TemplateGraph::triangle()]).is_err());
        assert!(ModelParams::with_templates(10, vec![0.0], vec![TemplateGraph::triangle()]).is_err());
        assert!(ModelParams::with_templates(
            10,
            vec![0.0, 1.0, 1.0],
            vec![TemplateGraph::triangle(), TemplateGraph::triangle()]
        )
        .is_err());
    }

    #[test]
    fn delta_matches_hamiltonian_difference() {
        let m = ModelParams::with_templates(
            7,
            vec![-0.3, 0.7, 0.2],
            vec![TemplateGraph::triangle(), TemplateGraph::two_star()],
        )
        .unwrap();
        let x = Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (0, 2), (4, 5), (1, 5)]).unwrap();
        for i in 0..21 {
            let e = EdgeId::from_index(i);
            let want = m.hamiltonian(&x.with_edge(e)) - m.hamiltonian(&x.without_edge(e));
            assert!((m.hamiltonian_delta(&x, e) - want).abs() < 1e-12);
        }
    }
}
