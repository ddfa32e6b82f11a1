use rand::Rng;

use crate::counts::delta_hom_count;
use crate::diagnostics::cut::{cut_distance_const, CutMode, N_EXACT_CUT};
use crate::error::{ErgmError, Result};
use crate::graph::{EdgeId, Graph};
use crate::landscape::sigmoid;
use crate::model::{field_term, ModelParams};
use crate::rng::{stream, StreamRng};
use crate::template::TemplateKind;

/// Largest `n` for which a codegree matrix is kept.
pub const MAX_CODEGREE_CACHE: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CachePolicy {
    /// Cache codegrees when a triangle or two-star term is present and `n` is small enough.
    #[default]
    Auto,
    Always,
    Never,
}

enum Kernel {
    /// `φ` tabulated by codegree, for the edge + triangle model.
    Triangle(Vec<f64>),
    Constant(f64),
    General,
}

/// Graph plus model plus incrementally maintained statistics. Holds no RNG,
/// so couplings can drive several cores from one stream.
pub struct ChainCore {
    graph: Graph,
    model: ModelParams,
    degrees: Vec<u32>,
    codeg: Option<Vec<u16>>,
    kernel: Kernel,
    steps: u64,
}

impl ChainCore {
    pub fn new(model: ModelParams, graph: Graph, policy: CachePolicy) -> Result<Self> {
        let n = graph.n();
        if model.n() != n {
            return Err(ErgmError::SizeMismatch { left: model.n(), right: n });
        }
        let wants = model
            .templates()
            .iter()
            .any(|t| matches!(t.kind(), TemplateKind::Triangle | TemplateKind::Star(2)));
        let cache = match policy {
            CachePolicy::Never => false,
            CachePolicy::Auto => wants && n <= MAX_CODEGREE_CACHE,
            CachePolicy::Always => {
                if n > MAX_CODEGREE_CACHE {
                    return Err(ErgmError::TooLarge { what: "codegree cache", n, max: MAX_CODEGREE_CACHE });
                }
                true
            }
        };
        let codeg = cache.then(|| {
            let mut c = vec![0u16; n * n];
            for u in 0..n {
                for v in u + 1..n {
                    let k = graph.codegree(u, v) as u16;
                    c[u * n + v] = k;
                    c[v * n + u] = k;
                }
            }
            c
        });
        let kernel = if model.templates().len() == 1 {
            Kernel::Constant(sigmoid(field_term(model.beta()[0], 2, n, 2)))
        } else if model.is_edge_triangle() {
            let (b0, b1) = (model.beta()[0], model.beta()[1]);
            let table = (0..n.max(2) - 1)
                .map(|c| {
                    let terms = [field_term(b0, 2, n, 2), field_term(b1, 6 * c as u128, n, 3)];
                    let field: f64 = terms
                        .iter()
                        .zip([b0, b1])
                        .map(|(&t, b)| if b == 0.0 { 0.0 } else { t })
                        .sum();
                    sigmoid(field)
                })
                .collect();
            Kernel::Triangle(table)
        } else {
            Kernel::General
        };
        let degrees = graph.degrees().into_iter().map(|d| d as u32).collect();
        Ok(ChainCore { graph, model, degrees, codeg, kernel, steps: 0 })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn model(&self) -> &ModelParams {
        &self.model
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn has_codegree_cache(&self) -> bool {
        self.codeg.is_some()
    }

    #[inline]
    fn codegree(&self, u: usize, v: usize) -> usize {
        match &self.codeg {
            Some(c) => c[u * self.graph.n() + v] as usize,
            None => self.graph.codegree(u, v),
        }
    }

    fn template_delta(&self, idx: usize, e: EdgeId) -> u128 {
        let t = &self.model.templates()[idx];
        let (u, v) = e.endpoints();
        match t.kind() {
            TemplateKind::Edge => 2,
            TemplateKind::Triangle if self.codeg.is_some() && !cfg!(feature = "negative-control") => {
                6 * self.codegree(u, v) as u128
            }
            TemplateKind::Star(s) => {
                let present = self.graph.contains(e) as u128;
                let du = self.degrees[u] as u128 - present;
                let dv = self.degrees[v] as u128 - present;
                let s = s as u32;
                (du + 1).pow(s) - du.pow(s) + (dv + 1).pow(s) - dv.pow(s)
            }
            _ => delta_hom_count(t, &self.graph, e),
        }
    }

    /// Conditional probability that `e` is present given the rest of the graph.
    #[inline]
    pub fn prob(&self, e: EdgeId) -> f64 {
        match &self.kernel {
            Kernel::Constant(p) => *p,
            Kernel::Triangle(table) => {
                let (u, v) = e.endpoints();
                let c = self.codegree(u, v);
                #[cfg(feature = "negative-control")]
                let c = (c + 1).min(table.len() - 1);
                table[c]
            }
            Kernel::General => {
                let n = self.graph.n();
                let field: f64 = self
                    .model
                    .beta()
                    .iter()
                    .zip(self.model.templates())
                    .enumerate()
                    .map(|(i, (&b, t))| {
                        if b == 0.0 {
                            0.0
                        } else {
                            field_term(b, self.template_delta(i, e), n, t.k())
                        }
                    })
                    .sum();
                sigmoid(field)
            }
        }
    }

    /// Sets bit `e`, updating caches; returns whether the graph changed.
    pub fn set(&mut self, e: EdgeId, present: bool) -> bool {
        if !self.graph.set_edge(e, present) {
            return false;
        }
        let (u, v) = e.endpoints();
        if present {
            self.degrees[u] += 1;
            self.degrees[v] += 1;
        } else {
            self.degrees[u] -= 1;
            self.degrees[v] -= 1;
        }
        if let Some(c) = self.codeg.as_mut() {
            let n = self.graph.n();
            for (a, b) in [(u, v), (v, u)] {
                // every neighbour w of a gains or loses b as a common neighbour
                for w in self.graph.neighbors(a) {
                    if w == b {
                        continue;
                    }
                    let (i, j) = (w * n + b, b * n + w);
                    if present {
                        c[i] += 1;
                        c[j] += 1;
                    } else {
                        c[i] -= 1;
                        c[j] -= 1;
                    }
                }
            }
        }
        true
    }

    /// Heat-bath update of `e` with a given uniform: the bit becomes `U < φ_e`.
    #[inline]
    pub fn update(&mut self, e: EdgeId, uniform: f64) -> bool {
        let bit = uniform < self.prob(e);
        self.set(e, bit);
        self.steps += 1;
        bit
    }

    /// One Glauber step: uniform pair, then heat-bath resampling.
    pub fn step_with<R: Rng + ?Sized>(&mut self, rng: &mut R) -> EdgeId {
        let pairs = self.graph.num_pairs();
        if pairs == 0 {
            self.steps += 1;
            return EdgeId { u: 0, v: 0 };
        }
        let e = EdgeId::from_index(rng.random_range(0..pairs));
        let u: f64 = rng.random();
        self.update(e, u);
        #[cfg(debug_assertions)]
        if self.steps.is_multiple_of(4096) {
            self.spot_check(e);
        }
        e
    }

    #[cfg(debug_assertions)]
    fn spot_check(&self, e: EdgeId) {
        let (u, v) = e.endpoints();
        debug_assert_eq!(self.degrees[u] as usize, self.graph.degree(u));
        debug_assert_eq!(self.degrees[v] as usize, self.graph.degree(v));
        if self.codeg.is_some() {
            debug_assert_eq!(self.codegree(u, v), self.graph.codegree(u, v));
        }
    }

    /// Full recomputation check of every cache.
    pub fn caches_consistent(&self) -> bool {
        let n = self.graph.n();
        let degs_ok = (0..n).all(|u| self.degrees[u] as usize == self.graph.degree(u));
        let codeg_ok = self.codeg.is_none()
            || (0..n).all(|u| (0..n).filter(|&v| v != u).all(|v| self.codegree(u, v) == self.graph.codegree(u, v)));
        degs_ok && codeg_ok
    }

    /// One step of Glauber dynamics for `μ` conditioned on the cut-distance ball:
    /// a flip leaving the ball is rejected, and from outside the ball a flip
    /// into it is taken with probability one.
    pub fn restricted_step_with<R: Rng + ?Sized>(&mut self, ball: &Ball, rng: &mut R) -> Result<EdgeId> {
        let n = self.graph.n();
        if n > N_EXACT_CUT {
            return Err(ErgmError::TooLarge { what: "restricted Glauber step", n, max: N_EXACT_CUT });
        }
        let pairs = self.graph.num_pairs();
        if pairs == 0 {
            self.steps += 1;
            return Ok(EdgeId { u: 0, v: 0 });
        }
        let e = EdgeId::from_index(rng.random_range(0..pairs));
        let uniform: f64 = rng.random();
        let inside = ball.contains(&self.graph)?;
        let current = self.graph.contains(e);
        let flipped_inside = ball.contains(&self.graph.with_edge_toggled(e))?;
        let next = match (inside, flipped_inside) {
            (true, true) => uniform < self.prob(e),
            (true, false) => current,
            (false, true) => !current,
            (false, false) => current,
        };
        self.set(e, next);
        self.steps += 1;
        Ok(e)
    }
}

/// `B(p*, η) = {X : δ_□(X, p*) ≤ η}`, decided exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub p_star: f64,
    pub eta: f64,
}

impl Ball {
    pub fn contains(&self, x: &Graph) -> Result<bool> {
        Ok(cut_distance_const(x, self.p_star, CutMode::Exact)?.upper() <= self.eta)
    }
}

/// A chain with its own reproducible stream.
pub struct ChainState {
    core: ChainCore,
    rng: StreamRng,
    seed: u64,
    stream_id: u64,
}

impl ChainState {
    pub fn new(model: ModelParams, graph: Graph, seed: u64, stream_id: u64, policy: CachePolicy) -> Result<Self> {
        Ok(ChainState { core: ChainCore::new(model, graph, policy)?, rng: stream(seed, stream_id), seed, stream_id })
    }

    pub fn core(&self) -> &ChainCore {
        &self.core
    }

    pub fn graph(&self) -> &Graph {
        self.core.graph()
    }

    pub fn into_graph(self) -> Graph {
        self.core.into_graph()
    }

    pub fn steps(&self) -> u64 {
        self.core.steps()
    }

    pub fn seed(&self) -> (u64, u64) {
        (self.seed, self.stream_id)
    }

    pub fn rng_mut(&mut self) -> &mut StreamRng {
        &mut self.rng
    }

    pub fn step(&mut self) -> EdgeId {
        self.core.step_with(&mut self.rng)
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.core.step_with(&mut self.rng);
        }
    }

    pub fn restricted_step(&mut self, ball: &Ball) -> Result<EdgeId> {
        self.core.restricted_step_with(ball, &mut self.rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::conditional_prob;
    use crate::template::TemplateGraph;

    fn models(n: usize) -> Vec<ModelParams> {
        vec![
            ModelParams::edge_only(n, -0.4).unwrap(),
            ModelParams::edge_triangle(n, -1.8, 2.0).unwrap(),
            ModelParams::with_templates(
                n,
                vec![-0.5, 0.8, 0.3, 0.2],
                vec![TemplateGraph::triangle(), TemplateGraph::two_star(), TemplateGraph::cycle(4).unwrap()],
            )
            .unwrap(),
        ]
    }

    #[test]
    fn cached_prob_matches_slow_path() {
        for model in models(12) {
            for policy in [CachePolicy::Auto, CachePolicy::Never, CachePolicy::Always] {
                let g = Graph::sample_gnp(12, 0.5, &mut stream(1, 0)).unwrap();
                let mut s = ChainState::new(model.clone(), g, 3, 0, policy).unwrap();
                for _ in 0..2000 {
                    let e = s.step();
                    let slow = conditional_prob(&model, s.graph(), e);
                    assert!((s.core().prob(e) - slow).abs() <= 1e-15);
                }
                assert!(s.core().caches_consistent());
                assert_eq!(s.steps(), 2000);
            }
        }
    }

    #[test]
    fn same_seed_same_trajectory() {
        let m = ModelParams::edge_triangle(20, -0.5, 1.0).unwrap();
        let g = Graph::new_empty(20).unwrap();
        let mut a = ChainState::new(m.clone(), g.clone(), 5, 2, CachePolicy::Auto).unwrap();
        let mut b = ChainState::new(m, g, 5, 2, CachePolicy::Never).unwrap();
        a.run(20_000);
        b.run(20_000);
        assert_eq!(a.graph(), b.graph());
    }

    #[test]
    fn size_mismatch_rejected() {
        let m = ModelParams::edge_only(5, 0.0).unwrap();
        assert!(ChainState::new(m, Graph::new_empty(6).unwrap(), 0, 0, CachePolicy::Auto).is_err());
    }

    #[test]
    fn restricted_equals_plain_when_ball_is_everything() {
        let m = ModelParams::edge_triangle(5, -0.3, 0.5).unwrap();
        let g = Graph::new_empty(5).unwrap();
        let mut a = ChainState::new(m.clone(), g.clone(), 9, 0, CachePolicy::Auto).unwrap();
        let mut b = ChainState::new(m, g, 9, 0, CachePolicy::Auto).unwrap();
        let ball = Ball { p_star: 0.4, eta: 1.0 };
        for _ in 0..500 {
            a.step();
            b.restricted_step(&ball).unwrap();
            assert_eq!(a.graph(), b.graph());
        }
    }
}
