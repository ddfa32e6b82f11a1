use rand::Rng;

use super::chain::{CachePolicy, ChainCore, ChainState};
use crate::error::{ErgmError, Result};
use crate::graph::{EdgeId, Graph};
use crate::model::ModelParams;

#[derive(Debug, Clone)]
pub struct SandwichSample {
    pub under: Graph,
    pub x: Graph,
    pub over: Graph,
    /// Every conditional seen during the sweep stayed in `[p* - ε, p* + ε]`.
    pub ok: bool,
}

/// One sequential sweep over all pairs in linear order, resampling `x0` with a
/// shared uniform per pair against `φ_e`, `p* - ε` and `p* + ε`.
pub fn sandwich_sample<R: Rng + ?Sized>(
    model: &ModelParams,
    x0: &Graph,
    p_star: f64,
    eps: f64,
    rng: &mut R,
) -> Result<SandwichSample> {
    if !(0.0..=1.0).contains(&p_star) {
        return Err(ErgmError::InvalidProbability(p_star));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(ErgmError::Domain(format!("epsilon {eps} must be nonnegative")));
    }
    let n = x0.n();
    let (lo, hi) = (p_star - eps, p_star + eps);
    let mut core = ChainCore::new(model.clone(), x0.clone(), CachePolicy::Auto)?;
    let mut under = Graph::new_empty(n)?;
    let mut over = Graph::new_empty(n)?;
    let mut ok = true;
    for i in 0..x0.num_pairs() {
        let e = EdgeId::from_index(i);
        let u: f64 = rng.random();
        let phi = core.prob(e);
        if phi < lo || phi > hi {
            ok = false;
        }
        core.set(e, u < phi);
        under.set_edge(e, u < lo);
        over.set_edge(e, u < hi);
    }
    Ok(SandwichSample { under, x: core.into_graph(), over, ok })
}

/// Draws `G(n, p0)` from the chain's stream, then runs `steps` Glauber steps.
pub fn burn_in(model: &ModelParams, p0: f64, steps: u64, seed: u64, stream_id: u64) -> Result<ChainState> {
    let mut rng = crate::rng::stream(seed, stream_id);
    let g = Graph::sample_gnp(model.n(), p0, &mut rng)?;
    let mut s = ChainState::new(model.clone(), g, seed, stream_id, CachePolicy::Auto)?;
    *s.rng_mut() = rng;
    s.run(steps);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn wide_epsilon_is_trivial_sandwich() {
        let m = ModelParams::edge_triangle(15, -1.0, 1.0).unwrap();
        let mut rng = stream(2, 0);
        let x0 = Graph::sample_gnp(15, 0.3, &mut rng).unwrap();
        let s = sandwich_sample(&m, &x0, 0.3, 0.7, &mut rng).unwrap();
        assert!(s.ok);
        assert!(s.under.dominated_by(&s.x).unwrap() && s.x.dominated_by(&s.over).unwrap());
        assert_eq!(s.under.edge_count(), 0);
        assert_eq!(s.over.edge_count(), s.over.num_pairs());
    }

    #[test]
    fn ok_implies_order() {
        let m = ModelParams::edge_triangle(20, -0.6, 0.4).unwrap();
        for r in 0..30 {
            let mut rng = stream(3, r);
            let x0 = Graph::sample_gnp(20, 0.4, &mut rng).unwrap();
            let s = sandwich_sample(&m, &x0, 0.4, 0.15, &mut rng).unwrap();
            if s.ok {
                assert!(s.under.dominated_by(&s.x).unwrap() && s.x.dominated_by(&s.over).unwrap());
            }
        }
    }
}
