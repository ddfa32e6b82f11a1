use rand::Rng;

use super::chain::{CachePolicy, ChainCore};
use crate::error::Result;
use crate::graph::{EdgeId, Graph};
use crate::model::ModelParams;
use crate::rng::{stream, StreamRng};

/// Two chains driven by the same edge choice and the same uniform.
pub struct CoupledPair {
    lower: ChainCore,
    upper: ChainCore,
    rng: StreamRng,
    hamming: usize,
    ordered: bool,
    violations: u64,
}

impl CoupledPair {
    pub fn new(
        model: &ModelParams,
        lower: Graph,
        upper: Graph,
        seed: u64,
        stream_id: u64,
        policy: CachePolicy,
    ) -> Result<Self> {
        let hamming = lower.hamming(&upper)?;
        let ordered = lower.dominated_by(&upper)?;
        Ok(CoupledPair {
            lower: ChainCore::new(model.clone(), lower, policy)?,
            upper: ChainCore::new(model.clone(), upper, policy)?,
            rng: stream(seed, stream_id),
            hamming,
            ordered,
            violations: 0,
        })
    }

    pub fn lower(&self) -> &Graph {
        self.lower.graph()
    }

    pub fn upper(&self) -> &Graph {
        self.upper.graph()
    }

    /// Number of pairs where the two graphs differ.
    pub fn hamming(&self) -> usize {
        self.hamming
    }

    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    /// Steps at which an ordered pair had `lower_e > upper_e` afterwards.
    pub fn violations(&self) -> u64 {
        self.violations
    }

    pub fn coalesced(&self) -> bool {
        self.hamming == 0
    }

    /// Shared edge `E` and shared `U`; each side sets its bit iff `U < φ_E`.
    pub fn step(&mut self) -> EdgeId {
        let pairs = self.lower.graph().num_pairs();
        if pairs == 0 {
            return EdgeId { u: 0, v: 0 };
        }
        let e = EdgeId::from_index(self.rng.random_range(0..pairs));
        let u: f64 = self.rng.random();
        let before = self.lower.graph().contains(e) != self.upper.graph().contains(e);
        let a = self.lower.update(e, u);
        let b = self.upper.update(e, u);
        let after = a != b;
        self.hamming = self.hamming + after as usize - before as usize;
        if self.ordered && a && !b {
            self.violations += 1;
        }
        e
    }
}

/// Steps until the monotone coupling started from (empty, complete) meets,
/// or `None` if `cap` steps pass first.
pub fn coalescence_time(
    model: &ModelParams,
    seed: u64,
    stream_id: u64,
    cap: u64,
    policy: CachePolicy,
) -> Result<Option<u64>> {
    let n = model.n();
    let mut pair = CoupledPair::new(model, Graph::new_empty(n)?, Graph::complete(n)?, seed, stream_id, policy)?;
    let mut t = 0u64;
    while !pair.coalesced() {
        if t >= cap {
            return Ok(None);
        }
        pair.step();
        t += 1;
    }
    Ok(Some(t))
}
