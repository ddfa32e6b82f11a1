//! Glauber dynamics for ERGMs.

mod chain;
mod coupling;
mod run;
mod sandwich;

pub use chain::{Ball, CachePolicy, ChainCore, ChainState, MAX_CODEGREE_CACHE};
pub use coupling::{coalescence_time, CoupledPair};
pub use run::{run_chain, FnObserver, Observer, TrajectoryReport};
pub use sandwich::{burn_in, sandwich_sample, SandwichSample};

use crate::graph::{EdgeId, Graph};
use crate::landscape::sigmoid;
use crate::model::ModelParams;

/// `φ_e(X_{~e}) = σ(Σ n² β_i Δ_e N_i(X))`, computed from deltas only.
pub fn conditional_prob(model: &ModelParams, x: &Graph, e: EdgeId) -> f64 {
    sigmoid(model.hamiltonian_delta(x, e))
}
