//! Sampling and analysis toolkit for exponential random graph models.

pub mod counts;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod graph;
pub mod landscape;
pub mod model;
pub mod rng;
pub mod template;

pub use error::{ErgmError, Result, SnapshotError};
pub use graph::{EdgeId, Graph};
pub use model::ModelParams;
pub use template::{TemplateFamily, TemplateGraph};
