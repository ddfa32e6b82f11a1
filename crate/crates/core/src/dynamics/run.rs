use super::chain::ChainState;
use crate::error::{ErgmError, Result};
use crate::graph::Graph;

/// A diagnostic evaluated on read-only views of the chain's graph.
pub trait Observer {
    fn name(&self) -> &str;
    /// Column names, one per value returned by [`Observer::observe`].
    fn columns(&self) -> Vec<String>;
    fn observe(&mut self, step: u64, graph: &Graph) -> std::result::Result<Vec<f64>, String>;
}

/// Observer from a closure producing one value per named column.
pub struct FnObserver<F> {
    name: String,
    columns: Vec<String>,
    f: F,
}

impl<F> FnObserver<F>
where
    F: FnMut(u64, &Graph) -> std::result::Result<Vec<f64>, String>,
{
    pub fn new(name: impl Into<String>, columns: &[&str], f: F) -> Self {
        FnObserver { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), f }
    }
}

impl<F> Observer for FnObserver<F>
where
    F: FnMut(u64, &Graph) -> std::result::Result<Vec<f64>, String>,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn columns(&self) -> Vec<String> {
        self.columns.clone()
    }

    fn observe(&mut self, step: u64, graph: &Graph) -> std::result::Result<Vec<f64>, String> {
        (self.f)(step, graph)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryReport {
    pub steps: Vec<u64>,
    pub columns: Vec<String>,
    /// One row per recorded step, aligned with `columns`.
    pub rows: Vec<Vec<f64>>,
}

impl TrajectoryReport {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (s, row) in self.steps.iter().zip(&self.rows) {
            out.push_str(&s.to_string());
            for v in row {
                out.push(',');
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        out
    }
}

fn record(observers: &mut [&mut dyn Observer], step: u64, g: &Graph, report: &mut TrajectoryReport) -> Result<()> {
    let mut row = Vec::new();
    for obs in observers.iter_mut() {
        let vals = obs.observe(step, g).map_err(|message| ErgmError::Observer {
            name: obs.name().to_string(),
            step,
            message,
        })?;
        let want = obs.columns().len();
        if vals.len() != want {
            return Err(ErgmError::Observer {
                name: obs.name().to_string(),
                step,
                message: format!("returned {} values for {want} columns", vals.len()),
            });
        }
        row.extend(vals);
    }
    report.steps.push(step);
    report.rows.push(row);
    Ok(())
}

/// Runs `t` Glauber steps, observing at step 0 and every `stride` steps after,
/// giving `⌊t/stride⌋ + 1` records.
pub fn run_chain(
    state: &mut ChainState,
    t: u64,
    stride: u64,
    observers: &mut [&mut dyn Observer],
) -> Result<TrajectoryReport> {
    if stride == 0 {
        return Err(ErgmError::Config("observer stride must be positive".into()));
    }
    let mut report = TrajectoryReport {
        columns: observers.iter().flat_map(|o| o.columns()).collect(),
        ..Default::default()
    };
    record(observers, 0, state.graph(), &mut report)?;
    let mut done = 0u64;
    while done + stride <= t {
        state.run(stride);
        done += stride;
        record(observers, done, state.graph(), &mut report)?;
    }
    state.run(t - done);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::CachePolicy;
    use crate::model::ModelParams;

    fn chain() -> ChainState {
        let m = ModelParams::edge_only(10, 0.0).unwrap();
        ChainState::new(m, Graph::new_empty(10).unwrap(), 1, 0, CachePolicy::Auto).unwrap()
    }

    #[test]
    fn sample_counts() {
        let mut obs = FnObserver::new("edges", &["m"], |_, g: &Graph| Ok(vec![g.edge_count() as f64]));
        let mut s = chain();
        let r = run_chain(&mut s, 0, 7, &mut [&mut obs]).unwrap();
        assert_eq!(r.steps, vec![0]);
        let mut s = chain();
        let r = run_chain(&mut s, 100, 7, &mut [&mut obs]).unwrap();
        assert_eq!(r.steps.len(), 100 / 7 + 1);
        assert_eq!(s.steps(), 100);
        assert!(r.to_csv().starts_with("step,m\n0,0\n"));
    }

    #[test]
    fn observer_failure_carries_context() {
        let mut obs = FnObserver::new("boom", &["x"], |step, _: &Graph| {
            if step >= 20 {
                Err("exploded".to_string())
            } else {
                Ok(vec![0.0])
            }
        });
        let mut s = chain();
        let err = run_chain(&mut s, 100, 10, &mut [&mut obs]).unwrap_err();
        assert!(matches!(err, ErgmError::Observer { ref name, step: 20, .. } if name == "boom"));
    }
}
