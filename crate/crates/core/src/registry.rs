//! Named fixation solvers, selectable at runtime.

use crate::error::{Error, Result};
use crate::evodyn::{AnalyticFixation, FixationSolver};
use crate::mcsim::{MonteCarloFixation, SimConfig};

/// Settings a solver may need when it is constructed.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub sim: SimConfig,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            sim: SimConfig::new(10_000, 0, 10_000_000),
        }
    }
}

pub type SolverFactory = fn(&SolverOptions) -> Box<dyn FixationSolver>;

pub struct SolverRegistry {
    entries: Vec<(&'static str, SolverFactory)>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        SolverRegistry {
            entries: Vec::new(),
        }
    }

    /// The analytic and Monte Carlo solvers.
    pub fn builtin() -> Self {
        let mut r = SolverRegistry::empty();
        r.register("analytic", |_| Box::new(AnalyticFixation));
        r.register("monte-carlo", |o| {
            Box::new(MonteCarloFixation { config: o.sim })
        });
        r
    }

    /// Adds a solver; a later registration under the same name replaces
    /// the earlier one.
    pub fn register(&mut self, name: &'static str, factory: SolverFactory) {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, factory));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn create(&self, name: &str, options: &SolverOptions) -> Result<Box<dyn FixationSolver>> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, f)| f(options))
            .ok_or_else(|| Error::UnknownName {
                kind: "solver",
                name: name.to_string(),
                known: self.names().join(", "),
            })
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        SolverRegistry::builtin()
    }
}
