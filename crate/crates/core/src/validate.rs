//! Monte Carlo cross-checks of the analytic dynamics over a sweep grid.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::evodyn::{fixation_matrix, stationary_from_fixation, FixationSolver};
use crate::mcsim::{simulate_fixation_at, simulate_stationary, SimConfig};
use crate::params::{PointConfig, Strategy};
use crate::payoff::averaged_payoff_matrix;
use crate::sweep::SweepSpec;

/// Agreement band, in standard errors.
pub const DEFAULT_SIGMAS: f64 = 3.0;

/// Mutation rate used by the stationary check, as a fraction of `1/Z`.
const MUTATION_SCALE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub sim: SimConfig,
    /// Mutation events for the stationary check; `None` skips it.
    pub stationary_events: Option<usize>,
    pub sigmas: f64,
}

impl ValidateOptions {
    pub fn new(sim: SimConfig) -> Self {
        ValidateOptions {
            sim,
            stationary_events: None,
            sigmas: DEFAULT_SIGMAS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub point: usize,
    pub mutant: Strategy,
    pub resident: Strategy,
    pub reference: f64,
    pub estimate: f64,
    /// Larger of the estimate's and the reference's binomial standard error.
    pub std_error: f64,
    pub non_absorbed: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryCheck {
    pub point: usize,
    pub strategy: Strategy,
    pub reference: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub index: usize,
    pub params: PointConfig,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub reference: String,
    pub runs: usize,
    pub seed: u64,
    pub sigmas: f64,
    pub points: Vec<PointReport>,
    pub fixation: Vec<PairCheck>,
    pub stationary: Vec<StationaryCheck>,
    pub passed: usize,
    pub failed: usize,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

fn within(estimate: f64, reference: f64, se: f64, sigmas: f64) -> bool {
    (estimate - reference).abs() <= sigmas * se
}

fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Simulates every ordered strategy pair at every grid point and compares
/// against `reference`. Each point draws from its own derived seed, so the
/// report depends only on the grid, the options and the reference.
pub fn run_validate(
    options: &ValidateOptions,
    grid: &SweepSpec,
    reference: &dyn FixationSolver,
) -> Result<ValidationReport> {
    grid.check()?;
    let mut fixation = Vec::new();
    let mut stationary = Vec::new();
    let mut points = Vec::new();

    for (index, point) in grid.points().iter().enumerate() {
        let (race, dynamics) = point.split()?;
        let pi = averaged_payoff_matrix(&race);
        let cfg = options.sim.derived(index as u64);
        let reference_fixation = fixation_matrix(reference, &pi, &dynamics)?;
        let mut point_pass = true;

        let m = pi.size();
        for resident in 0..m {
            for mutant in (0..m).filter(|&j| j != resident) {
                let sim_cfg = cfg.derived((mutant * m + resident) as u64);
                let est = simulate_fixation_at(&pi, mutant, resident, &dynamics, &sim_cfg)?;
                let rho = reference_fixation[resident][mutant];
                let se = est.std_error.max(binomial_se(rho, est.runs));
                let pass = within(est.estimate, rho, se, options.sigmas);
                point_pass &= pass;
                fixation.push(PairCheck {
                    point: index,
                    mutant: pi.strategies()[mutant],
                    resident: pi.strategies()[resident],
                    reference: rho,
                    estimate: est.estimate,
                    std_error: se,
                    non_absorbed: est.non_absorbed,
                    pass,
                });
            }
        }

        if let Some(events) = options.stationary_events {
            let expected = stationary_from_fixation(&reference_fixation)?;
            let mu = MUTATION_SCALE / dynamics.population as f64;
            let sim_cfg = SimConfig {
                runs: events,
                ..cfg.derived(u64::MAX)
            };
            let est = simulate_stationary(&pi, &dynamics, mu, &sim_cfg)?;
            for (i, &strategy) in est.strategies.iter().enumerate() {
                let se = est.std_error[i].max(binomial_se(expected[i], est.events));
                let pass = within(est.distribution[i], expected[i], se, options.sigmas);
                point_pass &= pass;
                stationary.push(StationaryCheck {
                    point: index,
                    strategy,
                    reference: expected[i],
                    estimate: est.distribution[i],
                    std_error: se,
                    pass,
                });
            }
        }

        points.push(PointReport {
            index,
            params: *point,
            pass: point_pass,
        });
    }

    let passed =
        fixation.iter().filter(|c| c.pass).count() + stationary.iter().filter(|c| c.pass).count();
    let failed = fixation.len() + stationary.len() - passed;
    Ok(ValidationReport {
        reference: reference.name().to_string(),
        runs: options.sim.runs,
        seed: options.sim.seed,
        sigmas: options.sigmas,
        points,
        fixation,
        stationary,
        passed,
        failed,
    })
}
