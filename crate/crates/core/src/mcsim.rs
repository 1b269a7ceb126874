//! Agent-based simulation of the imitation process.
//!
//! Every replicate draws from its own ChaCha8 stream (`seed`, stream = run
//! index), so results do not depend on how replicates are scheduled across
//! threads. Within a run, each step draws the focal player, then the model
//! player, and only draws the imitation coin when the two differ in
//! strategy. That consumption order is part of the reproducibility
//! contract.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evodyn::{check_pair, fermi_probability, FixationSolver, PairGame};
use crate::params::{DynamicsParams, Strategy};
use crate::payoff::PayoffMatrix;

/// Independent chains used by the stationary estimator.
pub const STATIONARY_CHAINS: usize = 16;

/// Fraction of each stationary chain discarded before counting.
pub const BURN_IN_FRACTION: f64 = 0.1;

const STATIONARY_STREAM_BASE: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub runs: usize,
    pub seed: u64,
    pub max_steps: u64,
}

impl SimConfig {
    pub fn new(runs: usize, seed: u64, max_steps: u64) -> Self {
        SimConfig {
            runs,
            seed,
            max_steps,
        }
    }

    pub fn validate(self, population: usize) -> Result<Self> {
        if self.runs == 0 {
            return Err(Error::InvalidArgument("runs must be at least 1".into()));
        }
        if self.max_steps < population as u64 {
            return Err(Error::InvalidArgument(format!(
                "max_steps {} is below the population size {population}",
                self.max_steps
            )));
        }
        Ok(self)
    }

    /// Same settings under a seed derived from this one and `tag`.
    pub fn derived(&self, tag: u64) -> Self {
        SimConfig {
            seed: mix(self.seed ^ mix(tag.wrapping_add(0x9e37_79b9_7f4a_7c15))),
            ..*self
        }
    }
}

// splitmix64 finaliser
fn mix(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Fixated,
    Extinct,
    /// The step budget ran out first.
    NotAbsorbed,
}

/// Birth–death process of `k` mutants among `z` players, with the Fermi
/// imitation probabilities tabulated per `k`.
#[derive(Debug, Clone)]
pub struct ImitationProcess {
    z: usize,
    /// Probability that a resident focal copies a mutant model, indexed by k.
    gain: Vec<f64>,
    /// Probability that a mutant focal copies a resident model.
    loss: Vec<f64>,
}

impl ImitationProcess {
    pub fn new(game: &PairGame, z: usize, beta: f64) -> Self {
        let mut gain = vec![0.0; z + 1];
        let mut loss = vec![0.0; z + 1];
        for k in 1..z {
            let (p_a, p_b) = game.payoffs_at(k, z);
            gain[k] = fermi_probability(p_b, p_a, beta);
            loss[k] = fermi_probability(p_a, p_b, beta);
        }
        ImitationProcess { z, gain, loss }
    }

    pub fn population(&self) -> usize {
        self.z
    }

    /// One imitation attempt: a focal and a distinct model player are
    /// drawn uniformly; the focal may copy the model. Returns the new count.
    pub fn step<R: Rng>(&self, k: usize, rng: &mut R) -> usize {
        let z = self.z;
        let focal = rng.gen_range(0..z);
        let mut model = rng.gen_range(0..z - 1);
        if model >= focal {
            model += 1;
        }
        // Players 0..k hold the mutant strategy.
        let focal_mutant = focal < k;
        let model_mutant = model < k;
        if focal_mutant == model_mutant {
            return k;
        }
        let coin: f64 = rng.gen();
        if focal_mutant {
            if coin < self.loss[k] {
                return k - 1;
            }
        } else if coin < self.gain[k] {
            return k + 1;
        }
        k
    }

    /// Runs from a single mutant until absorption or `max_steps`.
    pub fn run<R: Rng>(&self, max_steps: u64, rng: &mut R) -> Outcome {
        let mut k = 1;
        let mut steps = 0;
        loop {
            if k == 0 {
                return Outcome::Extinct;
            }
            if k == self.z {
                return Outcome::Fixated;
            }
            if steps == max_steps {
                return Outcome::NotAbsorbed;
            }
            k = self.step(k, rng);
            steps += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixationEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub runs: usize,
    /// Runs that hit the step budget; they count as failures.
    pub non_absorbed: usize,
    pub seed: u64,
    #[serde(skip)]
    pub successes: usize,
}

impl FixationEstimate {
    pub fn from_counts(successes: usize, runs: usize, non_absorbed: usize, seed: u64) -> Self {
        let estimate = successes as f64 / runs as f64;
        FixationEstimate {
            estimate,
            std_error: (estimate * (1.0 - estimate) / runs as f64).sqrt(),
            runs,
            non_absorbed,
            seed,
            successes,
        }
    }
}

/// Fixation frequency of a single mutant over `cfg.runs` replicates, by
/// matrix position.
pub fn simulate_fixation_at(
    pi: &PayoffMatrix,
    mutant: usize,
    resident: usize,
    dynamics: &DynamicsParams,
    cfg: &SimConfig,
) -> Result<FixationEstimate> {
    check_pair(pi, mutant, resident)?;
    let dynamics = dynamics.validate()?;
    let cfg = cfg.validate(dynamics.population)?;
    let process = ImitationProcess::new(
        &PairGame::from_matrix(pi, mutant, resident),
        dynamics.population,
        dynamics.selection,
    );
    let (successes, non_absorbed) = (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = stream(cfg.seed, run as u64);
            match process.run(cfg.max_steps, &mut rng) {
                Outcome::Fixated => (1usize, 0usize),
                Outcome::Extinct => (0, 0),
                Outcome::NotAbsorbed => (0, 1),
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(FixationEstimate::from_counts(
        successes,
        cfg.runs,
        non_absorbed,
        cfg.seed,
    ))
}

pub fn simulate_fixation(
    mutant: Strategy,
    resident: Strategy,
    pi: &PayoffMatrix,
    dynamics: &DynamicsParams,
    cfg: &SimConfig,
) -> Result<FixationEstimate> {
    simulate_fixation_at(
        pi,
        pi.position(mutant)?,
        pi.position(resident)?,
        dynamics,
        cfg,
    )
}

/// Fixation solver backed by simulation; each ordered pair draws from its
/// own derived seed.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarloFixation {
    pub config: SimConfig,
}

impl FixationSolver for MonteCarloFixation {
    fn name(&self) -> &str {
        "monte-carlo"
    }

    fn fixation(
        &self,
        pi: &PayoffMatrix,
        mutant: usize,
        resident: usize,
        dynamics: &DynamicsParams,
    ) -> Result<f64> {
        let tag = (mutant * pi.size() + resident) as u64;
        simulate_fixation_at(pi, mutant, resident, dynamics, &self.config.derived(tag))
            .map(|e| e.estimate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryEstimate {
    pub distribution: Vec<f64>,
    /// Standard error of each component across independent chains.
    pub std_error: Vec<f64>,
    pub strategies: Vec<Strategy>,
    /// Counted mutation events over all chains.
    pub events: usize,
    pub chains: usize,
    pub non_absorbed: usize,
    pub seed: u64,
}

/// Long-run occupancy of homogeneous states, estimated from the chain of
/// mutation events.
///
/// From homogeneous state `i` a mutant strategy is drawn uniformly among
/// the others and its fate is simulated to absorption; the population
/// moves on fixation. `cfg.runs` mutation events are split over
/// [`STATIONARY_CHAINS`] independent chains, each with a burn-in of
/// [`BURN_IN_FRACTION`]. `mu` only sets the time scale and must satisfy
/// `Z·mu ≤ 0.1`.
pub fn simulate_stationary(
    pi: &PayoffMatrix,
    dynamics: &DynamicsParams,
    mu: f64,
    cfg: &SimConfig,
) -> Result<StationaryEstimate> {
    let dynamics = dynamics.validate()?;
    let cfg = cfg.validate(dynamics.population)?;
    if !(mu > 0.0 && dynamics.population as f64 * mu <= 0.1) {
        return Err(Error::InvalidArgument(format!(
            "mutation rate {mu} violates the small-mutation condition Z·mu ≤ 0.1"
        )));
    }
    let m = pi.size();
    let processes: Vec<Vec<Option<ImitationProcess>>> = (0..m)
        .map(|resident| {
            (0..m)
                .map(|mutant| {
                    (mutant != resident).then(|| {
                        ImitationProcess::new(
                            &PairGame::from_matrix(pi, mutant, resident),
                            dynamics.population,
                            dynamics.selection,
                        )
                    })
                })
                .collect()
        })
        .collect();

    let chains = STATIONARY_CHAINS.min(cfg.runs);
    let per_chain = cfg.runs.div_ceil(chains);
    let burn_in = (per_chain as f64 * BURN_IN_FRACTION).ceil() as usize;

    let results: Vec<(Vec<usize>, usize)> = (0..chains)
        .into_par_iter()
        .map(|chain| {
            let mut rng = stream(cfg.seed, STATIONARY_STREAM_BASE + chain as u64);
            let mut state = chain % m;
            let mut counts = vec![0usize; m];
            let mut stuck = 0;
            for event in 0..burn_in + per_chain {
                if event >= burn_in {
                    counts[state] += 1;
                }
                let mut mutant = rng.gen_range(0..m - 1);
                if mutant >= state {
                    mutant += 1;
                }
                let process = processes[state][mutant].as_ref().expect("distinct pair");
                match process.run(cfg.max_steps, &mut rng) {
                    Outcome::Fixated => state = mutant,
                    Outcome::Extinct => {}
                    Outcome::NotAbsorbed => stuck += 1,
                }
            }
            (counts, stuck)
        })
        .collect();

    let n = chains as f64;
    let freqs: Vec<Vec<f64>> = results
        .iter()
        .map(|(c, _)| c.iter().map(|&x| x as f64 / per_chain as f64).collect())
        .collect();
    let distribution: Vec<f64> = (0..m)
        .map(|i| freqs.iter().map(|f| f[i]).sum::<f64>() / n)
        .collect();
    let std_error = (0..m)
        .map(|i| {
            if chains < 2 {
                return 0.0;
            }
            let var = freqs
                .iter()
                .map(|f| (f[i] - distribution[i]).powi(2))
                .sum::<f64>()
                / (n - 1.0);
            (var / n).sqrt()
        })
        .collect();
    Ok(StationaryEstimate {
        distribution,
        std_error,
        strategies: pi.strategies().to_vec(),
        events: per_chain * chains,
        chains,
        non_absorbed: results.iter().map(|(_, s)| s).sum(),
        seed: cfg.seed,
    })
}
