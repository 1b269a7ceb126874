//! Finite-population imitation dynamics in the small-mutation limit.
//!
//! Players imitate a randomly chosen model with the Fermi probability. With
//! rare mutations the population is almost always homogeneous, so the long
//! run reduces to a Markov chain over homogeneous states whose transition
//! rates are single-mutant fixation probabilities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::params::{DynamicsParams, Strategy};
use crate::payoff::PayoffMatrix;

/// Payoffs of the four pairings between a mutant `A` and a resident `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGame {
    pub aa: f64,
    pub ab: f64,
    pub ba: f64,
    pub bb: f64,
}

impl PairGame {
    pub fn new(aa: f64, ab: f64, ba: f64, bb: f64) -> Self {
        PairGame { aa, ab, ba, bb }
    }

    /// The pairing of row `mutant` against row `resident` in `pi`.
    pub fn from_matrix(pi: &PayoffMatrix, mutant: usize, resident: usize) -> Self {
        PairGame {
            aa: pi.at(mutant, mutant),
            ab: pi.at(mutant, resident),
            ba: pi.at(resident, mutant),
            bb: pi.at(resident, resident),
        }
    }

    /// Average payoffs `(P_A, P_B)` with `k` A-players among `z`, without
    /// range checks.
    #[inline]
    pub fn payoffs_at(&self, k: usize, z: usize) -> (f64, f64) {
        let (k, z) = (k as f64, z as f64);
        let p_a = ((k - 1.0) * self.aa + (z - k) * self.ab) / (z - 1.0);
        let p_b = (k * self.ba + (z - k - 1.0) * self.bb) / (z - 1.0);
        (p_a, p_b)
    }
}

/// Average payoffs of A and B players when `k` of the `z` players use A.
///
/// Each player meets every other member of the population once.
pub fn population_payoffs(
    k: usize,
    z: usize,
    pi_aa: f64,
    pi_ab: f64,
    pi_ba: f64,
    pi_bb: f64,
) -> Result<(f64, f64)> {
    if z < 2 || k == 0 || k >= z {
        return Err(Error::InvalidArgument(format!(
            "mutant count {k} outside [1, {}]",
            z.saturating_sub(1)
        )));
    }
    Ok(PairGame::new(pi_aa, pi_ab, pi_ba, pi_bb).payoffs_at(k, z))
}

/// Probability that a player with fitness `f_a` imitates one with `f_b`.
pub fn fermi_probability(f_a: f64, f_b: f64, beta: f64) -> f64 {
    let x = beta * (f_b - f_a);
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Fixation probability of one A-mutant among `z − 1` B-residents under the
/// pairwise Fermi rule.
///
/// The ratio of the down and up transition probabilities at `k` mutants is
/// `exp(−β ΔP(k))`, so the partial products are accumulated as exponent
/// sums and combined with a shifted sum of exponentials.
pub fn fixation_of(game: &PairGame, z: usize, beta: f64) -> f64 {
    debug_assert!(z >= 2);
    // exponents[i] = log of the i-th partial product; exponents[0] = 0.
    let mut exponents = Vec::with_capacity(z);
    exponents.push(0.0);
    let mut acc = 0.0;
    for k in 1..z {
        let (p_a, p_b) = game.payoffs_at(k, z);
        acc -= beta * (p_a - p_b);
        exponents.push(acc);
    }
    let max = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: f64 = exponents.iter().map(|&e| (e - max).exp()).sum();
    (-max).exp() / scaled
}

/// Interchangeable route to single-mutant fixation probabilities.
pub trait FixationSolver: Send + Sync {
    fn name(&self) -> &str;

    /// Probability that one `mutant` player (by matrix position) takes over
    /// a population of `resident` players.
    fn fixation(
        &self,
        pi: &PayoffMatrix,
        mutant: usize,
        resident: usize,
        dynamics: &DynamicsParams,
    ) -> Result<f64>;
}

/// Closed-form birth–death fixation probability, evaluated in log space.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyticFixation;

impl FixationSolver for AnalyticFixation {
    fn name(&self) -> &str {
        "analytic"
    }

    fn fixation(
        &self,
        pi: &PayoffMatrix,
        mutant: usize,
        resident: usize,
        dynamics: &DynamicsParams,
    ) -> Result<f64> {
        check_pair(pi, mutant, resident)?;
        let dynamics = dynamics.validate()?;
        let game = PairGame::from_matrix(pi, mutant, resident);
        Ok(fixation_of(&game, dynamics.population, dynamics.selection))
    }
}

pub(crate) fn check_pair(pi: &PayoffMatrix, mutant: usize, resident: usize) -> Result<()> {
    let m = pi.size();
    if mutant >= m || resident >= m {
        return Err(Error::InvalidArgument(format!(
            "strategy position out of range for a {m}-strategy matrix"
        )));
    }
    if mutant == resident {
        return Err(Error::InvalidArgument(
            "mutant and resident must differ".into(),
        ));
    }
    Ok(())
}

/// Fixation probability of a single `mutant` among `resident` players.
pub fn fixation_probability(
    mutant: Strategy,
    resident: Strategy,
    pi: &PayoffMatrix,
    dynamics: &DynamicsParams,
) -> Result<f64> {
    AnalyticFixation.fixation(pi, pi.position(mutant)?, pi.position(resident)?, dynamics)
}

/// All pairwise fixation probabilities: entry `(i, j)` is the probability
/// that a `j`-mutant takes over an `i`-population. The diagonal is zero.
pub fn fixation_matrix(
    solver: &dyn FixationSolver,
    pi: &PayoffMatrix,
    dynamics: &DynamicsParams,
) -> Result<Vec<Vec<f64>>> {
    let m = pi.size();
    let mut out = vec![vec![0.0; m]; m];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if i != j {
                *cell = solver.fixation(pi, j, i, dynamics)?;
            }
        }
    }
    Ok(out)
}

/// Row-stochastic chain over homogeneous states built from fixation
/// probabilities; a mutant is drawn uniformly among the other `m − 1`.
pub fn transition_from_fixation(fixation: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = fixation.len();
    let share = 1.0 / (m as f64 - 1.0);
    fixation
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut out: Vec<f64> = row
                .iter()
                .enumerate()
                .map(|(j, &rho)| if i == j { 0.0 } else { rho * share })
                .collect();
            let leave: f64 = out.iter().sum();
            out[i] = 1.0 - leave;
            out
        })
        .collect()
}

/// Transition matrix of the small-mutation chain using the analytic solver.
pub fn transition_matrix(pi: &PayoffMatrix, dynamics: &DynamicsParams) -> Result<Vec<Vec<f64>>> {
    Ok(transition_from_fixation(&fixation_matrix(
        &AnalyticFixation,
        pi,
        dynamics,
    )?))
}

/// Fixation probabilities and the stationary distribution over
/// homogeneous states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryResult {
    pub fixation: Vec<Vec<f64>>,
    pub distribution: Vec<f64>,
    pub strategies: Vec<Strategy>,
}

impl StationaryResult {
    pub fn transition(&self) -> Vec<Vec<f64>> {
        transition_from_fixation(&self.fixation)
    }

    /// `‖vM − v‖∞` against the transition matrix this result was built from.
    pub fn residual(&self) -> f64 {
        let t = self.transition();
        let m = self.distribution.len();
        (0..m)
            .map(|j| {
                let flow: f64 = (0..m).map(|i| self.distribution[i] * t[i][j]).sum();
                (flow - self.distribution[j]).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn frequency(&self, strategy: Strategy) -> Option<f64> {
        self.strategies
            .iter()
            .position(|&s| s == strategy)
            .map(|i| self.distribution[i])
    }

    /// Most frequent strategy; the first in canonical order wins ties.
    pub fn modal(&self) -> Strategy {
        let mut best = 0;
        for (i, &v) in self.distribution.iter().enumerate() {
            if v > self.distribution[best] {
                best = i;
            }
        }
        self.strategies[best]
    }
}

/// Stationary distribution of the chain given its fixation probabilities.
///
/// Solves `v Q = 0, Σv = 1` where `Q` is the generator `M − I`. The
/// generator is assembled from the off-diagonal rates directly: forming
/// `1 − Σ` first would round rates below 1e-16 away.
pub fn stationary_from_fixation(fixation: &[Vec<f64>]) -> Result<Vec<f64>> {
    let m = fixation.len();
    let share = 1.0 / (m as f64 - 1.0);
    let scale = fixation
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().filter(move |(j, _)| *j != i))
        .map(|(_, &r)| r * share)
        .fold(0.0, f64::max);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::SingularSystem {
            condition: f64::INFINITY,
        });
    }
    let rate = |i: usize, j: usize| fixation[i][j] * share / scale;

    // Row j of the system is the balance of state j: Σ_i v_i Q_ij = 0.
    let mut a = vec![vec![0.0; m]; m];
    for j in 0..m {
        for i in 0..m {
            a[j][i] = if i == j {
                -(0..m).filter(|&k| k != j).map(|k| rate(j, k)).sum::<f64>()
            } else {
                rate(i, j)
            };
        }
    }
    a[m - 1] = vec![1.0; m];
    let mut rhs = vec![0.0; m];
    rhs[m - 1] = 1.0;

    let v = linalg::solve(a.clone(), rhs).ok_or_else(|| Error::SingularSystem {
        condition: linalg::condition_estimate(&a),
    })?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::SingularSystem {
            condition: linalg::condition_estimate(&a),
        });
    }
    let clipped: Vec<f64> = v.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    Ok(clipped.into_iter().map(|x| x / total).collect())
}

pub fn stationary_distribution_with(
    solver: &dyn FixationSolver,
    pi: &PayoffMatrix,
    dynamics: &DynamicsParams,
) -> Result<StationaryResult> {
    let fixation = fixation_matrix(solver, pi, dynamics)?;
    let distribution = stationary_from_fixation(&fixation)?;
    Ok(StationaryResult {
        fixation,
        distribution,
        strategies: pi.strategies().to_vec(),
    })
}

/// Stationary distribution using the analytic fixation probabilities.
pub fn stationary_distribution(
    pi: &PayoffMatrix,
    dynamics: &DynamicsParams,
) -> Result<StationaryResult> {
    stationary_distribution_with(&AnalyticFixation, pi, dynamics)
}

/// `Π(A,A) + Π(A,B) − Π(B,A) − Π(B,B)`.
pub fn risk_dominance_margin(a: Strategy, b: Strategy, pi: &PayoffMatrix) -> f64 {
    pi.get(a, a) + pi.get(a, b) - pi.get(b, a) - pi.get(b, b)
}

/// Whether `a` risk-dominates `b`. Exact ties are not risk-dominant.
pub fn is_risk_dominant(a: Strategy, b: Strategy, pi: &PayoffMatrix) -> Result<bool> {
    if a == b {
        return Err(Error::InvalidArgument(
            "risk dominance compares two different strategies".into(),
        ));
    }
    pi.position(a)?;
    pi.position(b)?;
    Ok(risk_dominance_margin(a, b, pi) > 0.0)
}
