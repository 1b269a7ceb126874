//! Per-round and race-averaged payoffs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{RaceParams, Strategy};

/// Move played in a single development round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Safe,
    Unsafe,
}

/// Expected payoff of the row player in one round.
pub fn round_payoff(row: Action, col: Action, params: &RaceParams) -> f64 {
    let RaceParams {
        cost: c,
        benefit: b,
        speed: s,
        detection: p_fo,
        ..
    } = *params;
    match (row, col) {
        (Action::Safe, Action::Safe) => -c + b / 2.0,
        // The safe player takes the whole benefit when the co-player is caught.
        (Action::Safe, Action::Unsafe) => -c + (1.0 - p_fo) * b / (s + 1.0) + p_fo * b,
        (Action::Unsafe, Action::Safe) => (1.0 - p_fo) * s * b / (s + 1.0),
        (Action::Unsafe, Action::Unsafe) => (1.0 - p_fo * p_fo) * b / 2.0,
    }
}

/// The 2×2 per-round game over SAFE/UNSAFE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundPayoffs {
    pub safe_safe: f64,
    pub safe_unsafe: f64,
    pub unsafe_safe: f64,
    pub unsafe_unsafe: f64,
}

impl RoundPayoffs {
    pub fn new(params: &RaceParams) -> Self {
        use Action::*;
        RoundPayoffs {
            safe_safe: round_payoff(Safe, Safe, params),
            safe_unsafe: round_payoff(Safe, Unsafe, params),
            unsafe_safe: round_payoff(Unsafe, Safe, params),
            unsafe_unsafe: round_payoff(Unsafe, Unsafe, params),
        }
    }

    pub fn get(&self, row: Action, col: Action) -> f64 {
        match (row, col) {
            (Action::Safe, Action::Safe) => self.safe_safe,
            (Action::Safe, Action::Unsafe) => self.safe_unsafe,
            (Action::Unsafe, Action::Safe) => self.unsafe_safe,
            (Action::Unsafe, Action::Unsafe) => self.unsafe_unsafe,
        }
    }
}

/// Square matrix of expected payoffs, rows and columns labelled by strategy.
///
/// Entry `(i, j)` is the payoff of a row-`i` player against a column-`j`
/// co-player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    strategies: Vec<Strategy>,
    matrix: Vec<Vec<f64>>,
}

impl PayoffMatrix {
    pub fn new(strategies: Vec<Strategy>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let m = strategies.len();
        if m < 2 {
            return Err(Error::InvalidArgument(
                "a payoff matrix needs at least two strategies".into(),
            ));
        }
        if matrix.len() != m || matrix.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidArgument(format!(
                "payoff matrix must be {m}x{m}"
            )));
        }
        let mut sorted = strategies.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != m {
            return Err(Error::InvalidArgument("duplicate strategy label".into()));
        }
        Ok(PayoffMatrix { strategies, matrix })
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    pub fn size(&self) -> usize {
        self.strategies.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    /// Entry by position.
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.matrix[row][col]
    }

    pub fn position(&self, strategy: Strategy) -> Result<usize> {
        self.strategies
            .iter()
            .position(|&s| s == strategy)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("strategy {strategy} is not in the matrix"))
            })
    }

    /// Entry by strategy label.
    ///
    /// Panics if either strategy is absent.
    pub fn get(&self, row: Strategy, col: Strategy) -> f64 {
        let i = self.position(row).expect("row strategy present");
        let j = self.position(col).expect("column strategy present");
        self.matrix[i][j]
    }

    /// Restriction to a subset of strategies, in the given order.
    pub fn restrict(&self, strategies: &[Strategy]) -> Result<PayoffMatrix> {
        let idx = strategies
            .iter()
            .map(|&s| self.position(s))
            .collect::<Result<Vec<_>>>()?;
        let matrix = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.matrix[i][j]).collect())
            .collect();
        PayoffMatrix::new(strategies.to_vec(), matrix)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Race-averaged payoffs between AS, AU and CS.
///
/// Both players meet for the whole race. Safe pairs split the prize after
/// `W` rounds. An unsafe player finishes after `W/s` rounds and keeps its
/// winnings only if no disaster strikes, which happens with probability
/// `p_r` for a player that is unsafe in every round.
pub fn averaged_payoff_matrix(params: &RaceParams) -> PayoffMatrix {
    let pi = RoundPayoffs::new(params);
    let s = params.speed;
    let w = params.rounds;
    let prize = params.prize;
    let survive = 1.0 - params.disaster_risk;

    let safe_pair = prize / (2.0 * w) + pi.safe_safe;
    // Against CS the unsafe player wins the first round and then meets UNSAFE.
    let unsafe_stretch = w / s - 1.0;
    let au_vs_as = survive * (s * prize / w + pi.unsafe_safe);
    let au_vs_au = survive * (s * prize / (2.0 * w) + pi.unsafe_unsafe);
    let au_vs_cs =
        survive * (s * prize / w + (s / w) * (pi.unsafe_safe + unsafe_stretch * pi.unsafe_unsafe));
    let cs_vs_au = (s / w) * (pi.safe_unsafe + unsafe_stretch * pi.unsafe_unsafe);

    let matrix = vec![
        vec![safe_pair, pi.safe_unsafe, safe_pair],
        vec![au_vs_as, au_vs_au, au_vs_cs],
        vec![safe_pair, cs_vs_au, safe_pair],
    ];
    PayoffMatrix {
        strategies: Strategy::ALL.to_vec(),
        matrix,
    }
}

/// `Π(AS,AS) − Π(AU,AU)`; positive when everyone acting safely beats
/// everyone acting unsafely.
pub fn collective_preference_gap(params: &RaceParams) -> f64 {
    let m = averaged_payoff_matrix(params);
    m.get(Strategy::AS, Strategy::AS) - m.get(Strategy::AU, Strategy::AU)
}
