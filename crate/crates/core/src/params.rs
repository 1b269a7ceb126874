//! Parameter space of the race model and the strategy identities.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the three behavioural programs playing the race.
///
/// The declaration order is the canonical matrix order used everywhere:
/// `AS < AU < CS`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Strategy {
    /// Always plays SAFE.
    AS,
    /// Always plays UNSAFE.
    AU,
    /// Plays SAFE first, then copies the co-player's previous move.
    CS,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::AS, Strategy::AU, Strategy::CS];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Strategy::AS => "AS",
            Strategy::AU => "AU",
            Strategy::CS => "CS",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "AS" => Ok(Strategy::AS),
            "AU" => Ok(Strategy::AU),
            "CS" => Ok(Strategy::CS),
            other => Err(Error::UnknownName {
                kind: "strategy",
                name: other.to_string(),
                known: "AS, AU, CS".to_string(),
            }),
        }
    }
}

/// Game parameters of a single pairwise race.
///
/// Round counts are real-valued: an unsafe player needs `rounds / speed`
/// rounds, which need not be an integer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaceParams {
    /// Per-round cost of acting safely.
    #[serde(rename = "c")]
    pub cost: f64,
    /// Per-round benefit shared between the players.
    #[serde(rename = "b")]
    pub benefit: f64,
    /// Speed multiplier of unsafe development.
    #[serde(rename = "s")]
    pub speed: f64,
    /// Prize for reaching supremacy.
    #[serde(rename = "B")]
    pub prize: f64,
    /// Rounds a safe player needs to finish the race.
    #[serde(rename = "W")]
    pub rounds: f64,
    /// Disaster probability per race for a player that is always unsafe.
    #[serde(rename = "p_r")]
    pub disaster_risk: f64,
    /// Per-round probability that an unsafe act is found out.
    #[serde(rename = "p_fo")]
    pub detection: f64,
}

impl Default for RaceParams {
    fn default() -> Self {
        RaceParams {
            cost: 1.0,
            benefit: 4.0,
            speed: 1.5,
            prize: 1e4,
            rounds: 100.0,
            disaster_risk: 0.6,
            detection: 0.1,
        }
    }
}

fn is_probability(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl RaceParams {
    /// Checks every model invariant and returns the parameters unchanged.
    ///
    /// The error names the first violated invariant in field order.
    pub fn validate(self) -> Result<Self> {
        let fail = |msg: &str| Err(Error::InvalidParams(msg.to_string()));
        if !(self.cost >= 0.0 && self.cost.is_finite()) {
            return fail("c must be nonnegative");
        }
        if !(self.benefit > 0.0 && self.benefit.is_finite()) {
            return fail("b must be positive");
        }
        if !(self.speed > 1.0 && self.speed.is_finite()) {
            return fail("s must exceed 1");
        }
        if !(self.prize > 0.0 && self.prize.is_finite()) {
            return fail("B must be positive");
        }
        if !(self.rounds > 0.0 && self.rounds.is_finite()) {
            return fail("W must be positive");
        }
        if !(self.rounds / self.speed >= 1.0) {
            return fail("W must be at least s");
        }
        if !is_probability(self.disaster_risk) {
            return fail("p_r must lie in [0,1]");
        }
        if !is_probability(self.detection) {
            return fail("p_fo must lie in [0,1]");
        }
        Ok(self)
    }

    /// Prize earned per safe round, `B / W`.
    pub fn prize_per_round(&self) -> f64 {
        self.prize / self.rounds
    }

    /// Rounds an unsafe player needs, `W / s`.
    pub fn unsafe_rounds(&self) -> f64 {
        self.rounds / self.speed
    }
}

/// Population and selection settings of the imitation dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsParams {
    #[serde(rename = "Z")]
    pub population: usize,
    #[serde(rename = "beta")]
    pub selection: f64,
}

impl Default for DynamicsParams {
    fn default() -> Self {
        DynamicsParams {
            population: 100,
            selection: 0.1,
        }
    }
}

impl DynamicsParams {
    pub fn new(population: usize, selection: f64) -> Self {
        DynamicsParams {
            population,
            selection,
        }
    }

    pub fn validate(self) -> Result<Self> {
        if self.population < 2 {
            return Err(Error::InvalidParams("Z must be at least 2".into()));
        }
        if !(self.selection >= 0.0 && self.selection.is_finite()) {
            return Err(Error::InvalidParams("beta must be nonnegative".into()));
        }
        Ok(self)
    }
}

/// Flat parameter file: every race and dynamics field in one JSON object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub c: f64,
    pub b: f64,
    pub s: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub p_r: f64,
    pub p_fo: f64,
    #[serde(rename = "Z")]
    pub z: usize,
    pub beta: f64,
}

impl Default for PointConfig {
    fn default() -> Self {
        PointConfig::from_parts(&RaceParams::default(), &DynamicsParams::default())
    }
}

impl PointConfig {
    pub fn from_parts(race: &RaceParams, dynamics: &DynamicsParams) -> Self {
        PointConfig {
            c: race.cost,
            b: race.benefit,
            s: race.speed,
            big_b: race.prize,
            w: race.rounds,
            p_r: race.disaster_risk,
            p_fo: race.detection,
            z: dynamics.population,
            beta: dynamics.selection,
        }
    }

    pub fn race(&self) -> RaceParams {
        RaceParams {
            cost: self.c,
            benefit: self.b,
            speed: self.s,
            prize: self.big_b,
            rounds: self.w,
            disaster_risk: self.p_r,
            detection: self.p_fo,
        }
    }

    pub fn dynamics(&self) -> DynamicsParams {
        DynamicsParams::new(self.z, self.beta)
    }

    /// Validates both halves and splits them.
    pub fn split(&self) -> Result<(RaceParams, DynamicsParams)> {
        Ok((self.race().validate()?, self.dynamics().validate()?))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
