//! Evolutionary game model of an AI development race.
//!
//! Three behavioural programs (always safe, always unsafe, conditionally
//! safe) compete in a finite, well-mixed population. Payoffs come from the
//! race-averaged matrix in [`payoff`]; imitation follows the pairwise Fermi
//! rule and is analysed in the small-mutation limit in [`evodyn`]. The
//! [`analysis`] layer turns those into regimes, zones and threshold curves,
//! and [`mcsim`] re-derives the stochastic quantities by agent-based
//! simulation as an independent check.

pub mod analysis;
pub mod error;
pub mod evodyn;
pub mod figures;
pub mod mcsim;
pub mod params;
pub mod payoff;
pub mod registry;
pub mod sweep;
pub mod validate;

mod linalg;

pub use error::{Error, Result};
pub use params::{DynamicsParams, PointConfig, RaceParams, Strategy};
pub use payoff::PayoffMatrix;
