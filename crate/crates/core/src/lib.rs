//! Event-driven spike-timing-dependent plasticity.
//!
//! The crate covers four layers:
//!
//! * [`spike`]: spike trains and deterministic generators for the pairing,
//!   triplet, quadruplet, six-pattern triplet and Poisson protocols.
//! * [`rules`]: closed-form evaluation of pair, triplet and suppressive STDP
//!   under nearest-spike interaction, plus the rate-based drift equations.
//! * [`experiments`]: protocol sweeps (learning window, frequency dependence,
//!   triplet grids, quadruplets, BCM curves) with trial statistics.
//! * [`fitting`] and [`robustness`]: NMSE fitting with a Nelder-Mead simplex
//!   and Monte Carlo perturbation analysis with worst-case re-tuning.
//!
//! All times are in seconds on the biological time scale.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod fitting;
pub mod robustness;
pub mod rules;
pub mod seed;
pub mod spike;

pub use error::{Error, Result};
pub use rules::{PairParams, ParamId, Rule, SuppressionParams, TripletParams};
pub use spike::{Protocol, ProtocolTrains, SpikeTrain};
