//! Error-exponent regions for a sensor that talks to two cooperating detectors.
//!
//! The crate computes the optimal and achievable `(θ1, θ2)` type-II error
//! exponent regions of the two-detector distributed hypothesis-testing system
//! (zero-rate, positive-rate and high-rate regimes) and validates them with
//! exact finite-blocklength evaluation and Monte-Carlo simulation of the
//! underlying coding schemes.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`, which is what the command-line front end uses.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod divmin;
pub mod error;
pub mod models;
pub mod positive_rate;
pub mod prob;
pub mod region;
pub mod scalar;
pub mod simulator;
pub mod zero_rate;

pub use error::{Error, Result};
pub use prob::{
    attach_channel, entropy, kl_divergence, mutual_information, Axis, CondChannel, HypothesisPair, JointPmf,
};
pub use region::{AlphabetSize, DetectionMode, ExponentPair, ExponentRegion};
pub use scalar::Real;

pub type Pmf = prob::JointPmf<f64>;
pub type Channel = prob::CondChannel<f64>;
pub type Pair = prob::HypothesisPair<f64>;

pub type Constraint = divmin::MarginalConstraint<f64>;
pub type Projection = divmin::ProjectionResult<f64>;
pub type Region = region::ExponentRegion<f64>;
pub type Aux = positive_rate::AuxChannels<f64>;
pub type Rates = positive_rate::RatePair<f64>;
