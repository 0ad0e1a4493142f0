//! Learning parity functions from noisy quantum and classical example oracles.
//!
//! The crate covers bit-packed GF(2) algebra ([`gf2`]), closed-form noise
//! quantities and the retained-count planner ([`bounds`]), structured oracle
//! samplers and exact outcome laws ([`oracle`]), a dense state-vector
//! simulator used to check them ([`statevector`]), the learners
//! ([`learners`]) and a seeded experiment harness ([`harness`]).
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar for common use.

pub mod bounds;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod learners;
pub mod oracle;
pub mod rng;
pub mod scalar;
pub mod statevector;

pub use error::{Error, Result};
pub use gf2::{BitString, Gf2System, Solution};
pub use oracle::{
    ClassicalExample, ClassicalOracle, ClassicalSource, NoiseKind, NoiseModel, NoiseRate,
    ParityConcept, QuantumOracle, QuantumOutcome, QuantumSource,
};
pub use rng::RandomStream;
pub use scalar::Real;

pub type Outcomes = oracle::OutcomeDistribution<f64>;
pub type Outcomes32 = oracle::OutcomeDistribution<f32>;
pub type Strings = oracle::StringDistribution<f64>;
pub type Strings32 = oracle::StringDistribution<f32>;
pub type State = statevector::PureState<f64>;
pub type State32 = statevector::PureState<f32>;
pub type Plan = bounds::PlannerResult<f64>;
pub type Plan32 = bounds::PlannerResult<f32>;
