//! Simulation of a photon-based bit-commitment protocol and its attacks.
//!
//! - [`optics`]: single- and double-slit screen distributions and sampling.
//! - [`protocol`]: Bob's secret settings, the commit phase and the verifier.
//! - [`adversary`]: honest and cheating strategies for Alice, with Monte Carlo estimates.
//! - [`nogo`]: the local-unitary attack on equally concealing purifications.
//! - [`record`]: line-delimited JSON records of a run.

pub mod adversary;
pub mod error;
pub mod nogo;
pub mod optics;
pub mod protocol;
pub mod record;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
