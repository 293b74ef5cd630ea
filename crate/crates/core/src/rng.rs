//! Deterministic random substreams.
//!
//! Every random stream is a ChaCha8 generator keyed by
//! `(master_seed, role, a, b)`. Trials and roles never share a stream, so
//! results do not depend on how trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Which party or purpose a stream belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Role {
    /// Bob's secret slit configurations.
    Bob = 1,
    /// Photon arrival sampling (detector efficiency).
    Arrival = 2,
    /// Alice's measurements and forgeries.
    Alice = 3,
    /// Stand-alone utilities (demo states, sample tests).
    Aux = 4,
}

/// Build the stream for `(master_seed, role, a, b)`.
pub fn substream(master_seed: u64, role: Role, a: u64, b: u64) -> SimRng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&(role as u64).to_le_bytes());
    key[16..24].copy_from_slice(&a.to_le_bytes());
    key[24..32].copy_from_slice(&b.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Streams used by one protocol run.
pub struct RunStreams {
    pub bob: SimRng,
    pub arrival: SimRng,
    pub alice: SimRng,
}

impl RunStreams {
    /// Streams for trial `trial` of a protocol with `n_rounds` rounds.
    pub fn for_trial(master_seed: u64, trial: u64, n_rounds: u64) -> Self {
        Self {
            bob: substream(master_seed, Role::Bob, trial, n_rounds),
            arrival: substream(master_seed, Role::Arrival, trial, n_rounds),
            alice: substream(master_seed, Role::Alice, trial, n_rounds),
        }
    }
}
