//! Measurement outcome sources.
//!
//! Non-deterministic measurements draw their signs either from a seeded
//! PRNG (reproducible runs) or from a forced list (exhaustive sweeps,
//! replays). All run artifacts record the stream that was actually used.

use crate::error::{Error, Result};
use crate::pauli::Sign;
use alloc::vec::Vec;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub enum OutcomeSource {
    /// Deterministic PRNG stream identified by its seed.
    Seeded(ChaCha8Rng),
    /// Fixed outcome list; drawing past the end is an error.
    Forced { signs: Vec<Sign>, cursor: usize },
}

impl OutcomeSource {
    pub fn seeded(seed: u64) -> Self {
        OutcomeSource::Seeded(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn forced(signs: Vec<Sign>) -> Self {
        OutcomeSource::Forced { signs, cursor: 0 }
    }

    /// Forced stream from the low `count` bits of `mask` (bit i is the
    /// i-th outcome, 1 meaning the -1 result). Handy for exhaustive sweeps.
    pub fn forced_from_mask(mask: u64, count: usize) -> Self {
        let signs = (0..count)
            .map(|i| Sign::from_bit((mask >> i) & 1 == 1))
            .collect();
        Self::forced(signs)
    }

    pub fn next_sign(&mut self) -> Result<Sign> {
        match self {
            OutcomeSource::Seeded(rng) => Ok(Sign::from_bit(rng.next_u32() & 1 == 1)),
            OutcomeSource::Forced { signs, cursor } => {
                let sign = signs.get(*cursor).copied().ok_or(Error::OutcomesExhausted)?;
                *cursor += 1;
                Ok(sign)
            }
        }
    }
}
