//! Deterministic RNG streams.
//!
//! Every random draw in the simulator flows through a seeded ChaCha stream so
//! that a `(config, seed)` pair fully determines the output. Per-trial seeds
//! are derived from the base seed with a SplitMix64 finalizer:
//!
//! ```text
//! trial_seed(base, t) = splitmix64(base XOR (t+1) * 0x9E3779B97F4A7C15)
//! ```
//!
//! so extending the trial count leaves earlier trials' draws untouched.
//! Within a trial, independent sub-streams keep the channel realization
//! identical across schemes regardless of how much scheme-specific
//! randomness (e.g. random RIS phases) is consumed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// SplitMix64 finalizer (Steele et al.), used for seed derivation only.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial` derived from `base_seed`.
pub fn trial_seed(base_seed: u64, trial: u64) -> u64 {
    splitmix64(base_seed ^ (trial.wrapping_add(1)).wrapping_mul(0x9E3779B97F4A7C15))
}

/// Named sub-streams of one trial's randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// User placement and initial trajectories.
    Scenario = 0,
    /// Small-scale fading and rain draws.
    Channel = 1,
    /// Scheme-specific randomness (random RIS phases).
    Scheme = 2,
}

/// ChaCha stream `stream` of the trial identified by `seed`.
pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn trial_seeds_are_stable_and_distinct() {
        let a: Vec<u64> = (0..8).map(|t| trial_seed(42, t)).collect();
        let b: Vec<u64> = (0..8).map(|t| trial_seed(42, t)).collect();
        assert_eq!(a, b);
        for i in 0..a.len() {
            for j in 0..i {
                assert_ne!(a[i], a[j]);
            }
        }
    }

    #[test]
    fn streams_are_independent() {
        let mut r0 = stream_rng(7, Stream::Scenario);
        let mut r1 = stream_rng(7, Stream::Channel);
        assert_ne!(r0.next_u64(), r1.next_u64());
        // Re-created stream replays exactly.
        let mut r0b = stream_rng(7, Stream::Scenario);
        let mut r0c = stream_rng(7, Stream::Scenario);
        assert_eq!(r0b.next_u64(), r0c.next_u64());
    }
}
