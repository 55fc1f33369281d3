//! Deterministic seeding policy for all Monte Carlo work.
//!
//! Every consumer of randomness gets a dedicated ChaCha substream addressed
//! by (master seed, lane, replicate index). A substream depends only on that
//! address, never on execution order or thread count, so parallel runs
//! aggregate bit-identically to serial ones. Nested simulations (a bootstrap
//! inside a coverage replicate) derive a fresh master seed from the outer
//! address instead of sharing streams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator handed to samplers; one per (lane, index) address.
pub type StreamRng = ChaCha8Rng;

/// Purpose tag separating the key spaces of independent consumers under a
/// single master seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lane {
    /// Simulated data sets in coverage studies.
    Data,
    /// Simulated predictands in coverage studies.
    Predictand,
    /// Parametric bootstrap replicates.
    Bootstrap,
    /// Fiducial parameter draws.
    Fiducial,
    /// Conformal randomization.
    Conformal,
    /// Monte Carlo integration in the discrete suites.
    Discrete,
}

impl Lane {
    fn tag(self) -> u64 {
        match self {
            Lane::Data => 0x9ad4_f6c1_1f3a_0d2b,
            Lane::Predictand => 0x3c65_9b17_c2e8_4af5,
            Lane::Bootstrap => 0x71d6_0e4d_8a9c_3b61,
            Lane::Fiducial => 0xe2a7_5c83_47f1_9d0f,
            Lane::Conformal => 0x5b38_21fa_d5c6_e794,
            Lane::Discrete => 0x0df3_b84a_6e12_75c9,
        }
    }
}

/// A 64-bit master seed plus the derivation rule mapping a replicate index
/// to an independent substream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RngPolicy {
    master_seed: u64,
}

impl RngPolicy {
    pub fn new(master_seed: u64) -> Self {
        RngPolicy { master_seed }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// The substream for replicate `index` in `lane`: a ChaCha generator
    /// whose key is derived from (master seed, lane) and whose stream id is
    /// the index.
    pub fn substream(&self, lane: Lane, index: u64) -> StreamRng {
        let mut state = self.master_seed ^ lane.tag();
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = StreamRng::from_seed(seed);
        rng.set_stream(index);
        rng
    }

    /// Fresh policy for a simulation nested inside replicate `index`, so the
    /// inner replicates get their own full index space.
    pub fn nested(&self, lane: Lane, index: u64) -> RngPolicy {
        let spread = index.wrapping_mul(0xa24b_aed4_963e_e407).wrapping_add(1);
        RngPolicy { master_seed: splitmix64(self.master_seed ^ lane.tag() ^ spread) }
    }
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
