//! Seeded, splittable random streams.
//!
//! Every source of randomness in a run (scrambler draw, parameter
//! initialization, shot sampling, target weights) is taken from a named
//! substream of one root seed. Substreams are ChaCha20 streams that share the
//! key expanded from the root seed and differ in their 64-bit stream id, so
//! two substreams never overlap and each can be regenerated on its own.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Child stream identified by `name`. Depends only on the parent's
    /// identity, not on how many numbers the parent has produced.
    pub fn substream(&self, name: &str) -> Self {
        let mut h = FNV_OFFSET;
        for b in name.as_bytes() {
            h = (h ^ u64::from(*b)).wrapping_mul(FNV_PRIME);
        }
        Self::with_stream(self.seed, splitmix64(self.stream ^ splitmix64(h)))
    }

    /// Child stream identified by an integer, e.g. a realization index.
    pub fn substream_index(&self, index: u64) -> Self {
        let tag = splitmix64(index.wrapping_add(0x5151_5151));
        Self::with_stream(self.seed, splitmix64(self.stream.rotate_left(17) ^ tag))
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
