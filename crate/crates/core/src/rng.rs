//! Reproducible random streams.
//!
//! Every Monte Carlo run is cut into blocks of [`BLOCK_SIZE`] samples. Block
//! `b` of a run with seed `s` draws from the ChaCha8 stream keyed by
//! `(s, b)`, so the numbers a block sees do not depend on which worker runs
//! it. Block results are reduced in block order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const BLOCK_SIZE: u64 = 1 << 16;

pub type Stream = ChaCha8Rng;

/// Counter-based stream for `(seed, block)`.
pub fn stream(seed: u64, block: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// SplitMix64 finalizer, used to derive independent per-row seeds.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Worker configuration shared by all samplers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub n_samples: u64,
    pub seed: u64,
    /// `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Sampling {
    pub fn new(n_samples: u64, seed: u64) -> Self {
        Sampling { n_samples, seed, threads: None }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads.max(1));
        self
    }
}

/// Runs `work(block_len, stream)` for every block and returns the block
/// results in block order.
pub fn run_blocks<T, F>(sampling: &Sampling, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut Stream) -> T + Sync + Send,
{
    let n = sampling.n_samples;
    let blocks = n.div_ceil(BLOCK_SIZE);
    let job = |b: u64| {
        let len = BLOCK_SIZE.min(n - b * BLOCK_SIZE);
        let mut rng = stream(sampling.seed, b);
        work(len, &mut rng)
    };
    match sampling.threads {
        Some(1) => (0..blocks).map(job).collect(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map(|pool| pool.install(|| (0..blocks).into_par_iter().map(job).collect()))
            .unwrap_or_else(|_| (0..blocks).map(job).collect()),
        None => (0..blocks).into_par_iter().map(job).collect(),
    }
}
