//! Seed discipline.
//!
//! One root seed per experiment. Every consumer of randomness derives its own
//! [`NoiseStream`] by mixing labels (round index, purpose) into the root key,
//! and every stream is consumed in fixed-size chunks, each with its own
//! ChaCha8 stream id. A draw set is therefore a pure function of
//! `(key, samples, dim)` and does not depend on how many workers fill it.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Rows per chunk. Changing this changes every derived draw.
pub const CHUNK_ROWS: usize = 512;

/// Labels separating independent consumers of one root seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Potential = 1,
    Adversary = 2,
    Probe = 3,
    Check = 4,
    Gumbel = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NoiseStream {
    key: u64,
}

impl NoiseStream {
    pub fn new(root_seed: u64) -> Self {
        Self { key: splitmix64(root_seed) }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Child stream for an arbitrary label.
    pub fn derive(&self, label: u64) -> Self {
        Self { key: splitmix64(self.key ^ splitmix64(label.wrapping_add(0x5851_F42D_4C95_7F2D))) }
    }

    pub fn purpose(&self, purpose: Purpose) -> Self {
        self.derive(purpose as u64)
    }

    pub fn round(&self, t: usize) -> Self {
        self.derive(0x1000_0000_0000_0000 | t as u64)
    }

    /// Generator for one chunk of this stream.
    pub fn chunk_rng(&self, chunk: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.key);
        rng.set_stream(chunk);
        rng
    }

    /// Single sequential generator, for consumers that draw a handful of values.
    pub fn rng(&self) -> ChaCha8Rng {
        self.chunk_rng(0)
    }
}

/// Uniform draw on the open interval (0, 1).
#[inline]
pub fn open01<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Row-major matrix of standard normal draws, one row per sample.
///
/// Holding the draws lets one logical check evaluate a smoothed potential at
/// several points with common random numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianDraws {
    dim: usize,
    samples: usize,
    data: Vec<f64>,
}

impl GaussianDraws {
    pub fn generate(stream: NoiseStream, samples: usize, dim: usize) -> Self {
        let mut data = vec![0.0; samples * dim];
        if dim > 0 {
            data.par_chunks_mut(CHUNK_ROWS * dim).enumerate().for_each(|(c, block)| {
                let mut rng = stream.chunk_rng(c as u64);
                for x in block.iter_mut() {
                    *x = rng.sample(StandardNormal);
                }
            });
        }
        Self { dim, samples, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    #[inline]
    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim.max(1))
    }

    /// Blocks of at most [`CHUNK_ROWS`] rows, in order.
    pub fn blocks(&self) -> std::slice::Chunks<'_, f64> {
        self.data.chunks(CHUNK_ROWS * self.dim.max(1))
    }

    /// Map each block to a partial result in parallel; results come back in
    /// block order so reductions over them are deterministic.
    pub fn map_blocks<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&[f64]) -> T + Sync + Send,
    {
        self.data.par_chunks(CHUNK_ROWS * self.dim.max(1)).map(f).collect()
    }
}

/// Stream standard normal rows without materializing them, block by block.
pub fn map_gaussian_blocks<T, F>(stream: NoiseStream, samples: usize, dim: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync + Send,
{
    let chunks = samples.div_ceil(CHUNK_ROWS);
    (0..chunks)
        .into_par_iter()
        .map_init(Vec::new, |buf, c| {
            let rows = CHUNK_ROWS.min(samples - c * CHUNK_ROWS);
            buf.resize(rows * dim, 0.0);
            let mut rng = stream.chunk_rng(c as u64);
            for x in buf.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
            f(buf)
        })
        .collect()
}
