//! Seeded random streams.
//!
//! Every Monte Carlo estimator draws from a ChaCha stream selected by
//! `(seed, stream)`. Parallel work is split into fixed chunks, each chunk
//! owning its own stream id, so results do not depend on thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Samples handled by one independent stream.
pub const CHUNK: usize = 1 << 14;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point in the unit square.
#[inline]
pub fn unit2(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.random::<f64>(), rng.random::<f64>())
}

/// Split `samples` into `(stream_id, count)` chunks.
pub fn chunks(samples: usize) -> Vec<(u64, usize)> {
    let mut out = Vec::with_capacity(samples / CHUNK + 1);
    let mut left = samples;
    let mut id = 0u64;
    while left > 0 {
        let c = left.min(CHUNK);
        out.push((id, c));
        left -= c;
        id += 1;
    }
    out
}

/// Running sum and sum of squares, merged in chunk order.
#[derive(Clone, Copy, Debug, Default)]
pub struct Moments {
    pub n: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    pub fn merge(mut self, o: Moments) -> Moments {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Run `body` over all chunks of `samples` in parallel and merge the
/// per-chunk moment vectors in chunk order.
pub fn parallel_moments<F>(samples: usize, seed: u64, width: usize, body: F) -> Vec<Moments>
where
    F: Fn(&mut ChaCha8Rng, usize, &mut [Moments]) + Sync,
{
    use rayon::prelude::*;
    let parts: Vec<Vec<Moments>> = chunks(samples)
        .into_par_iter()
        .map(|(id, count)| {
            let mut rng = stream(seed, id);
            let mut acc = vec![Moments::default(); width];
            body(&mut rng, count, &mut acc);
            acc
        })
        .collect();
    let mut total = vec![Moments::default(); width];
    for p in parts {
        for (t, m) in total.iter_mut().zip(p) {
            *t = t.merge(m);
        }
    }
    total
}
