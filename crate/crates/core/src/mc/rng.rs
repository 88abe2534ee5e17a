use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Paths per RNG stream.
pub const CHUNK_PATHS: u64 = 1024;

/// Generator for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `f(chunk_id, paths_in_chunk, rng)` over all chunks in parallel and
/// returns the results in chunk order.
pub(crate) fn par_chunks<T, F>(seed: u64, n_paths: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64, &mut ChaCha8Rng) -> T + Sync,
{
    let n_chunks = n_paths.div_ceil(CHUNK_PATHS);
    (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let n = CHUNK_PATHS.min(n_paths - k * CHUNK_PATHS);
            let mut rng = chunk_rng(seed, k);
            f(k, n, &mut rng)
        })
        .collect()
}

/// Running mean and centred second moment (Welford), mergeable.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * self.n as f64 * o.n as f64 / n as f64;
        self.n = n;
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }

    pub fn combine(parts: &[Moments]) -> Moments {
        let mut m = Moments::default();
        for p in parts {
            m.merge(p);
        }
        m
    }
}
