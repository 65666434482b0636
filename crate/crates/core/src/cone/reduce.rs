//! Seeded, worker-count independent Monte Carlo averaging.
//!
//! Sample `i` draws from its own ChaCha8 stream `i` under the run seed, and the
//! index range is cut into fixed chunks whose Welford summaries are merged in
//! index order. The thread pool only decides who computes a chunk, never how
//! the numbers are combined.

use super::McEstimate;
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const CHUNK: u64 = 4096;

/// The generator for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Copy, Debug, Default)]
struct Summary {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Summary {
    fn push(&mut self, w: f64) {
        self.n += 1;
        let delta = w - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (w - self.mean);
    }

    fn merge(self, other: Summary) -> Summary {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Summary {
            n,
            mean: self.mean + delta * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n as f64),
        }
    }
}

/// Averages `weight(index, rng)` over `n` samples. A non-finite weight aborts
/// the run with the lowest offending index.
pub fn estimate<F>(n: u64, seed: u64, weight: F) -> Result<McEstimate>
where
    F: Fn(u64, &mut ChaCha8Rng) -> Result<f64> + Sync,
{
    if n < 2 {
        return Err(Error::Usage(
            "at least two samples are needed for an error estimate".into(),
        ));
    }
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Result<Summary>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut s = Summary::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let mut rng = sample_rng(seed, i);
                let w = weight(i, &mut rng)?;
                if !w.is_finite() {
                    return Err(Error::NonFiniteWeight {
                        sample: i,
                        detail: format!("weight {w}"),
                    });
                }
                s.push(w);
            }
            Ok(s)
        })
        .collect();
    let mut total = Summary::default();
    for p in parts {
        total = total.merge(p?);
    }
    let var = total.m2 / (total.n - 1) as f64;
    Ok(McEstimate {
        value: total.mean,
        std_error: (var / total.n as f64).sqrt(),
        n_samples: total.n,
        seed,
    })
}
