//! Seeded Monte Carlo with reproducible parallel substreams.
//!
//! Samples are cut into fixed-size chunks; chunk `i` draws from ChaCha8
//! seeded with the run seed on stream `i`. Chunk partial sums are combined
//! in chunk order, so the result depends only on the seed and the sample
//! count, never on the thread schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Estimate;
use crate::error::Result;

pub(crate) const CHUNK: usize = 1 << 14;

/// Running first and second moments of one chunk.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    pub fn merge(self, other: Moments) -> Moments {
        Moments {
            count: self.count + other.count,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }

    /// Mean and standard error of the mean.
    pub fn mean_and_stderr(&self) -> (f64, f64) {
        if self.count == 0 {
            return (0.0, 0.0);
        }
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = ((self.sum_sq / n - mean * mean) * n / (n - 1.0).max(1.0)).max(0.0);
        (mean, (var / n).sqrt())
    }
}

pub(crate) fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Runs `samples` draws of `sample(rng)` and returns the sample mean with its
/// standard error as an [`Estimate`].
pub(crate) fn run<F>(samples: usize, seed: u64, sample: F) -> Result<Estimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let chunks = samples.div_ceil(CHUNK).max(1);
    let parts: Vec<Result<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let len = CHUNK.min(samples - c * CHUNK);
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(sample(&mut rng)?);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    for p in parts {
        total = total.merge(p?);
    }
    let (mean, se) = total.mean_and_stderr();
    Ok(Estimate {
        value: mean,
        err_abs: se,
        cost: total.count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn reproducible_for_fixed_seed() {
        let f = |rng: &mut ChaCha8Rng| Ok(rng.random::<f64>().powi(2));
        let a = run(100_000, 7, f).unwrap();
        let b = run(100_000, 7, f).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.err_abs.to_bits(), b.err_abs.to_bits());
        let c = run(100_000, 8, f).unwrap();
        assert_ne!(a.value.to_bits(), c.value.to_bits());
    }

    #[test]
    fn moments_of_constant() {
        let mut m = Moments::default();
        for _ in 0..10 {
            m.push(2.5);
        }
        let (mean, se) = m.mean_and_stderr();
        assert_eq!(mean, 2.5);
        assert!(se < 1e-12);
    }
}
