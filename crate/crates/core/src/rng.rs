//! Seedable, splittable random streams.
//!
//! Every chain owns one [`ChainRng`]: a ChaCha8 counter-mode generator keyed by
//! the run seed, with the chain index selecting the stream. Two chains never
//! share randomness, and a chain's draws depend only on `(seed, stream)` and
//! the order in which it consumes them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct ChainRng {
    inner: ChaCha8Rng,
}

impl ChainRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    /// Uniform draw on `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p >= 1.0 {
            return true;
        }
        if p <= 0.0 {
            return false;
        }
        self.uniform() < p
    }

    /// Inverse-CDF draw over ascending index from nonnegative (not necessarily
    /// normalized) weights, consuming exactly one uniform.
    ///
    /// Returns the last positive-weight index if rounding pushes the uniform
    /// past the accumulated mass. Panics if every weight is zero.
    #[inline]
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let target = self.uniform() * total;
        let mut acc = 0.0;
        let mut last = usize::MAX;
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                acc += w;
                last = i;
                if target < acc {
                    return i;
                }
            }
        }
        assert!(last != usize::MAX, "categorical draw from all-zero weights");
        last
    }

    /// Number of failures before the first success of a Bernoulli(`p`)
    /// sequence, drawn with one uniform. `u64::MAX` stands for "never".
    pub fn geometric_skip(&mut self, p: f64) -> u64 {
        if p >= 1.0 {
            return 0;
        }
        if p <= 0.0 {
            return u64::MAX;
        }
        // 1 - u lies in (0, 1], so the log is finite.
        let u = 1.0 - self.uniform();
        let k = (u.ln() / (-p).ln_1p()).floor();
        if k >= u64::MAX as f64 {
            u64::MAX
        } else {
            k as u64
        }
    }
}

/// Sorted positions in `1..=len` where each position is selected
/// independently with probability `p`, generated by geometric skipping.
pub fn bernoulli_positions(rng: &mut ChainRng, len: usize, p: f64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut pos: u64 = 0;
    loop {
        let skip = rng.geometric_skip(p);
        pos = match pos.checked_add(skip).and_then(|x| x.checked_add(1)) {
            Some(x) => x,
            None => break,
        };
        if pos > len as u64 {
            break;
        }
        out.push(pos as usize);
    }
    out
}
