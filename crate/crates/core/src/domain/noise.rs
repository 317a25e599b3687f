use std::collections::VecDeque;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Source of randomness for every randomized operation.
///
/// Three modes:
/// * seeded: a ChaCha20 stream; identical seeds give identical streams.
/// * zero-noise: every uniform draw is 0.5, so continuous noise sits at its
///   median (a Laplace draw returns 0).
/// * scripted: replays a fixed list of uniforms, then behaves like zero-noise.
#[derive(Clone, Debug)]
pub struct NoiseSource {
    mode: Mode,
}

#[derive(Clone, Debug)]
enum Mode {
    Seeded(Box<ChaCha20Rng>),
    Zero,
    Scripted(VecDeque<f64>),
}

const TWO_POW_53: f64 = 9_007_199_254_740_992.0;

impl NoiseSource {
    pub fn seeded(seed: u64) -> Self {
        NoiseSource {
            mode: Mode::Seeded(Box::new(ChaCha20Rng::seed_from_u64(seed))),
        }
    }

    pub fn zero() -> Self {
        NoiseSource { mode: Mode::Zero }
    }

    /// Replays `uniforms` (each must lie in (0,1)) before falling back to 0.5.
    pub fn scripted(uniforms: impl IntoIterator<Item = f64>) -> Self {
        let values: VecDeque<f64> = uniforms.into_iter().collect();
        assert!(
            values.iter().all(|u| *u > 0.0 && *u < 1.0),
            "scripted uniforms must lie in (0,1)"
        );
        NoiseSource {
            mode: Mode::Scripted(values),
        }
    }

    /// Independent source for sub-stream `stream` of a master seed.
    pub fn derive(master: u64, stream: u64) -> Self {
        NoiseSource::seeded(derive_seed(master, stream))
    }

    pub fn is_zero_noise(&self) -> bool {
        matches!(self.mode, Mode::Zero)
    }

    /// Uniform draw in the open interval (0,1).
    pub fn uniform(&mut self) -> f64 {
        match &mut self.mode {
            Mode::Seeded(rng) => ((rng.next_u64() >> 11) as f64 + 0.5) / TWO_POW_53,
            Mode::Zero => 0.5,
            Mode::Scripted(values) => values.pop_front().unwrap_or(0.5),
        }
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be nonempty");
        match &mut self.mode {
            Mode::Seeded(rng) => rng.gen_range(0..n),
            _ => ((self.uniform() * n as f64) as usize).min(n - 1),
        }
    }

    /// Fair coin: `true` with probability 1/2 (zero-noise mode gives `true`).
    pub fn coin(&mut self) -> bool {
        self.uniform() >= 0.5
    }

    /// Fisher-Yates shuffle driven by this source.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }

    /// Standard normal draw (Box-Muller).
    pub fn gaussian(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// SplitMix64 finalizer applied to (master, stream).
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
