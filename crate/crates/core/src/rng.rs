//! Counter-based pseudo-random numbers with an explicit stream-derivation
//! rule, so every experiment is reproducible bit-for-bit across platforms,
//! thread schedules, and reimplementations in other languages.
//!
//! Generator: the SplitMix64 output function evaluated at a counter,
//!
//! ```text
//! out(key, i) = fin(key + (i + 1) * 0x9E3779B97F4A7C15)       (wrapping)
//! fin(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!         z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
//! ```
//!
//! Stream derivation: child keys come from
//! `derive_stream(key, idx) = fin(key ^ fin(idx * 0x9E3779B97F4A7C15 ^ 0xD1B54A32D192ED03))`.
//! By convention a key is used either to seed a [`CounterRng`] or as a parent
//! for `derive_stream`, never both, so sibling streams share no outputs.
//! Experiments derive `(master seed, game index)`, then `(game key, N index)`,
//! then `(cell key, trial index)`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const DERIVE_TAG: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
fn fin(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the key of child stream `index` from `key`.
#[inline]
pub fn derive_stream(key: u64, index: u64) -> u64 {
    fin(key ^ fin(index.wrapping_mul(GOLDEN) ^ DERIVE_TAG))
}

/// A 64-bit counter-based generator (SplitMix64 output function).
///
/// `next_*` advances the counter; any output can also be recomputed from
/// `(key, counter)` alone, which is what makes parallel schedules and
/// re-runs agree.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    /// Generator for stream `key`, starting at counter 0.
    pub fn new(key: u64) -> Self {
        CounterRng { key, counter: 0 }
    }

    /// Generator for the child stream `index` of `key`.
    pub fn derived(key: u64, index: u64) -> Self {
        CounterRng::new(derive_stream(key, index))
    }

    /// Next raw 64-bit output.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let out = fin(self.key.wrapping_add(self.counter.wrapping_add(1).wrapping_mul(GOLDEN)));
        self.counter += 1;
        out
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Index drawn from the categorical distribution given by `weights`
    /// (non-negative, summing to ~1) by inverse-CDF scan. Rounding slop
    /// falls into the last category with positive weight.
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        debug_assert!(!weights.is_empty());
        let u = self.next_f64();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                last_positive = i;
            }
            acc += w;
            if u < acc {
                return i;
            }
        }
        last_positive
    }
}
