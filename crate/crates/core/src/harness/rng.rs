//! Per-trial random streams.
//!
//! The generator is ChaCha with 8 rounds, keyed by the little-endian bytes
//! of the master seed in key bytes `0..8` (the rest zero), with the stream
//! id set to the trial index. Every draw below consumes whole 64-bit words:
//!
//! - `uniform`: `(w >> 11) · 2^-53`, in `[0, 1)`.
//! - `index(lo, hi)`: `lo + w mod (hi - lo + 1)`.
//! - `normal`: Box–Muller from `u₁ = 1 - uniform`, `u₂ = uniform`, giving
//!   `√(-ln u₁) · (cos 2πu₂, sin 2πu₂)`, so each part has variance `1/2`.
//!
//! Matrices are filled row-major.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{c64, CMatrix, C64};

pub struct TrialRng(ChaCha8Rng);

impl TrialRng {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&master_seed.to_le_bytes());
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream);
        Self(inner)
    }

    pub fn next_word(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_word() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Integer in `lo..=hi`.
    pub fn index(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        lo + (self.next_word() % span) as usize
    }

    pub fn coin(&mut self) -> bool {
        self.next_word() & 1 == 1
    }

    /// Standard complex normal, `E|z|² = 1`.
    pub fn normal(&mut self) -> C64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-u1.ln()).sqrt();
        let t = std::f64::consts::TAU * u2;
        c64(r * t.cos(), r * t.sin())
    }

    /// Ginibre matrix with iid standard complex normal entries.
    pub fn ginibre(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| self.normal())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| TrialRng::new(42, 3).next_word()).collect();
        assert!(a.iter().all(|w| *w == a[0]));
        assert_ne!(
            TrialRng::new(42, 3).next_word(),
            TrialRng::new(42, 4).next_word()
        );
        assert_ne!(
            TrialRng::new(42, 3).next_word(),
            TrialRng::new(43, 3).next_word()
        );
    }

    #[test]
    fn first_word_is_pinned() {
        // Guards the keying and stream layout documented above.
        let w = TrialRng::new(0, 0).next_word();
        let mut plain = ChaCha8Rng::from_seed([0u8; 32]);
        assert_eq!(w, plain.next_u64());
    }

    #[test]
    fn normal_moments() {
        let mut rng = TrialRng::new(7, 0);
        let n = 20_000;
        let (mut re2, mut im2, mut mean) = (0.0, 0.0, c64(0.0, 0.0));
        for _ in 0..n {
            let z = rng.normal();
            re2 += z.re * z.re;
            im2 += z.im * z.im;
            mean += z;
        }
        let nf = n as f64;
        assert!((re2 / nf - 0.5).abs() < 0.03);
        assert!((im2 / nf - 0.5).abs() < 0.03);
        assert!(mean.norm() / nf < 0.03);
    }

    #[test]
    fn index_stays_in_range() {
        let mut rng = TrialRng::new(1, 1);
        for _ in 0..1000 {
            let i = rng.index(2, 5);
            assert!((2..=5).contains(&i));
        }
        assert_eq!(rng.index(3, 3), 3);
    }
}
