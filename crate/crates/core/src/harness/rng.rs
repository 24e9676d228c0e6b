//! Counter-based SplitMix64 stream with Box–Muller Gaussians.
//!
//! - `next_u64`: `state += 0x9E3779B97F4A7C15`, then the SplitMix64
//!   finalizer `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//!   z *= 0x94D049BB133111EB; z ^= z >> 31` on the new state.
//! - `uniform`: `((next_u64 >> 11) + 1) · 2⁻⁵³`, in `(0, 1]`.
//! - `gaussian_pair`: Box–Muller on two uniforms `u₁, u₂`:
//!   `r = √(−2 ln u₁)`, `(r cos 2πu₂, r sin 2πu₂)`.
//! - `complex_gaussian`: one Box–Muller pair scaled by `1/√2`, so
//!   `E|z|² = 1`.
//! - `derive_seed(seed, stream, index) = mix(mix(seed ^ mix(stream)) ^ index)`
//!   where `mix(z)` is the finalizer applied to `z + 0x9E3779B97F4A7C15`.

use crate::numkernel::{ComplexMatrix, C64};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One SplitMix64 step from `z`.
pub fn mix(z: u64) -> u64 {
    finalize(z.wrapping_add(GOLDEN_GAMMA))
}

/// Seed of instance `index` in stream `stream` under a master seed.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    mix(mix(seed ^ mix(stream)) ^ index)
}

/// FNV-1a hash, used to turn property names into stream ids.
pub fn stream_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        finalize(self.state)
    }

    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `lo..=hi` (by multiply-shift on 64 bits).
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u128;
        lo + ((u128::from(self.next_u64()) * span) >> 64) as usize
    }

    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = std::f64::consts::TAU * u2;
        (r * t.cos(), r * t.sin())
    }

    pub fn complex_gaussian(&mut self) -> C64 {
        let (a, b) = self.gaussian_pair();
        C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// `rows × cols` matrix of complex Gaussians, filled row by row.
    pub fn complex_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                a[(r, c)] = self.complex_gaussian();
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_vectors() {
        let mut r = SplitMix64::new(0);
        let got: Vec<u64> = (0..3).map(|_| r.next_u64()).collect();
        assert_eq!(
            got,
            [
                0xE220_A839_7B1D_CDAF,
                0x6E78_9E6A_A1B9_65F4,
                0x06C4_5D18_8009_454F
            ]
        );
        let mut r = SplitMix64::new(1234567);
        let got: Vec<u64> = (0..2).map(|_| r.next_u64()).collect();
        assert_eq!(got, [6457827717110365317, 3203168211198807973]);
    }

    #[test]
    fn derived_value_vectors() {
        let mut r = SplitMix64::new(42);
        let got: Vec<f64> = (0..3).map(|_| r.uniform()).collect();
        assert_eq!(
            got,
            [0.7415648787718234, 0.15991039287692022, 0.2786011302551388]
        );
        let mut r = SplitMix64::new(42);
        let z = [r.complex_gaussian(), r.complex_gaussian()];
        let want = [
            C64::new(0.29325114782212747, 0.46151531813676233),
            C64::new(-0.630658789702981, 0.9382130097717609),
        ];
        for (a, b) in z.iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
        assert_eq!(stream_id("parallel-def-eig"), 0x2783_FE66_5C16_3EFA);
        assert_eq!(stream_id(""), 14695981039346656037);
        assert_eq!(derive_seed(0, 0, 0), 2558736989570252433);
        assert_eq!(
            derive_seed(1, stream_id("parallel-def-eig"), 2),
            10595512040933677889
        );
        assert_eq!(mix(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn uniform_in_half_open_unit_interval() {
        let mut r = SplitMix64::new(99);
        for _ in 0..10_000 {
            let u = r.uniform();
            assert!(u > 0.0 && u <= 1.0);
        }
    }

    #[test]
    fn range_stays_in_bounds() {
        let mut r = SplitMix64::new(5);
        let mut seen = [false; 4];
        for _ in 0..1000 {
            let k = r.range(2, 5);
            seen[k - 2] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn distinct_streams_differ() {
        assert_ne!(
            derive_seed(7, stream_id("a"), 0),
            derive_seed(7, stream_id("b"), 0)
        );
        assert_ne!(derive_seed(7, 0, 0), derive_seed(7, 0, 1));
    }
}
