//! Seeded, splittable sampling of matrices and frames.
//!
//! The generator is ChaCha20 (20 rounds, constants `"expand 32-byte k"`)
//! keyed with the little-endian bytes of the 64-bit seed followed by 24 zero
//! bytes, with the 64-bit stream id as nonce and the block counter starting
//! at zero. Each `u64` is two consecutive little-endian output words, low
//! word first. Uniforms take the top 53 bits; complex Gaussians use
//! Box–Muller with variance 1/2 per component. Any ChaCha20 implementation
//! reproduces the same matrices from the same `(seed, stream)`.

use libm::{cos, log, sin, sqrt};
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::kernel::{qr_frame, CMatrix, Mat, C64};

pub struct SeededStream {
    rng: ChaCha20Rng,
}

impl SeededStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(stream);
        SeededStream { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard complex Gaussian: `E|z|² = 1`.
    pub fn complex_gaussian(&mut self) -> C64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = sqrt(-log(u1));
        let theta = core::f64::consts::TAU * u2;
        C64::new(r * cos(theta), r * sin(theta))
    }

    pub fn gaussian_mat(&mut self, rows: usize, cols: usize) -> Mat {
        Mat::from_fn(rows, cols, |_, _| self.complex_gaussian())
    }

    /// Un-normalized Ginibre sample.
    pub fn ginibre(&mut self, n: usize) -> CMatrix {
        CMatrix::try_from(self.gaussian_mat(n, n)).expect("gaussian samples are finite")
    }

    /// Haar-distributed unitary: the QR factor (positive `R` diagonal) of a
    /// Ginibre sample.
    pub fn haar_unitary(&mut self, n: usize) -> CMatrix {
        CMatrix::try_from(qr_frame(&self.gaussian_mat(n, n))).expect("finite")
    }

    /// Uniformly distributed orthonormal n×k frame.
    pub fn frame(&mut self, n: usize, k: usize) -> Mat {
        qr_frame(&self.gaussian_mat(n, k))
    }
}
