//! Seeded random helpers used to synthesize instances and start searches.
//!
//! Everything is driven by an explicit 64-bit seed through ChaCha8, so the
//! same seed reproduces the same instance on every platform.

use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::linalg::{orthonormalize_columns, CMatrix, CVector};
use crate::C64;

#[derive(Clone, Debug)]
pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn seed_from_u64(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn int_range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.0.next_u64() % (hi - lo + 1) as u64) as usize
    }

    /// Standard normal sample (Box-Muller).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    /// Circularly symmetric complex normal with unit variance.
    pub fn complex_normal(&mut self) -> C64 {
        let s = 0.5f64.sqrt();
        C64::new(self.normal() * s, self.normal() * s)
    }

    /// Uniform angle in `(-π, π]`.
    pub fn phase(&mut self) -> f64 {
        PI - 2.0 * PI * self.uniform()
    }
}

pub fn random_unit_vector(rng: &mut Rng, dim: usize) -> CVector {
    let v: CVector = (0..dim).map(|_| rng.complex_normal()).collect();
    v.normalized()
}

/// Matrix with i.i.d. complex normal entries.
pub fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| rng.complex_normal())
}

pub fn random_hermitian(rng: &mut Rng, n: usize) -> CMatrix {
    let m = random_matrix(rng, n, n);
    (&m + &m.adjoint()).scale(C64::new(0.5, 0.0))
}

/// `rows × cols` matrix with orthonormal columns (Gram-Schmidt of a
/// Gaussian matrix).
pub fn random_isometry(rng: &mut Rng, rows: usize, cols: usize) -> CMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    loop {
        let basis = orthonormalize_columns(&random_matrix(rng, rows, cols), 1e-6);
        if basis.len() == cols {
            return CMatrix::from_columns(&basis).expect("consistent shapes");
        }
    }
}

pub fn random_unitary(rng: &mut Rng, n: usize) -> CMatrix {
    random_isometry(rng, n, n)
}

/// Vector of `n` unimodular entries with independent uniform phases.
pub fn random_phases(rng: &mut Rng, n: usize) -> CVector {
    (0..n).map(|_| crate::linalg::cis(rng.phase())).collect()
}
