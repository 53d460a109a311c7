//! Masking constructions on top of a Hadamard certificate.
//!
//! Given a certified set `{a_k}` with `G = U·D·U†`, the fixed-reducing states
//! are
//!
//! ```text
//! Ψ_k = Σ_j s_j · c_jk · φ_j ⊗ ψ_j,    s_j = sqrt(D_j / n),  c_jk = √n·conj(U_kj)
//! ```
//!
//! so `c_jk = e^{iΘ_jk}` is unimodular and `(c_jk)/√n = U†`. Taking `U†`
//! rather than `U` is what makes `⟨Ψ_k|Ψ_l⟩ = (U·D·U†)_kl = ⟨a_k|a_l⟩` hold
//! exactly. Every `Ψ_k` has the marginals `Σ_j s_j²·φ_jφ_j†` and
//! `Σ_j s_j²·ψ_jψ_j†`, and the masker maps `a_k ⊗ |0⟩` to `Ψ_k`.
//!
//! A combination `a(μ) = Σ_k μ_k a_k` is masked by the same masker exactly
//! when `|Σ_k μ_k e^{iΘ_jk}| = 1`, i.e. `|(U†μ)_j| = 1/√n`, for every `j`
//! with `D_j > 0`. See [`maskable_with`].

mod combination;
mod frs;
mod masker;
mod qubit;
mod torus;

use alloc::vec::Vec;

use crate::C64;

pub use self::combination::{combination_condition, combine, CombinationReport, GeneralReducingSet};
pub use self::frs::{fixed_reducing_states, Bases, FixedReducingSet};
pub use self::masker::{
    build_masker, build_masker_with, verify_masked_states, verify_masking, Masker,
    MaskerConstruction, MaskingReport, StateDeviation,
};
pub use self::qubit::{solve_qubit_phases, QubitSolution};
pub use self::torus::{maskable_with, sample_maskable, torus_point, MaskabilityReport};

/// Eigenvalues at or below this are treated as zero when restricting to
/// the support of the Gram matrix.
pub const RANK_TOL: f64 = 1e-12;

/// Coefficients `μ_k` of a linear combination `Σ_k μ_k |a_k⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector(pub Vec<C64>);

impl CoefficientVector {
    /// The unit coefficient vector selecting member `k` of `n`.
    pub fn unit(n: usize, k: usize) -> Self {
        let mut mu = alloc::vec![C64::new(0.0, 0.0); n];
        mu[k] = C64::new(1.0, 0.0);
        CoefficientVector(mu)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn scale(&self, factor: f64) -> Self {
        CoefficientVector(self.0.iter().map(|z| z * factor).collect())
    }
}

impl From<Vec<C64>> for CoefficientVector {
    fn from(v: Vec<C64>) -> Self {
        CoefficientVector(v)
    }
}
