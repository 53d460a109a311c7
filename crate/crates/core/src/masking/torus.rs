use alloc::vec::Vec;

use super::{CoefficientVector, RANK_TOL};
use crate::error::{Error, Result};
use crate::gram::HadamardCertificate;
use crate::linalg::{cis, CVector};
use crate::random::Rng;
use crate::C64;

/// Outcome of [`maskable_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct MaskabilityReport {
    /// `U†μ`
    pub transformed: CVector,
    /// `√n·|(U†μ)_j|`, equal to `|Σ_k μ_k e^{iΘ_jk}|`. Must be 1 on the support.
    pub corrected_moduli: Vec<f64>,
    /// `|(Uμ)_j|`, kept for comparison only.
    pub literal_moduli: Vec<f64>,
    /// Support indices the condition is checked on.
    pub support: Vec<usize>,
    /// `max_{j ∈ support} |corrected_moduli[j] − 1|`
    pub max_deviation: f64,
    pub maskable: bool,
}

/// Whether `a(μ) = Σ_k μ_k a_k` is masked by the masker of `cert`.
///
/// The masker sends `a(μ) ⊗ e_0` to `Σ_j s_j·(√n·(U†μ)_j)·φ_j ⊗ ψ_j`, whose
/// marginals match the set's exactly when `√n·|(U†μ)_j| = 1` for every `j`
/// with `D_j > 0`. Components on the kernel of the Gram matrix do not
/// change `a(μ)` and are ignored.
pub fn maskable_with(cert: &HadamardCertificate, mu: &[C64], tol: f64) -> Result<MaskabilityReport> {
    let n = cert.order();
    if mu.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: mu.len(),
        });
    }
    let u = cert.unitary.matrix();
    let mu = CVector::new(mu.to_vec());
    let transformed = u.adjoint().mul_vec(&mu);
    let literal_moduli = u.mul_vec(&mu).iter().map(|z| z.norm()).collect();
    let scale = (n as f64).sqrt();
    let corrected_moduli: Vec<f64> = transformed.iter().map(|z| z.norm() * scale).collect();
    let support = cert.support(RANK_TOL);
    let max_deviation = support
        .iter()
        .map(|&j| (corrected_moduli[j] - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(MaskabilityReport {
        transformed,
        corrected_moduli,
        literal_moduli,
        support,
        max_deviation,
        maskable: max_deviation <= tol,
    })
}

/// The torus point `μ = U·z/√n` for `z_j = e^{i·phases[j]}`.
pub fn torus_point(cert: &HadamardCertificate, phases: &[f64]) -> Result<CoefficientVector> {
    let n = cert.order();
    if phases.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: phases.len(),
        });
    }
    let z: CVector = phases.iter().map(|&p| cis(p) / (n as f64).sqrt()).collect();
    Ok(CoefficientVector(cert.unitary.matrix().mul_vec(&z).into_inner()))
}

/// `count` torus points with independent uniform phases drawn from `seed`.
pub fn sample_maskable(cert: &HadamardCertificate, count: usize, seed: u64) -> Vec<CoefficientVector> {
    let n = cert.order();
    let mut rng = Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let phases: Vec<f64> = (0..n).map(|_| rng.phase()).collect();
            torus_point(cert, &phases).expect("phase count matches order")
        })
        .collect()
}
