use alloc::vec::Vec;

use super::combination::GeneralReducingSet;
use super::RANK_TOL;
use crate::error::{Error, Result};
use crate::gram::{gram_matrix, HadamardCertificate, StateSet};
use crate::hadamard::principal_arg;
use crate::linalg::{tensor_product, CMatrix, CVector};
use crate::C64;

/// Local orthonormal sets `{φ_j}` in `C^{d_A}` and `{ψ_j}` in `C^{d_B}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bases {
    pub a: Vec<CVector>,
    pub b: Vec<CVector>,
}

impl Bases {
    /// Standard bases of both factors.
    pub fn standard(d_a: usize, d_b: usize) -> Self {
        Bases {
            a: (0..d_a).map(|i| CVector::basis(d_a, i)).collect(),
            b: (0..d_b).map(|i| CVector::basis(d_b, i)).collect(),
        }
    }

    /// Validates that both lists are orthonormal within `tol`.
    pub fn new(a: Vec<CVector>, b: Vec<CVector>, tol: f64) -> Result<Self> {
        for side in [&a, &b] {
            if side.is_empty() {
                return Err(Error::InvalidArgument("basis must not be empty"));
            }
            let m = CMatrix::from_columns(side)?;
            let deviation = m.isometry_deviation();
            if deviation > tol {
                return Err(Error::NotIsometry { deviation });
            }
        }
        Ok(Bases { a, b })
    }
}

/// The bipartite states `Ψ_k = Σ_j s_j·c_jk·φ_j ⊗ ψ_j` built from a
/// Hadamard certificate, with `s_j = sqrt(D_j/n)` and unimodular
/// `c_jk = √n·conj(U_kj) = e^{iΘ_jk}`.
///
/// Only the `r` terms with `D_j > 0` are kept. `support[t]` is the
/// certificate column that term `t` comes from.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedReducingSet {
    d_a: usize,
    d_b: usize,
    n: usize,
    weights: Vec<f64>,
    support: Vec<usize>,
    phi: Vec<CVector>,
    psi: Vec<CVector>,
    /// `r × n`, entry `(t, k) = c_{support[t], k}`
    coefficients: CMatrix,
    /// Full `n × n` phase matrix of `U†`.
    theta: Vec<f64>,
}

/// Fixed-reducing states of a certified set.
///
/// `bases.a` lives in the state space of the set (`d_A = set.dim()`) and
/// `bases.b` fixes `d_B`. Term `t` of the support uses `bases.a[t]` and
/// `bases.b[t]`, so both need at least `r` vectors.
pub fn fixed_reducing_states(cert: &HadamardCertificate, set: &StateSet, bases: &Bases) -> Result<FixedReducingSet> {
    let n = set.len();
    if cert.order() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: cert.order(),
        });
    }
    let mismatch = cert.gram().distance(&gram_matrix(set));
    if mismatch > 1e-8 * (n as f64) {
        return Err(Error::CertificateMismatch("certificate does not reconstruct the Gram matrix"));
    }
    let d_a = set.dim();
    let d_b = bases.b.first().map_or(0, CVector::dim);
    if bases.a.iter().any(|v| v.dim() != d_a) {
        return Err(Error::DimensionMismatch {
            expected: d_a,
            got: bases.a.iter().map(CVector::dim).find(|&x| x != d_a).unwrap_or(0),
        });
    }
    let support = cert.support(RANK_TOL);
    let r = support.len();
    if r > bases.a.len() {
        return Err(Error::RankExceedsDimension { rank: r, dim: bases.a.len() });
    }
    if r > bases.b.len() {
        return Err(Error::RankExceedsDimension { rank: r, dim: bases.b.len() });
    }

    let nf = n as f64;
    let spectrum = cert.spectrum.values();
    let u = cert.unitary.matrix();
    let weights = support.iter().map(|&j| (spectrum[j] / nf).sqrt()).collect();
    let coefficients = CMatrix::from_fn(r, n, |t, k| u[(k, support[t])].conj() * nf.sqrt());
    let theta = (0..n * n)
        .map(|idx| principal_arg(u[(idx % n, idx / n)].conj()))
        .collect();
    Ok(FixedReducingSet {
        d_a,
        d_b,
        n,
        weights,
        support,
        phi: bases.a[..r].to_vec(),
        psi: bases.b[..r].to_vec(),
        coefficients,
        theta,
    })
}

impl FixedReducingSet {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of retained Schmidt terms.
    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    /// `s_t = sqrt(D_{support[t]} / n)`
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn phi(&self) -> &[CVector] {
        &self.phi
    }

    pub fn psi(&self) -> &[CVector] {
        &self.psi
    }

    pub fn coefficients(&self) -> &CMatrix {
        &self.coefficients
    }

    /// `Θ_jk` with `e^{iΘ_jk}/√n = (U†)_jk`, for any `j < n`.
    pub fn theta(&self, j: usize, k: usize) -> f64 {
        self.theta[j * self.n + k]
    }

    pub fn state(&self, k: usize) -> CVector {
        let mut out = CVector::zeros(self.d_a * self.d_b);
        for t in 0..self.rank() {
            let c = self.coefficients[(t, k)] * self.weights[t];
            out.axpy(c, &tensor_product(&self.phi[t], &self.psi[t]));
        }
        out
    }

    pub fn states(&self) -> Vec<CVector> {
        (0..self.n).map(|k| self.state(k)).collect()
    }

    fn local_marginal(&self, vectors: &[CVector], dim: usize) -> CMatrix {
        self.weights
            .iter()
            .zip(vectors)
            .fold(CMatrix::zeros(dim, dim), |acc, (w, v)| {
                &acc + &CMatrix::outer(v, v).scale(C64::new(w * w, 0.0))
            })
    }

    /// Shared `ρ_A = Σ_t s_t²·φ_tφ_t†`.
    pub fn rho_a(&self) -> CMatrix {
        self.local_marginal(&self.phi, self.d_a)
    }

    /// Shared `ρ_B = Σ_t s_t²·ψ_tψ_t†`.
    pub fn rho_b(&self) -> CMatrix {
        self.local_marginal(&self.psi, self.d_b)
    }

    /// The same set in general Schmidt form, `ψ_t^(k) = c_tk·ψ_t`.
    pub fn to_general(&self) -> Result<GeneralReducingSet> {
        let psi = (0..self.n)
            .map(|k| {
                (0..self.rank())
                    .map(|t| self.psi[t].scale(self.coefficients[(t, k)]))
                    .collect()
            })
            .collect();
        GeneralReducingSet::new(self.weights.clone(), self.phi.clone(), psi, 1e-9)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::{certify_hadamard_set, random_states_with_gram, CertifyOptions};
    use crate::hadamard::fourier_hadamard;
    use crate::linalg::{cis, reduced_a, reduced_b};
    use core::f64::consts::PI;

    fn certified(set: &StateSet) -> HadamardCertificate {
        certify_hadamard_set(set, &CertifyOptions::default())
            .into_certificate()
            .expect("certifies")
    }

    #[test]
    fn orthonormal_basis_gives_maximally_entangled_states() {
        for d in 2..=5 {
            let set = StateSet::new((0..d).map(|i| CVector::basis(d, i)).collect(), 1e-12).unwrap();
            let f = fourier_hadamard(d);
            let cert = HadamardCertificate::from_parts(f.matrix().clone(), alloc::vec![1.0; d], 1e-12).unwrap();
            let frs = fixed_reducing_states(&cert, &set, &Bases::standard(d, d)).unwrap();
            let s = 1.0 / (d as f64).sqrt();
            for k in 0..d {
                let psi = frs.state(k);
                for j in 0..d {
                    let expected = cis(-2.0 * PI * ((j * k) % d) as f64 / d as f64) * s;
                    assert!((psi[j * d + j] - expected).norm() < 1e-12);
                }
                let id = CMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
                assert!(reduced_a(&psi, d, d).unwrap().distance(&id) < 1e-12);
                assert!(reduced_b(&psi, d, d).unwrap().distance(&id) < 1e-12);
            }
        }
    }

    #[test]
    fn qubit_pair_preserves_gram_and_marginals() {
        let (r, theta) = (0.5, PI / 3.0);
        let g = CMatrix::from_row_major(
            2,
            2,
            alloc::vec![C64::new(1.0, 0.0), cis(-theta) * r, cis(theta) * r, C64::new(1.0, 0.0)],
        )
        .unwrap();
        let set = random_states_with_gram(&g, 2, 9).unwrap();
        let cert = certified(&set);
        let frs = fixed_reducing_states(&cert, &set, &Bases::standard(2, 2)).unwrap();
        assert_eq!(frs.rank(), 2);
        let weights: Vec<f64> = frs.weights().iter().map(|w| w * w).collect();
        assert!((weights[0] - 0.75).abs() < 1e-12 && (weights[1] - 0.25).abs() < 1e-12);
        let psi_set = StateSet::new(frs.states(), 1e-9).unwrap();
        assert!(gram_matrix(&psi_set).distance(&g) < 1e-9);
        for k in 0..2 {
            // coefficient moduli are exactly the Schmidt weights
            for t in 0..2 {
                assert!((frs.coefficients()[(t, k)].norm() - 1.0).abs() < 1e-12);
            }
            let psi = frs.state(k);
            assert!(reduced_a(&psi, 2, 2).unwrap().distance(&frs.rho_a()) < 1e-12);
            assert!(reduced_b(&psi, 2, 2).unwrap().distance(&frs.rho_b()) < 1e-12);
        }
    }

    #[test]
    fn theta_matches_adjoint_of_certificate() {
        let mut rng = crate::random::Rng::seed_from_u64(13);
        let f = fourier_hadamard(3);
        let d = [1.5, 1.0, 0.5];
        let g = f.matrix().matmul(&CMatrix::real_diagonal(&d)).matmul(&f.matrix().adjoint());
        let set = random_states_with_gram(&g, 4, rng.next_u64()).unwrap();
        let cert = certified(&set);
        let frs = fixed_reducing_states(&cert, &set, &Bases::standard(4, 3)).unwrap();
        let ud = cert.unitary.matrix().adjoint();
        for j in 0..3 {
            for k in 0..3 {
                let z = cis(frs.theta(j, k)) / 3f64.sqrt();
                assert!((z - ud[(j, k)]).norm() < 1e-12);
            }
        }
        let general = frs.to_general().unwrap();
        for k in 0..3 {
            assert!(general.state(k).distance(&frs.state(k)) < 1e-14);
        }
    }

    #[test]
    fn rank_deficient_set_drops_zero_terms() {
        let a = CVector::basis(2, 0);
        let set = StateSet::new(alloc::vec![a.clone(), a], 1e-12).unwrap();
        let cert = certified(&set);
        let frs = fixed_reducing_states(&cert, &set, &Bases::standard(2, 1)).unwrap();
        assert_eq!(frs.rank(), 1);
        assert!(frs.state(0).distance(&frs.state(1)) < 1e-12);
    }

    #[test]
    fn rejects_foreign_certificate_and_small_bases() {
        let set = StateSet::new((0..3).map(|i| CVector::basis(3, i)).collect(), 1e-12).unwrap();
        let f = fourier_hadamard(3);
        let wrong = HadamardCertificate::from_parts(f.matrix().clone(), alloc::vec![2.0, 1.0, 0.0], 1e-12).unwrap();
        assert!(matches!(
            fixed_reducing_states(&wrong, &set, &Bases::standard(3, 3)),
            Err(Error::CertificateMismatch(_))
        ));
        let right = HadamardCertificate::from_parts(f.matrix().clone(), alloc::vec![1.0; 3], 1e-12).unwrap();
        assert!(matches!(
            fixed_reducing_states(&right, &set, &Bases::standard(3, 2)),
            Err(Error::RankExceedsDimension { .. })
        ));
    }
}
