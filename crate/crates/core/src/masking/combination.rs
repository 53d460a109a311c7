use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{reduced_a, reduced_b, tensor_product, CMatrix, CVector};
use crate::C64;

/// `Σ_k μ_k · states[k]`, not normalized.
pub fn combine(states: &[CVector], mu: &[C64]) -> Result<CVector> {
    if states.len() != mu.len() {
        return Err(Error::DimensionMismatch {
            expected: states.len(),
            got: mu.len(),
        });
    }
    let dim = states.first().map_or(0, CVector::dim);
    let mut out = CVector::zeros(dim);
    for (s, m) in states.iter().zip(mu) {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: s.dim(),
            });
        }
        out.axpy(*m, s);
    }
    Ok(out)
}

fn orthonormality_deviation(vectors: &[CVector]) -> f64 {
    let mut dev = 0.0f64;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((a.inner(b) - C64::new(target, 0.0)).norm());
        }
    }
    dev
}

/// A fixed-reducing set in its general Schmidt form
///
/// ```text
/// Ψ_k = Σ_j λ_j · φ_j ⊗ ψ_j^(k)
/// ```
///
/// with one orthonormal `{φ_j}` shared by all members and, per member, an
/// orthonormal `{ψ_j^(k)}` spanning the same eigenspaces of `ρ_B`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralReducingSet {
    d_a: usize,
    d_b: usize,
    weights: Vec<f64>,
    phi: Vec<CVector>,
    /// `psi[k][j] = ψ_j^(k)`
    psi: Vec<Vec<CVector>>,
}

impl GeneralReducingSet {
    /// Validates shapes, positivity of the weights, orthonormality of the
    /// local vectors, and that every member has the same `ρ_B` within `tol`.
    pub fn new(weights: Vec<f64>, phi: Vec<CVector>, psi: Vec<Vec<CVector>>, tol: f64) -> Result<Self> {
        let r = weights.len();
        if r == 0 {
            return Err(Error::InvalidArgument("at least one Schmidt term is required"));
        }
        if psi.is_empty() {
            return Err(Error::EmptySet);
        }
        if weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::InvalidArgument("Schmidt weights must be positive"));
        }
        if phi.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: phi.len(),
            });
        }
        let d_a = phi[0].dim();
        let d_b = psi[0].first().map_or(0, CVector::dim);
        if phi.iter().any(|v| v.dim() != d_a) {
            return Err(Error::InvalidArgument("φ vectors must share one dimension"));
        }
        let deviation = orthonormality_deviation(&phi);
        if deviation > tol {
            return Err(Error::NotIsometry { deviation });
        }
        for member in &psi {
            if member.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    got: member.len(),
                });
            }
            if member.iter().any(|v| v.dim() != d_b) {
                return Err(Error::InvalidArgument("ψ vectors must share one dimension"));
            }
            let deviation = orthonormality_deviation(member);
            if deviation > tol {
                return Err(Error::NotIsometry { deviation });
            }
        }
        let set = GeneralReducingSet {
            d_a,
            d_b,
            weights,
            phi,
            psi,
        };
        let reference = set.member_rho_b(0);
        for k in 1..set.len() {
            if set.member_rho_b(k).distance(&reference) > tol {
                return Err(Error::InvalidArgument("members do not share the B marginal"));
            }
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn phi(&self) -> &[CVector] {
        &self.phi
    }

    /// `ψ_j^(k)` for all `j`.
    pub fn psi(&self, k: usize) -> &[CVector] {
        &self.psi[k]
    }

    fn member_rho_b(&self, k: usize) -> CMatrix {
        self.weights
            .iter()
            .zip(&self.psi[k])
            .fold(CMatrix::zeros(self.d_b, self.d_b), |acc, (w, v)| {
                &acc + &CMatrix::outer(v, v).scale(C64::new(w * w, 0.0))
            })
    }

    /// Shared `ρ_A = Σ_j λ_j² φ_jφ_j†`.
    pub fn rho_a(&self) -> CMatrix {
        self.weights
            .iter()
            .zip(&self.phi)
            .fold(CMatrix::zeros(self.d_a, self.d_a), |acc, (w, v)| {
                &acc + &CMatrix::outer(v, v).scale(C64::new(w * w, 0.0))
            })
    }

    /// Shared `ρ_B`.
    pub fn rho_b(&self) -> CMatrix {
        self.member_rho_b(0)
    }

    /// Assembles `Ψ_k`.
    pub fn state(&self, k: usize) -> CVector {
        let mut out = CVector::zeros(self.d_a * self.d_b);
        for ((w, phi), psi) in self.weights.iter().zip(&self.phi).zip(&self.psi[k]) {
            out.axpy(C64::new(*w, 0.0), &tensor_product(phi, psi));
        }
        out
    }

    pub fn states(&self) -> Vec<CVector> {
        (0..self.len()).map(|k| self.state(k)).collect()
    }

    /// `ψ_j(μ) = Σ_k μ_k ψ_j^(k)` for every `j`.
    pub fn combined_right_vectors(&self, mu: &[C64]) -> Result<Vec<CVector>> {
        if mu.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: mu.len(),
            });
        }
        Ok((0..self.rank())
            .map(|j| {
                let mut v = CVector::zeros(self.d_b);
                for (m, member) in mu.iter().zip(&self.psi) {
                    v.axpy(*m, &member[j]);
                }
                v
            })
            .collect())
    }

    /// Largest Frobenius deviation of the marginals of `Ψ(μ)` from the
    /// shared `ρ_A`, `ρ_B`, computed by brute-force partial traces.
    pub fn marginal_deviation(&self, mu: &[C64]) -> Result<f64> {
        let psi_mu = combine(&self.states(), mu)?;
        let da = reduced_a(&psi_mu, self.d_a, self.d_b)?.distance(&self.rho_a());
        let db = reduced_b(&psi_mu, self.d_a, self.d_b)?.distance(&self.rho_b());
        Ok(da.max(db))
    }
}

/// Outcome of [`combination_condition`].
#[derive(Clone, Debug, PartialEq)]
pub struct CombinationReport {
    /// `overlaps[(j', j)] = ⟨ψ_j'(μ)|ψ_j(μ)⟩`
    pub overlaps: CMatrix,
    /// `max_{j',j} |overlaps − δ|`
    pub deviation: f64,
    pub holds: bool,
}

/// Checks whether `Ψ(μ) = Σ_k μ_k Ψ_k` shares the marginals of the set:
/// this holds exactly when the combined right vectors `ψ_j(μ)` are
/// orthonormal.
pub fn combination_condition(set: &GeneralReducingSet, mu: &[C64], tol: f64) -> Result<CombinationReport> {
    let right = set.combined_right_vectors(mu)?;
    let r = right.len();
    let overlaps = CMatrix::from_fn(r, r, |jp, j| right[jp].inner(&right[j]));
    let deviation = overlaps.max_abs_diff(&CMatrix::identity(r));
    Ok(CombinationReport {
        overlaps,
        deviation,
        holds: deviation <= tol,
    })
}
