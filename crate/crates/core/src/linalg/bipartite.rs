use alloc::vec::Vec;

use super::eigen::hermitian_eig;
use super::matrix::{CMatrix, CVector};
use crate::error::{Error, Result};
use crate::C64;

/// One factor of a bipartite space `C^{d_A} ⊗ C^{d_B}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Kronecker product: entry `i·d₂ + j` is `u_i·v_j`.
pub fn tensor_product(u: &CVector, v: &CVector) -> CVector {
    u.iter()
        .flat_map(|a| v.iter().map(move |b| a * b))
        .collect()
}

/// Kronecker product of matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.rows() * b.rows(), a.cols() * b.cols(), |i, j| {
        a[(i / b.rows(), j / b.cols())] * b[(i % b.rows(), j % b.cols())]
    })
}

fn check_dims(psi: &CVector, d_a: usize, d_b: usize) -> Result<()> {
    if psi.dim() != d_a * d_b {
        return Err(Error::DimensionMismatch {
            expected: d_a * d_b,
            got: psi.dim(),
        });
    }
    Ok(())
}

/// Traces `traced` out of `|ψ⟩⟨ψ|`, returning the reduced density matrix of
/// the other factor. Its trace is `‖ψ‖²`.
pub fn partial_trace(psi: &CVector, d_a: usize, d_b: usize, traced: Subsystem) -> Result<CMatrix> {
    check_dims(psi, d_a, d_b)?;
    let amp = |i: usize, j: usize| psi[i * d_b + j];
    Ok(match traced {
        Subsystem::B => CMatrix::from_fn(d_a, d_a, |i, k| {
            (0..d_b).map(|j| amp(i, j) * amp(k, j).conj()).sum()
        }),
        Subsystem::A => CMatrix::from_fn(d_b, d_b, |j, l| {
            (0..d_a).map(|i| amp(i, j) * amp(i, l).conj()).sum()
        }),
    })
}

/// `ρ_A = Tr_B |ψ⟩⟨ψ|`
pub fn reduced_a(psi: &CVector, d_a: usize, d_b: usize) -> Result<CMatrix> {
    partial_trace(psi, d_a, d_b, Subsystem::B)
}

/// `ρ_B = Tr_A |ψ⟩⟨ψ|`
pub fn reduced_b(psi: &CVector, d_a: usize, d_b: usize) -> Result<CMatrix> {
    partial_trace(psi, d_a, d_b, Subsystem::A)
}

/// `ψ = Σ_j weights[j] · left[j] ⊗ right[j]` with orthonormal factors and
/// strictly positive weights sorted descending.
#[derive(Clone, Debug, PartialEq)]
pub struct Schmidt {
    pub weights: Vec<f64>,
    pub left: Vec<CVector>,
    pub right: Vec<CVector>,
}

impl Schmidt {
    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn reconstruct(&self, d_a: usize, d_b: usize) -> CVector {
        let mut psi = CVector::zeros(d_a * d_b);
        for ((w, l), r) in self.weights.iter().zip(&self.left).zip(&self.right) {
            psi.axpy(C64::new(*w, 0.0), &tensor_product(l, r));
        }
        psi
    }
}

/// Schmidt decomposition of a bipartite vector. Weights at or below `tol`
/// are dropped.
///
/// The left vectors are eigenvectors of `ρ_A`; each right vector is
/// `Mᵀ·conj(left_j)` normalized, where `M` is `ψ` reshaped to `d_A × d_B`,
/// and its norm is taken as the weight.
pub fn schmidt_decompose(psi: &CVector, d_a: usize, d_b: usize, tol: f64) -> Result<Schmidt> {
    check_dims(psi, d_a, d_b)?;
    let rho_a = reduced_a(psi, d_a, d_b)?;
    let eig = hermitian_eig(&rho_a, 1e-9)?;

    let mut terms: Vec<(f64, CVector, CVector)> = Vec::new();
    for j in 0..d_a {
        let left = eig.vectors.column(j);
        let unnormalized: CVector = (0..d_b)
            .map(|b| (0..d_a).map(|a| psi[a * d_b + b] * left[a].conj()).sum())
            .collect();
        let weight = unnormalized.norm();
        if weight > tol {
            let right = unnormalized.scale(C64::new(1.0 / weight, 0.0));
            terms.push((weight, left, right));
        }
    }
    terms.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut out = Schmidt {
        weights: Vec::with_capacity(terms.len()),
        left: Vec::with_capacity(terms.len()),
        right: Vec::with_capacity(terms.len()),
    };
    for (w, l, r) in terms {
        out.weights.push(w);
        out.left.push(l);
        out.right.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_unit_vector, random_unitary, Rng};

    fn bell() -> CVector {
        let s = 1.0 / 2f64.sqrt();
        CVector::from_real(&[s, 0.0, 0.0, s])
    }

    #[test]
    fn basis_tensor_product() {
        let e1 = CVector::basis(2, 1);
        let e0 = CVector::basis(2, 0);
        assert_eq!(tensor_product(&e1, &e0), CVector::basis(4, 2));
    }

    #[test]
    fn tensor_product_matches_outer_product_reshape() {
        let mut rng = Rng::seed_from_u64(11);
        let u = random_unit_vector(&mut rng, 3);
        let v = random_unit_vector(&mut rng, 4);
        let w = tensor_product(&u, &v);
        assert!((w.norm() - 1.0).abs() < 1e-14);
        for i in 0..3 {
            for j in 0..4 {
                assert!((w[i * 4 + j] - u[i] * v[j]).norm() == 0.0);
            }
        }
    }

    #[test]
    fn bell_marginals_are_maximally_mixed() {
        let half = CMatrix::identity(2).scale(C64::new(0.5, 0.0));
        assert!(reduced_a(&bell(), 2, 2).unwrap().distance(&half) < 1e-15);
        assert!(reduced_b(&bell(), 2, 2).unwrap().distance(&half) < 1e-15);
    }

    #[test]
    fn product_state_marginals() {
        let mut rng = Rng::seed_from_u64(5);
        let u = random_unit_vector(&mut rng, 3);
        let v = random_unit_vector(&mut rng, 2);
        let psi = tensor_product(&u, &v);
        assert!(reduced_a(&psi, 3, 2).unwrap().distance(&CMatrix::outer(&u, &u)) < 1e-14);
        assert!(reduced_b(&psi, 3, 2).unwrap().distance(&CMatrix::outer(&v, &v)) < 1e-14);
    }

    #[test]
    fn schmidt_form_marginal_spectrum() {
        let mut rng = Rng::seed_from_u64(9);
        let phi = random_unitary(&mut rng, 2);
        let psi_basis = random_unitary(&mut rng, 2);
        let weights = [0.75f64.sqrt(), 0.25f64.sqrt()];
        let mut psi = CVector::zeros(4);
        for (j, &w) in weights.iter().enumerate() {
            psi.axpy(
                C64::new(w, 0.0),
                &tensor_product(&phi.column(j), &psi_basis.column(j)),
            );
        }
        let eig = hermitian_eig(&reduced_b(&psi, 2, 2).unwrap(), 1e-9).unwrap();
        assert!((eig.values[0] - 0.75).abs() < 1e-14);
        assert!((eig.values[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn schmidt_examples() {
        let s = schmidt_decompose(&bell(), 2, 2, 1e-9).unwrap();
        assert_eq!(s.rank(), 2);
        for w in &s.weights {
            assert!((w - 0.5f64.sqrt()).abs() < 1e-14);
        }
        let mut rng = Rng::seed_from_u64(1);
        let prod = tensor_product(&random_unit_vector(&mut rng, 3), &random_unit_vector(&mut rng, 3));
        let s = schmidt_decompose(&prod, 3, 3, 1e-9).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.weights[0] - 1.0).abs() < 1e-12);
        assert!(s.reconstruct(3, 3).distance(&prod) < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(partial_trace(&CVector::zeros(5), 2, 2, Subsystem::A).is_err());
        assert!(schmidt_decompose(&CVector::zeros(5), 2, 3, 1e-9).is_err());
    }
}
