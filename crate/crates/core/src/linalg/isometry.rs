use alloc::vec::Vec;

use super::eigen::hermitian_eig;
use super::matrix::{CMatrix, CVector};
use crate::error::{Error, Result};
use crate::C64;

/// Removes from `v` its components along every vector of `basis`, twice
/// (classical Gram-Schmidt with one reorthogonalization pass).
fn project_out(v: &mut CVector, basis: &[CVector]) {
    for _ in 0..2 {
        for b in basis {
            let c = b.inner(v);
            v.axpy(-c, b);
        }
    }
}

/// Extends a matrix with orthonormal columns to a square unitary.
///
/// The first `v1.cols()` columns of the result are copied from `v1`
/// unchanged. Remaining columns come from orthonormalizing standard basis
/// vectors against the columns accumulated so far; at each step the basis
/// vector with the largest residual is taken (lowest index on ties).
pub fn complete_isometry(v1: &CMatrix, target_dim: usize, tol: f64) -> Result<CMatrix> {
    if v1.rows() != target_dim {
        return Err(Error::DimensionMismatch {
            expected: target_dim,
            got: v1.rows(),
        });
    }
    if v1.cols() > target_dim {
        return Err(Error::TooManyColumns {
            cols: v1.cols(),
            target: target_dim,
        });
    }
    let deviation = v1.isometry_deviation();
    if deviation > tol {
        return Err(Error::NotIsometry { deviation });
    }

    let mut basis = v1.columns();
    let mut used = alloc::vec![false; target_dim];
    while basis.len() < target_dim {
        let mut best: Option<(usize, CVector, f64)> = None;
        for (i, &taken) in used.iter().enumerate() {
            if taken {
                continue;
            }
            let mut r = CVector::basis(target_dim, i);
            project_out(&mut r, &basis);
            let n = r.norm();
            if best.as_ref().is_none_or(|(_, _, bn)| n > *bn + 1e-12) {
                best = Some((i, r, n));
            }
        }
        let (i, r, n) = best.expect("complement is non-empty");
        used[i] = true;
        let mut r = r.scale(C64::new(1.0 / n, 0.0));
        // one more pass against the accumulated columns after normalizing
        project_out(&mut r, &basis);
        basis.push(r.normalized());
    }
    let mut out = CMatrix::from_columns(&basis)?;
    for j in 0..v1.cols() {
        out.set_column(j, &v1.column(j));
    }
    Ok(out)
}

/// Orthonormalizes columns in order, dropping any whose residual norm is at
/// most `drop_tol`.
pub fn orthonormalize_columns(m: &CMatrix, drop_tol: f64) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::new();
    for j in 0..m.cols() {
        let mut v = m.column(j);
        project_out(&mut v, &basis);
        let n = v.norm();
        if n > drop_tol {
            basis.push(v.scale(C64::new(1.0 / n, 0.0)));
        }
    }
    basis
}

/// Unitary polar factor `Q` of a square matrix `A = Q·P`; this is the
/// unitary closest to `A` in Frobenius norm. Rank-deficient inputs get an
/// arbitrary (but deterministic) completion on the null space.
pub fn polar_unitary(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    let n = a.rows();
    // A†A = X Σ² X†, A X = W Σ, Q = W X†
    let eig = hermitian_eig(&a.adjoint().matmul(a), 1e-6)?;
    let x = eig.vectors;
    let sigma_max = eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    let ax = a.matmul(&x);
    let mut w_cols: Vec<CVector> = Vec::with_capacity(n);
    for j in 0..n {
        let sigma = eig.values[j].max(0.0).sqrt();
        if sigma <= 1e-10 * sigma_max.max(1e-300) {
            break;
        }
        let mut c = ax.column(j);
        project_out(&mut c, &w_cols);
        let norm = c.norm();
        if norm <= 1e-10 * sigma_max {
            break;
        }
        w_cols.push(c.scale(C64::new(1.0 / norm, 0.0)));
    }
    let w = if w_cols.is_empty() {
        CMatrix::identity(n)
    } else {
        let partial = CMatrix::from_columns(&w_cols)?;
        complete_isometry(&partial, n, 1e-8)?
    };
    Ok(w.matmul(&x.adjoint()))
}

/// Closest matrix with orthonormal columns (symmetric orthonormalization
/// `M·(M†M)^{-1/2}`). Fails if `M` has (numerically) dependent columns.
pub fn nearest_isometry(m: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eig(&m.adjoint().matmul(m), 1e-6)?;
    if let Some(&smallest) = eig.values.last() {
        if smallest <= 1e-14 * eig.values[0].max(1.0) {
            return Err(Error::NotIsometry { deviation: 1.0 });
        }
    }
    let k = m.cols();
    let inv_sqrt = CMatrix::from_fn(k, k, |i, j| eig.vectors[(i, j)] / eig.values[j].sqrt())
        .matmul(&eig.vectors.adjoint());
    Ok(m.matmul(&inv_sqrt))
}
