use alloc::vec::Vec;

use super::matrix::{CMatrix, CVector};
use crate::error::{Error, Result};
use crate::C64;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (descending) and eigenvector columns of a Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// `E·diag(values)·E†`
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let scaled = CMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * self.values[j]);
        scaled.matmul(&self.vectors.adjoint())
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Eigenvalues come out sorted descending (stable in the original diagonal
/// order for ties). Each eigenvector is phase-canonicalized so that its first
/// entry of largest modulus is real and positive.
pub fn hermitian_eig(h: &CMatrix, tol: f64) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.rows(),
            got: h.cols(),
        });
    }
    let n = h.rows();
    let scale = h.frobenius_norm().max(1.0);
    let deviation = h.hermiticity_deviation();
    if deviation > tol * scale {
        return Err(Error::NotHermitian { deviation });
    }

    // symmetrize before iterating
    let mut a = CMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);

    let mut previous_off = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        // stop at round-off level or once sweeps stop making progress
        if off <= f64::EPSILON * scale || (off < 1e-12 * scale && off > 0.5 * previous_off) {
            break;
        }
        previous_off = off;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = v.select_columns(&order);
    for j in 0..n {
        let col = canonical_phase(&vectors.column(j));
        vectors.set_column(j, &col);
    }
    Ok(HermitianEigen { values, vectors })
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let h = a[(p, q)];
    let habs = h.norm();
    if habs == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = h / habs;

    let theta = (aqq - app) / (2.0 * habs);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = diag(1, conj(phase)) · [[c, s], [-s, c]]
    let j00 = C64::new(c, 0.0);
    let j01 = C64::new(s, 0.0);
    let j10 = phase.conj() * (-s);
    let j11 = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j00 + akq * j10;
        a[(k, q)] = akp * j01 + akq * j11;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j00.conj() * apk + j10.conj() * aqk;
        a[(q, k)] = j01.conj() * apk + j11.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(app - t * habs, 0.0);
    a[(q, q)] = C64::new(aqq + t * habs, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j00 + vkq * j10;
        v[(k, q)] = vkp * j01 + vkq * j11;
    }
}

/// Rotates the global phase of `v` so its first entry of (numerically)
/// largest modulus is real and positive.
pub fn canonical_phase(v: &CVector) -> CVector {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v.clone();
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max - 1e-9 * max.max(1.0))
        .unwrap_or(0);
    let z = v[pivot];
    v.scale(z.conj() / z.norm())
}

/// Eigenvalues of a positive semidefinite matrix, sorted descending, with
/// round-off negatives clamped to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Fails if any value is below `-tol`.
    pub fn from_values(mut values: Vec<f64>, tol: f64) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|&&x| x < -tol) {
            return Err(Error::NegativeEigenvalue { value: bad });
        }
        for x in values.iter_mut() {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Spectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of values above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.values.iter().filter(|&&x| x > tol).count()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// One eigenspace: a (grouped) eigenvalue and an orthonormal basis for it.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenspace {
    pub value: f64,
    /// Positions of the member eigenvalues in the sorted spectrum.
    pub indices: Vec<usize>,
    pub basis: CMatrix,
}

impl Eigenspace {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Orthogonal projector `B·B†` onto the eigenspace.
    pub fn projector(&self) -> CMatrix {
        self.basis.matmul(&self.basis.adjoint())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenspaceGrouping {
    pub groups: Vec<Eigenspace>,
}

impl EigenspaceGrouping {
    pub fn dims(&self) -> Vec<usize> {
        self.groups.iter().map(Eigenspace::dim).collect()
    }

    /// `Σ_i ω_i P_i`
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.groups.first().map_or(0, |g| g.basis.rows());
        self.groups.iter().fold(CMatrix::zeros(n, n), |acc, g| {
            &acc + &g.projector().scale(C64::new(g.value, 0.0))
        })
    }

    /// Sum of the projectors of all groups with `|ω| > tol`.
    pub fn support_projector(&self, tol: f64) -> CMatrix {
        let n = self.groups.first().map_or(0, |g| g.basis.rows());
        self.groups
            .iter()
            .filter(|g| g.value.abs() > tol)
            .fold(CMatrix::zeros(n, n), |acc, g| &acc + &g.projector())
    }
}

/// Merges consecutive (descending) eigenvalues that differ by at most
/// `grouping_tol` into one eigenspace.
pub fn group_eigenspaces(values: &[f64], vectors: &CMatrix, grouping_tol: f64) -> EigenspaceGrouping {
    let mut groups: Vec<Eigenspace> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let flush = |current: &mut Vec<usize>, groups: &mut Vec<Eigenspace>| {
        if current.is_empty() {
            return;
        }
        let value = current.iter().map(|&i| values[i]).sum::<f64>() / current.len() as f64;
        groups.push(Eigenspace {
            value,
            basis: vectors.select_columns(current),
            indices: core::mem::take(current),
        });
    };
    for i in 0..values.len() {
        if let Some(&last) = current.last() {
            if (values[last] - values[i]).abs() > grouping_tol {
                flush(&mut current, &mut groups);
            }
        }
        current.push(i);
    }
    flush(&mut current, &mut groups);
    EigenspaceGrouping { groups }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cis;
    use crate::random::{random_hermitian, Rng};

    #[test]
    fn qubit_gram_eigenvalues_are_one_plus_minus_r() {
        let (r, theta) = (0.37, 1.1);
        let g = CMatrix::from_row_major(
            2,
            2,
            alloc::vec![
                C64::new(1.0, 0.0),
                cis(-theta) * r,
                cis(theta) * r,
                C64::new(1.0, 0.0)
            ],
        )
        .unwrap();
        let eig = hermitian_eig(&g, 1e-9).unwrap();
        assert!((eig.values[0] - (1.0 + r)).abs() < 1e-14);
        assert!((eig.values[1] - (1.0 - r)).abs() < 1e-14);
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let eig = hermitian_eig(&CMatrix::identity(4), 1e-9).unwrap();
        assert!(eig.values.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        assert!(eig.vectors.unitarity_deviation() < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = Rng::seed_from_u64(7);
        for n in 1..=12 {
            let h = random_hermitian(&mut rng, n);
            let eig = hermitian_eig(&h, 1e-9).unwrap();
            assert!(eig.reconstruct().distance(&h) <= 1e-10);
            assert!(eig.vectors.unitarity_deviation() <= 1e-10);
            assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigenvectors_are_phase_canonical() {
        let mut rng = Rng::seed_from_u64(3);
        let h = random_hermitian(&mut rng, 5);
        let eig = hermitian_eig(&h, 1e-9).unwrap();
        for j in 0..5 {
            let c = eig.vectors.column(j);
            let max = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let pivot = c.iter().find(|z| z.norm() >= max - 1e-9).unwrap();
            assert!(pivot.im.abs() < 1e-15 && pivot.re > 0.0);
        }
    }

    #[test]
    fn grouping_examples() {
        let e = CMatrix::identity(4);
        assert_eq!(group_eigenspaces(&[1.0, 1.0], &CMatrix::identity(2), 1e-8).dims(), [2]);
        assert_eq!(group_eigenspaces(&[1.5, 0.5], &CMatrix::identity(2), 1e-8).dims(), [1, 1]);
        assert_eq!(group_eigenspaces(&[2.0, 1.0, 1.0, 0.0], &e, 1e-8).dims(), [1, 2, 1]);
    }

    #[test]
    fn spectrum_clamps_roundoff_and_rejects_negatives() {
        let s = Spectrum::from_values(alloc::vec![0.5, -1e-12, 1.5], 1e-9).unwrap();
        assert_eq!(s.values(), &[1.5, 0.5, 0.0]);
        assert_eq!(s.rank(1e-9), 2);
        assert!(Spectrum::from_values(alloc::vec![1.0, -0.1], 1e-9).is_err());
    }
}
