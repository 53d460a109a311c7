//! Complex Hadamard unitaries: `n × n` unitaries whose entries all have
//! modulus `1/√n`, written `u_jk = e^{iΘ_jk}/√n`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{cis, kron, CMatrix};
use crate::C64;

/// A Hadamard unitary together with its phase matrix `Θ`, each phase in
/// `(−π, π]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HadamardUnitary {
    matrix: CMatrix,
    phases: Vec<f64>,
}

/// Argument in `(−π, π]`.
pub(crate) fn principal_arg(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

impl HadamardUnitary {
    /// Validates `matrix` with [`is_hadamard_unitary`] at `tol`.
    pub fn from_matrix(matrix: CMatrix, tol: f64) -> Result<Self> {
        let check = is_hadamard_unitary(&matrix, tol);
        if !check.is_hadamard {
            return Err(Error::InvalidArgument("matrix is not a Hadamard unitary"));
        }
        Ok(Self::from_matrix_unchecked(matrix))
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        let phases = matrix.as_slice().iter().map(|&z| principal_arg(z)).collect();
        HadamardUnitary { matrix, phases }
    }

    /// Builds `e^{iΘ_jk}/√n` from a row-major `n × n` phase matrix.
    pub fn from_phases(n: usize, phases: &[f64]) -> Result<Self> {
        if phases.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: phases.len(),
            });
        }
        let s = 1.0 / (n as f64).sqrt();
        let matrix = CMatrix::from_fn(n, n, |j, k| cis(phases[j * n + k]) * s);
        Ok(Self::from_matrix_unchecked(matrix))
    }

    pub fn order(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `Θ_jk`
    pub fn phase(&self, j: usize, k: usize) -> f64 {
        self.phases[j * self.order() + k]
    }

    /// Row-major phase matrix.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// The conjugate transpose, which is again a Hadamard unitary.
    pub fn adjoint(&self) -> HadamardUnitary {
        Self::from_matrix_unchecked(self.matrix.adjoint())
    }
}

/// Fourier matrix `F_jk = e^{2πi·jk/n}/√n`.
pub fn fourier_hadamard(n: usize) -> HadamardUnitary {
    assert!(n >= 1, "order must be positive");
    let s = 1.0 / (n as f64).sqrt();
    let matrix = CMatrix::from_fn(n, n, |j, k| {
        // reduce jk mod n first so large orders keep exact phases
        let m = (j * k) % n;
        cis(2.0 * PI * m as f64 / n as f64) * s
    });
    HadamardUnitary::from_matrix_unchecked(matrix)
}

/// `k`-fold tensor power of the real 2×2 Hadamard matrix.
pub fn sylvester_hadamard(k: u32) -> HadamardUnitary {
    let s = 0.5f64.sqrt();
    let h2 = CMatrix::from_row_major(
        2,
        2,
        alloc::vec![
            C64::new(s, 0.0),
            C64::new(s, 0.0),
            C64::new(s, 0.0),
            C64::new(-s, 0.0)
        ],
    )
    .expect("2x2");
    let matrix = (0..k).fold(CMatrix::identity(1), |acc, _| kron(&acc, &h2));
    HadamardUnitary::from_matrix_unchecked(matrix)
}

/// The qubit family `U(ω₁, ω₂) = (1/√2)[[e^{iω₁}, e^{iω₂}], [e^{i(ω₁+θ)}, −e^{i(ω₂+θ)}]]`.
///
/// Its columns are the eigenvectors of `[[1, r·e^{−iθ}], [r·e^{iθ}, 1]]` for
/// eigenvalues `1+r` and `1−r`, for every `r`.
pub fn qubit_family(theta: f64, omega1: f64, omega2: f64) -> HadamardUnitary {
    let s = 0.5f64.sqrt();
    let matrix = CMatrix::from_row_major(
        2,
        2,
        alloc::vec![
            cis(omega1) * s,
            cis(omega2) * s,
            cis(omega1 + theta) * s,
            -cis(omega2 + theta) * s,
        ],
    )
    .expect("2x2");
    HadamardUnitary::from_matrix_unchecked(matrix)
}

/// Deviations reported by [`is_hadamard_unitary`].
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct HadamardCheck {
    /// `max_jk | |u_jk| − 1/√n |`
    pub modulus_deviation: f64,
    /// `‖U†U − I‖_F`
    pub unitarity_deviation: f64,
    pub is_hadamard: bool,
}

pub fn is_hadamard_unitary(m: &CMatrix, tol: f64) -> HadamardCheck {
    if !m.is_square() || m.rows() == 0 {
        return HadamardCheck {
            modulus_deviation: f64::INFINITY,
            unitarity_deviation: f64::INFINITY,
            is_hadamard: false,
        };
    }
    let target = 1.0 / (m.rows() as f64).sqrt();
    let modulus_deviation = m
        .as_slice()
        .iter()
        .map(|z| (z.norm() - target).abs())
        .fold(0.0, f64::max);
    let unitarity_deviation = m.unitarity_deviation();
    HadamardCheck {
        modulus_deviation,
        unitarity_deviation,
        is_hadamard: modulus_deviation <= tol && unitarity_deviation <= tol,
    }
}

fn unit_phase(z: C64) -> C64 {
    let n = z.norm();
    if n == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / n
    }
}

/// Dephased normal form: first row and first column real positive.
///
/// Applied in a fixed order: the global phase making entry (0,0) real
/// positive, then row phases (first column), then column phases (first row).
/// The result is unchanged by left/right multiplication of the input with
/// diagonal unitaries.
pub fn dephase(u: &HadamardUnitary) -> HadamardUnitary {
    let n = u.order();
    let global = unit_phase(u.matrix[(0, 0)]).conj();
    let mut m = u.matrix.scale(global);
    for i in 0..n {
        let p = unit_phase(m[(i, 0)]).conj();
        for j in 0..n {
            m[(i, j)] *= p;
        }
    }
    for j in 0..n {
        let p = unit_phase(m[(0, j)]).conj();
        for i in 0..n {
            m[(i, j)] *= p;
        }
    }
    HadamardUnitary::from_matrix_unchecked(m)
}
