use alloc::vec::Vec;

use super::masker::{verify_masking, Masker};
use super::torus::maskable_with;
use super::CoefficientVector;
use crate::error::{Error, Result};
use crate::gram::{certify_hadamard_set, CertifyOptions, StateSet};
use crate::hadamard::principal_arg;
use crate::linalg::{cis, complete_isometry, tensor_product, CMatrix, CVector};
use crate::C64;

/// Below this, two Bloch vectors are taken to be the same point.
const DEGENERATE: f64 = 1e-9;

/// Masking data for a qubit pair together with one more qubit state.
///
/// The masker sends `q_j ⊗ e_0` to `e_j ⊗ e_j`, so any state `x` is mapped to
/// `Σ_j ⟨q_j|x⟩ e_j ⊗ e_j` with marginals `diag(|⟨q_j|x⟩|²)` on both sides.
/// The basis `{q_j}` is chosen so these moduli agree on all three states.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitSolution {
    /// `arg⟨q_1|t⟩`
    pub omega1: f64,
    /// `arg⟨q_2|t⟩`
    pub omega2: f64,
    /// `t = μ_1 a_1 + μ_2 a_2`
    pub mu: CoefficientVector,
    pub masker: Masker,
    /// `|⟨q_j|a_1⟩|²`, the shared marginal spectrum.
    pub weights: [f64; 2],
    pub basis: [CVector; 2],
    /// Whether the masker built from the pair's own Hadamard certificate
    /// already masks `t`.
    pub hadamard_masker_suffices: bool,
    /// Largest marginal deviation over the three masked states.
    pub deviation: f64,
}

fn bloch(v: &CVector) -> [f64; 3] {
    let (a, b) = (v[0], v[1]);
    let c = a.conj() * b;
    [2.0 * c.re, 2.0 * c.im, a.norm_sqr() - b.norm_sqr()]
}

fn sub(x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [x[0] - y[0], x[1] - y[1], x[2] - y[2]]
}

fn cross(x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ]
}

fn length(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// Some unit vector orthogonal to `x`.
fn perpendicular(x: [f64; 3]) -> [f64; 3] {
    let pick = if x[0].abs() <= x[1].abs() && x[0].abs() <= x[2].abs() {
        [1.0, 0.0, 0.0]
    } else if x[1].abs() <= x[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    cross(x, pick)
}

/// Axis along which all three Bloch vectors have the same component.
fn common_axis(b1: [f64; 3], b2: [f64; 3], b3: [f64; 3]) -> [f64; 3] {
    let normal = cross(sub(b2, b1), sub(b3, b1));
    let candidate = if length(normal) > DEGENERATE {
        normal
    } else {
        // t coincides with a member: any axis orthogonal to b1 − b2 will do
        let sum = [b1[0] + b2[0], b1[1] + b2[1], b1[2] + b2[2]];
        if length(sum) > DEGENERATE {
            sum
        } else {
            perpendicular(b1)
        }
    };
    let l = length(candidate);
    [candidate[0] / l, candidate[1] / l, candidate[2] / l]
}

/// Masks `{a_1, a_2, t}` for a linearly independent qubit pair and any unit
/// qubit `t`, and writes `t` as a combination of the pair.
pub fn solve_qubit_phases(set: &StateSet, third: &CVector, tol: f64) -> Result<QubitSolution> {
    if set.dim() != 2 || set.len() != 2 || third.dim() != 2 {
        return Err(Error::InvalidArgument("expected two qubit states and one qubit state"));
    }
    if (third.norm() - 1.0).abs() > tol.max(1e-9) {
        return Err(Error::NotNormalized {
            index: 2,
            norm: third.norm(),
        });
    }
    let (a1, a2) = (&set.states()[0], &set.states()[1]);
    let det = a1[0] * a2[1] - a1[1] * a2[0];
    if det.norm() <= DEGENERATE {
        return Err(Error::InvalidArgument("qubit pair is linearly dependent"));
    }
    // μ = [a_1 a_2]^{-1} t
    let mu = CoefficientVector(alloc::vec![
        (a2[1] * third[0] - a2[0] * third[1]) / det,
        (a1[0] * third[1] - a1[1] * third[0]) / det,
    ]);

    let axis = common_axis(bloch(a1), bloch(a2), bloch(third));
    let polar = axis[2].clamp(-1.0, 1.0).acos();
    let azimuth = axis[1].atan2(axis[0]);
    let (c, s) = ((polar / 2.0).cos(), (polar / 2.0).sin());
    let mut q1 = CVector::new(alloc::vec![C64::new(c, 0.0), cis(azimuth) * s]);
    let mut q2 = CVector::new(alloc::vec![-cis(-azimuth) * s, C64::new(c, 0.0)]);
    for q in [&mut q1, &mut q2] {
        let overlap = q.inner(a1);
        if overlap.norm() > DEGENERATE {
            *q = q.scale(overlap / overlap.norm());
        }
    }
    let weights = [q1.inner(a1).norm_sqr(), q2.inner(a1).norm_sqr()];
    let omega1 = principal_arg(q1.inner(third));
    let omega2 = principal_arg(q2.inner(third));

    let anchor = CVector::basis(2, 0);
    let v1 = CMatrix::from_columns(&[tensor_product(&q1, &anchor), tensor_product(&q2, &anchor)])?;
    let w1 = CMatrix::from_columns(&[
        tensor_product(&CVector::basis(2, 0), &CVector::basis(2, 0)),
        tensor_product(&CVector::basis(2, 1), &CVector::basis(2, 1)),
    ])?;
    let v = complete_isometry(&v1, 4, 1e-9)?;
    let w = complete_isometry(&w1, 4, 1e-9)?;
    let masker = Masker::new(w.matmul(&v.adjoint()), 2, 2, 0, 1e-9)?;

    let triple = set.with_state(third.clone(), 1e-9)?;
    let report = verify_masking(&masker, &triple, tol)?;
    if !report.pass {
        return Err(Error::Infeasible);
    }

    let hadamard_masker_suffices = match certify_hadamard_set(set, &CertifyOptions::default()).into_certificate() {
        Some(cert) => maskable_with(&cert, mu.as_slice(), 1e-8)?.maskable,
        None => false,
    };

    Ok(QubitSolution {
        omega1,
        omega2,
        mu,
        masker,
        weights,
        basis: [q1, q2],
        hadamard_masker_suffices,
        deviation: report.max_pairwise_deviation,
    })
}

impl QubitSolution {
    /// `t` rebuilt from `μ`.
    pub fn reconstruct(&self, set: &StateSet) -> Result<CVector> {
        set.combination(self.mu.as_slice())
    }

    /// Shared marginal spectrum, largest first.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut w = self.weights.to_vec();
        w.sort_by(|a, b| b.total_cmp(a));
        w
    }
}
