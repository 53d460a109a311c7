use alloc::vec::Vec;

use super::frs::FixedReducingSet;
use crate::error::{Error, Result};
use crate::gram::{HadamardCertificate, StateSet};
use crate::linalg::{
    complete_isometry, nearest_isometry, reduced_a, reduced_b, tensor_product, CMatrix, CVector,
};
use crate::random::{random_unitary, Rng};
use crate::C64;

/// Isometry defect tolerated before cleanup; larger values mean the inputs
/// do not belong together.
const FRAME_TOL: f64 = 1e-6;

/// A unitary on `C^{d_A} ⊗ C^{d_B}` used as `a ↦ M(a ⊗ e_anchor)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Masker {
    matrix: CMatrix,
    d_a: usize,
    d_b: usize,
    anchor_index: usize,
}

impl Masker {
    /// Validates the shape and unitarity (within `tol`) of `matrix`.
    pub fn new(matrix: CMatrix, d_a: usize, d_b: usize, anchor_index: usize, tol: f64) -> Result<Self> {
        let order = d_a * d_b;
        if matrix.rows() != order || matrix.cols() != order {
            return Err(Error::DimensionMismatch {
                expected: order,
                got: matrix.rows().max(matrix.cols()),
            });
        }
        if anchor_index >= d_b {
            return Err(Error::InvalidArgument("anchor index out of range"));
        }
        let deviation = matrix.unitarity_deviation();
        if deviation > tol {
            return Err(Error::NotIsometry { deviation });
        }
        Ok(Masker {
            matrix,
            d_a,
            d_b,
            anchor_index,
        })
    }

    pub fn identity(d_a: usize, d_b: usize) -> Self {
        Masker {
            matrix: CMatrix::identity(d_a * d_b),
            d_a,
            d_b,
            anchor_index: 0,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    pub fn anchor_index(&self) -> usize {
        self.anchor_index
    }

    pub fn anchor(&self) -> CVector {
        CVector::basis(self.d_b, self.anchor_index)
    }

    /// `a ⊗ e_anchor`
    pub fn embed(&self, a: &CVector) -> Result<CVector> {
        if a.dim() != self.d_a {
            return Err(Error::DimensionMismatch {
                expected: self.d_a,
                got: a.dim(),
            });
        }
        Ok(tensor_product(a, &self.anchor()))
    }

    /// `M(a ⊗ e_anchor)`
    pub fn apply(&self, a: &CVector) -> Result<CVector> {
        Ok(self.matrix.mul_vec(&self.embed(a)?))
    }
}

/// A masker together with the frames it was assembled from: `M = W·V†`
/// where the first `rank` columns of `V` and `W` span the inputs and the
/// fixed-reducing states respectively.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskerConstruction {
    pub masker: Masker,
    pub input_frame: CMatrix,
    pub output_frame: CMatrix,
    pub rank: usize,
}

/// The masker of a certified set, with deterministic completion.
pub fn build_masker(set: &StateSet, cert: &HadamardCertificate, frs: &FixedReducingSet) -> Result<Masker> {
    build_masker_with(set, cert, frs, None).map(|c| c.masker)
}

/// Builds `M = W·V†` from
///
/// ```text
/// V₁ = Ã·U₊·D₊^{-1/2},   W₁ = Ψ̃·U₊·D₊^{-1/2}
/// ```
///
/// where `Ã` has columns `a_k ⊗ e_0`, `Ψ̃` has columns `Ψ_k`, and `U₊`, `D₊`
/// keep the certificate's eigenpairs on the support of the Gram matrix.
///
/// Both frames are completed to unitaries. The completion is the
/// deterministic one of [`complete_isometry`] unless `completion_seed` is
/// given, in which case the complement of `V` is rotated by a seeded random
/// unitary. Any choice maps every `a_k ⊗ e_0` to `Ψ_k`.
pub fn build_masker_with(
    set: &StateSet,
    cert: &HadamardCertificate,
    frs: &FixedReducingSet,
    completion_seed: Option<u64>,
) -> Result<MaskerConstruction> {
    let (d_a, d_b) = frs.dims();
    if set.dim() != d_a {
        return Err(Error::DimensionMismatch {
            expected: d_a,
            got: set.dim(),
        });
    }
    if set.len() != frs.len() || cert.order() != set.len() {
        return Err(Error::DimensionMismatch {
            expected: set.len(),
            got: frs.len().min(cert.order()),
        });
    }
    let support = frs.support();
    let rank = support.len();
    let order = d_a * d_b;
    if rank > order {
        return Err(Error::RankExceedsDimension { rank, dim: order });
    }

    let anchor = CVector::basis(d_b, 0);
    let embedded: Vec<CVector> = set.states().iter().map(|a| tensor_product(a, &anchor)).collect();
    let a_tilde = CMatrix::from_columns(&embedded)?;
    let psi_tilde = CMatrix::from_columns(&frs.states())?;

    let spectrum = cert.spectrum.values();
    let u = cert.unitary.matrix();
    let n = set.len();
    let scaled = CMatrix::from_fn(n, rank, |k, t| u[(k, support[t])] / spectrum[support[t]].sqrt());
    let v1 = a_tilde.matmul(&scaled);
    let w1 = psi_tilde.matmul(&scaled);
    for frame in [&v1, &w1] {
        let deviation = frame.isometry_deviation();
        if deviation > FRAME_TOL {
            return Err(Error::NotIsometry { deviation });
        }
    }

    let mut v = complete_isometry(&nearest_isometry(&v1)?, order, 1e-9)?;
    let w = complete_isometry(&nearest_isometry(&w1)?, order, 1e-9)?;
    if let Some(seed) = completion_seed {
        let extra = order - rank;
        if extra > 1 {
            let q = random_unitary(&mut Rng::seed_from_u64(seed), extra);
            let tail = CMatrix::from_fn(order, extra, |i, j| v[(i, rank + j)]).matmul(&q);
            for j in 0..extra {
                v.set_column(rank + j, &tail.column(j));
            }
        }
    }

    let matrix = w.matmul(&v.adjoint());
    let masker = Masker::new(matrix, d_a, d_b, 0, 1e-9)?;
    Ok(MaskerConstruction {
        masker,
        input_frame: v,
        output_frame: w,
        rank,
    })
}

/// Frobenius distances of one state's marginals from the reference ones.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct StateDeviation {
    pub a: f64,
    pub b: f64,
}

/// Marginals of masked states and how far each one is from the first.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskingReport {
    /// Reduced state on A of the first masked state.
    pub rho_a: CMatrix,
    /// Reduced state on B of the first masked state.
    pub rho_b: CMatrix,
    pub masked_states: Vec<CVector>,
    pub per_state_deviations: Vec<StateDeviation>,
    pub max_pairwise_deviation: f64,
    pub pass: bool,
}

/// Applies `masker` to every member of `set` and compares the marginals.
pub fn verify_masking(masker: &Masker, set: &StateSet, tol: f64) -> Result<MaskingReport> {
    let masked = set
        .states()
        .iter()
        .map(|a| masker.apply(a))
        .collect::<Result<Vec<_>>>()?;
    let (d_a, d_b) = masker.dims();
    verify_masked_states(masked, d_a, d_b, tol)
}

/// Compares the marginals of already-masked bipartite vectors. The vectors
/// are not renormalized, so a scaled state shows up as a deviation.
pub fn verify_masked_states(masked_states: Vec<CVector>, d_a: usize, d_b: usize, tol: f64) -> Result<MaskingReport> {
    if masked_states.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut marginals = Vec::with_capacity(masked_states.len());
    for psi in &masked_states {
        marginals.push((reduced_a(psi, d_a, d_b)?, reduced_b(psi, d_a, d_b)?));
    }
    let (rho_a, rho_b) = marginals[0].clone();
    let per_state_deviations: Vec<StateDeviation> = marginals
        .iter()
        .map(|(ra, rb)| StateDeviation {
            a: ra.distance(&rho_a),
            b: rb.distance(&rho_b),
        })
        .collect();
    let max_pairwise_deviation = per_state_deviations
        .iter()
        .map(|d| d.a.max(d.b))
        .fold(0.0, f64::max);
    Ok(MaskingReport {
        rho_a,
        rho_b,
        masked_states,
        per_state_deviations,
        max_pairwise_deviation,
        pass: max_pairwise_deviation <= tol,
    })
}

impl MaskingReport {
    /// Trace of the shared A marginal (the squared norm of the first state).
    pub fn trace(&self) -> f64 {
        let t: C64 = self.rho_a.trace();
        t.re
    }
}
