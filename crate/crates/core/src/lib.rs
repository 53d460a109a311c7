//! Quantum information masking for Hadamard sets of pure states.
//!
//! The crate is `no_std` (it needs `alloc`) and split along the pipeline:
//!
//! - [`linalg`]: dense complex vectors/matrices, Hermitian eigendecomposition,
//!   partial traces, Schmidt decomposition and isometry completion.
//! - [`hadamard`]: complex Hadamard unitaries (every entry of modulus `1/√n`).
//! - [`gram`]: Gram matrices of state sets and the Hadamard-set certifier.
//! - [`masking`]: fixed-reducing states, the masker unitary, masking
//!   verification and the maskable linear combinations of a certified set.
//!
//! Inner products are conjugate-linear in the first argument, and Gram
//! matrices are `G[k][l] = ⟨a_k|a_l⟩`. A Hadamard certificate stores `U` with
//! the eigenvectors of `G` as its columns, so `G = U·D·U†`.
#![no_std]

extern crate alloc;

pub mod error;
pub mod gram;
pub mod hadamard;
pub mod linalg;
pub mod masking;
pub mod random;

pub use num_complex::Complex64 as C64;

pub use crate::error::{Error, Result};
pub use crate::gram::{
    certify_gram, certify_hadamard_set, flatten_eigenspace, gram_matrix,
    random_states_with_gram, CertifyOptions, Certification, Flattening, HadamardCertificate,
    NotCertified, StateSet,
};
pub use crate::hadamard::{
    dephase, fourier_hadamard, is_hadamard_unitary, qubit_family, sylvester_hadamard,
    HadamardCheck, HadamardUnitary,
};
pub use crate::linalg::{CMatrix, CVector};
pub use crate::masking::{
    build_masker, combination_condition, combine, fixed_reducing_states, maskable_with,
    sample_maskable, solve_qubit_phases, torus_point, verify_masking, Bases, CoefficientVector,
    FixedReducingSet, GeneralReducingSet, Masker, MaskingReport,
};

/// Default tolerance for equality checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default tolerance for merging eigenvalues into one eigenspace.
pub const DEFAULT_GROUPING_TOL: f64 = 1e-8;
/// Default tolerance for the entry-modulus (flatness) check of eigenvectors.
pub const DEFAULT_FLATNESS_TOL: f64 = 1e-7;
