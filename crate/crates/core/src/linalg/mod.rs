//! Dense complex linear algebra for small matrices.

mod bipartite;
mod eigen;
mod isometry;
mod matrix;

pub use self::bipartite::{
    kron, partial_trace, reduced_a, reduced_b, schmidt_decompose, tensor_product, Schmidt,
    Subsystem,
};
pub use self::eigen::{
    canonical_phase, group_eigenspaces, hermitian_eig, Eigenspace, EigenspaceGrouping,
    HermitianEigen, Spectrum,
};
pub use self::isometry::{
    complete_isometry, nearest_isometry, orthonormalize_columns, polar_unitary,
};
pub use self::matrix::{cis, CMatrix, CVector};
