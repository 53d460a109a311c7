//! Gram matrices of state sets and Hadamard-set certification.
//!
//! A state set is a Hadamard set when its Gram matrix `G` can be written
//! `G = U·D·U†` with `U` a Hadamard unitary. The columns of `U` are then
//! eigenvectors of `G` with flat entries. For simple eigenvalues that
//! eigenvector is fixed up to phase, so flatness is an exact test. Degenerate
//! eigenspaces leave a unitary freedom inside the eigenspace, and
//! [`flatten_eigenspace`] searches it.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hadamard::{fourier_hadamard, is_hadamard_unitary, HadamardUnitary};
use crate::linalg::{
    group_eigenspaces, hermitian_eig, polar_unitary, CMatrix, CVector, Spectrum,
};
use crate::random::{random_isometry, random_unitary, Rng};
use crate::{DEFAULT_FLATNESS_TOL, DEFAULT_GROUPING_TOL, DEFAULT_TOL, C64};

/// `n ≥ 1` unit vectors in `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSet {
    dim: usize,
    states: Vec<CVector>,
}

impl StateSet {
    /// Checks that the set is non-empty, dimensions agree, and every state
    /// has unit norm within `tol`.
    pub fn new(states: Vec<CVector>, tol: f64) -> Result<Self> {
        let dim = states.first().ok_or(Error::EmptySet)?.dim();
        if dim == 0 {
            return Err(Error::InvalidArgument("states must have positive dimension"));
        }
        for (index, s) in states.iter().enumerate() {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.dim(),
                });
            }
            let norm = s.norm();
            if (norm - 1.0).abs() > tol {
                return Err(Error::NotNormalized { index, norm });
            }
        }
        Ok(StateSet { dim, states })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[CVector] {
        &self.states
    }

    /// `d × n` matrix with the states as columns.
    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_columns(&self.states).expect("validated dimensions")
    }

    /// `Σ_k μ_k |a_k⟩`
    pub fn combination(&self, mu: &[C64]) -> Result<CVector> {
        if mu.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: mu.len(),
            });
        }
        let mut out = CVector::zeros(self.dim);
        for (m, s) in mu.iter().zip(&self.states) {
            out.axpy(*m, s);
        }
        Ok(out)
    }

    /// A new set with `extra` appended.
    pub fn with_state(&self, extra: CVector, tol: f64) -> Result<StateSet> {
        let mut states = self.states.clone();
        states.push(extra);
        StateSet::new(states, tol)
    }
}

/// `G_kl = ⟨a_k|a_l⟩`
pub fn gram_matrix(set: &StateSet) -> CMatrix {
    let n = set.len();
    let mut g = CMatrix::zeros(n, n);
    for k in 0..n {
        for l in k..n {
            let z = set.states[k].inner(&set.states[l]);
            g[(k, l)] = z;
            g[(l, k)] = z.conj();
        }
    }
    g
}

/// Proof that a Gram matrix is diagonalized by a Hadamard unitary:
/// `G = U·diag(spectrum)·U†`, columns of `U` being eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct HadamardCertificate {
    pub unitary: HadamardUnitary,
    /// Eigenvalues `λ_j²`, aligned with the columns of `unitary`.
    pub spectrum: Spectrum,
    /// Largest of the reconstruction error and the Hadamard deviations.
    pub residual: f64,
}

impl HadamardCertificate {
    /// Rebuilds a certificate from stored parts, validating that `unitary`
    /// is Hadamard within `tol` and the spectrum is non-negative.
    pub fn from_parts(unitary: CMatrix, spectrum: Vec<f64>, tol: f64) -> Result<Self> {
        if spectrum.len() != unitary.rows() {
            return Err(Error::DimensionMismatch {
                expected: unitary.rows(),
                got: spectrum.len(),
            });
        }
        if spectrum.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("spectrum must be sorted descending"));
        }
        let check = is_hadamard_unitary(&unitary, tol);
        if !check.is_hadamard {
            return Err(Error::InvalidArgument("certificate matrix is not a Hadamard unitary"));
        }
        let spectrum = Spectrum::from_values(spectrum, tol)?;
        Ok(HadamardCertificate {
            unitary: HadamardUnitary::from_matrix(unitary, tol)?,
            spectrum,
            residual: check.modulus_deviation.max(check.unitarity_deviation),
        })
    }

    pub fn order(&self) -> usize {
        self.unitary.order()
    }

    /// `U·diag(spectrum)·U†`
    pub fn gram(&self) -> CMatrix {
        let u = self.unitary.matrix();
        let n = u.rows();
        let vals = self.spectrum.values();
        CMatrix::from_fn(n, n, |i, j| u[(i, j)] * vals[j])
            .matmul(&u.adjoint())
    }

    /// Column indices whose eigenvalue exceeds `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        self.spectrum
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > tol)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Why certification failed.
#[derive(Clone, Debug, PartialEq)]
pub enum NotCertified {
    /// A simple eigenvalue has an eigenvector with unequal entry moduli, so
    /// no Hadamard unitary diagonalizes `G`. This is a proof, not a guess.
    NonFlatEigenvector {
        /// Position in the descending spectrum.
        index: usize,
        eigenvalue: f64,
        /// `max_i |v_i| − min_i |v_i|`
        spread: f64,
        /// Distance to the nearest other eigenvalue.
        gap: f64,
    },
    /// The flattening search failed on a degenerate eigenspace. Inconclusive.
    FlatteningDidNotConverge {
        eigenvalue: f64,
        dim: usize,
        best_residual: f64,
    },
}

impl NotCertified {
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, NotCertified::FlatteningDidNotConverge { .. })
    }

    pub fn reason(&self) -> &'static str {
        match self {
            NotCertified::NonFlatEigenvector { .. } => "non-flat eigenvector",
            NotCertified::FlatteningDidNotConverge { .. } => "flattening search did not converge",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certification {
    Certified(HadamardCertificate),
    NotCertified(NotCertified),
}

impl Certification {
    pub fn certificate(&self) -> Option<&HadamardCertificate> {
        match self {
            Certification::Certified(c) => Some(c),
            Certification::NotCertified(_) => None,
        }
    }

    pub fn into_certificate(self) -> Option<HadamardCertificate> {
        match self {
            Certification::Certified(c) => Some(c),
            Certification::NotCertified(_) => None,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CertifyOptions {
    /// Flatness tolerance on entry moduli.
    pub tol: f64,
    pub grouping_tol: f64,
    /// Iterations per flattening restart.
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            tol: DEFAULT_FLATNESS_TOL,
            grouping_tol: DEFAULT_GROUPING_TOL,
            max_iters: 500,
            restarts: 20,
            seed: 0,
        }
    }
}

fn flatness(v: &CVector, n: usize) -> (f64, f64) {
    let target = 1.0 / (n as f64).sqrt();
    let (mut lo, mut hi, mut dev) = (f64::INFINITY, 0.0f64, 0.0f64);
    for z in v.iter() {
        let m = z.norm();
        lo = lo.min(m);
        hi = hi.max(m);
        dev = dev.max((m - target).abs());
    }
    (dev, hi - lo)
}

pub fn certify_hadamard_set(set: &StateSet, opts: &CertifyOptions) -> Certification {
    certify_gram(&gram_matrix(set), opts).expect("Gram matrices are Hermitian PSD")
}

/// Certifies a Gram matrix directly. Fails only on malformed input (not
/// Hermitian, or eigenvalues negative beyond `DEFAULT_TOL`).
pub fn certify_gram(g: &CMatrix, opts: &CertifyOptions) -> Result<Certification> {
    let n = g.rows();
    let eig = hermitian_eig(g, DEFAULT_TOL)?;
    let spectrum = Spectrum::from_values(eig.values.clone(), DEFAULT_TOL.max(opts.grouping_tol))?;
    let grouping = group_eigenspaces(&eig.values, &eig.vectors, opts.grouping_tol);

    let mut u = CMatrix::zeros(n, n);
    for (gi, group) in grouping.groups.iter().enumerate() {
        if group.dim() == 1 {
            let index = group.indices[0];
            let v = group.basis.column(0);
            let (dev, spread) = flatness(&v, n);
            if dev > opts.tol {
                let gap = eig
                    .values
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != index)
                    .map(|(_, &x)| (x - eig.values[index]).abs())
                    .fold(f64::INFINITY, f64::min);
                return Ok(Certification::NotCertified(NotCertified::NonFlatEigenvector {
                    index,
                    eigenvalue: eig.values[index],
                    spread,
                    gap,
                }));
            }
            u.set_column(index, &v);
            continue;
        }

        let columns = if group.dim() == n {
            // the whole space: any Hadamard works, take Fourier
            fourier_hadamard(n).into_matrix()
        } else {
            let mut best: Option<Flattening> = None;
            for restart in 0..opts.restarts.max(1) {
                let seed = opts
                    .seed
                    .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    .wrapping_add((gi as u64) << 32 | restart as u64);
                let attempt = flatten_eigenspace(&group.basis, opts.tol, opts.max_iters, seed);
                let better = best.as_ref().is_none_or(|b| attempt.residual < b.residual);
                let done = attempt.converged;
                if better {
                    best = Some(attempt);
                }
                if done {
                    break;
                }
            }
            let best = best.expect("at least one restart");
            if !best.converged {
                return Ok(Certification::NotCertified(
                    NotCertified::FlatteningDidNotConverge {
                        eigenvalue: group.value,
                        dim: group.dim(),
                        best_residual: best.residual,
                    },
                ));
            }
            group.basis.matmul(&best.rotation)
        };
        for (c, &index) in group.indices.iter().enumerate() {
            u.set_column(index, &columns.column(c));
        }
    }

    let check = is_hadamard_unitary(&u, opts.tol);
    let vals = spectrum.values();
    let recon = CMatrix::from_fn(n, n, |i, j| u[(i, j)] * vals[j]).matmul(&u.adjoint());
    let residual = recon
        .distance(g)
        .max(check.modulus_deviation)
        .max(check.unitarity_deviation);
    Ok(Certification::Certified(HadamardCertificate {
        unitary: HadamardUnitary::from_matrix_unchecked(u),
        spectrum,
        residual,
    }))
}

/// Result of one flattening run.
#[derive(Clone, Debug, PartialEq)]
pub struct Flattening {
    /// `m × m` unitary `R`; `B·R` is the flattened basis.
    pub rotation: CMatrix,
    /// `max_ij | |(B·R)_ij| − 1/√n |` at the end of the run.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Residual level the search keeps iterating towards after reaching `tol`.
const POLISH_TOL: f64 = 1e-13;

/// Searches for an `m × m` unitary `R` such that every entry of `B·R` has
/// modulus `1/√n`, where `B` is `n × m` with orthonormal columns.
///
/// Alternating projection from a seeded random start: project `B·R`
/// entrywise onto modulus `1/√n` (keeping phases), then take the unitary
/// `R` closest to that target, the polar factor of `B†·target`. The run
/// counts as converged when the residual is at most `tol`; it keeps going
/// towards round-off while it still improves.
pub fn flatten_eigenspace(b: &CMatrix, tol: f64, max_iters: usize, seed: u64) -> Flattening {
    let n = b.rows();
    let m = b.cols();
    let target = 1.0 / (n as f64).sqrt();
    let mut rng = Rng::seed_from_u64(seed);
    let mut rotation = random_unitary(&mut rng, m);
    let bh = b.adjoint();

    let residual_of = |x: &CMatrix| {
        x.as_slice()
            .iter()
            .map(|z| (z.norm() - target).abs())
            .fold(0.0, f64::max)
    };

    let mut x = b.matmul(&rotation);
    let mut best = (rotation.clone(), residual_of(&x));
    let mut iterations = 0;
    while iterations < max_iters && best.1 > POLISH_TOL {
        let projected = CMatrix::from_fn(n, m, |i, j| {
            let z = x[(i, j)];
            let r = z.norm();
            if r == 0.0 {
                C64::new(target, 0.0)
            } else {
                z * (target / r)
            }
        });
        rotation = match polar_unitary(&bh.matmul(&projected)) {
            Ok(r) => r,
            Err(_) => break,
        };
        x = b.matmul(&rotation);
        iterations += 1;
        let residual = residual_of(&x);
        if residual < best.1 {
            // once within tol, stop when progress flattens out
            let stalled = best.1 <= tol && residual > 0.99 * best.1;
            best = (rotation.clone(), residual);
            if stalled {
                break;
            }
        }
    }
    let (mut rotation, mut residual) = best;
    if residual > POLISH_TOL && residual < POLISH_START {
        let polished = polish_rotation(b, &rotation, POLISH_ITERS);
        let polished_residual = residual_of(&b.matmul(&polished.0));
        iterations += polished.1;
        if polished_residual < residual {
            rotation = polished.0;
            residual = polished_residual;
        }
    }
    Flattening {
        rotation,
        residual,
        iterations,
        converged: residual <= tol,
    }
}

/// Projection runs ending above this residual are left alone by the polish.
const POLISH_START: f64 = 0.05;
const POLISH_ITERS: usize = 60;

/// Hermitian `m × m` basis: `E_kk`, `E_kl + E_lk`, `i(E_kl − E_lk)`.
fn hermitian_basis(m: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(m * m);
    for k in 0..m {
        for l in k..m {
            if k == l {
                basis.push(CMatrix::from_fn(m, m, |i, j| C64::new((i == k && j == k) as u8 as f64, 0.0)));
            } else {
                basis.push(CMatrix::from_fn(m, m, |i, j| {
                    C64::new(((i == k && j == l) || (i == l && j == k)) as u8 as f64, 0.0)
                }));
                basis.push(CMatrix::from_fn(m, m, |i, j| {
                    if i == k && j == l {
                        C64::new(0.0, 1.0)
                    } else if i == l && j == k {
                        C64::new(0.0, -1.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                }));
            }
        }
    }
    basis
}

/// `e^{iH}` for Hermitian `H`.
fn exp_i_hermitian(h: &CMatrix) -> Option<CMatrix> {
    let eig = hermitian_eig(h, 1e-8).ok()?;
    let m = h.rows();
    let scaled = CMatrix::from_fn(m, m, |i, j| {
        let (s, c) = eig.values[j].sin_cos();
        eig.vectors[(i, j)] * C64::new(c, s)
    });
    Some(scaled.matmul(&eig.vectors.adjoint()))
}

/// Solves the symmetric positive definite system `A·x = y` in place.
fn cholesky_solve(a: &mut [f64], y: &mut [f64], p: usize) -> Option<()> {
    for j in 0..p {
        let mut d = a[j * p + j];
        for k in 0..j {
            d -= a[j * p + k] * a[j * p + k];
        }
        if d <= 0.0 {
            return None;
        }
        let d = d.sqrt();
        a[j * p + j] = d;
        for i in j + 1..p {
            let mut v = a[i * p + j];
            for k in 0..j {
                v -= a[i * p + k] * a[j * p + k];
            }
            a[i * p + j] = v / d;
        }
    }
    for i in 0..p {
        let mut v = y[i];
        for k in 0..i {
            v -= a[i * p + k] * y[k];
        }
        y[i] = v / a[i * p + i];
    }
    for i in (0..p).rev() {
        let mut v = y[i];
        for k in i + 1..p {
            v -= a[k * p + i] * y[k];
        }
        y[i] = v / a[i * p + i];
    }
    Some(())
}

/// Levenberg-Marquardt on `f_ij = |(B·R)_ij|² − 1/n` over `R ↦ R·e^{iH}`.
/// Returns the improved rotation and the number of accepted steps.
fn polish_rotation(b: &CMatrix, start: &CMatrix, max_steps: usize) -> (CMatrix, usize) {
    let n = b.rows();
    let m = b.cols();
    let target = 1.0 / n as f64;
    let basis = hermitian_basis(m);
    let p = basis.len();
    let residuals = |x: &CMatrix| -> Vec<f64> { x.as_slice().iter().map(|z| z.norm_sqr() - target).collect() };
    let cost = |f: &[f64]| f.iter().map(|v| v * v).sum::<f64>();

    let mut rotation = start.clone();
    let mut x = b.matmul(&rotation);
    let mut f = residuals(&x);
    let mut current = cost(&f);
    let mut damping = 1e-3;
    let mut accepted = 0;
    for _ in 0..max_steps {
        if current < 1e-30 {
            break;
        }
        // column q of J: 2·Re(conj(x_ij)·(X·iH_q)_ij)
        let jac: Vec<Vec<f64>> = basis
            .iter()
            .map(|h| {
                let dx = x.matmul(h).scale(C64::new(0.0, 1.0));
                x.as_slice()
                    .iter()
                    .zip(dx.as_slice())
                    .map(|(z, dz)| 2.0 * (z.conj() * dz).re)
                    .collect()
            })
            .collect();
        let mut normal = alloc::vec![0.0; p * p];
        let mut rhs = alloc::vec![0.0; p];
        for a in 0..p {
            for c in 0..p {
                normal[a * p + c] = jac[a].iter().zip(&jac[c]).map(|(u, v)| u * v).sum();
            }
            rhs[a] = -jac[a].iter().zip(&f).map(|(u, v)| u * v).sum::<f64>();
        }
        let mut improved = false;
        for _ in 0..8 {
            let mut a = normal.clone();
            for d in 0..p {
                a[d * p + d] += damping;
            }
            let mut step = rhs.clone();
            if cholesky_solve(&mut a, &mut step, p).is_none() {
                damping *= 10.0;
                continue;
            }
            let h = basis
                .iter()
                .zip(&step)
                .fold(CMatrix::zeros(m, m), |acc, (e, &t)| &acc + &e.scale(C64::new(t, 0.0)));
            let Some(update) = exp_i_hermitian(&h) else {
                damping *= 10.0;
                continue;
            };
            let candidate = rotation.matmul(&update);
            let cx = b.matmul(&candidate);
            let cf = residuals(&cx);
            let c = cost(&cf);
            if c < current {
                rotation = candidate;
                x = cx;
                f = cf;
                current = c;
                damping = (damping / 3.0).max(1e-15);
                accepted += 1;
                improved = true;
                break;
            }
            damping *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (rotation, accepted)
}

/// Realizes a unit-diagonal PSD Gram matrix as unit vectors in `C^d`.
///
/// With `G = E·D·E†`, the columns of `D^{1/2}·E†` (restricted to positive
/// eigenvalues) have Gram matrix `G`; they are embedded into `C^d` by a
/// seeded random isometry.
pub fn random_states_with_gram(g: &CMatrix, d: usize, seed: u64) -> Result<StateSet> {
    let n = g.rows();
    for i in 0..n {
        let diag = g[(i, i)];
        if (diag.re - 1.0).abs() > DEFAULT_TOL || diag.im.abs() > DEFAULT_TOL {
            return Err(Error::NotUnitDiagonal {
                index: i,
                value: diag.re,
            });
        }
    }
    let eig = hermitian_eig(g, DEFAULT_TOL)?;
    Spectrum::from_values(eig.values.clone(), DEFAULT_TOL)?;
    let support: Vec<usize> = (0..n).filter(|&j| eig.values[j] > 1e-12).collect();
    let rank = support.len();
    if d < rank {
        return Err(Error::RankExceedsDimension { rank, dim: d });
    }
    // r' × n coordinates, row j = sqrt(D_j)·(E†)_j
    let coords = CMatrix::from_fn(rank, n, |j, k| {
        let col = support[j];
        eig.vectors[(k, col)].conj() * eig.values[col].sqrt()
    });
    let mut rng = Rng::seed_from_u64(seed);
    let embed = random_isometry(&mut rng, d, rank);
    let states = embed.matmul(&coords).columns();
    StateSet::new(states, DEFAULT_TOL)
}
