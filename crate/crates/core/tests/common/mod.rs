//! Instance generators shared by the integration tests.
#![allow(dead_code)]

use maskkit_core::linalg::{cis, hermitian_eig, reduced_a, reduced_b};
use maskkit_core::random::{random_isometry, random_phases, random_unitary, Rng};
use maskkit_core::{
    build_masker, certify_hadamard_set, fixed_reducing_states, fourier_hadamard,
    random_states_with_gram, Bases, CMatrix, CVector, CertifyOptions, FixedReducingSet,
    GeneralReducingSet, HadamardCertificate, HadamardUnitary, Masker, StateSet, C64,
};

/// `D₁·F·D₂` with random diagonal phases, `F` Fourier (or a random member
/// of the affine Fourier family for order 4).
pub fn random_hadamard(rng: &mut Rng, n: usize) -> HadamardUnitary {
    let d1 = CMatrix::diagonal(random_phases(rng, n).as_slice());
    let d2 = CMatrix::diagonal(random_phases(rng, n).as_slice());
    let mut f = fourier_hadamard(n).into_matrix();
    if n == 4 {
        // the one-parameter affine family through F_4
        let a = cis(rng.phase());
        for (j, k) in [(1, 1), (1, 3), (3, 1), (3, 3)] {
            f[(j, k)] *= a;
        }
    }
    let m = d1.matmul(&f).matmul(&d2);
    HadamardUnitary::from_matrix(m, 1e-10).expect("Hadamard by construction")
}

/// Spectrum with trace `n`, `zeros` vanishing eigenvalues and the rest
/// positive and pairwise separated.
pub fn random_spectrum(rng: &mut Rng, n: usize, zeros: usize) -> Vec<f64> {
    let positive = n - zeros;
    loop {
        let raw: Vec<f64> = (0..positive).map(|_| rng.uniform_range(0.2, 1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut values: Vec<f64> = raw.iter().map(|x| x * n as f64 / total).collect();
        values.extend(std::iter::repeat_n(0.0, zeros));
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        if sorted.windows(2).all(|w| w[0] - w[1] > 1e-3) {
            return values;
        }
    }
}

/// Spectrum with trace `n` made of the given multiplicities (plus zeros).
pub fn degenerate_spectrum(rng: &mut Rng, multiplicities: &[usize], zeros: usize) -> Vec<f64> {
    let n: usize = multiplicities.iter().sum::<usize>() + zeros;
    loop {
        let levels: Vec<f64> = multiplicities.iter().map(|_| rng.uniform_range(0.2, 1.0)).collect();
        let mut sorted = levels.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        if sorted.windows(2).any(|w| w[0] - w[1] < 1e-2) {
            continue;
        }
        let total: f64 = levels.iter().zip(multiplicities).map(|(l, &m)| l * m as f64).sum();
        let mut values = Vec::with_capacity(n);
        for (l, &m) in levels.iter().zip(multiplicities) {
            values.extend(std::iter::repeat_n(l * n as f64 / total, m));
        }
        values.extend(std::iter::repeat_n(0.0, zeros));
        return values;
    }
}

pub fn gram_from(u: &CMatrix, spectrum: &[f64]) -> CMatrix {
    u.matmul(&CMatrix::real_diagonal(spectrum)).matmul(&u.adjoint())
}

/// A Hadamard-set instance with its certificate and masker.
pub struct Instance {
    pub set: StateSet,
    pub cert: HadamardCertificate,
    pub frs: FixedReducingSet,
    pub masker: Masker,
}

pub fn certify(set: &StateSet) -> Option<HadamardCertificate> {
    certify_hadamard_set(set, &CertifyOptions::default()).into_certificate()
}

/// `n` states in `C^d` realizing `U·D·U†` for a random Hadamard `U`.
pub fn hadamard_instance(rng: &mut Rng, n: usize, d: usize) -> Instance {
    let u = random_hadamard(rng, n);
    let zeros = if n > 2 && rng.uniform() < 0.2 { 1 } else { 0 };
    let spectrum = random_spectrum(rng, n, zeros);
    let g = gram_from(u.matrix(), &spectrum);
    let set = random_states_with_gram(&g, d, rng.next_u64()).expect("rank fits");
    let cert = certify(&set).expect("synthesized Hadamard set certifies");
    let frs = fixed_reducing_states(&cert, &set, &Bases::standard(d, d)).expect("bases fit");
    let masker = build_masker(&set, &cert, &frs).expect("masker builds");
    Instance {
        set,
        cert,
        frs,
        masker,
    }
}

/// Largest violation of "Hermitian, PSD, unit trace".
pub fn density_defect(rho: &CMatrix) -> f64 {
    let herm = rho.hermiticity_deviation();
    let trace = (rho.trace() - C64::new(1.0, 0.0)).norm();
    let sym = (rho + &rho.adjoint()).scale(C64::new(0.5, 0.0));
    let min_eig = hermitian_eig(&sym, 1e-6)
        .map(|e| e.values.last().copied().unwrap_or(0.0))
        .unwrap_or(f64::NEG_INFINITY);
    herm.max(trace).max((-min_eig).max(0.0))
}

/// Both marginals of a bipartite vector.
pub fn marginals(psi: &CVector, d_a: usize, d_b: usize) -> (CMatrix, CMatrix) {
    (reduced_a(psi, d_a, d_b).unwrap(), reduced_b(psi, d_a, d_b).unwrap())
}

/// A fixed-reducing set whose weights come in groups of equal value.
///
/// Within group `i` (size `m_i ≤ n`) member `k` uses
/// `ψ^(k) = B_i·X_i·diag(√n·H[l][k])_l·Y_i`, so that a combination `μ`
/// satisfies the orthonormality condition exactly when
/// `√n·|(Hμ)_l| = 1` for every row `l` used by some group.
pub struct StructuredSet {
    pub set: GeneralReducingSet,
    pub hadamard: CMatrix,
    pub rows_used: Vec<usize>,
}

pub fn structured_set(rng: &mut Rng, n: usize, groups: &[usize], d_a: usize, d_b: usize) -> StructuredSet {
    let r: usize = groups.iter().sum();
    assert!(r <= d_a && r <= d_b);
    let h = random_hadamard(rng, n).into_matrix();
    let levels = loop {
        let l: Vec<f64> = groups.iter().map(|_| rng.uniform_range(0.2, 1.0)).collect();
        let mut s = l.clone();
        s.sort_by(|a, b| b.total_cmp(a));
        if s.windows(2).all(|w| w[0] - w[1] > 1e-2) {
            break l;
        }
    };
    let total: f64 = levels.iter().zip(groups).map(|(l, &m)| l * m as f64).sum();
    let mut weights = Vec::with_capacity(r);
    for (l, &m) in levels.iter().zip(groups) {
        weights.extend(std::iter::repeat_n((l / total).sqrt(), m));
    }
    let phi = random_isometry(rng, d_a, r).columns();
    let b = random_isometry(rng, d_b, r);

    let mut rows_used = Vec::new();
    let mut psi: Vec<Vec<CVector>> = vec![Vec::with_capacity(r); n];
    let mut offset = 0;
    let sqrt_n = (n as f64).sqrt();
    for &m in groups {
        assert!(m <= n);
        let x = random_unitary(rng, m);
        let y = random_unitary(rng, m);
        let rows: Vec<usize> = {
            let start = rng.int_range(0, n - 1);
            (0..m).map(|l| (start + l) % n).collect()
        };
        rows_used.extend(rows.iter().copied());
        let block = CMatrix::from_fn(d_b, m, |i, j| b[(i, offset + j)]);
        for (k, member) in psi.iter_mut().enumerate() {
            let diag: Vec<C64> = rows.iter().map(|&l| h[(l, k)] * sqrt_n).collect();
            let rot = x.matmul(&CMatrix::diagonal(&diag)).matmul(&y);
            member.extend(block.matmul(&rot).columns());
        }
        offset += m;
    }
    rows_used.sort_unstable();
    rows_used.dedup();
    let set = GeneralReducingSet::new(weights, phi, psi, 1e-9).expect("valid fixed-reducing set");
    StructuredSet {
        set,
        hadamard: h,
        rows_used,
    }
}

/// `μ = H†·z/√n` for unimodular `z`.
pub fn satisfying_mu(rng: &mut Rng, h: &CMatrix) -> Vec<C64> {
    let n = h.rows();
    let z: CVector = (0..n).map(|_| cis(rng.phase()) / (n as f64).sqrt()).collect();
    h.adjoint().mul_vec(&z).into_inner()
}
