mod common;

use common::{
    certify, density_defect, gram_from, hadamard_instance, random_hadamard, random_spectrum,
    satisfying_mu, structured_set,
};
use maskkit_core::linalg::{
    complete_isometry, group_eigenspaces, hermitian_eig, kron, reduced_a, reduced_b,
    schmidt_decompose, tensor_product,
};
use maskkit_core::random::{random_hermitian, random_isometry, random_unit_vector, random_unitary, Rng};
use maskkit_core::{
    combination_condition, dephase, flatten_eigenspace, fourier_hadamard, gram_matrix,
    is_hadamard_unitary, maskable_with, qubit_family, random_states_with_gram, sylvester_hadamard,
    verify_masking, CMatrix, CVector, CertifyOptions, Certification, StateSet, C64,
};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn nonzero_sorted(rho: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_eig(rho, 1e-9).unwrap().values.into_iter().filter(|&x| x > 1e-10).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn partial_traces_are_states_with_matching_spectra(seed: u64, d_a in 1usize..5, d_b in 1usize..5) {
        let mut rng = Rng::seed_from_u64(seed);
        let psi = random_unit_vector(&mut rng, d_a * d_b);
        let ra = reduced_a(&psi, d_a, d_b).unwrap();
        let rb = reduced_b(&psi, d_a, d_b).unwrap();
        prop_assert!(density_defect(&ra) <= 1e-10);
        prop_assert!(density_defect(&rb) <= 1e-10);
        let (sa, sb) = (nonzero_sorted(&ra), nonzero_sorted(&rb));
        prop_assert_eq!(sa.len(), sb.len());
        for (x, y) in sa.iter().zip(&sb) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn schmidt_reconstructs_and_is_locally_invariant(seed: u64, d_a in 1usize..5, d_b in 1usize..5) {
        let mut rng = Rng::seed_from_u64(seed);
        let psi = random_unit_vector(&mut rng, d_a * d_b);
        let s = schmidt_decompose(&psi, d_a, d_b, 1e-12).unwrap();
        prop_assert!(s.reconstruct(d_a, d_b).distance(&psi) <= 1e-10);
        prop_assert!(s.weights.windows(2).all(|w| w[0] >= w[1]));
        let local = kron(&random_unitary(&mut rng, d_a), &random_unitary(&mut rng, d_b));
        let moved = schmidt_decompose(&local.mul_vec(&psi), d_a, d_b, 1e-12).unwrap();
        prop_assert_eq!(moved.rank(), s.rank());
        for (x, y) in s.weights.iter().zip(&moved.weights) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn hermitian_eig_is_unitary_and_reconstructs(seed: u64, n in 1usize..7) {
        let mut rng = Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, n);
        let eig = hermitian_eig(&h, 1e-9).unwrap();
        prop_assert!(eig.vectors.unitarity_deviation() <= 1e-10);
        prop_assert!(eig.reconstruct().distance(&h) <= 1e-10);
        prop_assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn completion_preserves_prefix(seed: u64, rows in 1usize..9, frac in 0.0f64..1.0) {
        let mut rng = Rng::seed_from_u64(seed);
        let cols = ((rows as f64) * frac) as usize;
        let v1 = random_isometry(&mut rng, rows, cols.max(1).min(rows));
        let u = complete_isometry(&v1, rows, 1e-9).unwrap();
        prop_assert!(u.unitarity_deviation() <= 1e-10);
        for j in 0..v1.cols() {
            prop_assert_eq!(u.column(j), v1.column(j));
        }
    }

    #[test]
    fn eigenspace_projectors_resolve_the_support(seed: u64, n in 2usize..7) {
        let mut rng = Rng::seed_from_u64(seed);
        // repeated levels on purpose
        let levels: Vec<f64> = (0..n).map(|_| rng.int_range(0, 2) as f64).collect();
        let u = random_unitary(&mut rng, n);
        let h = gram_from(&u, &levels);
        let eig = hermitian_eig(&h, 1e-9).unwrap();
        let grouping = group_eigenspaces(&eig.values, &eig.vectors, 1e-8);
        let projectors: Vec<CMatrix> = grouping.groups.iter().map(|g| g.projector()).collect();
        let support = grouping.support_projector(1e-8);
        let mut expected = CMatrix::zeros(n, n);
        for (g, p) in grouping.groups.iter().zip(&projectors) {
            if g.value > 1e-8 {
                expected = &expected + p;
            }
        }
        prop_assert!(support.distance(&expected) <= 1e-9);
        let total = projectors.iter().fold(CMatrix::zeros(n, n), |acc, p| &acc + p);
        prop_assert!(total.distance(&CMatrix::identity(n)) <= 1e-9);
        for (i, p) in projectors.iter().enumerate() {
            for (j, q) in projectors.iter().enumerate() {
                let prod = p.matmul(q);
                let want = if i == j { p.clone() } else { CMatrix::zeros(n, n) };
                prop_assert!(prod.distance(&want) <= 1e-9);
            }
        }
    }

    #[test]
    fn hadamard_constructors_are_flat_unitaries(n in 1usize..9, k in 0u32..4, theta in -3.0f64..3.0, w1 in -3.0f64..3.0, w2 in -3.0f64..3.0) {
        for u in [fourier_hadamard(n), sylvester_hadamard(k), qubit_family(theta, w1, w2)] {
            let check = is_hadamard_unitary(u.matrix(), 1e-10);
            prop_assert!(check.is_hadamard, "{:?}", check);
            prop_assert!(is_hadamard_unitary(u.adjoint().matrix(), 1e-10).is_hadamard);
        }
    }

    #[test]
    fn dephase_is_a_normal_form(seed: u64, n in 2usize..7) {
        let mut rng = Rng::seed_from_u64(seed);
        let u = random_hadamard(&mut rng, n);
        let once = dephase(&u);
        prop_assert!(dephase(&once).matrix().max_abs_diff(once.matrix()) <= 1e-12);
        let base = dephase(&fourier_hadamard(n));
        if n != 4 {
            // every random instance is a diagonal-phase multiple of Fourier
            prop_assert!(once.matrix().max_abs_diff(base.matrix()) <= 1e-12);
        }
    }

    #[test]
    fn gram_matrices_are_unit_diagonal_psd(seed: u64, n in 1usize..6, d in 1usize..6) {
        let mut rng = Rng::seed_from_u64(seed);
        let set = StateSet::new((0..n).map(|_| random_unit_vector(&mut rng, d)).collect(), 1e-12).unwrap();
        let g = gram_matrix(&set);
        prop_assert!(g.hermiticity_deviation() <= 1e-12);
        for i in 0..n {
            prop_assert!((g[(i, i)] - C64::new(1.0, 0.0)).norm() <= 1e-12);
        }
        let eig = hermitian_eig(&g, 1e-9).unwrap();
        prop_assert!(*eig.values.last().unwrap() >= -1e-10);
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn certification_round_trip(seed: u64, n in 2usize..6, extra in 0usize..2) {
        let mut rng = Rng::seed_from_u64(seed);
        let d = n + extra;
        let u = random_hadamard(&mut rng, n);
        let spectrum = random_spectrum(&mut rng, n, 0);
        let g = gram_from(u.matrix(), &spectrum);
        let set = random_states_with_gram(&g, d, rng.next_u64()).unwrap();
        prop_assert!(gram_matrix(&set).distance(&g) <= 1e-9);
        let cert = certify(&set).expect("certifies");
        prop_assert!(cert.residual <= 1e-8);
        prop_assert!(is_hadamard_unitary(cert.unitary.matrix(), 1e-8).is_hadamard);
        prop_assert!(cert.gram().distance(&g) <= 1e-8);
        let mut want = spectrum.clone();
        want.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in want.iter().zip(cert.spectrum.values()) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn refusals_are_sound(seed: u64, n in 2usize..5) {
        let mut rng = Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, n);
        // unit diagonal via symmetric normalization of a random PSD matrix
        let raw = gram_from(&u, &random_spectrum(&mut rng, n, 0));
        let g = CMatrix::from_fn(n, n, |i, j| raw[(i, j)] / (raw[(i, i)].re * raw[(j, j)].re).sqrt());
        let set = random_states_with_gram(&g, n, rng.next_u64()).unwrap();
        let opts = CertifyOptions::default();
        if let Certification::NotCertified(maskkit_core::NotCertified::NonFlatEigenvector { spread, gap, .. }) =
            maskkit_core::certify_hadamard_set(&set, &opts)
        {
            prop_assert!(spread > opts.tol);
            prop_assert!(gap > opts.grouping_tol);
        }
    }

    #[test]
    fn flattening_success_gives_flat_unitary(seed: u64) {
        // two-dimensional eigenspaces of order-4 Hadamard sets
        let mut rng = Rng::seed_from_u64(seed);
        let u = random_hadamard(&mut rng, 4);
        let a = 1.0 + rng.uniform_range(0.1, 0.9);
        let values = [a, a, 2.0 - a, 2.0 - a];
        let g = gram_from(u.matrix(), &values);
        let eig = hermitian_eig(&g, 1e-9).unwrap();
        let grouping = group_eigenspaces(&eig.values, &eig.vectors, 1e-8);
        let mut assembled = CMatrix::zeros(4, 4);
        let mut col = 0;
        for group in &grouping.groups {
            let mut found = None;
            for restart in 0..20 {
                let f = flatten_eigenspace(&group.basis, 1e-7, 500, seed ^ restart);
                if f.converged {
                    found = Some(f);
                    break;
                }
            }
            let f = found.expect("a flat basis exists");
            let flat = group.basis.matmul(&f.rotation);
            for j in 0..group.dim() {
                assembled.set_column(col, &flat.column(j));
                col += 1;
            }
        }
        prop_assert!(is_hadamard_unitary(&assembled, 1e-7).is_hadamard);
        prop_assert!(gram_from(&assembled, &values).distance(&g) <= 1e-8);
    }

    #[test]
    fn certified_sets_are_masked_end_to_end(seed: u64, n in 2usize..6, extra in 0usize..2) {
        let mut rng = Rng::seed_from_u64(seed);
        let inst = hadamard_instance(&mut rng, n, (n + extra).min(6));
        prop_assert!(inst.masker.matrix().unitarity_deviation() <= 1e-10);
        prop_assert!(verify_masking(&inst.masker, &inst.set, 1e-9).unwrap().pass);
        let psi = StateSet::new(inst.frs.states(), 1e-9).unwrap();
        prop_assert!(gram_matrix(&psi).distance(&gram_matrix(&inst.set)) <= 1e-9);
    }

    #[test]
    fn masker_is_linear_on_combinations(seed: u64, n in 2usize..5) {
        let mut rng = Rng::seed_from_u64(seed);
        let inst = hadamard_instance(&mut rng, n, n);
        let mu: Vec<C64> = (0..n).map(|_| rng.complex_normal()).collect();
        let a = inst.set.combination(&mu).unwrap();
        let direct = inst.masker.apply(&a).unwrap();
        let psi = maskkit_core::combine(&inst.frs.states(), &mu).unwrap();
        prop_assert!(direct.distance(&psi) <= 1e-10 * (1.0 + psi.norm()));
    }

    #[test]
    fn maskability_matches_partial_traces(seed: u64, n in 2usize..5, scale in 0.5f64..1.5) {
        let mut rng = Rng::seed_from_u64(seed);
        let d = n;
        let inst = hadamard_instance(&mut rng, n, d);
        let torus = maskkit_core::sample_maskable(&inst.cert, 1, rng.next_u64()).remove(0);
        let mu = torus.scale(scale);
        let report = maskable_with(&inst.cert, mu.as_slice(), 1e-9).unwrap();
        let a = inst.set.combination(mu.as_slice()).unwrap();
        let mut masked: Vec<CVector> = inst.set.states().iter().map(|s| inst.masker.apply(s).unwrap()).collect();
        masked.push(inst.masker.apply(&a).unwrap());
        let verdict = maskkit_core::masking::verify_masked_states(masked, d, d, 1e-9).unwrap();
        prop_assert_eq!(report.maskable, verdict.pass);
        if report.maskable {
            prop_assert!((a.norm() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn combination_condition_matches_partial_traces(seed: u64, n in 2usize..4, shape in 0usize..3, violate: bool) {
        let mut rng = Rng::seed_from_u64(seed);
        let groups = match shape {
            0 => vec![1, 1],
            1 => vec![n],
            _ => vec![2, 1],
        };
        let r: usize = groups.iter().sum();
        let s = structured_set(&mut rng, n, &groups, r, r + 1);
        let mut mu = satisfying_mu(&mut rng, &s.hadamard);
        if violate {
            for z in &mut mu {
                *z += rng.complex_normal() * 0.1;
            }
        }
        let cond = combination_condition(&s.set, &mu, 1e-8).unwrap();
        let oracle = s.set.marginal_deviation(&mu).unwrap() <= 1e-8;
        prop_assert_eq!(cond.holds, oracle);
        prop_assert_eq!(cond.holds, !violate);
    }
}

#[test]
fn product_structure_of_tensor_product() {
    let mut rng = Rng::seed_from_u64(1);
    let u = random_unit_vector(&mut rng, 3);
    let v = random_unit_vector(&mut rng, 4);
    let t = tensor_product(&u, &v);
    assert!((t.norm() - 1.0).abs() < 1e-14);
    for i in 0..3 {
        for j in 0..4 {
            assert_eq!(t[i * 4 + j], u[i] * v[j]);
        }
    }
}
