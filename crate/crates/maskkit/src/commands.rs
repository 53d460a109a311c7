//! One function per subcommand. Each returns the JSON document to print and
//! whether the run counts as a pass.

use std::io::Read;
use std::path::Path;

use log::{debug, info, warn};
use maskkit_core::linalg::hermitian_eig;
use maskkit_core::masking::{build_masker_with, verify_masked_states, MaskabilityReport};
use maskkit_core::random::{random_unit_vector, Rng};
use maskkit_core::{
    certify_hadamard_set, combination_condition, dephase, fixed_reducing_states, gram_matrix,
    maskable_with, qubit_family, sample_maskable, solve_qubit_phases, verify_masking, Bases,
    CVector, CertifyOptions, Certification, GeneralReducingSet, HadamardCertificate,
    Masker, NotCertified, StateSet, C64, DEFAULT_TOL,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::format::{
    matrix_from_json, matrix_to_json, to_json, vector_from_json, vector_to_json, CertificateDoc,
    CertifyDoc, MaskerFile, ReducingSetDoc, ReducingSetFile, StatesFile, SCHEMA,
};

/// Tolerance for accepting input states as normalized.
const INPUT_NORM_TOL: f64 = 1e-9;
/// Tolerance for accepting a stored masker or certificate as unitary.
const STORED_UNITARY_TOL: f64 = 1e-8;

/// Result of a command: the document and whether it passed.
#[derive(Debug)]
pub struct Outcome {
    pub json: String,
    pub pass: bool,
}

impl Outcome {
    fn new<T: serde::Serialize + ?Sized>(doc: &T, pass: bool) -> Result<Self, CliError> {
        Ok(Outcome { json: to_json(doc)?, pass })
    }
}

/// Reads a file, or stdin when `path` is "-".
pub fn read_input(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|source| CliError::Read {
                path: path.to_path_buf(),
                source,
            })?;
    } else {
        text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
    }
    Ok(text)
}

fn read_states(path: &Path) -> Result<StateSet, CliError> {
    let file: StatesFile = serde_json::from_str(&read_input(path)?)?;
    file.validate()?;
    let set = StateSet::new(file.vectors(), INPUT_NORM_TOL)?;
    debug!("read {} states of dimension {} from {}", set.len(), set.dim(), path.display());
    Ok(set)
}

/// Parses `re:im` pairs separated by commas. A bare number is real.
pub fn parse_mu(text: &str) -> Result<Vec<C64>, CliError> {
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Format(format!("cannot parse {s:?} in --mu")))
    };
    text.split(',')
        .map(|pair| match pair.split_once(':') {
            Some((re, im)) => Ok(C64::new(number(re)?, number(im)?)),
            None => Ok(C64::new(number(pair)?, 0.0)),
        })
        .collect()
}

fn certificate_doc(cert: &HadamardCertificate) -> CertificateDoc {
    CertificateDoc {
        u: matrix_to_json(cert.unitary.matrix()),
        spectrum: cert.spectrum.values().to_vec(),
        residual: cert.residual,
    }
}

fn certificate_from_doc(doc: &CertificateDoc) -> Result<HadamardCertificate, CliError> {
    let u = matrix_from_json(&doc.u)?;
    Ok(HadamardCertificate::from_parts(u, doc.spectrum.clone(), STORED_UNITARY_TOL)?)
}

fn refusal_doc(why: &NotCertified) -> CertifyDoc {
    let diagnostics = match *why {
        NotCertified::NonFlatEigenvector {
            index,
            eigenvalue,
            spread,
            gap,
        } => json!({ "index": index, "eigenvalue": eigenvalue, "spread": spread, "gap": gap }),
        NotCertified::FlatteningDidNotConverge {
            eigenvalue,
            dim,
            best_residual,
        } => json!({ "eigenvalue": eigenvalue, "dim": dim, "best_residual": best_residual }),
    };
    CertifyDoc {
        schema: SCHEMA,
        certified: false,
        u: None,
        spectrum: None,
        residual: None,
        reason: Some(why.reason().to_string()),
        inconclusive: Some(why.is_inconclusive()),
        diagnostics: Some(diagnostics),
    }
}

fn certify_or_refuse(set: &StateSet, opts: &CertifyOptions) -> Result<HadamardCertificate, Box<CertifyDoc>> {
    match certify_hadamard_set(set, opts) {
        Certification::Certified(cert) => {
            info!("certified with residual {:.3e}", cert.residual);
            Ok(cert)
        }
        Certification::NotCertified(why) => {
            warn!("not certified: {}", why.reason());
            Err(Box::new(refusal_doc(&why)))
        }
    }
}

pub fn gram(input: &Path) -> Result<Outcome, CliError> {
    let set = read_states(input)?;
    let g = gram_matrix(&set);
    let values = hermitian_eig(&g, DEFAULT_TOL)?.values;
    let rank = values.iter().filter(|&&v| v > 1e-12).count();
    let doc = json!({
        "schema": SCHEMA,
        "n": set.len(),
        "dim": set.dim(),
        "gram": matrix_to_json(&g),
        "eigenvalues": values,
        "rank": rank,
    });
    Outcome::new(&doc, true)
}

pub fn certify(input: &Path, opts: &CertifyOptions) -> Result<Outcome, CliError> {
    let set = read_states(input)?;
    match certify_or_refuse(&set, opts) {
        Ok(cert) => {
            let doc = CertifyDoc {
                schema: SCHEMA,
                certified: true,
                u: Some(matrix_to_json(cert.unitary.matrix())),
                spectrum: Some(cert.spectrum.values().to_vec()),
                residual: Some(cert.residual),
                reason: None,
                inconclusive: None,
                diagnostics: None,
            };
            Outcome::new(&doc, true)
        }
        Err(refusal) => Outcome::new(&refusal, false),
    }
}

fn reducing_set_doc(general: &GeneralReducingSet) -> ReducingSetDoc {
    let (d_a, d_b) = general.dims();
    ReducingSetDoc {
        d_a,
        d_b,
        weights: general.weights().to_vec(),
        phi: general.phi().iter().map(vector_to_json).collect(),
        psi: (0..general.len())
            .map(|k| general.psi(k).iter().map(vector_to_json).collect())
            .collect(),
        theta: None,
        support: None,
        states: Some(general.states().iter().map(vector_to_json).collect()),
        rho_a: Some(matrix_to_json(&general.rho_a())),
        rho_b: Some(matrix_to_json(&general.rho_b())),
    }
}

fn general_from_doc(doc: &ReducingSetDoc) -> Result<GeneralReducingSet, CliError> {
    let phi = doc.phi.iter().map(|v| vector_from_json(v)).collect();
    let psi = doc
        .psi
        .iter()
        .map(|member| member.iter().map(|v| vector_from_json(v)).collect())
        .collect();
    Ok(GeneralReducingSet::new(doc.weights.clone(), phi, psi, 1e-8)?)
}

pub fn mask(
    input: &Path,
    opts: &CertifyOptions,
    d_b: Option<usize>,
    completion_seed: Option<u64>,
) -> Result<Outcome, CliError> {
    let set = read_states(input)?;
    let cert = match certify_or_refuse(&set, opts) {
        Ok(cert) => cert,
        Err(refusal) => return Outcome::new(&refusal, false),
    };
    let d_a = set.dim();
    let d_b = d_b.unwrap_or(d_a);
    let frs = fixed_reducing_states(&cert, &set, &Bases::standard(d_a, d_b))?;
    let built = build_masker_with(&set, &cert, &frs, completion_seed)?;
    let report = verify_masking(&built.masker, &set, DEFAULT_TOL)?;
    info!(
        "masker of order {} built from rank {}, masking deviation {:.3e}",
        d_a * d_b,
        built.rank,
        report.max_pairwise_deviation
    );

    let n = set.len();
    let mut frs_doc = reducing_set_doc(&frs.to_general()?);
    frs_doc.theta = Some((0..n).map(|j| (0..n).map(|k| frs.theta(j, k)).collect()).collect());
    frs_doc.support = Some(frs.support().to_vec());
    let doc = MaskerFile {
        schema: SCHEMA,
        d_a,
        d_b,
        anchor_index: built.masker.anchor_index(),
        matrix: matrix_to_json(built.masker.matrix()),
        certificate: Some(certificate_doc(&cert)),
        fixed_reducing_states: Some(frs_doc),
    };
    Outcome::new(&doc, report.pass)
}

fn read_masker(path: &Path) -> Result<Masker, CliError> {
    let file: MaskerFile = serde_json::from_str(&read_input(path)?)?;
    file.validate()?;
    let matrix = matrix_from_json(&file.matrix)?;
    Ok(Masker::new(matrix, file.d_a, file.d_b, file.anchor_index, STORED_UNITARY_TOL)?)
}

pub fn verify(states: &Path, masker: &Path, tol: f64) -> Result<Outcome, CliError> {
    let set = read_states(states)?;
    let masker = read_masker(masker)?;
    let report = verify_masking(&masker, &set, tol)?;
    info!("max marginal deviation {:.3e} at tol {tol:e}", report.max_pairwise_deviation);
    let per_state: Vec<Value> = report
        .per_state_deviations
        .iter()
        .map(|d| json!({ "A": d.a, "B": d.b }))
        .collect();
    let doc = json!({
        "schema": SCHEMA,
        "pass": report.pass,
        "tol": tol,
        "max_pairwise_deviation": report.max_pairwise_deviation,
        "per_state_deviations": per_state,
        "rho_A": matrix_to_json(&report.rho_a),
        "rho_B": matrix_to_json(&report.rho_b),
    });
    Outcome::new(&doc, report.pass)
}

fn maskability_json(report: &MaskabilityReport) -> Value {
    json!({
        "maskable": report.maskable,
        "transformed": vector_to_json(&report.transformed),
        "corrected_moduli": report.corrected_moduli,
        "literal_moduli": report.literal_moduli,
        "support": report.support,
        "max_modulus_deviation": report.max_deviation,
    })
}

pub fn combine(input: &Path, mu_text: &str, tol: f64, opts: &CertifyOptions) -> Result<Outcome, CliError> {
    let mu = parse_mu(mu_text)?;
    let value: Value = serde_json::from_str(&read_input(input)?)?;
    let is_states = value.get("states").is_some();

    let (general, source, maskability, norm) = if is_states {
        let file: StatesFile = serde_json::from_value(value)?;
        file.validate()?;
        let set = StateSet::new(file.vectors(), INPUT_NORM_TOL)?;
        if mu.len() != set.len() {
            return Err(CliError::Format(format!("--mu has {} entries for {} states", mu.len(), set.len())));
        }
        let cert = match certify_or_refuse(&set, opts) {
            Ok(cert) => cert,
            Err(refusal) => return Outcome::new(&refusal, false),
        };
        let frs = fixed_reducing_states(&cert, &set, &Bases::standard(set.dim(), set.dim()))?;
        let report = maskable_with(&cert, &mu, tol)?;
        let norm = set.combination(&mu)?.norm();
        (frs.to_general()?, "states", Some(report), Some(norm))
    } else if let Some(frs) = value.get("fixed_reducing_states") {
        if let Some(schema) = value.get("schema").and_then(Value::as_u64) {
            if schema != u64::from(SCHEMA) {
                return Err(CliError::Format(format!("unsupported schema {schema}")));
            }
        }
        let doc: ReducingSetDoc = serde_json::from_value(frs.clone())?;
        (general_from_doc(&doc)?, "fixed_reducing_states", None, None)
    } else {
        return Err(CliError::Format(
            "expected a states file or a document with fixed_reducing_states".into(),
        ));
    };
    if mu.len() != general.len() {
        return Err(CliError::Format(format!("--mu has {} entries for {} states", mu.len(), general.len())));
    }

    let condition = combination_condition(&general, &mu, tol)?;
    let marginal_deviation = general.marginal_deviation(&mu)?;
    info!(
        "combination condition {} (deviation {:.3e}), marginal deviation {:.3e}",
        condition.holds, condition.deviation, marginal_deviation
    );
    let mut doc = json!({
        "schema": SCHEMA,
        "source": source,
        "mu": mu.iter().map(|&z| [z.re, z.im]).collect::<Vec<_>>(),
        "condition": condition.holds,
        "diagnostics": {
            "overlaps": matrix_to_json(&condition.overlaps),
            "orthonormality_deviation": condition.deviation,
        },
        "marginal_deviation": marginal_deviation,
    });
    if let Some(report) = &maskability {
        doc["maskability"] = maskability_json(report);
    }
    if let Some(norm) = norm {
        doc["norm"] = json!(norm);
    }
    Outcome::new(&doc, condition.holds)
}

fn read_certificate(path: &Path) -> Result<HadamardCertificate, CliError> {
    let value: Value = serde_json::from_str(&read_input(path)?)?;
    if value.get("certified").is_some() {
        let doc: CertifyDoc = serde_json::from_value(value)?;
        certificate_from_doc(&doc.certificate()?)
    } else if let Some(cert) = value.get("certificate") {
        let doc: CertificateDoc = serde_json::from_value(cert.clone())?;
        certificate_from_doc(&doc)
    } else {
        Err(CliError::Format("file does not hold a certificate".into()))
    }
}

pub fn sample(
    certificate: &Path,
    count: usize,
    seed: u64,
    states: Option<&Path>,
    tol: f64,
) -> Result<Outcome, CliError> {
    let cert = read_certificate(certificate)?;
    let g = cert.gram();
    let masking = match states {
        Some(path) => {
            let set = read_states(path)?;
            let mismatch = g.distance(&gram_matrix(&set));
            if mismatch > 1e-8 * set.len() as f64 {
                return Err(CliError::Format(format!(
                    "certificate does not match the states (Gram distance {mismatch:.3e})"
                )));
            }
            let frs = fixed_reducing_states(&cert, &set, &Bases::standard(set.dim(), set.dim()))?;
            let masker = build_masker_with(&set, &cert, &frs, None)?.masker;
            let base: Vec<CVector> = set.states().iter().map(|a| masker.apply(a)).collect::<Result<_, _>>()?;
            Some((set, masker, base))
        }
        None => None,
    };

    let mut all_pass = true;
    let mut samples = Vec::with_capacity(count);
    for mu in sample_maskable(&cert, count, seed) {
        let report = maskable_with(&cert, mu.as_slice(), tol)?;
        let mu_vec = CVector::new(mu.0.clone());
        let norm = g.mul_vec(&mu_vec).inner(&mu_vec).re.max(0.0).sqrt();
        let mut entry = json!({
            "mu": vector_to_json(&mu_vec),
            "maskable": report.maskable,
            "max_modulus_deviation": report.max_deviation,
            "norm": norm,
        });
        let mut pass = report.maskable && (norm - 1.0).abs() <= tol;
        if let Some((set, masker, base)) = &masking {
            let a = set.combination(mu.as_slice())?;
            let mut masked = base.clone();
            masked.push(masker.apply(&a)?);
            let (d_a, d_b) = masker.dims();
            let verdict = verify_masked_states(masked, d_a, d_b, tol)?;
            entry["masking_deviation"] = json!(verdict.max_pairwise_deviation);
            pass &= verdict.pass;
        }
        entry["pass"] = json!(pass);
        all_pass &= pass;
        samples.push(entry);
    }
    info!("{count} samples drawn with seed {seed}, all pass: {all_pass}");
    let doc = json!({
        "schema": SCHEMA,
        "count": count,
        "seed": seed,
        "tol": tol,
        "all_pass": all_pass,
        "samples": samples,
    });
    Outcome::new(&doc, all_pass)
}

pub fn qubit_demo(seed: u64, tol: f64) -> Result<Outcome, CliError> {
    let mut rng = Rng::seed_from_u64(seed);
    let (a1, a2) = loop {
        let a1 = random_unit_vector(&mut rng, 2);
        let a2 = random_unit_vector(&mut rng, 2);
        if (a1[0] * a2[1] - a1[1] * a2[0]).norm() > 0.1 {
            break (a1, a2);
        }
    };
    let set = StateSet::new(vec![a1.clone(), a2.clone()], INPUT_NORM_TOL)?;
    let g = gram_matrix(&set);
    let overlap = a1.inner(&a2);
    let (r, theta) = (overlap.norm(), -overlap.arg());
    debug!("qubit pair with r = {r}, theta = {theta}");

    let cert = certify_hadamard_set(&set, &CertifyOptions::default())
        .into_certificate()
        .ok_or_else(|| CliError::Format("qubit pair was not certified".into()))?;
    let spectrum = cert.spectrum.values().to_vec();
    let spectrum_deviation = (spectrum[0] - (1.0 + r)).abs().max((spectrum[1] - (1.0 - r)).abs());
    let family = qubit_family(theta, 0.0, 0.0);
    let dephased_deviation = dephase(&cert.unitary).matrix().max_abs_diff(dephase(&family).matrix());
    // U†GU for the family member
    let diagonalized = family.matrix().adjoint().matmul(&g).matmul(family.matrix());

    let frs = fixed_reducing_states(&cert, &set, &Bases::standard(2, 2))?;
    let pair_masker = build_masker_with(&set, &cert, &frs, None)?.masker;
    let pair_report = verify_masking(&pair_masker, &set, tol)?;

    let third = random_unit_vector(&mut rng, 2);
    let solution = solve_qubit_phases(&set, &third, tol)?;
    let triple = set.with_state(third.clone(), INPUT_NORM_TOL)?;
    let triple_report = verify_masking(&solution.masker, &triple, tol)?;

    let pass = spectrum_deviation <= 1e-10 && dephased_deviation <= 1e-9 && pair_report.pass && triple_report.pass;
    let doc = json!({
        "schema": SCHEMA,
        "seed": seed,
        "states": [vector_to_json(&a1), vector_to_json(&a2)],
        "gram": matrix_to_json(&g),
        "r": r,
        "theta": theta,
        "eigenvalues": spectrum,
        "expected_eigenvalues": [1.0 + r, 1.0 - r],
        "certificate": certificate_doc(&cert),
        "family_member": {
            "omega1": 0.0,
            "omega2": 0.0,
            "U": matrix_to_json(family.matrix()),
            "U_dagger_G_U": matrix_to_json(&diagonalized),
        },
        "dephased_match_deviation": dephased_deviation,
        "fixed_reducing_states": frs.states().iter().map(vector_to_json).collect::<Vec<_>>(),
        "pair_masker": {
            "matrix": matrix_to_json(pair_masker.matrix()),
            "pass": pair_report.pass,
            "max_pairwise_deviation": pair_report.max_pairwise_deviation,
        },
        "third_state": {
            "state": vector_to_json(&third),
            "omega1": solution.omega1,
            "omega2": solution.omega2,
            "mu": solution.mu.0.iter().map(|&z| [z.re, z.im]).collect::<Vec<_>>(),
            "basis": solution.basis.iter().map(vector_to_json).collect::<Vec<_>>(),
            "weights": solution.weights,
            "masker": matrix_to_json(solution.masker.matrix()),
            "hadamard_masker_suffices": solution.hadamard_masker_suffices,
            "pass": triple_report.pass,
            "max_pairwise_deviation": triple_report.max_pairwise_deviation,
        },
        "pass": pass,
    });
    Outcome::new(&doc, pass)
}

/// Writes a states file for `states` (helper for scripts and tests).
pub fn states_json(dim: usize, states: &[CVector]) -> Result<String, CliError> {
    to_json(&StatesFile::new(dim, states))
}

/// Writes a fixed-reducing-set file.
pub fn reducing_set_json(general: &GeneralReducingSet) -> Result<String, CliError> {
    to_json(&ReducingSetFile {
        schema: SCHEMA,
        fixed_reducing_states: reducing_set_doc(general),
    })
}
