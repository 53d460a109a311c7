use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use maskkit_core::{CertifyOptions, DEFAULT_FLATNESS_TOL, DEFAULT_GROUPING_TOL, DEFAULT_TOL};

/// Quantum information masking for Hadamard sets of pure states.
///
/// Set MASKKIT_LOG to error, warn, info or debug for diagnostics on stderr.
#[derive(Debug, Parser)]
#[command(name = "maskkit", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gram matrix of a states file.
    Gram {
        /// States file, or "-" for stdin.
        input: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Decide whether a Gram matrix is diagonalized by a Hadamard unitary.
    Certify {
        input: PathBuf,
        #[command(flatten)]
        certify: CertifyArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build the fixed-reducing states and the masker of a certified set.
    Mask {
        input: PathBuf,
        #[command(flatten)]
        certify: CertifyArgs,
        /// Dimension of the ancilla system B (defaults to the state dimension).
        #[arg(long = "d-b")]
        d_b: Option<usize>,
        /// Rotate the free part of the isometry completion with this seed.
        #[arg(long)]
        completion_seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check that a masker gives every state the same marginals.
    Verify {
        /// States file, or "-" for stdin.
        states: PathBuf,
        /// Masker file as written by `mask`.
        masker: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Test whether a linear combination keeps the shared marginals.
    Combine {
        /// States file, `mask` output, or fixed-reducing-set file.
        input: PathBuf,
        /// Coefficients as comma-separated re:im pairs, e.g. "0.5:0,0:-0.5".
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        /// Tolerance of the combination condition.
        #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Draw maskable combinations from a certificate.
    Sample {
        /// Output of `certify` or `mask`.
        certificate: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// States the certificate belongs to; enables masking checks.
        #[arg(long)]
        states: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Qubit walk-through: a random pair, its masker, and a third state.
    QubitDemo {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8, value_parser = positive)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the JSON result here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Tolerance on eigenvector entry moduli.
    #[arg(long, default_value_t = DEFAULT_FLATNESS_TOL, value_parser = positive)]
    pub tol: f64,
    #[command(flatten)]
    pub search: SearchArgs,
}

/// Settings of the degenerate-eigenspace search.
#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Eigenvalues closer than this share an eigenspace.
    #[arg(long, default_value_t = DEFAULT_GROUPING_TOL, value_parser = positive)]
    pub grouping_tol: f64,
    /// Iterations per flattening restart.
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Seed of the flattening restarts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SearchArgs {
    pub fn options(&self, tol: f64) -> CertifyOptions {
        CertifyOptions {
            tol,
            grouping_tol: self.grouping_tol,
            max_iters: self.max_iters,
            restarts: self.restarts,
            seed: self.seed,
        }
    }
}

impl CertifyArgs {
    pub fn options(&self) -> CertifyOptions {
        self.search.options(self.tol)
    }
}

/// Tolerances must be finite and strictly positive.
fn positive(text: &str) -> Result<f64, String> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(_) => Err("must be a positive number".into()),
        Err(e) => Err(e.to_string()),
    }
}
