//! JSON documents read and written by the command-line tool.
//!
//! Complex numbers are `[re, im]` pairs, vectors are arrays of pairs and
//! matrices are row-major arrays of rows. Every document carries
//! `"schema": 1`. Floats are written in scientific notation with 17
//! significant digits, so output is lossless and byte-stable.

use std::io;

use maskkit_core::{CMatrix, CVector, C64};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::CliError;

pub const SCHEMA: u32 = 1;

pub type JsonComplex = [f64; 2];
pub type JsonVector = Vec<JsonComplex>;
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

pub fn complex_to_json(z: C64) -> JsonComplex {
    [z.re, z.im]
}

pub fn vector_to_json(v: &CVector) -> JsonVector {
    v.iter().map(|&z| complex_to_json(z)).collect()
}

pub fn vector_from_json(v: &[JsonComplex]) -> CVector {
    v.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.rows()).map(|i| vector_to_json(&m.row(i))).collect()
}

pub fn matrix_from_json(rows: &[Vec<JsonComplex>]) -> Result<CMatrix, CliError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::Format("matrix rows have different lengths".into()));
    }
    let data = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    CMatrix::from_row_major(rows.len(), cols, data).map_err(CliError::Core)
}

fn check_schema(schema: u32, what: &str) -> Result<(), CliError> {
    if schema == SCHEMA {
        Ok(())
    } else {
        Err(CliError::Format(format!("unsupported {what} schema {schema}, expected {SCHEMA}")))
    }
}

/// `{"schema":1,"dim":d,"states":[…]}`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StatesFile {
    pub schema: u32,
    pub dim: usize,
    pub states: Vec<JsonVector>,
}

impl StatesFile {
    pub fn new(dim: usize, states: &[CVector]) -> Self {
        StatesFile {
            schema: SCHEMA,
            dim,
            states: states.iter().map(vector_to_json).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        check_schema(self.schema, "states file")?;
        if self.states.is_empty() {
            return Err(CliError::Format("states list is empty".into()));
        }
        if let Some((k, s)) = self.states.iter().enumerate().find(|(_, s)| s.len() != self.dim) {
            return Err(CliError::Format(format!(
                "state {k} has {} entries, expected dim = {}",
                s.len(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn vectors(&self) -> Vec<CVector> {
        self.states.iter().map(|s| vector_from_json(s)).collect()
    }
}

/// `{"schema":1,"dA":…,"dB":…,"anchor_index":0,"matrix":[…]}`, optionally
/// followed by the data the masker was built from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MaskerFile {
    pub schema: u32,
    #[serde(rename = "dA")]
    pub d_a: usize,
    #[serde(rename = "dB")]
    pub d_b: usize,
    pub anchor_index: usize,
    pub matrix: JsonMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_reducing_states: Option<ReducingSetDoc>,
}

impl MaskerFile {
    pub fn validate(&self) -> Result<(), CliError> {
        check_schema(self.schema, "masker file")
    }
}

/// A certificate `G = U·diag(spectrum)·U†`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateDoc {
    #[serde(rename = "U")]
    pub u: JsonMatrix,
    pub spectrum: Vec<f64>,
    pub residual: f64,
}

/// Output of `certify`: either a certificate or a refusal.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifyDoc {
    pub schema: u32,
    pub certified: bool,
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub u: Option<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inconclusive: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<serde_json::Value>,
}

impl CertifyDoc {
    pub fn certificate(&self) -> Result<CertificateDoc, CliError> {
        check_schema(self.schema, "certificate")?;
        match (self.certified, &self.u, &self.spectrum) {
            (true, Some(u), Some(spectrum)) => Ok(CertificateDoc {
                u: u.clone(),
                spectrum: spectrum.clone(),
                residual: self.residual.unwrap_or(0.0),
            }),
            _ => Err(CliError::Format("file does not hold a certificate".into())),
        }
    }
}

/// A fixed-reducing set in general Schmidt form: member `k` is
/// `Σ_j weights[j]·phi[j] ⊗ psi[k][j]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReducingSetDoc {
    #[serde(rename = "dA")]
    pub d_a: usize,
    #[serde(rename = "dB")]
    pub d_b: usize,
    pub weights: Vec<f64>,
    pub phi: Vec<JsonVector>,
    pub psi: Vec<Vec<JsonVector>>,
    /// Phase matrix `Θ` with `e^{iΘ_jk}/√n = (U†)_jk`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<Vec<f64>>>,
    /// Certificate columns the retained terms come from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<JsonVector>>,
    #[serde(rename = "rho_A", default, skip_serializing_if = "Option::is_none")]
    pub rho_a: Option<JsonMatrix>,
    #[serde(rename = "rho_B", default, skip_serializing_if = "Option::is_none")]
    pub rho_b: Option<JsonMatrix>,
}

/// Stand-alone fixed-reducing-set file accepted by `combine`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReducingSetFile {
    pub schema: u32,
    pub fixed_reducing_states: ReducingSetDoc,
}

/// JSON formatter writing every float as `d.dddddddddddddddde±x`.
struct FixedDigits<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Pretty-printed JSON with fixed float precision and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut out = Vec::new();
    let formatter = FixedDigits {
        inner: PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, formatter);
    value.serialize(&mut ser).map_err(CliError::Json)?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| CliError::Format(e.to_string()))
}
