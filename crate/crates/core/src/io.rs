//! JSON and CSV rendering shared by reports and fixtures.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};
use crate::states::QuantumState;

/// Significant digits for JSON floats.
pub const JSON_DIGITS: usize = 17;
/// Significant digits for CSV floats.
pub const CSV_DIGITS: usize = 12;

/// `%.{digits}g`-style rendering with trailing zeros trimmed; integral values keep a `.0`.
pub fn format_float(value: f64, digits: usize) -> String {
    if !value.is_finite() {
        return "null".into();
    }
    if value == 0.0 {
        return "0.0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, value);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent marker");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -5 || exponent >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exponent);
    }
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    let fixed = format!("{:.*}", decimals, value);
    let trimmed = trim_zeros(&fixed);
    if trimmed.contains('.') {
        trimmed
    } else {
        format!("{trimmed}.0")
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0');
    t.strip_suffix('.').map(|u| format!("{u}.0")).unwrap_or_else(|| t.to_string())
}

/// Pretty JSON formatter writing floats with [`JSON_DIGITS`] significant digits.
pub struct DigitsFormatter {
    inner: PrettyFormatter<'static>,
    digits: usize,
}

impl DigitsFormatter {
    pub fn new(digits: usize) -> Self {
        Self { inner: PrettyFormatter::new(), digits }
    }
}

impl Formatter for DigitsFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value, self.digits).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
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

/// Pretty JSON with 17-significant-digit floats.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, DigitsFormatter::new(JSON_DIGITS));
    value.serialize(&mut ser).expect("serialising to memory cannot fail");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

/// Row-major complex matrix as `{dim, entries: [[[re, im], …], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: [usize; 2],
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let entries = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        Self { dim: [m.nrows(), m.ncols()], entries }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let [rows, cols] = self.dim;
        if self.entries.len() != rows {
            return Err(Error::DimensionMismatch { expected: rows, actual: self.entries.len() });
        }
        if let Some(row) = self.entries.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, actual: row.len() });
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| c(self.entries[i][j][0], self.entries[i][j][1])))
    }
}

/// State vector as `{dim, amplitudes: [[re, im], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub dim: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateJson {
    pub fn from_vector(v: &CVector) -> Self {
        Self { dim: v.len(), amplitudes: v.iter().map(|z| [z.re, z.im]).collect() }
    }

    pub fn from_state(state: &QuantumState) -> Result<Self> {
        Ok(Self::from_vector(state.vector().ok_or(Error::MixedInput)?))
    }

    pub fn to_vector(&self) -> Result<CVector> {
        if self.amplitudes.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: self.amplitudes.len() });
        }
        Ok(CVector::from_iterator(self.dim, self.amplitudes.iter().map(|a| c(a[0], a[1]))))
    }
}

/// Uniform report wrapper emitted by every command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub results: BTreeMap<String, Value>,
    pub provenance: String,
}

impl ReportEnvelope {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), params: BTreeMap::new(), results: BTreeMap::new(), provenance: "computed".into() }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.into(), serde_json::to_value(value).expect("serialisable parameter"));
        self
    }

    pub fn result(mut self, key: &str, value: impl Serialize) -> Self {
        self.results.insert(key.into(), serde_json::to_value(value).expect("serialisable result"));
        self
    }

    pub fn provenance(mut self, label: &str) -> Self {
        self.provenance = label.into();
        self
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}
