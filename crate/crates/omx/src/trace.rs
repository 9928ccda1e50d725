//! Sampled measurement curves and their CSV serialization.
//!
//! The on-disk format is a plain CSV with a `# meta:` comment header:
//!
//! ```text
//! # meta: kind=reflection
//! # meta: x_unit=Hz
//! # meta: source=synth
//! x,y_re,y_im
//! 1.934e14,0.42,0.0
//! ```
//!
//! The `y_im` column is present only for complex-valued traces.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What the ordinate of a trace means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    /// Normalized optical reflection, dimensionless in [0, 1].
    Reflection,
    /// Phase of a scattering parameter, rad.
    Phase,
    /// Complex scattering parameter.
    Complex,
    /// Power spectral density, W/Hz.
    Psd,
    /// Mechanical linewidth, Hz (ordinary).
    Linewidth,
    /// Conversion efficiency, dimensionless.
    Efficiency,
    /// Photodetector voltage, V (filter scans).
    Voltage,
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TraceKind::Reflection => "reflection",
            TraceKind::Phase => "phase",
            TraceKind::Complex => "complex",
            TraceKind::Psd => "psd",
            TraceKind::Linewidth => "linewidth",
            TraceKind::Efficiency => "efficiency",
            TraceKind::Voltage => "voltage",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for TraceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "reflection" => TraceKind::Reflection,
            "phase" => TraceKind::Phase,
            "complex" => TraceKind::Complex,
            "psd" => TraceKind::Psd,
            "linewidth" => TraceKind::Linewidth,
            "efficiency" => TraceKind::Efficiency,
            "voltage" => TraceKind::Voltage,
            other => return Err(Error::TraceFormat(format!("unknown trace kind {other:?}"))),
        })
    }
}

/// Unit of the abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XUnit {
    /// Ordinary frequency in Hz.
    Hz,
    /// Pure number (photon numbers, setpoints, ...).
    Dimensionless,
}

impl fmt::Display for XUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            XUnit::Hz => "Hz",
            XUnit::Dimensionless => "1",
        })
    }
}

/// Ordinate storage: real- or complex-valued.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl TraceData {
    pub fn len(&self) -> usize {
        match self {
            TraceData::Real(v) => v.len(),
            TraceData::Complex(v) => v.len(),
        }
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One sampled measurement curve plus free-form provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    x: Vec<f64>,
    y: TraceData,
    kind: TraceKind,
    x_unit: XUnit,
    meta: BTreeMap<String, String>,
}

impl Trace {
    pub fn new(x: Vec<f64>, y: TraceData, kind: TraceKind, x_unit: XUnit) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::TraceFormat(format!(
                "abscissa and ordinate lengths differ: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::TraceFormat("trace needs at least 2 samples".into()));
        }
        if !x.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::TraceFormat("abscissa must be strictly increasing".into()));
        }
        Ok(Self { x, y, kind, x_unit, meta: BTreeMap::new() })
    }

    pub fn real(x: Vec<f64>, y: Vec<f64>, kind: TraceKind, x_unit: XUnit) -> Result<Self> {
        Self::new(x, TraceData::Real(y), kind, x_unit)
    }

    pub fn complex(x: Vec<f64>, y: Vec<Complex64>, kind: TraceKind, x_unit: XUnit) -> Result<Self> {
        Self::new(x, TraceData::Complex(y), kind, x_unit)
    }

    pub fn with_meta(mut self, key: &str, value: &str) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }
    pub fn y(&self) -> &TraceData {
        &self.y
    }
    pub fn kind(&self) -> TraceKind {
        self.kind
    }
    pub fn x_unit(&self) -> XUnit {
        self.x_unit
    }
    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }
    pub fn len(&self) -> usize {
        self.x.len()
    }
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Real ordinates, or an error for complex traces.
    pub fn y_real(&self) -> Result<&[f64]> {
        match &self.y {
            TraceData::Real(v) => Ok(v),
            TraceData::Complex(_) => {
                Err(Error::TraceFormat("expected a real-valued trace".into()))
            }
        }
    }

    /// Complex ordinates, or an error for real traces.
    pub fn y_complex(&self) -> Result<&[Complex64]> {
        match &self.y {
            TraceData::Complex(v) => Ok(v),
            TraceData::Real(_) => {
                Err(Error::TraceFormat("expected a complex-valued trace".into()))
            }
        }
    }

    /// Serialize to the documented CSV format.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# meta: kind={}", self.kind)?;
        writeln!(w, "# meta: x_unit={}", self.x_unit)?;
        for (k, v) in &self.meta {
            writeln!(w, "# meta: {k}={v}")?;
        }
        match &self.y {
            TraceData::Real(y) => {
                writeln!(w, "x,y_re")?;
                for (x, y) in self.x.iter().zip(y) {
                    writeln!(w, "{x},{y}")?;
                }
            }
            TraceData::Complex(y) => {
                writeln!(w, "x,y_re,y_im")?;
                for (x, y) in self.x.iter().zip(y) {
                    writeln!(w, "{x},{},{}", y.re, y.im)?;
                }
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        crate::ioutil::atomic_write(path, &buf)
    }

    /// Parse the documented CSV format.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut meta = BTreeMap::new();
        let mut header: Option<Vec<String>> = None;
        let mut x = Vec::new();
        let mut re = Vec::new();
        let mut im: Vec<f64> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(kv) = rest.trim().strip_prefix("meta:") {
                    if let Some((k, v)) = kv.trim().split_once('=') {
                        meta.insert(k.trim().to_string(), v.trim().to_string());
                    }
                }
                continue;
            }
            if header.is_none() {
                let cols: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
                if cols.first().map(String::as_str) != Some("x")
                    || cols.get(1).map(String::as_str) != Some("y_re")
                    || (cols.len() == 3 && cols[2] != "y_im")
                    || cols.len() > 3
                {
                    return Err(Error::TraceFormat(format!(
                        "line {}: expected header 'x,y_re[,y_im]', got {line:?}",
                        lineno + 1
                    )));
                }
                header = Some(cols);
                continue;
            }
            let ncols = header.as_ref().unwrap().len();
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != ncols {
                return Err(Error::TraceFormat(format!(
                    "line {}: expected {ncols} columns, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse().map_err(|_| {
                    Error::TraceFormat(format!("line {}: bad number {s:?}", lineno + 1))
                })
            };
            x.push(parse(fields[0])?);
            re.push(parse(fields[1])?);
            if ncols == 3 {
                im.push(parse(fields[2])?);
            }
        }
        let header =
            header.ok_or_else(|| Error::TraceFormat("missing CSV header line".into()))?;
        let kind: TraceKind =
            meta.remove("kind").ok_or_else(|| Error::TraceFormat("missing kind meta".into()))?.parse()?;
        let x_unit = match meta.remove("x_unit").as_deref() {
            Some("Hz") => XUnit::Hz,
            Some("1") | None => XUnit::Dimensionless,
            Some(other) => {
                return Err(Error::TraceFormat(format!("unknown x_unit {other:?}")))
            }
        };
        let data = if header.len() == 3 {
            TraceData::Complex(re.iter().zip(&im).map(|(&r, &i)| Complex64::new(r, i)).collect())
        } else {
            TraceData::Real(re)
        };
        let mut t = Trace::new(x, data, kind, x_unit)?;
        t.meta = meta;
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f))
    }
}
