//! Physical constants, unit conversions and strict quantity parsing.
//!
//! Every config file and serialized output uses ordinary (cyclic)
//! frequencies in Hz; all internal math runs on angular rates in rad/s.
//! The conversion happens here and only here, so a factor of 2π can never
//! leak twice into a formula.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Reduced Planck constant (J·s), CODATA 2018.
pub const HBAR: f64 = 1.054571817e-34;
/// Speed of light in vacuum (m/s).
pub const C_VAC: f64 = 299_792_458.0;
/// 2π, spelled out so call sites read like the formulas they implement.
pub const TWO_PI: f64 = std::f64::consts::TAU;

/// Ordinary frequency in Hz → angular rate in rad/s.
#[inline]
pub fn angular(f_hz: f64) -> f64 {
    TWO_PI * f_hz
}

/// Angular rate in rad/s → ordinary frequency in Hz.
#[inline]
pub fn ordinary(omega: f64) -> f64 {
    omega / TWO_PI
}

/// Vacuum wavelength (m) → angular optical frequency (rad/s).
#[inline]
pub fn angular_from_wavelength(lambda_m: f64) -> f64 {
    TWO_PI * C_VAC / lambda_m
}

/// dBm → W. Exact `10^(x/10)` arithmetic, no lookup tables.
#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

/// W → dBm.
#[inline]
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}

/// Physical dimension of a parsed quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Frequency,
    Power,
    Voltage,
    Impedance,
    Length,
    Energy,
    Time,
    Dimensionless,
}

impl Dimension {
    fn name(self) -> &'static str {
        match self {
            Dimension::Frequency => "frequency",
            Dimension::Power => "power",
            Dimension::Voltage => "voltage",
            Dimension::Impedance => "impedance",
            Dimension::Length => "length",
            Dimension::Energy => "energy",
            Dimension::Time => "time",
            Dimension::Dimensionless => "dimensionless",
        }
    }
}

// (suffix, SI multiplier, dimension); first match after the numeric part wins.
const UNIT_TABLE: &[(&str, f64, Dimension)] = &[
    ("THz", 1e12, Dimension::Frequency),
    ("GHz", 1e9, Dimension::Frequency),
    ("MHz", 1e6, Dimension::Frequency),
    ("kHz", 1e3, Dimension::Frequency),
    ("Hz", 1.0, Dimension::Frequency),
    ("MW", 1e6, Dimension::Power),
    ("kW", 1e3, Dimension::Power),
    ("mW", 1e-3, Dimension::Power),
    ("uW", 1e-6, Dimension::Power),
    ("µW", 1e-6, Dimension::Power),
    ("nW", 1e-9, Dimension::Power),
    ("pW", 1e-12, Dimension::Power),
    ("fW", 1e-15, Dimension::Power),
    ("W", 1.0, Dimension::Power),
    ("kV", 1e3, Dimension::Voltage),
    ("mV", 1e-3, Dimension::Voltage),
    ("uV", 1e-6, Dimension::Voltage),
    ("µV", 1e-6, Dimension::Voltage),
    ("V", 1.0, Dimension::Voltage),
    ("kohm", 1e3, Dimension::Impedance),
    ("ohm", 1.0, Dimension::Impedance),
    ("Ohm", 1.0, Dimension::Impedance),
    ("km", 1e3, Dimension::Length),
    ("mm", 1e-3, Dimension::Length),
    ("um", 1e-6, Dimension::Length),
    ("µm", 1e-6, Dimension::Length),
    ("nm", 1e-9, Dimension::Length),
    ("pm", 1e-12, Dimension::Length),
    ("m", 1.0, Dimension::Length),
    ("mJ", 1e-3, Dimension::Energy),
    ("uJ", 1e-6, Dimension::Energy),
    ("µJ", 1e-6, Dimension::Energy),
    ("nJ", 1e-9, Dimension::Energy),
    ("pJ", 1e-12, Dimension::Energy),
    ("fJ", 1e-15, Dimension::Energy),
    ("aJ", 1e-18, Dimension::Energy),
    ("J", 1.0, Dimension::Energy),
    ("ms", 1e-3, Dimension::Time),
    ("us", 1e-6, Dimension::Time),
    ("µs", 1e-6, Dimension::Time),
    ("ns", 1e-9, Dimension::Time),
    ("s", 1.0, Dimension::Time),
];

/// Parse a quantity string like `"1210 MHz"`, `"3.3 uW"`, `"-12 dBm"` or
/// `"0.652"` into an SI value and its dimension. Unknown unit suffixes are
/// an error: silent defaults are the main source of unit bugs.
pub fn parse_quantity(s: &str) -> Result<(f64, Dimension)> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Config("empty quantity string".into()));
    }
    // first alphabetic char starts the unit, except an 'e'/'E' that is
    // part of a scientific-notation exponent ("5.2e-10 W")
    let mut split = s.len();
    for (i, c) in s.char_indices() {
        if c.is_ascii_alphabetic() || c == 'µ' || c == 'Ω' {
            if c == 'e' || c == 'E' {
                let prev_digit =
                    s[..i].chars().next_back().is_some_and(|p| p.is_ascii_digit() || p == '.');
                let next_num = s[i + 1..]
                    .chars()
                    .next()
                    .is_some_and(|n| n.is_ascii_digit() || n == '+' || n == '-');
                if prev_digit && next_num {
                    continue;
                }
            }
            split = i;
            break;
        }
    }
    let (num_part, unit_part) = s.split_at(split);
    let value: f64 = num_part
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse number in quantity {s:?}")))?;
    let unit = unit_part.trim();
    if unit.is_empty() {
        return Ok((value, Dimension::Dimensionless));
    }
    if unit == "dBm" {
        return Ok((dbm_to_watts(value), Dimension::Power));
    }
    if unit == "Ω" || unit == "kΩ" {
        let mul = if unit == "kΩ" { 1e3 } else { 1.0 };
        return Ok((value * mul, Dimension::Impedance));
    }
    for &(suffix, mul, dim) in UNIT_TABLE {
        if unit == suffix {
            return Ok((value * mul, dim));
        }
    }
    Err(Error::Config(format!(
        "unknown unit {unit:?} in quantity {s:?} (expected one of Hz/kHz/MHz/GHz/THz, W/mW/uW/nW/pW/fW/dBm, V/mV/uV, ohm, m/mm/um/nm, J/…fJ, s/…ns)"
    )))
}

fn parse_dim(s: &str, want: Dimension) -> Result<f64> {
    let (v, dim) = parse_quantity(s)?;
    if dim != want && dim != Dimension::Dimensionless {
        return Err(Error::Config(format!(
            "quantity {s:?} has dimension {}, expected {}",
            dim.name(),
            want.name()
        )));
    }
    if dim == Dimension::Dimensionless && want != Dimension::Dimensionless {
        return Err(Error::Config(format!(
            "quantity {s:?} is missing a {} unit",
            want.name()
        )));
    }
    Ok(v)
}

macro_rules! quantity_newtype {
    ($(#[$meta:meta])* $name:ident, $dim:expr, $canon:expr) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name(pub f64);

        impl $name {
            /// SI value carried by this quantity.
            pub fn si(self) -> f64 {
                self.0
            }
        }

        impl std::str::FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                parse_dim(s, $dim).map($name)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
                ser.serialize_str(&format!(concat!("{} ", $canon), self.0))
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(de)?;
                s.parse().map_err(|e: Error| D::Error::custom(e.to_string()))
            }
        }
    };
}

quantity_newtype!(
    /// Ordinary frequency stored in Hz; `angular()` gives the rad/s value.
    Freq,
    Dimension::Frequency,
    "Hz"
);
quantity_newtype!(
    /// Power stored in W.
    Power,
    Dimension::Power,
    "W"
);
quantity_newtype!(
    /// Voltage stored in V.
    Volt,
    Dimension::Voltage,
    "V"
);
quantity_newtype!(
    /// Impedance stored in ohm.
    Ohm,
    Dimension::Impedance,
    "ohm"
);
quantity_newtype!(
    /// Length stored in m.
    Length,
    Dimension::Length,
    "m"
);

impl Freq {
    /// Angular rate in rad/s.
    pub fn angular(self) -> f64 {
        angular(self.0)
    }
}
