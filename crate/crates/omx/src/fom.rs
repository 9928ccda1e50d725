//! Figure-of-merit table generation: recompute the derived columns of a
//! transducer-comparison table (C₀, η₀, η_int, E_bit, E_qubit) from each
//! record's primary rates, flagging cells whose inputs are missing rather
//! than dropping rows.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bitcost::{e_bit_fast, e_bit_slow};
use crate::error::{Error, Result};
use crate::units::{angular_from_wavelength, Freq, Length, HBAR};

/// Values quoted by a record's source, carried as data for comparison.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reported {
    #[serde(default)]
    pub c0: Option<f64>,
    #[serde(default)]
    pub eta0: Option<f64>,
    #[serde(default)]
    pub eta_int: Option<f64>,
    #[serde(default)]
    pub eta_eo: Option<f64>,
    #[serde(default)]
    pub eta_oe: Option<f64>,
    #[serde(default)]
    pub eta_blue: Option<f64>,
    #[serde(default)]
    pub e_bit_j: Option<f64>,
    #[serde(default)]
    pub e_qubit_j: Option<f64>,
}

/// Alternate (g₀, η_m) pair for the bit-energy column, for records whose
/// bit-energy figure was derived from a different measurement route than
/// the tabulated rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EbitInputs {
    pub g0: Freq,
    pub eta_m: f64,
}

/// One transducer record. Missing entries are explicit nulls; nothing is
/// ever silently defaulted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceRecord {
    pub label: String,
    pub platform: String,
    #[serde(default)]
    pub g0: Option<Freq>,
    #[serde(default)]
    pub kappa: Option<Freq>,
    #[serde(default)]
    pub gamma: Option<Freq>,
    #[serde(default)]
    pub omega_m: Option<Freq>,
    #[serde(default)]
    pub eta_o: Option<f64>,
    #[serde(default)]
    pub eta_m: Option<f64>,
    #[serde(default)]
    pub eta_oc: Option<f64>,
    #[serde(default)]
    pub wavelength: Option<Length>,
    /// Operating intracavity photon number for the η_int column.
    #[serde(default)]
    pub n_c: Option<f64>,
    #[serde(default)]
    pub ebit_inputs: Option<EbitInputs>,
    #[serde(default)]
    pub pump: Option<String>,
    #[serde(default)]
    pub reported: Reported,
    /// Per-field note on where each value comes from
    /// (measured / fit / literature / assumed / …).
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
}

/// Container format of a device database file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviceDb {
    pub records: Vec<DeviceRecord>,
}

/// The record set shipped with the crate.
pub fn builtin_records() -> Result<Vec<DeviceRecord>> {
    let db: DeviceDb = serde_json::from_str(include_str!("../data/devices.json"))?;
    Ok(db.records)
}

/// Which closed-form bit-energy limit applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// κ > ω_m: quasi-static modulator.
    Slow,
    /// κ < ω_m: sideband-resolved modulator.
    Fast,
}

/// Computed figure-of-merit columns for one record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FomRow {
    pub label: String,
    pub platform: String,
    /// C₀ = 4g₀²/(κγ) from the record's rates.
    pub c0: Option<f64>,
    /// η₀ = 4·η_o·η_m·C₀ (single-pump-photon on-chip efficiency); uses the
    /// record's stated C₀ when present (it may come from an efficiency fit
    /// rather than the rate product), otherwise the computed one.
    pub eta0: Option<f64>,
    /// η_int = 4C/(1+C)² at the record's operating photon number.
    pub eta_int: Option<f64>,
    pub regime: Option<Regime>,
    pub e_bit_j: Option<f64>,
    pub e_qubit_j: Option<f64>,
    pub reported: Reported,
    /// Cells that could not be computed and why.
    pub flags: Vec<String>,
}

/// Compute every derivable column of one record.
pub fn compute_fom(rec: &DeviceRecord) -> FomRow {
    let mut flags = Vec::new();
    let g0 = rec.g0.map(|f| f.angular());
    let kappa = rec.kappa.map(|f| f.angular());
    let gamma = rec.gamma.map(|f| f.angular());
    let omega_m = rec.omega_m.map(|f| f.angular());

    let c0 = match (g0, kappa, gamma) {
        (Some(g), Some(k), Some(gm)) => Some(4.0 * g * g / (k * gm)),
        _ => {
            flags.push("c0: missing g0/kappa/gamma".into());
            None
        }
    };
    let c0_used = rec.reported.c0.or(c0);

    let eta0 = match (rec.eta_o, rec.eta_m, c0_used) {
        (Some(eo), Some(em), Some(c)) => Some(4.0 * eo * em * c),
        _ => {
            flags.push("eta0: missing eta_o/eta_m/c0".into());
            None
        }
    };

    let eta_int = match (rec.n_c, c0_used) {
        (Some(nc), Some(c0v)) => {
            let c = c0v * nc;
            Some(4.0 * c / ((1.0 + c) * (1.0 + c)))
        }
        _ => {
            flags.push("eta_int: no operating photon number".into());
            None
        }
    };

    let regime = match (kappa, omega_m) {
        (Some(k), Some(w)) => Some(if k > w { Regime::Slow } else { Regime::Fast }),
        _ => None,
    };

    let (ebit_g0, ebit_eta_m) = match rec.ebit_inputs {
        Some(e) => (Some(e.g0.angular()), Some(e.eta_m)),
        None => (g0, rec.eta_m),
    };
    let e_bit_j = match (regime, omega_m, kappa, ebit_g0, ebit_eta_m) {
        (Some(Regime::Slow), Some(w), Some(k), Some(g), Some(em)) => {
            e_bit_slow(w, k, g, em).ok()
        }
        (Some(Regime::Fast), Some(w), _, Some(g), Some(em)) => e_bit_fast(w, g, em).ok(),
        _ => None,
    };
    if e_bit_j.is_none() {
        flags.push("e_bit: missing omega_m/kappa/g0/eta_m".into());
    }

    let e_qubit_j = match (rec.wavelength, kappa, rec.eta_o, g0, rec.eta_m) {
        (Some(lam), Some(k), Some(eo), Some(g), Some(em)) => {
            let omega_c = angular_from_wavelength(lam.0);
            let kappa_i = k * (1.0 - eo);
            Some(HBAR * omega_c * k * kappa_i / (4.0 * g * g) / (eo * em))
        }
        _ => {
            flags.push("e_qubit: missing wavelength/kappa/eta_o/g0/eta_m".into());
            None
        }
    };

    FomRow {
        label: rec.label.clone(),
        platform: rec.platform.clone(),
        c0,
        eta0,
        eta_int,
        regime,
        e_bit_j,
        e_qubit_j,
        reported: rec.reported.clone(),
        flags,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.3e}"))
}

fn rel_diff(computed: Option<f64>, reported: Option<f64>) -> String {
    match (computed, reported) {
        (Some(c), Some(r)) if r != 0.0 => format!("{:.1}%", 100.0 * (c - r) / r),
        _ => String::new(),
    }
}

/// Render the matrix as a plot-ready CSV with computed/reported pairs and
/// a flags column.
pub fn fom_table_csv(rows: &[FomRow]) -> String {
    let mut out = String::from(
        "label,platform,regime,c0,c0_reported,c0_diff,eta0,eta0_reported,eta0_diff,eta_int,eta_int_reported,eta_int_diff,e_bit_j,e_bit_reported_j,e_bit_diff,e_qubit_j,e_qubit_reported_j,e_qubit_diff,flags\n",
    );
    for r in rows {
        let regime = r.regime.map_or(String::new(), |g| {
            match g {
                Regime::Slow => "slow",
                Regime::Fast => "fast",
            }
            .to_string()
        });
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.label.replace(',', ";"),
            r.platform,
            regime,
            fmt_opt(r.c0),
            fmt_opt(r.reported.c0),
            rel_diff(r.c0, r.reported.c0),
            fmt_opt(r.eta0),
            fmt_opt(r.reported.eta0),
            rel_diff(r.eta0, r.reported.eta0),
            fmt_opt(r.eta_int),
            fmt_opt(r.reported.eta_int),
            rel_diff(r.eta_int, r.reported.eta_int),
            fmt_opt(r.e_bit_j),
            fmt_opt(r.reported.e_bit_j),
            rel_diff(r.e_bit_j, r.reported.e_bit_j),
            fmt_opt(r.e_qubit_j),
            fmt_opt(r.reported.e_qubit_j),
            rel_diff(r.e_qubit_j, r.reported.e_qubit_j),
            r.flags.join("; ").replace(',', ";"),
        ));
    }
    out
}

/// Load records from a JSON database file.
pub fn load_records(path: &std::path::Path) -> Result<Vec<DeviceRecord>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read device database {path:?}: {e}")))?;
    let db: DeviceDb = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("bad device database {path:?}: {e}")))?;
    Ok(db.records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn builtin_records_parse() {
        let recs = builtin_records().unwrap();
        assert_eq!(recs.len(), 6);
        assert!(recs.iter().any(|r| r.label.contains("reference")));
    }

    #[test]
    fn reference_row_reproduces_reported_columns() {
        let recs = builtin_records().unwrap();
        let reference = recs.iter().find(|r| r.label.contains("reference")).unwrap();
        let row = compute_fom(reference);
        assert_relative_eq!(row.eta0.unwrap(), 3.2e-8, max_relative = 0.10);
        assert_relative_eq!(row.e_qubit_j.unwrap(), 3.5e-9, max_relative = 0.10);
        assert_relative_eq!(row.e_bit_j.unwrap(), 9.7e-14, max_relative = 0.10);
        assert_relative_eq!(row.eta_int.unwrap(), 2.6e-2, max_relative = 0.10);
        assert_eq!(row.regime, Some(Regime::Fast));
    }

    #[test]
    fn aln_row_cooperativity() {
        let recs = builtin_records().unwrap();
        let aln = recs.iter().find(|r| r.platform == "AlN").unwrap();
        let row = compute_fom(aln);
        assert_relative_eq!(row.c0.unwrap(), 7e-7, max_relative = 0.10);
        assert_eq!(row.regime, Some(Regime::Slow));
        // no operating photon number -> eta_int flagged, not invented
        assert!(row.eta_int.is_none());
        assert!(row.flags.iter().any(|f| f.contains("eta_int")));
    }

    #[test]
    fn missing_eta_m_flags_eta0_but_keeps_c0() {
        let rec = DeviceRecord {
            label: "partial".into(),
            platform: "test".into(),
            g0: Some(Freq(1e5)),
            kappa: Some(Freq(1e9)),
            gamma: Some(Freq(1e6)),
            omega_m: Some(Freq(2e9)),
            eta_o: Some(0.5),
            eta_m: None,
            eta_oc: None,
            wavelength: None,
            n_c: None,
            ebit_inputs: None,
            pump: None,
            reported: Reported::default(),
            provenance: BTreeMap::new(),
        };
        let row = compute_fom(&rec);
        assert!(row.c0.is_some());
        assert!(row.eta0.is_none());
        assert!(row.flags.iter().any(|f| f.starts_with("eta0")));
        let csv = fom_table_csv(&[row]);
        assert!(csv.contains("eta0: missing"));
    }

    #[test]
    fn table_csv_has_all_rows() {
        let recs = builtin_records().unwrap();
        let rows: Vec<FomRow> = recs.iter().map(compute_fom).collect();
        let csv = fom_table_csv(&rows);
        assert_eq!(csv.lines().count(), 1 + recs.len());
    }

    #[test]
    fn db_round_trips_through_json() {
        let recs = builtin_records().unwrap();
        let s = serde_json::to_string_pretty(&DeviceDb { records: recs.clone() }).unwrap();
        let back: DeviceDb = serde_json::from_str(&s).unwrap();
        assert_eq!(back.records, recs);
    }
}
