//! Measurement-chain arithmetic: raw instrument readings → photon fluxes →
//! end-to-end conversion efficiencies.
//!
//! Two chains are covered. Microwave→optical: a known microwave power
//! drives the device, the optical output is detected as a microwave beat
//! whose power is referred back to optical power through a calibrated
//! detection gain. Optical→microwave: an EOM sideband of known ratio to
//! the pump drives the device and the converted microwave power is read
//! directly. A PSD band integrator supports the low-power route.
//!
//! Every step is a ratio of powers times a photon energy, so the whole
//! module is exactly homogeneous: scaling all powers by λ changes no
//! efficiency.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{Trace, TraceKind};
use crate::units::HBAR;

/// Fixed losses of the measurement chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    /// Microwave cable transmission between instrument and device.
    pub eta_cable: f64,
    /// Fiber-to-power-meter transmission on the optical readout arm.
    pub eta_out: f64,
    /// Transmission-line impedance (ohm).
    pub z0: f64,
}

impl ChainParams {
    pub fn new(eta_cable: f64, eta_out: f64, z0: f64) -> Result<Self> {
        for (name, v) in [("eta_cable", eta_cable), ("eta_out", eta_out)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidParam(format!("{name} must be in (0, 1], got {v}")));
            }
        }
        if !(z0 > 0.0) {
            return Err(Error::InvalidParam(format!("z0 must be > 0, got {z0}")));
        }
        Ok(Self { eta_cable, eta_out, z0 })
    }
}

/// Detection gain between optical power at the fiber output and microwave
/// power at the analyzer, W per W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionGain(pub f64);

impl DetectionGain {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Microwave photon flux arriving at the device:
/// Ṅ = η_cable·P/(ħω_µ).
pub fn microwave_input_flux(p_instrument: f64, omega_mu: f64, chain: &ChainParams) -> Result<f64> {
    if !(p_instrument >= 0.0) {
        return Err(Error::Domain(format!("power must be >= 0, got {p_instrument}")));
    }
    if !(omega_mu > 0.0) {
        return Err(Error::Domain(format!("frequency must be > 0, got {omega_mu}")));
    }
    Ok(chain.eta_cable * p_instrument / (HBAR * omega_mu))
}

/// Optical detection gain from the two-laser beat calibration:
/// G = P_cal,µ / (P_cal,o / η_out).
pub fn detection_gain(p_cal_mu: f64, p_cal_o: f64, eta_out: f64) -> Result<DetectionGain> {
    if !(p_cal_mu > 0.0 && p_cal_o > 0.0) {
        return Err(Error::Domain(format!(
            "calibration powers must be > 0, got {p_cal_mu}, {p_cal_o}"
        )));
    }
    if !(eta_out > 0.0 && eta_out <= 1.0) {
        return Err(Error::Domain(format!("eta_out must be in (0, 1], got {eta_out}")));
    }
    Ok(DetectionGain(p_cal_mu / (p_cal_o / eta_out)))
}

/// Microwave→optical efficiency: the detected beat power is referred to an
/// optical photon flux at the fiber and divided by the input microwave
/// flux:
///
/// η_oe = (P_out,µ/(G·ħω_c)) / Ṅ_in,µ
pub fn oe_efficiency(
    p_out_mu: f64,
    gain: DetectionGain,
    omega_c: f64,
    flux_in_mu: f64,
) -> Result<f64> {
    if !(p_out_mu >= 0.0) {
        return Err(Error::Domain(format!("power must be >= 0, got {p_out_mu}")));
    }
    if !(gain.0 > 0.0) || !(omega_c > 0.0) || !(flux_in_mu > 0.0) {
        return Err(Error::Domain(
            "gain, optical frequency and input flux must be > 0".into(),
        ));
    }
    let flux_out_o = p_out_mu / (gain.0 * HBAR * omega_c);
    Ok(flux_out_o / flux_in_mu)
}

/// Result of a filter-scan reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandRatio {
    /// (V_sb − V_dark)/(V_pump − V_dark).
    pub ratio: f64,
    /// Dark level used for the subtraction (5th percentile of the scan).
    pub dark: f64,
    pub pump_peak: f64,
    pub sideband_peak: f64,
}

/// Sideband-to-pump power ratio from a filter transmission scan.
///
/// Deterministic reduction: the dark level is the 5th percentile of the
/// scan, peaks are local maxima above dark + 3×MAD, the pump is the global
/// maximum and sidebands are the largest remaining peak outside an
/// exclusion window of three pump-widths (which also suppresses the
/// polarization artifact next to the pump).
pub fn sideband_ratio(scan: &Trace) -> Result<SidebandRatio> {
    if scan.kind() != TraceKind::Voltage {
        return Err(Error::ScanRejected(format!(
            "expected a voltage filter scan, got {}",
            scan.kind()
        )));
    }
    let x = scan.x();
    let y = scan.y_real()?;
    let n = y.len();
    if n < 8 {
        return Err(Error::ScanRejected(format!("scan too short: {n} samples")));
    }

    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let dark = sorted[(0.05 * (n - 1) as f64).round() as usize];
    let med = sorted[n / 2];
    let mut dev: Vec<f64> = y.iter().map(|&v| (v - med).abs()).collect();
    dev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mad = dev[n / 2].max(1e-300 * med.abs().max(1.0));
    let threshold = dark + 3.0 * mad;

    // local maxima above the peak threshold (left-most sample of plateaus)
    let peaks: Vec<usize> = (1..n - 1)
        .filter(|&i| y[i] > threshold && y[i] > y[i - 1] && y[i] >= y[i + 1])
        .collect();
    if peaks.len() < 2 {
        return Err(Error::ScanRejected(format!(
            "found {} peak(s) above 3x the baseline spread; need a pump and at least one sideband",
            peaks.len()
        )));
    }

    let &i_pump = peaks
        .iter()
        .max_by(|&&a, &&b| y[a].partial_cmp(&y[b]).unwrap())
        .expect("non-empty");
    // pump width: distance to half level on both sides
    let half = dark + (y[i_pump] - dark) / 2.0;
    let mut i_lo = i_pump;
    while i_lo > 0 && y[i_lo] > half {
        i_lo -= 1;
    }
    let mut i_hi = i_pump;
    while i_hi < n - 1 && y[i_hi] > half {
        i_hi += 1;
    }
    let width = (x[i_hi] - x[i_lo]).max(x[1] - x[0]);
    let exclusion = 3.0 * width;

    let sideband = peaks
        .iter()
        .filter(|&&i| (x[i] - x[i_pump]).abs() > exclusion)
        .max_by(|&&a, &&b| y[a].partial_cmp(&y[b]).unwrap());
    let &i_sb = sideband.ok_or_else(|| {
        Error::ScanRejected("no sideband peak outside the pump exclusion window".into())
    })?;

    let pump_amp = y[i_pump] - dark;
    let sb_amp = y[i_sb] - dark;
    if sb_amp <= 0.0 || pump_amp <= 0.0 {
        return Err(Error::ScanRejected("degenerate peak amplitudes after dark subtraction".into()));
    }
    Ok(SidebandRatio { ratio: sb_amp / pump_amp, dark, pump_peak: y[i_pump], sideband_peak: y[i_sb] })
}

/// Optical→microwave efficiency from the EOM-sideband drive:
///
/// Ṅ_out,µ = P_EOM,µ·|S21|²/(η_cable·ħω_µ), Ṅ_in,o = P_pump·r/(ħω_c),
/// η_eo = Ṅ_out,µ/Ṅ_in,o
pub fn eo_efficiency(
    s21_sq: f64,
    p_eom_mu: f64,
    chain: &ChainParams,
    r: f64,
    p_pump_in: f64,
    omega_c: f64,
    omega_mu: f64,
) -> Result<f64> {
    if !(s21_sq >= 0.0) {
        return Err(Error::Domain(format!("|S21|^2 must be >= 0, got {s21_sq}")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("sideband ratio must be in (0, 1), got {r}")));
    }
    if !(p_eom_mu > 0.0 && p_pump_in > 0.0 && omega_c > 0.0 && omega_mu > 0.0) {
        return Err(Error::Domain("powers and frequencies must be > 0".into()));
    }
    let flux_out_mu = p_eom_mu * s21_sq / (chain.eta_cable * HBAR * omega_mu);
    let flux_in_o = p_pump_in * r / (HBAR * omega_c);
    Ok(flux_out_mu / flux_in_o)
}

/// Total power in the band f_center ± 2·f_bw of a PSD trace (W/Hz vs Hz),
/// by trapezoidal integration with linear interpolation at the band edges.
pub fn integrate_psd(psd: &Trace, f_center: f64, f_bw: f64) -> Result<f64> {
    if psd.kind() != TraceKind::Psd {
        return Err(Error::Domain(format!("expected a PSD trace, got {}", psd.kind())));
    }
    if !(f_bw > 0.0) {
        return Err(Error::Domain(format!("bandwidth must be > 0, got {f_bw}")));
    }
    let x = psd.x();
    let y = psd.y_real()?;
    let (lo, hi) = (f_center - 2.0 * f_bw, f_center + 2.0 * f_bw);
    if lo < x[0] || hi > x[x.len() - 1] {
        return Err(Error::Domain(format!(
            "band [{lo:.6e}, {hi:.6e}] Hz is outside the trace span [{:.6e}, {:.6e}] Hz",
            x[0],
            x[x.len() - 1]
        )));
    }
    let interp = |f: f64| -> f64 {
        let i = x.partition_point(|&v| v < f).clamp(1, x.len() - 1);
        let (x0, x1) = (x[i - 1], x[i]);
        let (y0, y1) = (y[i - 1], y[i]);
        y0 + (y1 - y0) * (f - x0) / (x1 - x0)
    };
    let mut total = 0.0;
    let mut prev_f = lo;
    let mut prev_y = interp(lo);
    for (&xi, &yi) in x.iter().zip(y) {
        if xi <= lo {
            continue;
        }
        if xi >= hi {
            break;
        }
        total += 0.5 * (prev_y + yi) * (xi - prev_f);
        prev_f = xi;
        prev_y = yi;
    }
    total += 0.5 * (prev_y + interp(hi)) * (hi - prev_f);
    Ok(total)
}
