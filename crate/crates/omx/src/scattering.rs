//! Closed-form linear-response scattering of the pumped transducer:
//! optical reflection S_oo, conversion amplitudes S_oe/S_eo, conversion
//! efficiencies, internal gain and the qubit-transduction figures of merit.
//!
//! Conventions: Δ = ω_c − ω_p, so a blue pump has Δ < 0; ω is the offset
//! of the probe sideband from the pump, swept by the VNA. For a blue pump
//! the cavity-resonant sideband sits at ω = −Δ; for a red pump at ω = +Δ.
//! Only the cavity-resonant sideband is kept (single-sideband model,
//! justified for ω_m > κ).

use num_complex::Complex64;

use crate::device::{DeviceParams, PumpSide, PumpState, ThreeModeParams};
use crate::error::{Error, Result};
use crate::units::HBAR;

type C64 = Complex64;

const I: C64 = Complex64::new(0.0, 1.0);

/// Coupled-mode denominator D(ω) shared by the conversion amplitudes:
///
/// blue: D = [i(Δ+ω)+κ/2]·[i(ω−ω_m)+γ/2] − G²
/// red:  D = [i(Δ−ω)+κ/2]·[i(ω−ω_m)+γ/2] + G²
fn coupled_denominator(dev: &DeviceParams, pump: &PumpState, omega: f64) -> C64 {
    let kappa = dev.cavity.kappa();
    let gamma = dev.mech.gamma();
    let omega_m = dev.mech.omega_m();
    let g2 = pump.g_eff * pump.g_eff;
    let mech = I * (omega - omega_m) + gamma / 2.0;
    match pump.side() {
        PumpSide::Blue => (I * (pump.delta + omega) + kappa / 2.0) * mech - g2,
        PumpSide::Red => (I * (pump.delta - omega) + kappa / 2.0) * mech + g2,
    }
}

/// Optical reflection S_oo(ω) of the weak probe sideband, including the
/// direct feedthrough term:
///
/// S_oo = 1 − κ_e / (i(Δ±ω) + κ/2 ∓ G²/(i(ω−ω_m)+γ/2))
///
/// with the upper (lower) signs for a blue (red) pump.
pub fn s_oo(dev: &DeviceParams, pump: &PumpState, omega: f64) -> C64 {
    let kappa = dev.cavity.kappa();
    let gamma = dev.mech.gamma();
    let omega_m = dev.mech.omega_m();
    let g2 = pump.g_eff * pump.g_eff;
    let mech = I * (omega - omega_m) + gamma / 2.0;
    let denom = match pump.side() {
        PumpSide::Blue => I * (pump.delta + omega) + kappa / 2.0 - g2 / mech,
        PumpSide::Red => I * (pump.delta - omega) + kappa / 2.0 + g2 / mech,
    };
    1.0 - dev.cavity.kappa_e() / denom
}

/// Microwave → optical conversion amplitude S_oe(ω).
pub fn s_oe(dev: &DeviceParams, pump: &PumpState, omega: f64) -> C64 {
    let root = (dev.cavity.kappa_e() * dev.mech.gamma_mu()).sqrt();
    // pump phase taken as reference zero: alpha_0 = sqrt(n_c)
    I * root * pump.g_eff / coupled_denominator(dev, pump, omega)
}

/// Optical → microwave conversion amplitude S_eo(ω).
/// |S_eo(ω)| = |S_oe(ω)| for every ω (reciprocity of the linear model).
pub fn s_eo(dev: &DeviceParams, pump: &PumpState, omega: f64) -> C64 {
    let root = (dev.cavity.kappa_e() * dev.mech.gamma_mu()).sqrt();
    -I * root * pump.g_eff / coupled_denominator(dev, pump, omega)
}

/// Internal gain/efficiency factor 4C/(1∓C)² evaluated with the sign of
/// the pump side; blue diverges at the lasing threshold C = 1.
fn internal_factor(coop: f64, side: PumpSide) -> Result<f64> {
    if !(coop >= 0.0) {
        return Err(Error::Domain(format!("cooperativity must be >= 0, got {coop}")));
    }
    match side {
        PumpSide::Red => Ok(4.0 * coop / ((1.0 + coop) * (1.0 + coop))),
        PumpSide::Blue => {
            if coop >= 1.0 {
                Err(Error::LasingRegime { coop })
            } else {
                Ok(4.0 * coop / ((1.0 - coop) * (1.0 - coop)))
            }
        }
    }
}

/// Total fiber-to-line conversion efficiency at the matched operating
/// point (Δ = ∓ω_m, probe at ω_m):
///
/// η_total = η_oc · η_o · η_m · 4C/(1±C)²
///
/// Red side is bounded by η_e with equality at C = 1; blue side requires
/// C < 1 and returns a lasing-regime error otherwise.
pub fn total_efficiency(dev: &DeviceParams, coop: f64, side: PumpSide) -> Result<f64> {
    Ok(dev.eta_e() * internal_factor(coop, side)?)
}

/// Blue-pump internal gain G_int = 4C/(1−C)², valid for 0 ≤ C < 1.
pub fn internal_gain(coop: f64) -> Result<f64> {
    internal_factor(coop, PumpSide::Blue)
}

/// Peak conversion efficiency of the full optical–mechanical–
/// electromechanical three-mode chain:
///
/// η = η_oc · (κ_e/κ)(κ_c,e/κ_c) · 4·C_ab·C_bc / (1 ± C_ab + C_bc)²
///
/// For C_bc ≪ 1 this reduces to the two-mode result with the effective
/// line coupling γ_µ = 4g_bc²κ_c,e/κ_c².
pub fn three_mode_efficiency(
    dev: &DeviceParams,
    tm: &ThreeModeParams,
    coop_ab: f64,
    side: PumpSide,
) -> Result<f64> {
    if !(coop_ab >= 0.0) {
        return Err(Error::Domain(format!("cooperativity must be >= 0, got {coop_ab}")));
    }
    let coop_bc = tm.coop_bc(dev.mech.gamma());
    let denom = match side {
        PumpSide::Red => 1.0 + coop_ab + coop_bc,
        PumpSide::Blue => {
            let d = 1.0 - coop_ab + coop_bc;
            if d <= 0.0 {
                return Err(Error::LasingRegime { coop: coop_ab });
            }
            d
        }
    };
    let ext = dev.eta_oc() * dev.cavity.eta_o() * (tm.kappa_ce() / tm.kappa_c());
    Ok(ext * 4.0 * coop_ab * coop_bc / (denom * denom))
}

/// Effective decay of the local mechanical mode into the line through a
/// detuned electromechanical mode:
///
/// γ_µ(Δ_bc) = 4g_bc²κ_c,e / (4Δ_bc² + κ_c²)
///
/// Even in Δ_bc and maximal on resonance.
pub fn gamma_mu_mismatch(tm: &ThreeModeParams) -> f64 {
    let d = tm.delta_bc();
    4.0 * tm.g_bc() * tm.g_bc() * tm.kappa_ce() / (4.0 * d * d + tm.kappa_c() * tm.kappa_c())
}

/// Coupling rate between the mechanical mode and a resonant microwave
/// qubit/resonator of characteristic impedance `z_c`:
///
/// g_µ = √(γ_µ·ω_m) · √(Z_c/Z₀) / 2
pub fn qubit_coupling(dev: &DeviceParams, z_c: f64) -> Result<f64> {
    if !(z_c > 0.0) {
        return Err(Error::Domain(format!("impedance must be > 0, got {z_c}")));
    }
    let mech = dev.mech;
    Ok((mech.gamma_mu() * mech.omega_m()).sqrt() * (z_c / dev.z0()).sqrt() / 2.0)
}

/// Optical pump energy dissipated in the cold stage per converted qubit,
/// at the matched operating point C = 1:
///
/// E_qubit = ħω_c · κκ_i / (4g₀²) / (η_o·η_m)
pub fn energy_per_qubit(dev: &DeviceParams) -> f64 {
    let kappa = dev.cavity.kappa();
    let kappa_i = dev.cavity.kappa_i();
    if kappa_i == 0.0 {
        return 0.0;
    }
    let g0 = dev.g0();
    HBAR * dev.cavity.omega_c() * kappa * kappa_i
        / (4.0 * g0 * g0)
        / (dev.cavity.eta_o() * dev.mech.eta_m())
}
