//! Configuration schemas for the CLI commands.
//!
//! One JSON file per run. Dimensioned values are unit-suffixed strings
//! ("1210 MHz", "3.3 uW", "50 ohm") parsed strictly — an unknown unit is a
//! config error, never a silent default. Frequencies are ordinary Hz;
//! the 2π conversion happens exactly once, in `build()` methods.

use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, MechanicalMode, OpticalCavity, PumpSide};
use crate::error::{Error, Result};
use crate::fit::{CouplingBranch, GridSpec, SynthModel};
use crate::units::{angular_from_wavelength, Freq, Length, Ohm, Power};

/// Full transducer description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    /// Optical carrier, either as a vacuum wavelength …
    #[serde(default)]
    pub wavelength: Option<Length>,
    /// … or directly as a frequency; exactly one must be given.
    #[serde(default)]
    pub f_c: Option<Freq>,
    pub kappa: Freq,
    pub kappa_e: Freq,
    pub omega_m: Freq,
    pub gamma: Freq,
    pub gamma_mu: Freq,
    pub g0: Freq,
    pub eta_oc: f64,
    #[serde(default)]
    pub z0: Option<Ohm>,
}

impl DeviceConfig {
    pub fn build(&self) -> Result<DeviceParams> {
        let omega_c = match (self.wavelength, self.f_c) {
            (Some(lam), None) => angular_from_wavelength(lam.0),
            (None, Some(f)) => f.angular(),
            _ => {
                return Err(Error::Config(
                    "device needs exactly one of `wavelength` or `f_c`".into(),
                ))
            }
        };
        let cavity = OpticalCavity::new(omega_c, self.kappa.angular(), self.kappa_e.angular())?;
        let mech = MechanicalMode::new(
            self.omega_m.angular(),
            self.gamma.angular(),
            self.gamma_mu.angular(),
        )?;
        DeviceParams::with_impedance(
            cavity,
            mech,
            self.g0.angular(),
            self.eta_oc,
            self.z0.map_or(50.0, |z| z.0),
        )
    }
}

/// Bare cavity (for AOM spectra, where the optical carrier is irrelevant).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityConfig {
    pub kappa: Freq,
    pub kappa_e: Freq,
}

impl CavityConfig {
    pub fn build(&self) -> Result<OpticalCavity> {
        OpticalCavity::new(1.0, self.kappa.angular(), self.kappa_e.angular())
    }
}

/// `omx model` tasks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelTask {
    /// Total conversion efficiency versus intracavity photon number.
    EfficiencySweep { side: PumpSide, n_c: GridSpec },
    /// S-parameters versus probe offset at a fixed pump.
    ScatteringSweep { delta: Freq, n_c: f64, omega: GridSpec },
    /// Scalar figures of merit of the device.
    Figures {
        #[serde(default)]
        z_c: Option<Ohm>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub device: DeviceConfig,
    pub task: ModelTask,
}

/// `omx aom` tasks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AomTask {
    /// Modulated reflection spectrum over a detuning grid (Hz).
    Spectrum { cavity: CavityConfig, h: f64, omega_mu: Freq, delta: GridSpec },
    /// Driven phonon number and modulation index from a microwave drive.
    Drive {
        omega_m: Freq,
        gamma: Freq,
        gamma_mu: Freq,
        g0: Freq,
        omega_mu: Freq,
        p_mu: Power,
    },
    /// V_π and the associated power/energy figures from a measured (h, P).
    VPi {
        h: f64,
        p_mu: Power,
        #[serde(default)]
        z0: Option<Ohm>,
        #[serde(default)]
        bandwidth: Option<Freq>,
    },
    /// Line coupling γ_µ from a measured modulation index.
    GammaMu { h: f64, omega_mu: Freq, gamma: Freq, g0: Freq, p_mu: Power },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AomConfig {
    pub task: AomTask,
}

/// `omx bitcost`: sweep κ/ω_m and search the required phonon number.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BitcostConfig {
    pub alpha0_sq: f64,
    pub ratio_g: f64,
    pub target_pe: f64,
    pub ratio_k: GridSpec,
    /// With a mechanical frequency and efficiency the sweep also reports
    /// the energy per bit in joules.
    #[serde(default)]
    pub omega_m: Option<Freq>,
    #[serde(default)]
    pub eta_m: Option<f64>,
}

/// `omx fit` dispatch.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FitConfig {
    OpticalResonance {
        trace: String,
        branch: CouplingBranch,
    },
    Sideband {
        trace: String,
        #[serde(default)]
        g_eff: Option<Freq>,
        #[serde(default)]
        omega_m: Option<Freq>,
        #[serde(default)]
        gamma: Option<Freq>,
        #[serde(default)]
        branch: Option<CouplingBranch>,
    },
    AomSpectrum {
        trace: String,
        kappa: Freq,
        kappa_e: Freq,
        omega_mu: Freq,
    },
    Backaction {
        trace: String,
        kappa: Freq,
    },
    Efficiency {
        trace: String,
        side: PumpSide,
        #[serde(default)]
        kappa: Option<Freq>,
        #[serde(default)]
        gamma: Option<Freq>,
    },
}

/// `omx calibrate` dispatch.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CalibrateConfig {
    /// Microwave→optical chain.
    Oe {
        p_in_mu: Power,
        omega_mu: Freq,
        eta_cable: f64,
        eta_out: f64,
        #[serde(default)]
        z0: Option<Ohm>,
        p_cal_mu: Power,
        p_cal_o: Power,
        p_out_mu: Power,
        wavelength: Length,
    },
    /// Optical→microwave chain; the sideband ratio comes from a filter
    /// scan trace or is given directly.
    Eo {
        s21_sq: f64,
        p_eom_mu: Power,
        eta_cable: f64,
        #[serde(default)]
        scan: Option<String>,
        #[serde(default)]
        r: Option<f64>,
        p_pump_in: Power,
        wavelength: Length,
        omega_mu: Freq,
        /// Correction for the pump power actually present during
        /// modulation (fraction of the total optical power).
        #[serde(default)]
        pump_fraction: Option<f64>,
    },
    /// Just reduce a filter scan to its sideband ratio.
    SidebandRatio { scan: String },
    /// Band power from a PSD trace.
    IntegratePsd { trace: String, f_center: Freq, f_bw: Freq },
}

/// `omx table`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    /// `"builtin"` for the shipped record set, or a path to a JSON
    /// database of the same schema.
    pub records: String,
}

/// `omx synth`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub model: SynthModel,
    pub grid: GridSpec,
    pub noise: NoiseConfig,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseConfig {
    AdditiveGaussian { sigma: f64 },
}

/// Parse a config file with field-level diagnostics.
pub fn load<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {path:?}: {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("config {path:?}: {e} (line {}, column {})", e.line(), e.column())))
}
