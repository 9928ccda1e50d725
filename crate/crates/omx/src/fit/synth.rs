//! Synthetic-trace generation: every forward model the fits consume,
//! sampled on a grid with optional additive Gaussian noise. One seed, one
//! bit-identical trace — the round-trip harness and the Monte-Carlo
//! studies both hang off this.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, MechanicalMode, OpticalCavity, PumpSide, PumpState};
use crate::error::{Error, Result};
use crate::trace::{Trace, TraceData, TraceKind, XUnit};
use crate::units::{ordinary, Freq};

/// Grid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Sampling grid for the abscissa. Values are in the natural unit of the
/// model's x axis: Hz for frequency sweeps, pure numbers for photon
/// numbers and setpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn linear(start: f64, stop: f64, points: usize) -> Self {
        Self { start, stop, points, spacing: Spacing::Linear }
    }

    pub fn log(start: f64, stop: f64, points: usize) -> Self {
        Self { start, stop, points, spacing: Spacing::Log }
    }

    pub fn build(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::Config(format!("grid needs >= 2 points, got {}", self.points)));
        }
        if !(self.stop > self.start) {
            return Err(Error::Config(format!(
                "grid stop must exceed start, got [{}, {}]",
                self.start, self.stop
            )));
        }
        let n = self.points;
        Ok(match self.spacing {
            Spacing::Linear => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
            Spacing::Log => {
                if self.start <= 0.0 {
                    return Err(Error::Config("log grid needs a positive start".into()));
                }
                let ratio = self.stop / self.start;
                (0..n).map(|i| self.start * ratio.powf(i as f64 / (n - 1) as f64)).collect()
            }
        })
    }
}

/// Forward model selector for trace synthesis. Frequencies are ordinary
/// Hz (unit-suffixed strings in config files); the tag doubles as the
/// `model` field of `synth` configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SynthModel {
    /// Reflection dip vs laser frequency; x = laser frequency (Hz).
    OpticalResonance { f_c: Freq, kappa: Freq, kappa_e: Freq },
    /// Phase of S_oo vs VNA frequency; x = VNA frequency (Hz).
    SidebandPhase {
        delta: Freq,
        kappa: Freq,
        kappa_e: Freq,
        #[serde(default)]
        g_eff: Option<Freq>,
        #[serde(default)]
        omega_m: Option<Freq>,
        #[serde(default)]
        gamma: Option<Freq>,
    },
    /// Complex S_oo vs VNA frequency.
    SidebandComplex {
        delta: Freq,
        kappa: Freq,
        kappa_e: Freq,
        #[serde(default)]
        g_eff: Option<Freq>,
        #[serde(default)]
        omega_m: Option<Freq>,
        #[serde(default)]
        gamma: Option<Freq>,
    },
    /// Modulated reflection vs pump detuning; x = detuning (Hz), optionally
    /// shifted/scaled to exercise the abscissa nuisance parameters.
    AomSpectrum {
        kappa: Freq,
        kappa_e: Freq,
        h: f64,
        omega_mu: Freq,
        #[serde(default)]
        x_shift: Option<Freq>,
        #[serde(default)]
        x_scale: Option<f64>,
    },
    /// Effective mechanical linewidth (Hz) vs intracavity photon number
    /// under a blue pump.
    Backaction { gamma: Freq, g0: Freq, kappa: Freq },
    /// Total conversion efficiency vs intracavity photon number.
    Efficiency { eta_e: f64, c0: f64, side: PumpSide },
    /// Filter-scan voltage vs setpoint: pump peak plus two sidebands over
    /// a dark level; `ratio` is the dark-subtracted sideband/pump ratio.
    FilterScan {
        pump_v: f64,
        dark_v: f64,
        ratio: f64,
        pump_pos: f64,
        sb_offset: f64,
        peak_width: f64,
    },
    /// Power spectral density (W/Hz) vs frequency: flat floor plus
    /// narrow Gaussian peaks of given total power.
    Psd {
        floor_w_per_hz: f64,
        #[serde(default)]
        peaks: Vec<PsdPeak>,
    },
}

/// One narrow spectral peak carrying `power_w` total watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdPeak {
    pub f0: Freq,
    pub power_w: f64,
    pub width_hz: f64,
}

impl SynthModel {
    fn kind(&self) -> TraceKind {
        match self {
            SynthModel::OpticalResonance { .. } | SynthModel::AomSpectrum { .. } => {
                TraceKind::Reflection
            }
            SynthModel::SidebandPhase { .. } => TraceKind::Phase,
            SynthModel::SidebandComplex { .. } => TraceKind::Complex,
            SynthModel::Backaction { .. } => TraceKind::Linewidth,
            SynthModel::Efficiency { .. } => TraceKind::Efficiency,
            SynthModel::FilterScan { .. } => TraceKind::Voltage,
            SynthModel::Psd { .. } => TraceKind::Psd,
        }
    }

    fn x_unit(&self) -> XUnit {
        match self {
            SynthModel::OpticalResonance { .. }
            | SynthModel::SidebandPhase { .. }
            | SynthModel::SidebandComplex { .. }
            | SynthModel::AomSpectrum { .. }
            | SynthModel::Psd { .. } => XUnit::Hz,
            _ => XUnit::Dimensionless,
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            SynthModel::OpticalResonance { .. } => "optical-resonance",
            SynthModel::SidebandPhase { .. } => "sideband-phase",
            SynthModel::SidebandComplex { .. } => "sideband-complex",
            SynthModel::AomSpectrum { .. } => "aom-spectrum",
            SynthModel::Backaction { .. } => "backaction",
            SynthModel::Efficiency { .. } => "efficiency",
            SynthModel::FilterScan { .. } => "filter-scan",
            SynthModel::Psd { .. } => "psd",
        }
    }

    /// Noiseless model values on the grid (x in the model's axis unit).
    fn evaluate(&self, x: &[f64]) -> Result<TraceData> {
        match self {
            SynthModel::OpticalResonance { f_c, kappa, kappa_e } => {
                let cavity = OpticalCavity::from_hz(f_c.0, kappa.0, kappa_e.0)?;
                let omega_c = cavity.omega_c();
                Ok(TraceData::Real(
                    x.iter()
                        .map(|&xi| {
                            super::resonance_reflection(
                                crate::units::angular(xi) - omega_c,
                                cavity.kappa(),
                                cavity.kappa_e(),
                            )
                        })
                        .collect(),
                ))
            }
            SynthModel::SidebandPhase { .. } | SynthModel::SidebandComplex { .. } => {
                let (delta, kappa, kappa_e, g_eff, omega_m, gamma) = match self {
                    SynthModel::SidebandPhase { delta, kappa, kappa_e, g_eff, omega_m, gamma }
                    | SynthModel::SidebandComplex { delta, kappa, kappa_e, g_eff, omega_m, gamma } => {
                        (delta, kappa, kappa_e, g_eff, omega_m, gamma)
                    }
                    _ => unreachable!(),
                };
                let g = g_eff.map_or(0.0, |f| f.angular());
                if g > 0.0 && (omega_m.is_none() || gamma.is_none()) {
                    return Err(Error::Config(
                        "sideband model with g_eff > 0 needs omega_m and gamma".into(),
                    ));
                }
                let cavity =
                    OpticalCavity::new(1.0, kappa.angular(), kappa_e.angular())?;
                let mech = MechanicalMode::new(
                    omega_m.map_or(1.0, |f| f.angular()),
                    gamma.map_or(1.0, |f| f.angular()),
                    0.0,
                )?;
                let dev = DeviceParams::new(cavity, mech, 1.0, 1.0)?;
                let pump =
                    PumpState { delta: delta.angular(), p_in: 0.0, n_c: 0.0, g_eff: g, coop: 0.0 };
                let ys: Vec<Complex64> = x
                    .iter()
                    .map(|&xi| crate::scattering::s_oo(&dev, &pump, crate::units::angular(xi)))
                    .collect();
                Ok(match self {
                    SynthModel::SidebandPhase { .. } => {
                        TraceData::Real(ys.iter().map(|y| y.arg()).collect())
                    }
                    _ => TraceData::Complex(ys),
                })
            }
            SynthModel::AomSpectrum { kappa, kappa_e, h, omega_mu, x_shift, x_scale } => {
                let cavity = OpticalCavity::new(1.0, kappa.angular(), kappa_e.angular())?;
                let shift = x_shift.map_or(0.0, |f| f.angular());
                let scale = x_scale.unwrap_or(1.0);
                let grid: Vec<f64> =
                    x.iter().map(|&xi| scale * crate::units::angular(xi) + shift).collect();
                Ok(TraceData::Real(crate::aom::reflection_spectrum(
                    &cavity,
                    *h,
                    omega_mu.angular(),
                    &grid,
                )?))
            }
            SynthModel::Backaction { gamma, g0, kappa } => {
                let (g, g0a, k) = (gamma.angular(), g0.angular(), kappa.angular());
                Ok(TraceData::Real(
                    x.iter().map(|&nc| ordinary(g - 4.0 * g0a * g0a * nc / k)).collect(),
                ))
            }
            SynthModel::Efficiency { eta_e, c0, side } => {
                let sign = match side {
                    PumpSide::Blue => -1.0,
                    PumpSide::Red => 1.0,
                };
                if *side == PumpSide::Blue {
                    if let Some(&nc_max) = x.last() {
                        if c0 * nc_max >= 1.0 {
                            return Err(Error::LasingRegime { coop: c0 * nc_max });
                        }
                    }
                }
                Ok(TraceData::Real(
                    x.iter()
                        .map(|&nc| {
                            let c = c0 * nc;
                            let d = 1.0 + sign * c;
                            eta_e * 4.0 * c / (d * d)
                        })
                        .collect(),
                ))
            }
            SynthModel::FilterScan { pump_v, dark_v, ratio, pump_pos, sb_offset, peak_width } => {
                let a = pump_v - dark_v;
                if a <= 0.0 {
                    return Err(Error::Config("pump_v must exceed dark_v".into()));
                }
                let g = |x: f64, x0: f64| (-((x - x0) / peak_width).powi(2) / 2.0).exp();
                Ok(TraceData::Real(
                    x.iter()
                        .map(|&xi| {
                            dark_v
                                + a * g(xi, *pump_pos)
                                + ratio * a * (g(xi, pump_pos - sb_offset) + g(xi, pump_pos + sb_offset))
                        })
                        .collect(),
                ))
            }
            SynthModel::Psd { floor_w_per_hz, peaks } => Ok(TraceData::Real(
                x.iter()
                    .map(|&f| {
                        let mut v = *floor_w_per_hz;
                        for p in peaks {
                            let w = p.width_hz;
                            let norm = p.power_w / (w * (crate::units::TWO_PI).sqrt());
                            v += norm * (-((f - p.f0.0) / w).powi(2) / 2.0).exp();
                        }
                        v
                    })
                    .collect(),
            )),
        }
    }
}

/// Sample a forward model on a grid and add Gaussian noise of standard
/// deviation `sigma` (same unit as the ordinate; `0.0` for a noiseless
/// trace). Fixed `seed` ⇒ bit-identical output.
pub fn synthesize_trace(model: &SynthModel, grid: &GridSpec, sigma: f64, seed: u64) -> Result<Trace> {
    if !(sigma >= 0.0) {
        return Err(Error::Config(format!("noise sigma must be >= 0, got {sigma}")));
    }
    let x = grid.build()?;
    let mut y = model.evaluate(&x)?;
    if sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma)
            .map_err(|e| Error::Config(format!("bad noise sigma: {e}")))?;
        match &mut y {
            TraceData::Real(v) => {
                for s in v.iter_mut() {
                    *s += normal.sample(&mut rng);
                }
            }
            TraceData::Complex(v) => {
                for s in v.iter_mut() {
                    *s += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
                }
            }
        }
    }
    let trace = Trace::new(x, y, model.kind(), model.x_unit())?
        .with_meta("source", &format!("synth:{}", model.tag()))
        .with_meta("sigma", &format!("{sigma}"))
        .with_meta("seed", &format!("{seed}"));
    Ok(trace)
}
