//! Implementations behind the `omx` binary. Each command reads one JSON
//! config, computes, and writes a machine-readable result plus a
//! human-readable summary into the output directory. File writes are
//! atomic and outputs are byte-identical for identical configs and seeds.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::aom;
use crate::bitcost::{self, EncodingProblem, PhononSearch};
use crate::calibration::{self, ChainParams};
use crate::config::{
    self, AomConfig, AomTask, BitcostConfig, CalibrateConfig, FitConfig, ModelConfig, ModelTask,
    NoiseConfig, SynthConfig, TableConfig,
};
use crate::device::PumpState;
use crate::error::{Error, Result};
use crate::fit::{
    self, fit_aom_spectrum, fit_backaction, fit_efficiency_curve, fit_optical_resonance,
    fit_sideband_response, EfficiencyFitOptions, SidebandFitOptions,
};
use crate::fom;
use crate::ioutil::atomic_write;
use crate::scattering;
use crate::trace::Trace;
use crate::units::{angular_from_wavelength, ordinary, HBAR};

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    atomic_write(&path, text.as_bytes())?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(dir, name, &text)
}

fn resolve(base: &Path, file: &str) -> PathBuf {
    let p = Path::new(file);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// `omx model`: forward-model sweeps and scalar figures of merit.
pub fn cmd_model(cfg: &ModelConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let dev = cfg.device.build()?;
    let mut written = Vec::new();
    let mut summary = String::new();
    writeln!(summary, "device: C0 = {:.4e}, eta_e = {:.4e}", dev.c0(), dev.eta_e()).unwrap();

    match &cfg.task {
        ModelTask::EfficiencySweep { side, n_c } => {
            let grid = n_c.build()?;
            let mut csv = String::from("n_c,cooperativity,eta_total\n");
            for &nc in &grid {
                let coop = dev.c0() * nc;
                let eta = scattering::total_efficiency(&dev, coop, *side)?;
                writeln!(csv, "{nc},{coop},{eta}").unwrap();
            }
            written.push(write_text(out, "model_result.csv", &csv)?);
            writeln!(
                summary,
                "efficiency sweep ({side:?}): {} points over n_c in [{:.3e}, {:.3e}]",
                grid.len(),
                grid[0],
                grid[grid.len() - 1]
            )
            .unwrap();
        }
        ModelTask::ScatteringSweep { delta, n_c, omega } => {
            let pump = PumpState::from_photon_number(&dev, delta.angular(), *n_c, 0.0);
            let grid = omega.build()?;
            let mut csv = String::from("omega_hz,s_oo_re,s_oo_im,s_oe_abs_sq,s_eo_abs_sq\n");
            for &f in &grid {
                let w = crate::units::angular(f);
                let soo = scattering::s_oo(&dev, &pump, w);
                let soe = scattering::s_oe(&dev, &pump, w).norm_sqr();
                let seo = scattering::s_eo(&dev, &pump, w).norm_sqr();
                writeln!(csv, "{f},{},{},{soe},{seo}", soo.re, soo.im).unwrap();
            }
            written.push(write_text(out, "model_result.csv", &csv)?);
            writeln!(
                summary,
                "scattering sweep at delta = {:.4e} Hz, n_c = {n_c}, C = {:.4e}",
                delta.0, pump.coop
            )
            .unwrap();
        }
        ModelTask::Figures { z_c } => {
            #[derive(Serialize, serde::Deserialize)]
            struct Figures {
                c0: f64,
                eta_o: f64,
                eta_m: f64,
                eta_e: f64,
                e_qubit_j: f64,
                sideband_resolved: bool,
                q_loaded: f64,
                q_intrinsic: f64,
                g_mu_hz: Option<f64>,
            }
            let figures = Figures {
                c0: dev.c0(),
                eta_o: dev.cavity.eta_o(),
                eta_m: dev.mech.eta_m(),
                eta_e: dev.eta_e(),
                e_qubit_j: scattering::energy_per_qubit(&dev),
                sideband_resolved: dev.sideband_resolved(),
                q_loaded: dev.cavity.q_loaded(),
                q_intrinsic: dev.cavity.q_intrinsic(),
                g_mu_hz: match z_c {
                    Some(z) => Some(ordinary(scattering::qubit_coupling(&dev, z.0)?)),
                    None => None,
                },
            };
            written.push(write_json(out, "model_result.json", &figures)?);
            writeln!(summary, "figures: E_qubit = {:.3e} J", figures.e_qubit_j).unwrap();
        }
    }
    written.push(write_text(out, "model_summary.txt", &summary)?);
    Ok(written)
}

/// `omx aom`: modulation spectra and modulation-derived quantities.
pub fn cmd_aom(cfg: &AomConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut summary = String::new();
    match &cfg.task {
        AomTask::Spectrum { cavity, h, omega_mu, delta } => {
            let cav = cavity.build()?;
            let grid = delta.build()?;
            let omega_grid: Vec<f64> = grid.iter().map(|&f| crate::units::angular(f)).collect();
            let r = aom::reflection_spectrum(&cav, *h, omega_mu.angular(), &omega_grid)?;
            let mut csv = String::from("delta_hz,reflection\n");
            for (&f, &ri) in grid.iter().zip(&r) {
                writeln!(csv, "{f},{ri}").unwrap();
            }
            written.push(write_text(out, "aom_result.csv", &csv)?);
            writeln!(summary, "reflection spectrum at h = {h}, {} points", grid.len()).unwrap();
        }
        AomTask::Drive { omega_m, gamma, gamma_mu, g0, omega_mu, p_mu } => {
            let mech = crate::device::MechanicalMode::new(
                omega_m.angular(),
                gamma.angular(),
                gamma_mu.angular(),
            )?;
            let drive = aom::DriveState::prepare(&mech, g0.angular(), omega_mu.angular(), p_mu.0)?;
            #[derive(Serialize)]
            struct DriveOut {
                n_phon: f64,
                h: f64,
            }
            written.push(write_json(out, "aom_result.json", &DriveOut { n_phon: drive.n_phon, h: drive.h })?);
            writeln!(summary, "drive: n_phon = {:.4e}, h = {:.4}", drive.n_phon, drive.h).unwrap();
        }
        AomTask::VPi { h, p_mu, z0, bandwidth } => {
            let z = z0.map_or(50.0, |z| z.0);
            let v = aom::v_pi(*h, p_mu.0, z)?;
            let p = aom::p_pi(v, z);
            #[derive(Serialize)]
            struct VpiOut {
                v_pi_v: f64,
                p_pi_w: f64,
                bit_energy_j: Option<f64>,
            }
            let out_v = VpiOut {
                v_pi_v: v,
                p_pi_w: p,
                bit_energy_j: bandwidth.map(|b| aom::pi_bit_energy(p, b.0)),
            };
            writeln!(summary, "V_pi = {:.4} mV, P_pi = {:.4e} W", v * 1e3, p).unwrap();
            written.push(write_json(out, "aom_result.json", &out_v)?);
        }
        AomTask::GammaMu { h, omega_mu, gamma, g0, p_mu } => {
            let gm = aom::gamma_mu_from_h(*h, omega_mu.angular(), gamma.angular(), g0.angular(), p_mu.0)?;
            #[derive(Serialize)]
            struct GammaOut {
                gamma_mu_hz: f64,
                eta_m: f64,
            }
            let out_v = GammaOut { gamma_mu_hz: ordinary(gm), eta_m: gm / gamma.angular() };
            writeln!(summary, "gamma_mu = {:.4e} Hz (eta_m = {:.3e})", out_v.gamma_mu_hz, out_v.eta_m)
                .unwrap();
            written.push(write_json(out, "aom_result.json", &out_v)?);
        }
    }
    written.push(write_text(out, "aom_summary.txt", &summary)?);
    Ok(written)
}

/// `omx bitcost`: required phonon number across the κ/ω_m axis.
pub fn cmd_bitcost(cfg: &BitcostConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let grid = cfg.ratio_k.build()?;
    let energy_scale = match (cfg.omega_m, cfg.eta_m) {
        (Some(w), Some(em)) => {
            if !(em > 0.0 && em <= 1.0) {
                return Err(Error::Config(format!("eta_m must be in (0, 1], got {em}")));
            }
            Some(HBAR * w.angular() / em)
        }
        (None, None) => None,
        _ => {
            return Err(Error::Config(
                "bit-energy output needs both omega_m and eta_m (or neither)".into(),
            ))
        }
    };

    let mut csv = String::from("ratio_k,n_phon,pe,n_slow,n_fast,e_bit_j,status\n");
    let mut n_reached = 0usize;
    for &rk in &grid {
        let prob = EncodingProblem::new(cfg.alpha0_sq, cfg.ratio_g, rk, cfg.target_pe)?;
        let n_slow = (rk / (2.0 * cfg.ratio_g)).powi(2);
        let n_fast = (0.76 / cfg.ratio_g).powi(2);
        match bitcost::required_phonons(&prob)? {
            PhononSearch::Reached { n_phon, pe } => {
                n_reached += 1;
                let e = energy_scale.map_or(String::new(), |s| format!("{}", s * n_phon));
                writeln!(csv, "{rk},{n_phon},{pe},{n_slow},{n_fast},{e},reached").unwrap();
            }
            PhononSearch::NotReached { min_pe, at_n_phon } => {
                writeln!(csv, "{rk},{at_n_phon},{min_pe},{n_slow},{n_fast},,not-reached").unwrap();
            }
        }
    }
    let mut written = vec![write_text(out, "bitcost_result.csv", &csv)?];
    let summary = format!(
        "bitcost sweep: target P_e = {}, {} of {} grid points reached\n",
        cfg.target_pe,
        n_reached,
        grid.len()
    );
    written.push(write_text(out, "bitcost_summary.txt", &summary)?);
    Ok(written)
}

/// `omx fit`: dispatch to the extraction routines.
pub fn cmd_fit(cfg: &FitConfig, base: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let (result, label) = match cfg {
        FitConfig::OpticalResonance { trace, branch } => {
            let t = Trace::load(&resolve(base, trace))?;
            (fit_optical_resonance(&t, *branch)?, "optical-resonance")
        }
        FitConfig::Sideband { trace, g_eff, omega_m, gamma, branch } => {
            let t = Trace::load(&resolve(base, trace))?;
            let opts = SidebandFitOptions {
                g_eff: g_eff.map_or(0.0, |f| f.angular()),
                omega_m: omega_m.map_or(1.0, |f| f.angular()),
                gamma: gamma.map_or(1.0, |f| f.angular()),
                branch: *branch,
            };
            (fit_sideband_response(&t, &opts)?, "sideband")
        }
        FitConfig::AomSpectrum { trace, kappa, kappa_e, omega_mu } => {
            let t = Trace::load(&resolve(base, trace))?;
            let cavity =
                crate::device::OpticalCavity::new(1.0, kappa.angular(), kappa_e.angular())?;
            (fit_aom_spectrum(&t, &cavity, omega_mu.angular())?, "aom-spectrum")
        }
        FitConfig::Backaction { trace, kappa } => {
            let t = Trace::load(&resolve(base, trace))?;
            (fit_backaction(&t, kappa.angular())?, "backaction")
        }
        FitConfig::Efficiency { trace, side, kappa, gamma } => {
            let t = Trace::load(&resolve(base, trace))?;
            let opts = EfficiencyFitOptions {
                side: *side,
                kappa: kappa.map(|f| f.angular()),
                gamma: gamma.map(|f| f.angular()),
            };
            (fit_efficiency_curve(&t, &opts)?, "efficiency")
        }
    };

    let mut summary = format!("{label} fit: converged = {}, n_iter = {}\n", result.converged, result.n_iter);
    for (k, v) in &result.params {
        writeln!(summary, "  {k} = {v:.6e} +- {:.2e}", result.stderr[k]).unwrap();
    }
    for (k, v) in &result.derived {
        writeln!(summary, "  derived {k} = {v:.6e}").unwrap();
    }
    for w in &result.warnings {
        writeln!(summary, "  warning: {w}").unwrap();
    }
    Ok(vec![
        write_json(out, "fit_result.json", &result)?,
        write_text(out, "fit_summary.txt", &summary)?,
    ])
}

/// Calibration report with every intermediate flux, for auditability.
#[derive(Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct CalibrationReport {
    pub kind: String,
    pub efficiency: Option<f64>,
    pub flux_in_per_s: Option<f64>,
    pub flux_out_per_s: Option<f64>,
    pub detection_gain: Option<f64>,
    pub sideband_ratio: Option<f64>,
    pub band_power_w: Option<f64>,
    pub notes: Vec<String>,
}

/// `omx calibrate`: measurement-chain reductions.
pub fn cmd_calibrate(cfg: &CalibrateConfig, base: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let report = match cfg {
        CalibrateConfig::Oe {
            p_in_mu,
            omega_mu,
            eta_cable,
            eta_out,
            z0,
            p_cal_mu,
            p_cal_o,
            p_out_mu,
            wavelength,
        } => {
            let chain = ChainParams::new(*eta_cable, *eta_out, z0.map_or(50.0, |z| z.0))?;
            let omega_c = angular_from_wavelength(wavelength.0);
            let flux_in = calibration::microwave_input_flux(p_in_mu.0, omega_mu.angular(), &chain)?;
            let gain = calibration::detection_gain(p_cal_mu.0, p_cal_o.0, chain.eta_out)?;
            let eta = calibration::oe_efficiency(p_out_mu.0, gain, omega_c, flux_in)?;
            CalibrationReport {
                kind: "oe".into(),
                efficiency: Some(eta),
                flux_in_per_s: Some(flux_in),
                flux_out_per_s: Some(eta * flux_in),
                detection_gain: Some(gain.value()),
                sideband_ratio: None,
                band_power_w: None,
                notes: vec![],
            }
        }
        CalibrateConfig::Eo {
            s21_sq,
            p_eom_mu,
            eta_cable,
            scan,
            r,
            p_pump_in,
            wavelength,
            omega_mu,
            pump_fraction,
        } => {
            let chain = ChainParams::new(*eta_cable, 1.0, 50.0)?;
            let mut notes = Vec::new();
            let ratio = match (scan, r) {
                (Some(path), None) => {
                    let t = Trace::load(&resolve(base, path))?;
                    let sr = calibration::sideband_ratio(&t)?;
                    notes.push(format!("sideband ratio from scan: dark = {:.4e}", sr.dark));
                    sr.ratio
                }
                (None, Some(r)) => *r,
                _ => {
                    return Err(Error::Config(
                        "eo calibration needs exactly one of `scan` or `r`".into(),
                    ))
                }
            };
            let p_pump = p_pump_in.0 * pump_fraction.unwrap_or(1.0);
            if pump_fraction.is_some() {
                notes.push(format!(
                    "pump power corrected by user-supplied fraction {}",
                    pump_fraction.unwrap()
                ));
            }
            let omega_c = angular_from_wavelength(wavelength.0);
            let eta = calibration::eo_efficiency(
                *s21_sq,
                p_eom_mu.0,
                &chain,
                ratio,
                p_pump,
                omega_c,
                omega_mu.angular(),
            )?;
            let flux_in = p_pump * ratio / (HBAR * omega_c);
            CalibrationReport {
                kind: "eo".into(),
                efficiency: Some(eta),
                flux_in_per_s: Some(flux_in),
                flux_out_per_s: Some(eta * flux_in),
                detection_gain: None,
                sideband_ratio: Some(ratio),
                band_power_w: None,
                notes,
            }
        }
        CalibrateConfig::SidebandRatio { scan } => {
            let t = Trace::load(&resolve(base, scan))?;
            let sr = calibration::sideband_ratio(&t)?;
            CalibrationReport {
                kind: "sideband-ratio".into(),
                efficiency: None,
                flux_in_per_s: None,
                flux_out_per_s: None,
                detection_gain: None,
                sideband_ratio: Some(sr.ratio),
                band_power_w: None,
                notes: vec![format!(
                    "dark = {:.6e}, pump peak = {:.6e}, sideband peak = {:.6e}",
                    sr.dark, sr.pump_peak, sr.sideband_peak
                )],
            }
        }
        CalibrateConfig::IntegratePsd { trace, f_center, f_bw } => {
            let t = Trace::load(&resolve(base, trace))?;
            let p = calibration::integrate_psd(&t, f_center.0, f_bw.0)?;
            CalibrationReport {
                kind: "integrate-psd".into(),
                efficiency: None,
                flux_in_per_s: None,
                flux_out_per_s: None,
                detection_gain: None,
                sideband_ratio: None,
                band_power_w: Some(p),
                notes: vec![],
            }
        }
    };
    let mut summary = format!("calibration kind: {}\n", report.kind);
    if let Some(e) = report.efficiency {
        writeln!(summary, "  efficiency = {e:.6e}").unwrap();
    }
    if let Some(r) = report.sideband_ratio {
        writeln!(summary, "  sideband ratio = {r:.6e}").unwrap();
    }
    if let Some(p) = report.band_power_w {
        writeln!(summary, "  band power = {p:.6e} W").unwrap();
    }
    Ok(vec![
        write_json(out, "calibrate_result.json", &report)?,
        write_text(out, "calibrate_summary.txt", &summary)?,
    ])
}

/// `omx table`: regenerate the figure-of-merit comparison.
pub fn cmd_table(cfg: &TableConfig, base: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let records = if cfg.records == "builtin" {
        fom::builtin_records()?
    } else {
        fom::load_records(&resolve(base, &cfg.records))?
    };
    let rows: Vec<fom::FomRow> = records.iter().map(fom::compute_fom).collect();
    let csv = fom::fom_table_csv(&rows);
    let mut summary = String::new();
    for row in &rows {
        writeln!(
            summary,
            "{}: C0 = {}, E_bit = {}, E_qubit = {}{}",
            row.label,
            row.c0.map_or("n/a".into(), |v| format!("{v:.2e}")),
            row.e_bit_j.map_or("n/a".into(), |v| format!("{v:.2e} J")),
            row.e_qubit_j.map_or("n/a".into(), |v| format!("{v:.2e} J")),
            if row.flags.is_empty() { String::new() } else { format!(" [flags: {}]", row.flags.join("; ")) },
        )
        .unwrap();
    }
    Ok(vec![
        write_text(out, "table_result.csv", &csv)?,
        write_json(out, "table_rows.json", &rows)?,
        write_text(out, "table_summary.txt", &summary)?,
    ])
}

/// `omx synth`: generate a synthetic trace.
pub fn cmd_synth(cfg: &SynthConfig, seed_override: Option<u64>, out: &Path) -> Result<Vec<PathBuf>> {
    let NoiseConfig::AdditiveGaussian { sigma } = cfg.noise;
    let seed = seed_override.or(cfg.seed).unwrap_or(0);
    let trace = fit::synthesize_trace(&cfg.model, &cfg.grid, sigma, seed)?;
    let path = out.join("synth_trace.csv");
    trace.save(&path)?;
    let summary = format!(
        "synthesized {} points, sigma = {sigma}, seed = {seed}\n",
        trace.len()
    );
    Ok(vec![path, write_text(out, "synth_summary.txt", &summary)?])
}

/// Top-level dispatch used by the binary: command name + config path.
pub fn run(command: &str, config_path: &Path, out: &Path, seed: Option<u64>) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out)?;
    let base = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    match command {
        "model" => cmd_model(&config::load::<ModelConfig>(config_path)?, out),
        "aom" => cmd_aom(&config::load::<AomConfig>(config_path)?, out),
        "bitcost" => cmd_bitcost(&config::load::<BitcostConfig>(config_path)?, out),
        "fit" => cmd_fit(&config::load::<FitConfig>(config_path)?, &base, out),
        "calibrate" => cmd_calibrate(&config::load::<CalibrateConfig>(config_path)?, &base, out),
        "table" => cmd_table(&config::load::<TableConfig>(config_path)?, &base, out),
        "synth" => cmd_synth(&config::load::<SynthConfig>(config_path)?, seed, out),
        other => Err(Error::Config(format!("unknown command {other:?}"))),
    }
}
