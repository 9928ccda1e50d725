//! Inverse problems: nonlinear least-squares extraction of device
//! parameters from measured or synthetic traces.
//!
//! Every fit follows the same recipe: heuristic initialization from the
//! trace, a damped Gauss–Newton minimization ([`lm`]), and a [`FitResult`]
//! carrying the recovered parameters, local-curvature uncertainties and
//! any warnings (branch ambiguity, degeneracy). Frequencies inside a
//! `FitResult` are ordinary Hz — it is a serialization artifact.

pub mod lm;
pub mod synth;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, MechanicalMode, OpticalCavity, PumpSide, PumpState};
use crate::error::{Error, Result};
use crate::trace::{Trace, TraceKind};
use crate::units::{angular, ordinary, TWO_PI};

pub use lm::{LmOptions, LmOutcome};
pub use synth::{synthesize_trace, GridSpec, Spacing, SynthModel};

/// Which side of critical coupling a resonance fit is allowed to live on.
/// A reflection magnitude alone cannot tell κ_e from κ − κ_e, so the
/// caller picks the branch (phase-sensitive fits discriminate on their
/// own).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingBranch {
    OverCoupled,
    UnderCoupled,
}

/// Outcome of a parameter extraction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    /// Named parameters; frequencies in ordinary Hz (`*_hz`).
    pub params: BTreeMap<String, f64>,
    /// 1σ uncertainties from the local quadratic model, same keys.
    pub stderr: BTreeMap<String, f64>,
    /// Sum of squared residuals at the optimum.
    pub residual_norm: f64,
    pub converged: bool,
    pub n_iter: usize,
    /// |∇χ²| at the optimum relative to the starting point.
    pub grad_reduction: f64,
    /// Quantities derived from the parameters (Q factors, branch flags …).
    pub derived: BTreeMap<String, f64>,
    /// Non-fatal diagnostics: branch ambiguity, degeneracies, …
    pub warnings: Vec<String>,
}

impl FitResult {
    fn from_outcome(out: &LmOutcome, names: &[&str], values_hz: &[bool]) -> Self {
        let mut params = BTreeMap::new();
        let mut stderr = BTreeMap::new();
        for ((name, &is_hz), (&v, &s)) in
            names.iter().zip(values_hz).zip(out.params.iter().zip(&out.stderr))
        {
            let f = if is_hz { 1.0 / TWO_PI } else { 1.0 };
            params.insert(name.to_string(), v * f);
            stderr.insert(name.to_string(), s * f);
        }
        FitResult {
            params,
            stderr,
            residual_norm: out.residual_norm,
            converged: out.converged,
            n_iter: out.n_iter,
            grad_reduction: if out.initial_grad_norm > 0.0 {
                out.grad_norm / out.initial_grad_norm
            } else {
                0.0
            },
            derived: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn param(&self, name: &str) -> f64 {
        self.params[name]
    }
    pub fn err(&self, name: &str) -> f64 {
        self.stderr[name]
    }
}

fn require_len(trace: &Trace, n_params: usize) -> Result<()> {
    if trace.len() < n_params + 2 {
        return Err(Error::FitRejected(format!(
            "trace has {} samples; need at least {} for {} parameters",
            trace.len(),
            n_params + 2,
            n_params
        )));
    }
    Ok(())
}

// Robust noise scale from first differences: σ ≈ MAD(Δy)·1.4826/√2.
fn noise_scale(y: &[f64]) -> f64 {
    if y.len() < 3 {
        return 0.0;
    }
    let mut d: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let med = median(&mut d);
    let mut abs: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0] - med).abs()).collect();
    median(&mut abs) * 1.4826 / std::f64::consts::SQRT_2
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

// Bare-cavity reflection |1 - kappa_e/(i delta + kappa/2)|^2.
fn resonance_reflection(delta: f64, kappa: f64, kappa_e: f64) -> f64 {
    let half = kappa / 2.0;
    let a = half - kappa_e;
    (a * a + delta * delta) / (half * half + delta * delta)
}

/// Recover (ω_c, κ, κ_e) from a reflection dip versus laser frequency.
///
/// The reflection magnitude is exactly symmetric under
/// κ_e ↔ κ − κ_e, so the fit is restricted to the requested branch.
/// A trace without a dip at least 3× above the noise floor is rejected.
pub fn fit_optical_resonance(trace: &Trace, branch: CouplingBranch) -> Result<FitResult> {
    require_len(trace, 3)?;
    if trace.kind() != TraceKind::Reflection {
        return Err(Error::FitRejected(format!(
            "expected a reflection trace, got {}",
            trace.kind()
        )));
    }
    let x = trace.x();
    let y = trace.y_real()?;
    let n = y.len();

    // baseline from the outer 20% of samples, dip from the minimum
    let edge = (n / 10).max(3).min(n / 2);
    let mut edges: Vec<f64> = y[..edge].iter().chain(&y[n - edge..]).copied().collect();
    let baseline = median(&mut edges);
    let (i_min, &y_min) = y
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("non-empty");
    let depth = baseline - y_min;
    let sigma = noise_scale(y);
    if depth <= 3.0 * sigma || depth <= 1e-9 * baseline.abs().max(1e-30) {
        return Err(Error::FitRejected(format!(
            "no dip detected: depth {depth:.3e} vs noise floor {sigma:.3e}"
        )));
    }

    // full width at half depth -> kappa
    let half_level = baseline - depth / 2.0;
    let mut lo_x = x[0];
    let mut hi_x = x[n - 1];
    for i in (0..=i_min).rev() {
        if y[i] > half_level {
            lo_x = x[i];
            break;
        }
    }
    for i in i_min..n {
        if y[i] > half_level {
            hi_x = x[i];
            break;
        }
    }
    let kappa_init = angular((hi_x - lo_x).max(x[1] - x[0]));
    let rel_min = (y_min / baseline.max(1e-30)).clamp(0.0, 1.0);
    let eta_init = match branch {
        CouplingBranch::OverCoupled => (1.0 + rel_min.sqrt()) / 2.0,
        CouplingBranch::UnderCoupled => (1.0 - rel_min.sqrt()) / 2.0,
    };
    let (eta_lo, eta_hi) = match branch {
        CouplingBranch::OverCoupled => (0.5, 1.0),
        CouplingBranch::UnderCoupled => (1e-6, 0.5),
    };

    let span = angular(x[n - 1] - x[0]);
    let model = |p: &[f64]| -> Vec<f64> {
        let (omega_c, kappa, eta) = (p[0], p[1], p[2]);
        x.iter()
            .zip(y)
            .map(|(&xi, &yi)| {
                resonance_reflection(angular(xi) - omega_c, kappa, eta * kappa) - yi
            })
            .collect()
    };
    let init = [angular(x[i_min]), kappa_init, eta_init.clamp(eta_lo, eta_hi)];
    let lo = [angular(x[0]), span * 1e-6, eta_lo];
    let hi = [angular(x[n - 1]), span * 100.0, eta_hi];
    let out = lm::minimize(model, &init, &lo, &hi, &LmOptions::default())?;

    let (omega_c, kappa, eta) = (out.params[0], out.params[1], out.params[2]);
    let kappa_e = eta * kappa;
    let se_kappa_e =
        ((eta * out.stderr[1]).powi(2) + (kappa * out.stderr[2]).powi(2)).sqrt();

    let mut res = FitResult::from_outcome(&out, &["f_c_hz", "kappa_hz", "eta_o"], &[true, true, false]);
    res.params.insert("kappa_e_hz".into(), ordinary(kappa_e));
    res.stderr.insert("kappa_e_hz".into(), ordinary(se_kappa_e));
    res.params.remove("eta_o");
    let se_eta = res.stderr.remove("eta_o").unwrap_or(0.0);
    res.derived.insert("eta_o".into(), eta);
    res.derived.insert("eta_o_stderr".into(), se_eta);
    res.derived.insert("q_loaded".into(), omega_c / kappa);
    res.derived.insert("q_intrinsic".into(), omega_c / (kappa - kappa_e));
    res.derived.insert("over_coupled".into(), if eta > 0.5 { 1.0 } else { 0.0 });
    Ok(res)
}

/// Options for [`fit_sideband_response`].
#[derive(Debug, Clone, Copy)]
pub struct SidebandFitOptions {
    /// Effective optomechanical coupling of the weak pump (rad/s); enters
    /// as a fixed nuisance term, not a fit parameter.
    pub g_eff: f64,
    /// Mechanical frequency (rad/s), only used when `g_eff > 0`.
    pub omega_m: f64,
    /// Mechanical linewidth (rad/s), only used when `g_eff > 0`.
    pub gamma: f64,
    /// Force the fit onto one coupling branch; `None` tries both and keeps
    /// the better one, warning when they are indistinguishable.
    pub branch: Option<CouplingBranch>,
}

impl Default for SidebandFitOptions {
    fn default() -> Self {
        Self { g_eff: 0.0, omega_m: 1.0, gamma: 1.0, branch: None }
    }
}

fn sideband_model(
    omega: f64,
    delta: f64,
    kappa: f64,
    eta: f64,
    opts: &SidebandFitOptions,
) -> num_complex::Complex64 {
    // single source of truth: evaluate through the forward model; the
    // clamp absorbs finite-difference probes just past the box edges
    let cavity = OpticalCavity::new(1.0, kappa, (eta * kappa).clamp(kappa * 1e-12, kappa))
        .expect("clamped cavity is valid");
    let mech = MechanicalMode::new(opts.omega_m, opts.gamma, 0.0).expect("fixed mech valid");
    let dev = DeviceParams::new(cavity, mech, 1.0, 1.0).expect("valid");
    let pump = PumpState { delta, p_in: 0.0, n_c: 0.0, g_eff: opts.g_eff, coop: 0.0 };
    crate::scattering::s_oo(&dev, &pump, omega)
}

fn wrap_angle(a: f64) -> f64 {
    a.sin().atan2(a.cos())
}

/// Recover (Δ, κ, κ_e) from the optical sideband response S_oo(ω), either
/// the complex trace or the phase alone.
///
/// The phase carries the coupling branch: both branches are fitted and the
/// better one kept, with an explicit warning when they cannot be told
/// apart at the 1σ level.
pub fn fit_sideband_response(trace: &Trace, opts: &SidebandFitOptions) -> Result<FitResult> {
    require_len(trace, 3)?;
    let x = trace.x();
    let n = x.len();
    let complex_data = match trace.kind() {
        TraceKind::Complex => Some(trace.y_complex()?),
        TraceKind::Phase => None,
        other => {
            return Err(Error::FitRejected(format!(
                "expected a complex or phase trace, got {other}"
            )))
        }
    };

    // feature location: strongest local response; from |dy/dx| for phase
    // traces and |y - edge| for complex ones
    let feature = match trace.kind() {
        TraceKind::Complex => {
            let y = trace.y_complex()?;
            let edge = (y[0] + y[n - 1]) / 2.0;
            let i = (0..n)
                .max_by(|&a, &b| {
                    (y[a] - edge).norm().partial_cmp(&(y[b] - edge).norm()).unwrap()
                })
                .unwrap();
            x[i]
        }
        _ => {
            let y = trace.y_real()?;
            let i = (1..n)
                .max_by(|&a, &b| {
                    let da = wrap_angle(y[a] - y[a - 1]).abs();
                    let db = wrap_angle(y[b] - y[b - 1]).abs();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            x[i]
        }
    };

    let span = angular(x[n - 1] - x[0]);
    let residuals = |p: &[f64]| -> Vec<f64> {
        let (delta, kappa, eta) = (p[0], p[1], p[2]);
        match complex_data {
            Some(y) => x
                .iter()
                .zip(y)
                .flat_map(|(&xi, &yi)| {
                    let m = sideband_model(angular(xi), delta, kappa, eta, opts);
                    [m.re - yi.re, m.im - yi.im]
                })
                .collect(),
            None => {
                let y = trace.y_real().expect("phase trace is real");
                x.iter()
                    .zip(y)
                    .map(|(&xi, &yi)| {
                        let m = sideband_model(angular(xi), delta, kappa, eta, opts);
                        wrap_angle(m.arg() - yi)
                    })
                    .collect()
            }
        }
    };

    let omega_max = angular(x[n - 1]) * 2.0;
    let kappa_init = span / 4.0;
    let mut candidates: Vec<(f64, f64)> = Vec::new(); // (delta sign, eta init)
    let etas: Vec<f64> = match opts.branch {
        Some(CouplingBranch::OverCoupled) => vec![0.75],
        Some(CouplingBranch::UnderCoupled) => vec![0.25],
        None => vec![0.75, 0.25],
    };
    for &e in &etas {
        candidates.push((-1.0, e));
        candidates.push((1.0, e));
    }
    let (eta_lo, eta_hi) = match opts.branch {
        Some(CouplingBranch::OverCoupled) => (0.5, 1.0),
        Some(CouplingBranch::UnderCoupled) => (1e-6, 0.5),
        None => (1e-6, 1.0),
    };

    let mut best: Option<LmOutcome> = None;
    for (sign, eta0) in candidates {
        let init = [sign * angular(feature), kappa_init, eta0];
        let (d_lo, d_hi) = if sign < 0.0 { (-omega_max, -1.0) } else { (1.0, omega_max) };
        let lo = [d_lo, span * 1e-6, eta_lo];
        let hi = [d_hi, span * 100.0, eta_hi];
        if let Ok(out) = lm::minimize(residuals, &init, &lo, &hi, &LmOptions::default()) {
            if best.as_ref().is_none_or(|b| out.residual_norm < b.residual_norm) {
                best = Some(out);
            }
        }
    }
    let out = best.ok_or_else(|| Error::FitRejected("no sideband fit converged".into()))?;

    let (kappa, eta) = (out.params[1], out.params[2]);
    let kappa_e = eta * kappa;
    let se_kappa_e =
        ((eta * out.stderr[1]).powi(2) + (kappa * out.stderr[2]).powi(2)).sqrt();

    let mut res =
        FitResult::from_outcome(&out, &["delta_hz", "kappa_hz", "eta_o"], &[true, true, false]);
    res.params.remove("eta_o");
    let se_eta = res.stderr.remove("eta_o").unwrap_or(0.0);
    res.params.insert("kappa_e_hz".into(), ordinary(kappa_e));
    res.stderr.insert("kappa_e_hz".into(), ordinary(se_kappa_e));
    res.derived.insert("eta_o".into(), eta);
    res.derived.insert("eta_o_stderr".into(), se_eta);
    res.derived.insert("over_coupled".into(), if eta > 0.5 { 1.0 } else { 0.0 });

    // branch ambiguity: the fitted kappa_e within 1 sigma of critical
    // coupling, or the opposite branch fitting essentially as well
    if (kappa_e - kappa / 2.0).abs() <= se_kappa_e {
        res.warnings.push(format!(
            "coupling branch ambiguous: kappa_e = {:.4e} Hz is within 1 sigma ({:.1e}) of kappa/2",
            ordinary(kappa_e),
            ordinary(se_kappa_e)
        ));
    } else if opts.branch.is_none() {
        let other = match eta > 0.5 {
            true => CouplingBranch::UnderCoupled,
            false => CouplingBranch::OverCoupled,
        };
        let mut forced = *opts;
        forced.branch = Some(other);
        if let Ok(alt) = fit_sideband_response(trace, &forced) {
            if alt.residual_norm <= out.residual_norm * (1.0 + 1e-3)
                || (alt.residual_norm - out.residual_norm) < 1e-12
            {
                res.warnings.push(
                    "coupling branch ambiguous: both branches reach the same residual".into(),
                );
            }
            res.derived.insert("alt_branch_residual_norm".into(), alt.residual_norm);
        }
    }
    Ok(res)
}

/// Recover the modulation index h (plus abscissa shift/scale nuisance
/// parameters) from an acousto-optic reflection spectrum, with the cavity
/// rates known from a prior fit.
///
/// Large-h spectra need a good starting point, so the fit multi-starts
/// over h ∈ {0.5, 1, 2, 4, 8} and keeps the best.
pub fn fit_aom_spectrum(trace: &Trace, cavity: &OpticalCavity, omega_mu: f64) -> Result<FitResult> {
    require_len(trace, 3)?;
    if trace.kind() != TraceKind::Reflection {
        return Err(Error::FitRejected(format!(
            "expected a reflection trace, got {}",
            trace.kind()
        )));
    }
    let x = trace.x();
    let y = trace.y_real()?;
    let span = angular(x[x.len() - 1] - x[0]);

    let residuals = |p: &[f64]| -> Vec<f64> {
        let (h, shift, scale) = (p[0], p[1], p[2]);
        let grid: Vec<f64> = x.iter().map(|&xi| scale * angular(xi) + shift).collect();
        let model = crate::aom::reflection_spectrum(cavity, h.max(0.0), omega_mu, &grid)
            .expect("h >= 0 by box");
        model.iter().zip(y).map(|(m, &yi)| m - yi).collect()
    };

    let lo = [0.0, -span, 0.2];
    let hi = [12.0, span, 5.0];
    let mut best: Option<LmOutcome> = None;
    for &h0 in &[0.5, 1.0, 2.0, 4.0, 8.0] {
        if let Ok(out) = lm::minimize(residuals, &[h0, 0.0, 1.0], &lo, &hi, &LmOptions::default())
        {
            if best.as_ref().is_none_or(|b| out.residual_norm < b.residual_norm) {
                best = Some(out);
            }
        }
    }
    let out = best.ok_or_else(|| Error::FitRejected("no AOM spectrum fit converged".into()))?;

    // reject fits that clearly failed to describe the data
    let spread = y.iter().cloned().fold(f64::MIN, f64::max)
        - y.iter().cloned().fold(f64::MAX, f64::min);
    let rms = (out.residual_norm / y.len() as f64).sqrt();
    if spread > 0.0 && rms > 0.2 * spread {
        return Err(Error::FitRejected(format!(
            "AOM spectrum fit residual rms {rms:.3e} exceeds 20% of the data spread {spread:.3e}"
        )));
    }

    let mut res =
        FitResult::from_outcome(&out, &["h", "x_shift_hz", "x_scale"], &[false, true, false]);
    res.derived.insert("n_sidebands".into(), crate::bessel::series_order(out.params[0]) as f64);
    Ok(res)
}

/// Recover (γ, g₀) from mechanical linewidth versus intracavity photon
/// number under a blue-detuned pump at Δ = −ω_m:
///
/// γ_eff(n_c) = γ − (4g₀²/κ)·n_c
///
/// A straight line: intercept γ, slope −4g₀²/κ. The slope must be
/// negative (anti-damping narrows the line); a positive slope means the
/// detuning convention of the data is wrong.
pub fn fit_backaction(trace: &Trace, kappa: f64) -> Result<FitResult> {
    if trace.kind() != TraceKind::Linewidth {
        return Err(Error::FitRejected(format!(
            "expected a linewidth trace, got {}",
            trace.kind()
        )));
    }
    if trace.len() < 3 {
        return Err(Error::FitRejected(format!(
            "backaction fit needs >= 3 points for a slope, an intercept and an uncertainty; got {}",
            trace.len()
        )));
    }
    let x = trace.x();
    let y_hz = trace.y_real()?;
    let y: Vec<f64> = y_hz.iter().map(|&v| angular(v)).collect();

    // closed-form weighted-equal linear least squares
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sy: f64 = y.iter().sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return Err(Error::FitRejected("degenerate photon-number axis".into()));
    }
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    if slope >= 0.0 {
        return Err(Error::Domain(
            "backaction slope is non-negative: a blue-detuned pump (delta = -omega_m) must narrow the linewidth; check the detuning sign convention of the data"
                .into(),
        ));
    }
    let gamma = intercept;
    let g0 = (-slope * kappa).sqrt() / 2.0;

    let chi2: f64 = x.iter().zip(&y).map(|(&a, &b)| (intercept + slope * a - b).powi(2)).sum();
    let s2 = chi2 / (n - 2.0);
    let se_intercept = (s2 * sxx / det).sqrt();
    let se_slope = (s2 * n / det).sqrt();
    let se_g0 = if g0 > 0.0 { se_slope * kappa / (8.0 * g0) } else { 0.0 };

    let mut params = BTreeMap::new();
    let mut stderr = BTreeMap::new();
    params.insert("gamma_hz".into(), ordinary(gamma));
    stderr.insert("gamma_hz".into(), ordinary(se_intercept));
    params.insert("g0_hz".into(), ordinary(g0));
    stderr.insert("g0_hz".into(), ordinary(se_g0));
    let mut derived = BTreeMap::new();
    derived.insert("slope_hz_per_photon".into(), ordinary(slope));
    Ok(FitResult {
        params,
        stderr,
        residual_norm: chi2,
        converged: true,
        n_iter: 1,
        grad_reduction: 0.0,
        derived,
        warnings: Vec::new(),
    })
}

/// Options for [`fit_efficiency_curve`].
#[derive(Debug, Clone, Copy)]
pub struct EfficiencyFitOptions {
    pub side: PumpSide,
    /// Optical linewidth (rad/s); with `gamma` present the fit also
    /// reports the g₀ implied by the fitted C₀.
    pub kappa: Option<f64>,
    /// Mechanical linewidth (rad/s).
    pub gamma: Option<f64>,
}

impl Default for EfficiencyFitOptions {
    fn default() -> Self {
        Self { side: PumpSide::Blue, kappa: None, gamma: None }
    }
}

/// Recover (η_e, C₀) from total conversion efficiency versus intracavity
/// photon number, fitting η = η_e·4C/(1∓C)² with C = C₀·n_c in log space.
///
/// Data restricted to C ≪ 1 only constrains the product η_e·C₀; the
/// degeneracy surfaces as exploding uncertainties, not as a wrong answer.
pub fn fit_efficiency_curve(trace: &Trace, opts: &EfficiencyFitOptions) -> Result<FitResult> {
    require_len(trace, 2)?;
    if trace.kind() != TraceKind::Efficiency {
        return Err(Error::FitRejected(format!(
            "expected an efficiency trace, got {}",
            trace.kind()
        )));
    }
    let x = trace.x();
    let y = trace.y_real()?;
    let n = x.len();
    if x[0] <= 0.0 || y.iter().any(|&v| v <= 0.0) {
        return Err(Error::FitRejected(
            "efficiency fit needs positive photon numbers and efficiencies".into(),
        ));
    }
    if x[n - 1] / x[0] < 99.0 {
        return Err(Error::FitRejected(format!(
            "photon-number span {:.1e}..{:.1e} covers less than two decades",
            x[0],
            x[n - 1]
        )));
    }

    let max_nc = x[n - 1];
    let sign = match opts.side {
        PumpSide::Blue => -1.0,
        PumpSide::Red => 1.0,
    };
    let residuals = |p: &[f64]| -> Vec<f64> {
        let (eta_e, c0) = (p[0], p[1]);
        x.iter()
            .zip(y)
            .map(|(&nc, &eta)| {
                let c = c0 * nc;
                let denom = 1.0 + sign * c;
                let model = eta_e * 4.0 * c / (denom * denom);
                (model.max(1e-300)).ln() - eta.ln()
            })
            .collect()
    };

    let c0_hi = match opts.side {
        PumpSide::Blue => 0.999 / max_nc,
        PumpSide::Red => 1e3 / max_nc,
    };
    let mut best: Option<LmOutcome> = None;
    for &c_max in &[0.05, 0.3, 0.7] {
        let c0 = (c_max / max_nc).min(c0_hi * 0.99);
        let c1 = c0 * x[0];
        let eta_e = y[0] * (1.0 + sign * c1).powi(2) / (4.0 * c1);
        let init = [eta_e.clamp(1e-12, 1.0), c0];
        let lo = [1e-12, 1e-12 / max_nc];
        let hi = [1.0, c0_hi];
        if let Ok(out) = lm::minimize(residuals, &init, &lo, &hi, &LmOptions::default()) {
            if best.as_ref().is_none_or(|b| out.residual_norm < b.residual_norm) {
                best = Some(out);
            }
        }
    }
    let out = best.ok_or_else(|| Error::FitRejected("no efficiency fit converged".into()))?;
    let c0 = out.params[1];
    if opts.side == PumpSide::Blue && c0 * max_nc >= 0.995 {
        return Err(Error::LasingRegime { coop: c0 * max_nc });
    }

    let mut res = FitResult::from_outcome(&out, &["eta_e", "c0"], &[false, false]);
    if res.err("eta_e") > res.param("eta_e") || res.err("c0") > res.param("c0") {
        res.warnings.push(
            "eta_e and c0 are individually unidentifiable (linear-regime data constrains only their product)"
                .into(),
        );
    }
    res.derived.insert("max_cooperativity".into(), c0 * max_nc);
    if let (Some(kappa), Some(gamma)) = (opts.kappa, opts.gamma) {
        let g0 = (c0 * kappa * gamma).sqrt() / 2.0;
        res.derived.insert("g0_hz".into(), ordinary(g0));
    }
    Ok(res)
}
