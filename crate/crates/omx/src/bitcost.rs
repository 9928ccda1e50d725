//! Quantum-limited cost of encoding one classical bit with the modulator.
//!
//! Two coherent output wavepackets, phase-encoded with φ = 0 or π, are as
//! distinguishable as their waveform overlap allows. The chain here is:
//! overlap K → fidelity F = exp(−2|α₀|²(1−Re K)) → Helstrom–Holevo error
//! bound P_e = (1−√(1−F))/2 → smallest driven phonon number that reaches a
//! target error rate → energy per bit.
//!
//! All frequencies enter as ratios to the mechanical frequency, so the
//! whole module is dimensionless until the closed-form energies at the end.

use num_complex::Complex64;

use crate::bessel;
use crate::error::{Error, Result};
use crate::units::HBAR;

type C64 = Complex64;

/// One bit-encoding scenario: initial cavity photon number, device ratios
/// and the target error probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodingProblem {
    /// Mean photon number |α₀|² of the initial cavity coherent state.
    pub alpha0_sq: f64,
    /// g₀/ω_m.
    pub ratio_g: f64,
    /// κ/ω_m.
    pub ratio_k: f64,
    /// Error probability to reach, in (0, 0.5].
    pub target_pe: f64,
}

impl EncodingProblem {
    pub fn new(alpha0_sq: f64, ratio_g: f64, ratio_k: f64, target_pe: f64) -> Result<Self> {
        if !(alpha0_sq > 0.0) {
            return Err(Error::InvalidParam(format!("alpha0_sq must be > 0, got {alpha0_sq}")));
        }
        if !(ratio_g > 0.0) || !(ratio_k > 0.0) {
            return Err(Error::InvalidParam(format!(
                "ratio_g and ratio_k must be > 0, got {ratio_g}, {ratio_k}"
            )));
        }
        if !(target_pe > 0.0 && target_pe <= 0.5) {
            return Err(Error::InvalidParam(format!(
                "target_pe must be in (0, 0.5], got {target_pe}"
            )));
        }
        Ok(Self { alpha0_sq, ratio_g, ratio_k, target_pe })
    }
}

/// Waveform overlap of the two encoded output modes,
///
/// K = ∫₀^∞ κe^{−κt} e^{2ih sin ω_m t} dt = Σ_n J_n(2h)·κ/(κ − inω_m),
///
/// evaluated by the exact Bessel series in units of ω_m (`ratio_k` = κ/ω_m).
/// K(0) = 1 and |K| ≤ 1 always.
pub fn waveform_overlap(h: f64, ratio_k: f64) -> Result<C64> {
    if !(h >= 0.0) {
        return Err(Error::Domain(format!("modulation index must be >= 0, got {h}")));
    }
    if !(ratio_k > 0.0) {
        return Err(Error::Domain(format!("ratio_k must be > 0, got {ratio_k}")));
    }
    let arg = 2.0 * h;
    let n_max = bessel::series_order(arg);
    let j = bessel::jn_array(arg, n_max);
    let r = ratio_k;
    let mut k = C64::new(j[0], 0.0); // n = 0 term: J_0 · r/r
    for (n, &jn) in j.iter().enumerate().skip(1) {
        let nf = n as f64;
        let plus = C64::new(r, 0.0) / C64::new(r, -nf); // r/(r - i n)
        let minus = C64::new(r, 0.0) / C64::new(r, nf); // r/(r + i n)
        let j_neg = if n % 2 == 0 { jn } else { -jn };
        k += jn * plus + j_neg * minus;
    }
    Ok(k)
}

/// Quasi-static approximation of the overlap, valid for κ ≫ ω_m:
/// K ≈ κ/(κ − 2ihω_m).
pub fn slow_limit_overlap(h: f64, ratio_k: f64) -> C64 {
    C64::new(ratio_k, 0.0) / C64::new(ratio_k, -2.0 * h)
}

/// Sideband-resolved approximation of the overlap, valid for κ ≪ ω_m:
/// K ≈ J₀(2h).
pub fn fast_limit_overlap(h: f64) -> f64 {
    bessel::jn(0, 2.0 * h)
}

/// Fidelity between the two encoded coherent outputs:
/// F = |exp(−|α₀|²(1−K))|² = exp(−2|α₀|²(1−Re K)).
pub fn encoding_fidelity(alpha0_sq: f64, overlap: C64) -> Result<f64> {
    if !(alpha0_sq >= 0.0) {
        return Err(Error::Domain(format!("alpha0_sq must be >= 0, got {alpha0_sq}")));
    }
    if overlap.norm() > 1.0 + 1e-9 {
        return Err(Error::Domain(format!("overlap magnitude {} exceeds 1", overlap.norm())));
    }
    Ok((-2.0 * alpha0_sq * (1.0 - overlap.re)).exp())
}

/// Helstrom–Holevo lower bound on the error probability of discriminating
/// two equiprobable pure states of fidelity F: P_e = (1 − √(1−F))/2.
pub fn helstrom_error(fidelity: f64) -> Result<f64> {
    if !(0.0..=1.0 + 1e-12).contains(&fidelity) {
        return Err(Error::Domain(format!("fidelity must be in [0, 1], got {fidelity}")));
    }
    Ok(0.5 * (1.0 - (1.0 - fidelity.min(1.0)).sqrt()))
}

/// Error probability of the encoding at a given driven phonon number
/// (drive at ω_µ = ω_m, so h = ratio_g·√n_phon).
pub fn error_probability(prob: &EncodingProblem, n_phon: f64) -> Result<f64> {
    let h = prob.ratio_g * n_phon.sqrt();
    let k = waveform_overlap(h, prob.ratio_k)?;
    helstrom_error(encoding_fidelity(prob.alpha0_sq, k)?)
}

/// Outcome of the phonon-number search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhononSearch {
    /// Smallest phonon number found with P_e ≤ target (first grid
    /// crossing refined by bisection).
    Reached { n_phon: f64, pe: f64 },
    /// The target was not met anywhere inside the search bounds; carries
    /// the best error probability seen and where.
    NotReached { min_pe: f64, at_n_phon: f64 },
}

// Closed-form slow-limit phonon number that reaches the target, used to
// size the search interval. None when the slow limit cannot reach it.
fn slow_limit_phonons(prob: &EncodingProblem) -> Option<f64> {
    let f_t = 4.0 * prob.target_pe * (1.0 - prob.target_pe);
    let q = -f_t.ln() / (2.0 * prob.alpha0_sq);
    if q >= 1.0 {
        return None;
    }
    let half_k = prob.ratio_k / (2.0 * prob.ratio_g);
    Some(half_k * half_k * q / (1.0 - q))
}

// Fast-limit phonon number: solve J_0(2h) = 1 - q on the first descending
// branch. None when even the first J_0 minimum cannot reach the target.
fn fast_limit_phonons(prob: &EncodingProblem) -> Option<f64> {
    let f_t = 4.0 * prob.target_pe * (1.0 - prob.target_pe);
    let target_re = 1.0 + f_t.ln() / (2.0 * prob.alpha0_sq);
    if target_re < -0.4027 {
        return None; // below min J_0
    }
    let (mut lo, mut hi) = (0.0_f64, 3.8317_f64); // J_0 decreasing up to its first zero-derivative
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel::jn(0, mid) > target_re {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = 0.5 * 0.5 * (lo + hi);
    Some((h / prob.ratio_g).powi(2))
}

/// Smallest driven phonon number whose encoding error meets the target.
///
/// P_e(n) is evaluated on a log grid (40 points per decade) spanning up to
/// ten times the larger of the two closed-form limits; the first crossing
/// below the target is refined by bisection to 10⁻⁴ relative width.
/// First-crossing semantics: P_e need not be globally monotone in n.
pub fn required_phonons(prob: &EncodingProblem) -> Result<PhononSearch> {
    let pe0 = helstrom_error(1.0)?; // n = 0: identical states, P_e = 1/2
    if pe0 <= prob.target_pe {
        return Ok(PhononSearch::Reached { n_phon: 0.0, pe: pe0 });
    }

    let bound = slow_limit_phonons(prob)
        .unwrap_or(0.0)
        .max(fast_limit_phonons(prob).unwrap_or(0.0))
        .max((1.9159 / prob.ratio_g).powi(2)); // h at first J_0 minimum
    let hi = 10.0 * bound;
    let lo = 1.0_f64.min(hi / 1e4);

    let decades = (hi / lo).log10();
    let steps = (decades * 40.0).ceil() as usize + 1;
    let mut best = (f64::INFINITY, lo);
    let mut prev_n = 0.0_f64;
    for i in 0..=steps {
        let n = lo * 10f64.powf(decades * i as f64 / steps as f64);
        let pe = error_probability(prob, n)?;
        if pe < best.0 {
            best = (pe, n);
        }
        if pe <= prob.target_pe {
            // bisect [prev_n, n]; the bracket endpoints straddle the target
            let (mut a, mut b) = (prev_n.max(lo * 1e-6), n);
            while b / a > 1.0 + 1e-4 {
                let mid = (a * b).sqrt();
                if error_probability(prob, mid)? <= prob.target_pe {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            let pe_b = error_probability(prob, b)?;
            debug_assert!(pe_b <= prob.target_pe);
            return Ok(PhononSearch::Reached { n_phon: b, pe: pe_b });
        }
        prev_n = n;
    }
    Ok(PhononSearch::NotReached { min_pe: best.0, at_n_phon: best.1 })
}

/// Closed-form energy per bit in the quasi-static limit κ ≫ ω_m:
/// E = ħω_m·κ²/(4g₀²·η_m). All rates angular (rad/s).
pub fn e_bit_slow(omega_m: f64, kappa: f64, g0: f64, eta_m: f64) -> Result<f64> {
    check_ebit_args(omega_m, g0, eta_m)?;
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("kappa must be > 0, got {kappa}")));
    }
    Ok(HBAR * omega_m * (kappa / g0).powi(2) / (4.0 * eta_m))
}

/// Closed-form energy per bit in the sideband-resolved limit κ ≪ ω_m:
/// E = ħω_m·ω_m²/(2g₀²·η_m).
pub fn e_bit_fast(omega_m: f64, g0: f64, eta_m: f64) -> Result<f64> {
    check_ebit_args(omega_m, g0, eta_m)?;
    Ok(HBAR * omega_m * (omega_m / g0).powi(2) / (2.0 * eta_m))
}

/// Energy per bit from the full numerical phonon search:
/// E = ħω_m·n_phon/η_m.
pub fn e_bit_numeric(prob: &EncodingProblem, omega_m: f64, eta_m: f64) -> Result<PhononSearch> {
    check_ebit_args(omega_m, 1.0, eta_m)?;
    // scale the phonon number into energy, preserving the search outcome
    Ok(match required_phonons(prob)? {
        PhononSearch::Reached { n_phon, pe } => {
            PhononSearch::Reached { n_phon: HBAR * omega_m * n_phon / eta_m, pe }
        }
        PhononSearch::NotReached { min_pe, at_n_phon } => {
            PhononSearch::NotReached { min_pe, at_n_phon: HBAR * omega_m * at_n_phon / eta_m }
        }
    })
}

fn check_ebit_args(omega_m: f64, g0: f64, eta_m: f64) -> Result<()> {
    if !(omega_m > 0.0) || !(g0 > 0.0) {
        return Err(Error::Domain(format!("rates must be > 0, got omega_m={omega_m}, g0={g0}")));
    }
    if !(eta_m > 0.0 && eta_m <= 1.0) {
        return Err(Error::Domain(format!("eta_m must be in (0, 1], got {eta_m}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::angular;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn overlap_is_one_without_modulation() {
        for &rk in &[0.01, 1.0, 100.0] {
            let k = waveform_overlap(0.0, rk).unwrap();
            assert_eq!(k, C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn overlap_matches_independent_references() {
        // computed with an independent series evaluation (scipy)
        let refs = [
            (0.5, 1.0, 0.811451584527075, 0.451885080605667),
            (2.0, 0.1, -0.394953955596455, 0.0213047856348504),
            (1.0, 10.0, 0.962826646525549, 0.190979450164697),
            (5.0, 100.0, 0.990102814096786, 0.0990008669960736),
        ];
        for &(h, rk, re, im) in &refs {
            let k = waveform_overlap(h, rk).unwrap();
            assert_relative_eq!(k.re, re, max_relative = 1e-12);
            assert_relative_eq!(k.im, im, max_relative = 1e-12);
        }
    }

    #[test]
    fn fast_limit_real_part() {
        // kappa/omega_m = 0.01: Re K approaches J_0(2h); the imaginary part
        // carries the O(kappa/omega_m) residue and drops out of the fidelity
        for &h in &[0.3, 0.76, 1.0, 2.5] {
            let k = waveform_overlap(h, 0.01).unwrap();
            assert!((k.re - fast_limit_overlap(h)).abs() < 1e-3, "h={h}");
        }
    }

    #[test]
    fn slow_limit_agreement() {
        for &h in &[0.5, 1.0, 3.0] {
            let k = waveform_overlap(h, 100.0).unwrap();
            let s = slow_limit_overlap(h, 100.0);
            assert!((k - s).norm() / k.norm() < 0.01, "h={h}");
        }
    }

    proptest! {
        #[test]
        fn overlap_magnitude_bounded(h in 0.0f64..8.0, log_rk in -2.0f64..2.0) {
            let k = waveform_overlap(h, 10f64.powf(log_rk)).unwrap();
            prop_assert!(k.norm() <= 1.0 + 1e-12, "|K| = {}", k.norm());
        }
    }

    #[test]
    fn fidelity_identities() {
        assert_eq!(encoding_fidelity(1.0, C64::new(1.0, 0.0)).unwrap(), 1.0);
        let f = encoding_fidelity(1.0, C64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(f, (-2.0f64).exp(), max_relative = 1e-15);
        assert!(encoding_fidelity(1.0, C64::new(1.5, 0.0)).is_err());
    }

    #[test]
    fn slow_limit_anchor_point() {
        // g0 sqrt(n) = kappa/2 (h = ratio_k/2) with one photon: F = 1/e,
        // P_e = 10.25%
        let rk = 37.0;
        let f = encoding_fidelity(1.0, slow_limit_overlap(rk / 2.0, rk)).unwrap();
        assert_relative_eq!(f, (-1.0f64).exp(), max_relative = 1e-12);
        let pe = helstrom_error(f).unwrap();
        assert!((pe - 0.1025).abs() < 5e-4);
    }

    #[test]
    fn helstrom_limits() {
        assert_eq!(helstrom_error(0.0).unwrap(), 0.0);
        assert_eq!(helstrom_error(1.0).unwrap(), 0.5);
        assert!(helstrom_error(-0.1).is_err());
        assert!(helstrom_error(1.1).is_err());
        // monotone increasing in F
        let mut prev = -1.0;
        for i in 0..=100 {
            let p = helstrom_error(i as f64 / 100.0).unwrap();
            assert!(p > prev);
            prev = p;
        }
    }

    #[test]
    fn trivial_target_needs_no_phonons() {
        let prob = EncodingProblem::new(1.0, 5e-5, 1.0, 0.5).unwrap();
        assert_eq!(required_phonons(&prob).unwrap(), PhononSearch::Reached { n_phon: 0.0, pe: 0.5 });
    }

    #[test]
    fn slow_regime_matches_closed_form() {
        let prob = EncodingProblem::new(1.0, 5e-5, 100.0, 0.1).unwrap();
        match required_phonons(&prob).unwrap() {
            PhononSearch::Reached { n_phon, .. } => {
                let closed = (prob.ratio_k / (2.0 * prob.ratio_g)).powi(2);
                assert_relative_eq!(n_phon, closed, max_relative = 0.05);
            }
            other => panic!("expected Reached, got {other:?}"),
        }
    }

    #[test]
    fn fast_regime_matches_closed_form() {
        let prob = EncodingProblem::new(1.0, 5e-5, 0.01, 0.1).unwrap();
        match required_phonons(&prob).unwrap() {
            PhononSearch::Reached { n_phon, .. } => {
                let closed = (0.76 / prob.ratio_g).powi(2);
                assert_relative_eq!(n_phon, closed, max_relative = 0.05);
            }
            other => panic!("expected Reached, got {other:?}"),
        }
    }

    #[test]
    fn unreachable_target_reports_minimum() {
        // |alpha_0|^2 = 1 bounds F >= exp(-4), P_e >= 0.74%; ask for less
        let prob = EncodingProblem::new(1.0, 1e-3, 1.0, 0.001).unwrap();
        match required_phonons(&prob).unwrap() {
            PhononSearch::NotReached { min_pe, .. } => {
                assert!(min_pe > 0.001 && min_pe < 0.5);
            }
            other => panic!("expected NotReached, got {other:?}"),
        }
    }

    #[test]
    fn problem_invariants() {
        assert!(EncodingProblem::new(0.0, 1e-4, 1.0, 0.1).is_err());
        assert!(EncodingProblem::new(1.0, 0.0, 1.0, 0.1).is_err());
        assert!(EncodingProblem::new(1.0, 1e-4, 1.0, 0.6).is_err());
        assert!(EncodingProblem::new(1.0, 1e-4, 1.0, 0.0).is_err());
    }

    #[test]
    fn e_bit_fast_reported_point() {
        let e = e_bit_fast(angular(1.85e9), angular(70e3), 4.4e-3).unwrap();
        assert_relative_eq!(e, 9.7e-14, max_relative = 0.03);
    }

    #[test]
    fn e_bit_slow_spot_check() {
        // eta_m = 1, kappa = 2 g0 -> hbar omega_m
        let omega_m = angular(1.85e9);
        let e = e_bit_slow(omega_m, 2.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(e, HBAR * omega_m, max_relative = 1e-12);
    }

    #[test]
    fn e_bit_numeric_scales_phonons() {
        let prob = EncodingProblem::new(1.0, 5e-5, 0.65, 0.1).unwrap();
        let n = match required_phonons(&prob).unwrap() {
            PhononSearch::Reached { n_phon, .. } => n_phon,
            other => panic!("{other:?}"),
        };
        let omega_m = angular(1.85e9);
        match e_bit_numeric(&prob, omega_m, 4.4e-3).unwrap() {
            PhononSearch::Reached { n_phon: e, .. } => {
                assert_relative_eq!(e, HBAR * omega_m * n / 4.4e-3, max_relative = 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }
}
