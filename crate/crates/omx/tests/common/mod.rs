//! Shared test utilities: an adaptive-quadrature oracle for the waveform
//! overlap integral, kept deliberately independent of the Bessel-series
//! path it cross-checks.

use num_complex::Complex64;

type C64 = Complex64;

fn simpson(a: f64, b: f64, fa: C64, fm: C64, fb: C64) -> C64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &dyn Fn(f64) -> C64,
    a: f64,
    b: f64,
    fa: C64,
    fm: C64,
    fb: C64,
    whole: C64,
    tol: f64,
    depth: u32,
) -> C64 {
    let m = 0.5 * (a + b);
    let lm = f(0.5 * (a + m));
    let rm = f(0.5 * (m + b));
    let left = simpson(a, m, fa, lm, fm);
    let right = simpson(m, b, fm, rm, fb);
    let err = left + right - whole;
    if depth == 0 || err.norm() < 15.0 * tol {
        left + right + err / 15.0
    } else {
        adapt(f, a, m, fa, lm, fm, left, tol / 2.0, depth - 1)
            + adapt(f, m, b, fm, rm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Direct numerical evaluation of K = ∫₀^∞ κe^{−κt}·e^{2ih sin ω_m t} dt
/// in units of ω_m, integrating over at least 50 mechanical periods with
/// adaptive Simpson panels no wider than a quarter period.
pub fn overlap_by_quadrature(h: f64, ratio_k: f64, tol_total: f64) -> C64 {
    let rk = ratio_k;
    let f = move |t: f64| -> C64 {
        C64::new(0.0, 2.0 * h * t.sin()).exp() * rk * (-rk * t).exp()
    };
    let t_end = (50.0 * std::f64::consts::TAU).max(40.0 / rk);
    let panel = std::f64::consts::FRAC_PI_2;
    let n_panels = (t_end / panel).ceil() as usize;
    let tol_panel = tol_total / n_panels as f64;

    let mut total = C64::new(0.0, 0.0);
    let mut a = 0.0;
    for _ in 0..n_panels {
        let b = (a + panel).min(t_end);
        let fa = f(a);
        let fm = f(0.5 * (a + b));
        let fb = f(b);
        let whole = simpson(a, b, fa, fm, fb);
        total += adapt(&f, a, b, fa, fm, fb, whole, tol_panel, 40);
        a = b;
        // the remaining tail integral is bounded by exp(-rk a)
        if (-rk * a).exp() < tol_total / 10.0 {
            break;
        }
    }
    total
}
