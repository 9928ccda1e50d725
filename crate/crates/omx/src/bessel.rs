//! Bessel functions of the first kind, J_n(x), for the sideband combs used
//! throughout the crate.
//!
//! Evaluation uses Miller's algorithm: downward recurrence
//! J_{k-1} = (2k/x)·J_k − J_{k+1} from a start order well above both the
//! requested order and the argument, normalized with the identity
//! J_0(x) + 2·Σ_{k≥1} J_{2k}(x) = 1. Downward recurrence is stable in the
//! regime n > x where the upward direction loses all precision, which is
//! exactly the regime a truncated sideband sum lives in.

/// Truncation order for a sideband series with Bessel argument `x`:
/// J_n(x) decays super-exponentially once n exceeds x, so `ceil(2x) + 20`
/// keeps every discarded term far below double precision.
pub fn series_order(x: f64) -> usize {
    (2.0 * x.abs()).ceil() as usize + 20
}

/// J_0(x) … J_{n_max}(x) in one downward pass.
pub fn jn_array(x: f64, n_max: usize) -> Vec<f64> {
    let ax = x.abs();
    if ax == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }

    // Start order: above both n_max and x, with the usual sqrt(ACC·n)
    // guard digits, rounded up to even.
    const ACC: f64 = 60.0;
    let base = (n_max as f64).max(ax).ceil();
    let mut m = (base + (ACC * (base + 1.0)).sqrt()).ceil() as usize + 16;
    if m % 2 == 1 {
        m += 1;
    }

    let mut out = vec![0.0; n_max + 1];
    let mut jp = 0.0_f64; // J_{k+1}
    let mut j = 1e-30_f64; // J_k  (arbitrary seed, normalized away)
    let mut norm = 0.0_f64; // accumulates J_0 + 2·Σ J_{2k}
    const BIG: f64 = 1e250;
    const SMALL: f64 = 1e-250;

    for k in (0..=m).rev() {
        // invariant here: j = c·J_k, jp = c·J_{k+1} for a common scale c
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if k <= n_max {
            out[k] = j;
        }
        if k > 0 {
            let jm = (2.0 * k as f64) / ax * j - jp;
            jp = j;
            j = jm;
            if j.abs() > BIG {
                j *= SMALL;
                jp *= SMALL;
                norm *= SMALL;
                for v in out.iter_mut() {
                    *v *= SMALL;
                }
            }
        }
    }

    let inv = 1.0 / norm;
    for v in out.iter_mut() {
        *v *= inv;
    }
    // J_n(-x) = (-1)^n J_n(x)
    if x < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// Single J_n(x) for signed integer order.
pub fn jn(n: i32, x: f64) -> f64 {
    let na = n.unsigned_abs() as usize;
    let v = jn_array(x, na)[na];
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}
