//! Reference computations that avoid the closed forms used by the optimizer.

use crate::error::Result;
use crate::rescaled::psi_radius;

/// Minimizes `psi(r) / eta - s * r` over `r >= 0` numerically.
///
/// The objective is strictly convex in `r`, so its minimizer is where the
/// derivative `ln(1 + r) / eta - s` changes sign. The bracket is grown by
/// doubling, then bisected to adjacent floats. Returns `None` when the
/// minimizer is beyond the largest finite `f64`.
pub fn radial_argmin(s: f64, eta: f64) -> Option<f64> {
    if s <= 0.0 {
        return Some(0.0);
    }
    let slope = |r: f64| r.ln_1p() / eta - s;
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while slope(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
    }
    loop {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(if slope(hi).abs() < slope(lo).abs() {
        hi
    } else {
        lo
    })
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// The FTRL objective along the ray opposite to the gradient sum.
pub fn radial_objective(r: f64, s: f64, eta: f64) -> Result<f64> {
    Ok(psi_radius(r)? / eta - s * r)
}

/// Straightforward scalar RescaledExp written from the update rules, used to
/// cross-check the production state machine. Returns the iterates
/// `w_2, ..., w_{T+1}` and the reset steps.
pub fn scalar_reference(grads: &[f64]) -> (Vec<f64>, Vec<u64>) {
    let k = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(grads.len());
    let mut resets = Vec::new();
    let mut started = false;
    let (mut l, mut sum, mut sq, mut m) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut w = 0.0;
    for (i, &g) in grads.iter().enumerate() {
        let t = i as u64 + 1;
        if g == 0.0 {
            out.push(w);
            continue;
        }
        if !started {
            started = true;
            l = g.abs();
        }
        let p = 1.0 / l;
        m = m.max((sum + g).abs() / p - (sq + g * g));
        sum += g;
        sq += g * g;
        let eta = 1.0 / (k * 2f64.sqrt() * (m + sq).sqrt());
        w = -sum.signum() * (eta * sum.abs()).exp_m1();
        if sum == 0.0 {
            w = 0.0;
        }
        if g.abs() > 2.0 * l {
            l = g.abs();
            sum = 0.0;
            sq = 0.0;
            m = 0.0;
            w = 0.0;
            resets.push(t);
        }
        out.push(w);
    }
    (out, resets)
}
