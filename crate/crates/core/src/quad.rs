//! Tanh-sinh quadrature on finite intervals.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// ∫_a^b f, halving the step until successive levels agree to `tol`.
///
/// `f` receives (x, distance to a, distance to b) so integrands with endpoint
/// singularities can be evaluated without cancellation.
pub fn tanh_sinh(f: impl Fn(f64, f64, f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !(b > a) {
        return Err(Error::Parameter(format!("bad quadrature request [{a}, {b}], tol {tol}")));
    }
    let half = (b - a) / 2.0;
    let node = |t: f64| -> Option<f64> {
        // x = mid + half·tanh(π/2 sinh t), weight π/2 cosh t / cosh²(π/2 sinh t)
        let s = FRAC_PI_2 * t.sinh();
        let ch = s.cosh();
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        if w * half < 1e-300 {
            return None;
        }
        // 1 − tanh(s) = 2/(e^{2s}+1) keeps the endpoint distance exact
        let d = 2.0 * half / ((2.0 * s.abs()).exp() + 1.0);
        if d <= 0.0 {
            return None;
        }
        let (x, da, db) = if s >= 0.0 {
            (b - d, b - a - d, d)
        } else {
            (a + d, d, b - a - d)
        };
        Some(w * half * f(x, da, db))
    };
    let level_sum = |h: f64, odd_only: bool| -> f64 {
        let mut acc = if odd_only { 0.0 } else { node(0.0).unwrap_or(0.0) };
        let step = if odd_only { 2 } else { 1 };
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            let (p, m) = (node(t), node(-t));
            if (p.is_none() && m.is_none()) || t > 7.0 {
                break;
            }
            acc += p.unwrap_or(0.0) + m.unwrap_or(0.0);
            k += step;
        }
        acc
    };
    let mut h = 0.5;
    let mut sum = level_sum(h, false);
    let mut est = sum * h;
    for _ in 0..12 {
        h /= 2.0;
        sum += level_sum(h, true);
        let next = sum * h;
        if (next - est).abs() <= tol {
            return Ok(next);
        }
        est = next;
    }
    Err(Error::NoConvergence(format!("tanh-sinh stalled at {est}")))
}
