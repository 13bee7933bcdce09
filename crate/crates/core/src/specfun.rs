//! Special functions: complex gamma, Riemann zeta for Re s > 0, principal
//! powers of half-integers and the deformed eigenvalue function.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_SERIES0: f64 = 0.999_999_999_999_997_092;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Principal log-gamma for Re z ≥ 0.5.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let mut tmp = z + LANCZOS_G;
    tmp = (z + 0.5) * tmp.ln() - tmp;
    let mut ser = Complex64::new(LANCZOS_SERIES0, 0.0);
    for (j, c) in LANCZOS.iter().enumerate() {
        ser += *c / (z + (j as f64 + 1.0));
    }
    tmp + (ser * SQRT_2PI / z).ln()
}

/// Complex gamma function.
///
/// Uses a 14-term Lanczos sum (g = 671/128) on Re z ≥ 1/2 and the reflection
/// formula elsewhere.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite {z}")));
    }
    let nearest = z.re.round();
    if nearest <= 0.0 && (z - nearest).norm() < 1e-12 {
        return Err(Error::GammaPole(nearest as i64));
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        let g = ln_gamma_right(Complex64::new(1.0, 0.0) - z).exp();
        Ok(Complex64::new(PI, 0.0) / (s * g))
    } else {
        Ok(ln_gamma_right(z).exp())
    }
}

/// Real gamma, convenience wrapper.
pub fn gamma_real(x: f64) -> Result<f64> {
    gamma(Complex64::new(x, 0.0)).map(|g| g.re)
}

/// e^z − 1 without cancellation for small |z|.
pub(crate) fn expm1_c(z: Complex64) -> Complex64 {
    if z.norm() < 1e-5 {
        // series, enough terms for double precision at this radius
        let mut term = z;
        let mut sum = z;
        for k in 2..8 {
            term *= z / k as f64;
            sum += term;
        }
        sum
    } else if z.re.abs() < 1.0 && z.im.abs() < 1.0 {
        // e^{x+iy} − 1 = (e^x − 1)cos y + (cos y − 1) + i e^x sin y
        let em1 = z.re.exp_m1();
        let cm1 = -2.0 * (z.im / 2.0).sin().powi(2);
        Complex64::new(em1 * z.im.cos() + cm1, z.re.exp() * z.im.sin())
    } else {
        z.exp() - 1.0
    }
}

fn borwein_terms(t: f64) -> usize {
    ((30.0 + 1.2 * t.abs()).ceil() as usize).min(180)
}

/// Riemann zeta on Re s > 0 through the accelerated Dirichlet eta series.
pub fn riemann_zeta(s: Complex64) -> Result<Complex64> {
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::Domain(format!("zeta of non-finite {s}")));
    }
    if s.re <= 0.0 {
        return Err(Error::Domain(format!("zeta requires Re s > 0, got {s}")));
    }
    if (s - 1.0).norm() <= 1e-9 {
        return Err(Error::ZetaPole);
    }
    let n = borwein_terms(s.im);
    // d_k = n Σ_{i≤k} (n+i−1)! 4^i / ((n−i)!(2i)!), via term ratios
    let mut d = Vec::with_capacity(n + 1);
    let mut term = 1.0 / n as f64;
    let mut acc = term;
    d.push(acc);
    for i in 1..=n {
        let fi = i as f64;
        let fnn = n as f64;
        term *= 4.0 * (fnn + fi - 1.0) * (fnn - fi + 1.0) / ((2.0 * fi) * (2.0 * fi - 1.0));
        acc += term;
        d.push(acc);
    }
    let dn = d[n];
    let mut eta = Complex64::new(0.0, 0.0);
    for k in (0..n).rev() {
        let c = 1.0 - d[k] / dn;
        let p = (-s * ((k + 1) as f64).ln()).exp();
        if k % 2 == 0 {
            eta += p * c;
        } else {
            eta -= p * c;
        }
    }
    let denom = -expm1_c((Complex64::new(1.0, 0.0) - s) * LN_2);
    Ok(eta / denom)
}

/// Principal branch (k + 1/2)^e with arg(k + 1/2) ∈ {0, π}.
pub fn principal_power(k: i64, exponent: Complex64) -> Complex64 {
    let x = k as f64 + 0.5;
    let ln_abs = x.abs().ln();
    let arg = if k >= 0 { 0.0 } else { PI };
    (exponent * Complex64::new(ln_abs, arg)).exp()
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    Ok(())
}

/// Eigenvalue for ε = 1 − α without range checks.
#[inline]
pub(crate) fn eigen(k: i64, eps: f64) -> f64 {
    if eps == 1.0 {
        return k as f64 + 0.5;
    }
    let a = (k as f64 + 0.5).abs().powf(eps);
    if k >= 0 {
        a
    } else {
        a * (PI * eps).cos()
    }
}

/// f(l+n) − f(l) evaluated without cancellation when l and l+n sit on the
/// same side of the spectrum.
pub(crate) fn eigen_gap(l: i64, n: i64, eps: f64) -> f64 {
    if eps == 1.0 {
        return n as f64;
    }
    let m = l + n;
    if n == 0 {
        return 0.0;
    }
    if (l >= 0) == (m >= 0) {
        let base = (l as f64 + 0.5).abs();
        let rel = if l >= 0 {
            n as f64 / base
        } else {
            -(n as f64) / base
        };
        let g = base.powf(eps) * (eps * rel.ln_1p()).exp_m1();
        if l >= 0 {
            g
        } else {
            g * (PI * eps).cos()
        }
    } else {
        eigen(m, eps) - eigen(l, eps)
    }
}

/// Deformed eigenvalue f_α(k) = |k+1/2|^ε, times cos(πε) for k < 0.
pub fn f_alpha(k: i64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(eigen(k, 1.0 - alpha))
}
