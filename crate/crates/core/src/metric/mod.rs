//! Connes distance on the deformed circle.
//!
//! Conventions: algebra elements are a(x) = Σ a_n e^{inx}. The Liouville
//! derivative acts on the lifted function ã(x) = e^{ix/2} a(x), whose modes
//! sit on e^{i(n+1/2)x}; the kernel d_{−ε} is written with e^{−i(l+1/2)x} so
//! that its Fourier sum and closed form refer to the same function.

mod lp;
mod opnorm;

pub use lp::{distance_lp, lp_bracket, LpBracket};
pub use opnorm::{distance_opnorm, OpnormResult};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::hilbert::{AlgebraElement, DiracSpec};
use crate::quad::tanh_sinh;
use crate::specfun::{eigen, gamma_real};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// κ: fixed by the ε = 1 limit d(δ_x, δ_0) = |x|, where 𝓕(1)·C(1) = 2.
pub const CALIBRATION: f64 = 0.5;

/// Regularized, truncated kernel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub eps: f64,
    pub eta: f64,
    pub lmax: u64,
}

impl KernelParams {
    pub fn new(eps: f64, eta: f64, lmax: u64) -> Result<Self> {
        let p = Self { eps, eta, lmax };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_eps(self.eps)?;
        if !(self.eta > 0.0) {
            return Err(Error::Parameter(format!("eta must be positive, got {}", self.eta)));
        }
        if self.lmax == 0 {
            return Err(Error::Parameter("lmax must be positive".into()));
        }
        Ok(())
    }
}

/// Settings shared by the two optimization estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub modes: usize,
    pub grid_points: usize,
    pub polygon_sides: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            modes: 64,
            grid_points: 512,
            polygon_sides: 16,
            max_iter: 400,
            tol: 1e-3,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.modes < 1 || self.grid_points < 4 * self.modes || self.polygon_sides < 8 {
            return Err(Error::Parameter(format!(
                "need N >= 1, G >= 4N, P >= 8; got N={}, G={}, P={}",
                self.modes, self.grid_points, self.polygon_sides
            )));
        }
        if self.max_iter == 0 || !(self.tol > 0.0) {
            return Err(Error::Parameter("max_iter and tol must be positive".into()));
        }
        Ok(())
    }
}

/// Sampled x ↦ d(δ_x, δ_0).
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceProfile {
    pub eps: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub normalization: f64,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("eps must lie in (0, 1], got {eps}")));
    }
    Ok(())
}

fn check_not_half(eps: f64) -> Result<()> {
    check_eps(eps)?;
    if (eps - 0.5).abs() < 1e-12 {
        return Err(Error::Parameter("eps = 1/2 makes cos(pi eps) vanish".into()));
    }
    Ok(())
}

/// Commutator symbol: i Σ a_n (f(n) − f(0)) e^{inx}.
///
/// This is [D, π(a)] applied to |0> with the phase e^{ix/2} removed; the unit
/// goes to 0 and α = 0 gives the classical a'(x).
pub fn frac_derivative(a: &AlgebraElement, d: &DiracSpec, xs: &[f64]) -> Vec<Complex64> {
    let f0 = d.eigenvalue(0);
    let sym: Vec<(i64, Complex64)> = a
        .terms()
        .map(|(n, c)| (n, I * c * (d.eigenvalue(n) - f0)))
        .collect();
    xs.iter()
        .map(|&x| sym.iter().map(|&(n, c)| c * Complex64::from_polar(1.0, n as f64 * x)).sum())
        .collect()
}

/// Liouville derivative of ã = e^{ix/2}a: i Σ a_n f(n) e^{i(n+1/2)x}.
pub fn lifted_frac_derivative(a: &AlgebraElement, d: &DiracSpec, xs: &[f64]) -> Vec<Complex64> {
    let sym: Vec<(i64, Complex64)> = a.terms().map(|(n, c)| (n, I * c * d.eigenvalue(n))).collect();
    xs.iter()
        .map(|&x| {
            sym.iter()
                .map(|&(n, c)| c * Complex64::from_polar(1.0, (n as f64 + 0.5) * x))
                .sum()
        })
        .collect()
}

/// (1/(2 cos πε)) |x|^{ε−1}/Γ(ε) e^{iπε sg(x)/2}.
pub fn kernel_closed(x: f64, eps: f64) -> Result<Complex64> {
    check_not_half(eps)?;
    if x == 0.0 {
        return Err(Error::Singular("kernel at x = 0".into()));
    }
    let sg = x.signum();
    let amp = x.abs().powf(eps - 1.0) / (2.0 * (PI * eps).cos() * gamma_real(eps)?);
    Ok(Complex64::from_polar(amp, PI * eps * sg / 2.0))
}

/// Coefficient |l+1/2−iη|^{−ε}[cos πε]^{(sg(l)−1)/2}, sg(l) = sign of l + 1/2.
pub fn kernel_coefficient(l: i64, p: &KernelParams) -> f64 {
    let lam = l as f64 + 0.5;
    let m = (lam * lam + p.eta * p.eta).sqrt().powf(-p.eps);
    if l >= 0 {
        m
    } else {
        m / (PI * p.eps).cos()
    }
}

/// (1/2π) Σ_{−lmax−1 ≤ l ≤ lmax} κ_l e^{−i(l+1/2)x}.
pub fn kernel_fourier(x: f64, p: &KernelParams) -> Result<Complex64> {
    p.validate()?;
    let lmax = p.lmax as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    // pair l with −l−1, which carry opposite half-integer frequencies
    for l in (0..=lmax).rev() {
        let ph = Complex64::from_polar(1.0, -(l as f64 + 0.5) * x);
        acc += ph * kernel_coefficient(l, p) + ph.conj() * kernel_coefficient(-l - 1, p);
    }
    Ok(acc / (2.0 * PI))
}

/// 𝓕(ε) = |2Γ(ε)cos πε|^{−1}.
pub fn capital_f(eps: f64) -> Result<f64> {
    check_not_half(eps)?;
    Ok(1.0 / (2.0 * gamma_real(eps)? * (PI * eps).cos()).abs())
}

/// ∫₀¹ |1−y|^{ε−1} + |y|^{ε−1} − 2|1−y|^{ε−1}|y|^{ε−1} cos πε dy.
///
/// The integrand is symmetric about 1/2; on [0, 1/2] the substitution
/// y = t^{1/ε} removes the y^{ε−1} singularity.
pub fn capital_c(eps: f64, quad_tol: f64) -> Result<f64> {
    check_eps(eps)?;
    let c = (PI * eps).cos();
    let top = 0.5f64.powf(eps);
    let g = |t: f64, _: f64, _: f64| -> f64 {
        let y = t.powf(1.0 / eps);
        let one_minus = (1.0 - y).powf(eps - 1.0);
        // y^{ε−1} dy = dt/ε, and dy = t^{1/ε−1} dt/ε
        (one_minus * t.powf(1.0 / eps - 1.0) + 1.0 - 2.0 * c * one_minus) / eps
    };
    Ok(2.0 * tanh_sinh(g, 0.0, top, quad_tol / 2.0)?)
}

const C_TOL: f64 = 1e-13;

fn bracket(x: f64, eps: f64) -> f64 {
    ((PI + x).powf(eps) + (PI - x).powf(eps) - 2.0 * PI.powf(eps)) / eps
}

/// κ 𝓕(ε){C(ε)|x|^ε + (1/ε)[(π+x)^ε + (π−x)^ε − 2π^ε]}.
pub fn distance_closed(x: f64, eps: f64) -> Result<f64> {
    check_not_half(eps)?;
    if !(0.0..=PI).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, pi], got {x}")));
    }
    let f = capital_f(eps)?;
    let c = capital_c(eps, C_TOL)?;
    Ok(closed_with(x, eps, f, c))
}

fn closed_with(x: f64, eps: f64, f: f64, c: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    CALIBRATION * f * (c * x.powf(eps) + bracket(x, eps))
}

/// Closed-form profile on a grid of [0, π].
pub fn distance_profile(eps: f64, grid: &[f64]) -> Result<DistanceProfile> {
    check_not_half(eps)?;
    let f = capital_f(eps)?;
    let c = capital_c(eps, C_TOL)?;
    let mut values = Vec::with_capacity(grid.len());
    for &x in grid {
        if !(0.0..=PI).contains(&x) {
            return Err(Error::Domain(format!("x must lie in [0, pi], got {x}")));
        }
        values.push(closed_with(x, eps, f, c));
    }
    Ok(DistanceProfile {
        eps,
        grid: grid.to_vec(),
        values,
        normalization: CALIBRATION,
    })
}

/// max_x |∫ R(x−y) D^ε ã(y) dy − ã(x)| with R(u) = −i·kernel_fourier(−u).
///
/// The integrand is a trigonometric polynomial of degree below the node count,
/// so the periodic trapezoid rule on Q nodes is exact and the truncated kernel
/// at the nodes comes from one FFT per sample.
pub fn reproducing_check(a: &AlgebraElement, p: &KernelParams, samples: &[f64]) -> Result<f64> {
    p.validate()?;
    let deg = a.max_shift() as u64;
    if deg > p.lmax {
        return Err(Error::Parameter(format!(
            "element degree {deg} exceeds lmax {}",
            p.lmax
        )));
    }
    let need = 2 * (p.lmax + deg + 2);
    let q = need.next_power_of_two() as usize;
    let nodes: Vec<f64> = (0..q).map(|j| -PI + 2.0 * PI * j as f64 / q as f64).collect();
    let d = DiracSpec::Deformed { alpha: 1.0 - p.eps };
    let h = lifted_frac_derivative(a, &d, &nodes);
    let lmax = p.lmax as i64;
    let coef: Vec<f64> = (-lmax - 1..=lmax).map(|l| kernel_coefficient(l, p)).collect();
    let errs: Vec<f64> = samples
        .par_iter()
        .map(|&x| {
            let mut planner = FftPlanner::<f64>::new();
            let fft = planner.plan_fft_forward(q);
            // R(x − y_j) = −i/(2π) Σ_l κ_l e^{i(l+1/2)(x − y_j)},
            // y_j = −π + 2πj/Q, so e^{−i(l+1/2)y_j} = e^{i(l+1/2)π} e^{−2πi(l+1/2)j/Q}
            let mut buf = vec![Complex64::new(0.0, 0.0); q];
            for (idx, l) in (-lmax - 1..=lmax).enumerate() {
                let lam = l as f64 + 0.5;
                let c = Complex64::from_polar(coef[idx], lam * (x + PI));
                buf[l.rem_euclid(q as i64) as usize] += c;
            }
            fft.process(&mut buf);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..q {
                let half = Complex64::from_polar(1.0, -PI * j as f64 / q as f64);
                let r = -I * buf[j] * half / (2.0 * PI);
                acc += r * h[j];
            }
            let integral = acc * (2.0 * PI / q as f64);
            let target = Complex64::from_polar(1.0, x / 2.0) * a.eval(x);
            (integral - target).norm()
        })
        .collect();
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Eigenvalue shortcut used by the estimators.
pub(crate) fn symbol(d: &DiracSpec, n: i64) -> f64 {
    eigen(n, d.epsilon()) - eigen(0, d.epsilon())
}
