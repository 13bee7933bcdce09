//! Distance under the exact constraint ‖[D, π(a)]‖ ≤ 1.
//!
//! The feasible set is convex, so it is approached from outside by Kelley
//! cutting planes: every unit pair (u, v) gives the valid cut
//! Re u†[D, π(a)]v ≤ 1. The LP optimum over the cuts is an upper bound and
//! the rescaled iterate c·y/‖M(y)‖ a feasible lower bound.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use num_complex::Complex64;

use super::lp::check_real_spec;
use super::OptimizerConfig;
use crate::error::{Error, Result};
use crate::hilbert::{commutator_band, top_singular_pair, AlgebraElement, BasisWindow, DiracSpec, SingularPair};

#[derive(Debug, Clone, PartialEq)]
pub struct OpnormResult {
    /// Best feasible value found.
    pub value: f64,
    /// Outer-approximation bound from the last cutting-plane LP.
    pub upper: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Relative change of ‖[D, π(a)]‖ at the optimum when the window doubles.
    pub window_change: f64,
}

fn element(y: &[f64]) -> AlgebraElement {
    let n = y.len() / 2;
    AlgebraElement::from_real_trig(0.0, &y[..n], &y[n..])
}

fn norm_of(d: &DiracSpec, y: &[f64], w: BasisWindow, start: Option<&[Complex64]>) -> Result<SingularPair> {
    let m = commutator_band(d, &element(y), w)?;
    match top_singular_pair(&m, 1e-10, 4000, start) {
        Ok(p) => Ok(p),
        Err(Error::NoConvergence(_)) => dense_pair(&m.to_dense()),
        Err(e) => Err(e),
    }
}

fn dense_pair(m: &nalgebra::DMatrix<Complex64>) -> Result<SingularPair> {
    let svd = m.clone().svd(true, true);
    let (k, &sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Singular("empty matrix".into()))?;
    let u = svd.u.as_ref().ok_or_else(|| Error::Solver("svd without U".into()))?;
    let vt = svd.v_t.as_ref().ok_or_else(|| Error::Solver("svd without V".into()))?;
    Ok(SingularPair {
        sigma,
        u: u.column(k).iter().copied().collect(),
        v: vt.row(k).iter().map(|z| z.conj()).collect(),
    })
}

/// Re u†M_j v for the basis directions p_n, q_n.
fn cut_coefficients(d: &DiracSpec, w: BasisWindow, n_modes: usize, pair: &SingularPair) -> Vec<f64> {
    let (lo, hi) = (w.kmin(), w.kmax());
    let band = |n: i64| -> Complex64 {
        // Σ_l conj(u_{l+n}) (f(l+n) − f(l)) v_l
        let mut acc = Complex64::new(0.0, 0.0);
        for l in lo.max(lo - n)..=hi.min(hi - n) {
            let (r, c) = ((l + n - lo) as usize, (l - lo) as usize);
            acc += pair.u[r].conj() * pair.v[c] * d.gap(l, n);
        }
        acc
    };
    let mut out = vec![0.0; 2 * n_modes];
    for k in 1..=n_modes {
        let (bp, bm) = (band(k as i64), band(-(k as i64)));
        // p: a_{±n} = 1/2; q: a_n = −i/2, a_{−n} = i/2
        out[k - 1] = ((bp + bm) / 2.0).re;
        out[n_modes + k - 1] = (Complex64::new(0.0, -0.5) * (bp - bm)).re;
    }
    out
}

fn max_gap(d: &DiracSpec, w: BasisWindow, n: i64) -> f64 {
    w.iter()
        .filter(|l| w.contains(l + n))
        .map(|l| d.gap(l, n).abs())
        .fold(0.0, f64::max)
}

/// Kelley cutting-plane maximization of a(x1) − a(x0).
pub fn distance_opnorm(
    x0: f64,
    x1: f64,
    d: &DiracSpec,
    cfg: &OptimizerConfig,
    w: BasisWindow,
) -> Result<OpnormResult> {
    cfg.validate()?;
    check_real_spec(d)?;
    let n_modes = cfg.modes;
    if w.dim() <= 2 * n_modes {
        return Err(Error::WindowTooSmall { shift: n_modes as i64, dim: w.dim() });
    }
    if x0 == x1 {
        return Ok(OpnormResult {
            value: 0.0,
            upper: 0.0,
            iterations: 0,
            converged: true,
            window_change: 0.0,
        });
    }
    let mut c = vec![0.0; 2 * n_modes];
    for k in 1..=n_modes {
        let kf = k as f64;
        c[k - 1] = (kf * x1).cos() - (kf * x0).cos();
        c[n_modes + k - 1] = (kf * x1).sin() - (kf * x0).sin();
    }
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let mut vars: Vec<Variable> = Vec::with_capacity(2 * n_modes);
    for j in 0..2 * n_modes {
        // a single band entry bounds |a_{±n}|, hence |p_n|, |q_n|
        let n = (j % n_modes + 1) as i64;
        let b = 1.0 / max_gap(d, w, n) + 1.0 / max_gap(d, w, -n);
        vars.push(lp.add_var(c[j], (-b, b)));
    }
    let mut sol = lp
        .solve()
        .map_err(|e| Error::Solver(format!("cutting-plane LP: {e}")))?
        .into_solution()
        .map_err(|_| Error::Solver("cutting-plane LP interrupted".into()))?;
    let dot = |y: &[f64]| -> f64 { y.iter().zip(&c).map(|(a, b)| a * b).sum() };
    let mut best_y = vec![0.0; 2 * n_modes];
    let mut best = 0.0;
    let mut upper = f64::INFINITY;
    let mut start: Option<Vec<Complex64>> = None;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..cfg.max_iter {
        iterations = it + 1;
        let y: Vec<f64> = vars.iter().map(|&v| sol.var_value(v)).collect();
        upper = upper.min(sol.objective());
        let pair = norm_of(d, &y, w, start.as_deref())?;
        if pair.sigma > 0.0 {
            let lower = dot(&y) / pair.sigma;
            if lower > best {
                best = lower;
                best_y = y.iter().map(|v| v / pair.sigma).collect();
            }
        }
        if upper - best <= cfg.tol * upper.abs() {
            converged = true;
            break;
        }
        let coef = cut_coefficients(d, w, n_modes, &pair);
        let expr: Vec<(Variable, f64)> = vars.iter().copied().zip(coef).collect();
        start = Some(pair.v);
        sol = sol
            .add_constraint(expr, ComparisonOp::Le, 1.0)
            .map_err(|e| Error::Solver(format!("cutting-plane LP: {e}")))?
            .into_solution()
            .map_err(|_| Error::Solver("cutting-plane LP interrupted".into()))?;
    }
    if !converged {
        log::warn!("opnorm: bracket [{best}, {upper}] after {iterations} cuts");
    }
    // accurate norm at the reported point, and the window doubling check
    let m = commutator_band(d, &element(&best_y), w)?;
    let sigma = dense_pair(&m.to_dense())?.sigma;
    let value = if sigma > 0.0 { dot(&best_y) / sigma } else { 0.0 };
    let wide = norm_of(d, &best_y, w.doubled(), None)?.sigma;
    let window_change = if sigma > 0.0 { (wide - sigma).abs() / sigma } else { 0.0 };
    if window_change > cfg.tol {
        log::warn!("opnorm: norm changes by {window_change:e} when the window doubles");
    }
    Ok(OpnormResult {
        value,
        upper,
        iterations,
        converged,
        window_change,
    })
}
