//! Finite windows of the antiperiodic basis e^{i(k+1/2)x}, algebra
//! representations, diagonal Dirac operators, commutators and norms.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::specfun::{check_alpha, eigen, eigen_gap};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Index range kmin..=kmax of basis vectors |k>.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisWindow {
    kmin: i64,
    kmax: i64,
}

impl BasisWindow {
    pub fn new(kmin: i64, kmax: i64) -> Result<Self> {
        if kmin >= kmax {
            return Err(Error::Parameter(format!(
                "window needs kmin < kmax, got [{kmin}, {kmax}]"
            )));
        }
        Ok(Self { kmin, kmax })
    }

    /// [−r, r].
    pub fn symmetric(r: i64) -> Result<Self> {
        Self::new(-r, r)
    }

    pub fn kmin(&self) -> i64 {
        self.kmin
    }

    pub fn kmax(&self) -> i64 {
        self.kmax
    }

    pub fn dim(&self) -> usize {
        (self.kmax - self.kmin + 1) as usize
    }

    pub fn contains(&self, k: i64) -> bool {
        k >= self.kmin && k <= self.kmax
    }

    pub fn index(&self, k: i64) -> Option<usize> {
        self.contains(k).then(|| (k - self.kmin) as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.kmin..=self.kmax
    }

    /// Shrinks both ends by `by`.
    pub fn shrink(&self, by: i64) -> Result<Self> {
        Self::new(self.kmin + by, self.kmax - by)
    }

    /// Window with twice the dimension around the same centre.
    pub fn doubled(&self) -> Self {
        let extra = self.dim() as i64;
        let lo = extra / 2;
        Self {
            kmin: self.kmin - lo,
            kmax: self.kmax + (extra - lo),
        }
    }

    fn check_shift(&self, shift: i64) -> Result<()> {
        if shift.unsigned_abs() as usize >= self.dim() {
            return Err(Error::WindowTooSmall {
                shift,
                dim: self.dim(),
            });
        }
        Ok(())
    }
}

/// Fourier components ψ_k of a vector in a window.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub window: BasisWindow,
    pub components: Vec<Complex64>,
}

impl StateVector {
    pub fn new(window: BasisWindow, components: Vec<Complex64>) -> Result<Self> {
        if components.len() != window.dim() {
            return Err(Error::Parameter(format!(
                "{} components for a window of dimension {}",
                components.len(),
                window.dim()
            )));
        }
        Ok(Self { window, components })
    }

    pub fn basis(window: BasisWindow, k: i64) -> Result<Self> {
        let i = window
            .index(k)
            .ok_or_else(|| Error::Parameter(format!("basis index {k} outside window")))?;
        let mut components = vec![ZERO; window.dim()];
        components[i] = ONE;
        Ok(Self { window, components })
    }

    pub fn norm(&self) -> f64 {
        norm(&self.components)
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Finite Fourier polynomial Σ a_n b_n with b_n b_m = b_{n+m}, b_n* = b_{−n}.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlgebraElement {
    coeffs: BTreeMap<i64, Complex64>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::b(0)
    }

    /// Generator b_n.
    pub fn b(n: i64) -> Self {
        Self::monomial(n, ONE)
    }

    pub fn monomial(n: i64, c: Complex64) -> Self {
        let mut e = Self::zero();
        e.add_term(n, c);
        e
    }

    pub fn from_coeffs<I: IntoIterator<Item = (i64, Complex64)>>(it: I) -> Self {
        let mut e = Self::zero();
        for (n, c) in it {
            e.add_term(n, c);
        }
        e
    }

    /// Real trigonometric polynomial a_0 + Σ p_n cos nx + q_n sin nx.
    pub fn from_real_trig(a0: f64, p: &[f64], q: &[f64]) -> Self {
        let mut e = Self::monomial(0, Complex64::new(a0, 0.0));
        for (i, (&pn, &qn)) in p.iter().zip(q).enumerate() {
            let n = i as i64 + 1;
            e.add_term(n, Complex64::new(pn / 2.0, -qn / 2.0));
            e.add_term(-n, Complex64::new(pn / 2.0, qn / 2.0));
        }
        e
    }

    pub fn add_term(&mut self, n: i64, c: Complex64) {
        let entry = self.coeffs.entry(n).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.coeffs.remove(&n);
        }
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest |n| in the support, 0 for the zero element.
    pub fn max_shift(&self) -> i64 {
        self.coeffs.keys().map(|n| n.abs()).max().unwrap_or(0)
    }

    /// a_n ↦ conj(a_{−n}).
    pub fn star(&self) -> Self {
        Self::from_coeffs(self.terms().map(|(n, c)| (-n, c.conj())))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_coeffs(self.terms().map(|(n, c)| (n, c * s)))
    }

    /// Value of Σ a_n e^{inx}.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms()
            .map(|(n, c)| c * Complex64::from_polar(1.0, n as f64 * x))
            .sum()
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (n, c) in rhs.terms() {
            out.add_term(n, c);
        }
        out
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        self + &(-rhs)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(-ONE)
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (n, c) in self.terms() {
            for (m, d) in rhs.terms() {
                out.add_term(n + m, c * d);
            }
        }
        out
    }
}

/// Polynomial Σ p_nm a^n ā^m in the generator a and its adjoint.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section2Element {
    coeffs: BTreeMap<(u32, u32), Complex64>,
}

impl Section2Element {
    pub fn one() -> Self {
        Self::monomial(0, 0, ONE)
    }

    pub fn monomial(n: u32, m: u32, c: Complex64) -> Self {
        let mut e = Self::default();
        e.add_term(n, m, c);
        e
    }

    pub fn from_coeffs<I: IntoIterator<Item = ((u32, u32), Complex64)>>(it: I) -> Self {
        let mut e = Self::default();
        for ((n, m), c) in it {
            e.add_term(n, m, c);
        }
        e
    }

    pub fn add_term(&mut self, n: u32, m: u32, c: Complex64) {
        let entry = self.coeffs.entry((n, m)).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.coeffs.remove(&(n, m));
        }
    }

    pub fn coeff(&self, n: u32, m: u32) -> Complex64 {
        self.coeffs.get(&(n, m)).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Which Dirac operator the triple uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiracSpec {
    /// D = −i∂ with eigenvalues k + 1/2.
    Canonical,
    /// D = Σ f_α(k)|k><k|.
    Deformed { alpha: f64 },
    /// D = −i∂ paired with the polynomial algebra in |k+1/2|^{−ε}.
    ComplexExample { eps: Complex64 },
}

impl DiracSpec {
    pub fn deformed(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(DiracSpec::Deformed { alpha })
    }

    pub fn complex_example(eps: Complex64) -> Result<Self> {
        check_eps(eps)?;
        Ok(DiracSpec::ComplexExample { eps })
    }

    /// Exponent ε of the eigenvalue function; 1 for the −i∂ variants.
    pub fn epsilon(&self) -> f64 {
        match self {
            DiracSpec::Deformed { alpha } => 1.0 - alpha,
            _ => 1.0,
        }
    }

    pub fn eigenvalue(&self, k: i64) -> f64 {
        eigen(k, self.epsilon())
    }

    /// f(l+n) − f(l).
    pub fn gap(&self, l: i64, n: i64) -> f64 {
        eigen_gap(l, n, self.epsilon())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DiracSpec::Canonical => Ok(()),
            DiracSpec::Deformed { alpha } => check_alpha(*alpha),
            DiracSpec::ComplexExample { eps } => check_eps(*eps),
        }
    }
}

pub(crate) fn check_eps(eps: Complex64) -> Result<()> {
    if !(eps.re > 0.0) || !eps.im.is_finite() {
        return Err(Error::Domain(format!(
            "Re eps must be positive for bounded representatives, got {eps}"
        )));
    }
    if eps.norm() >= 1.0 {
        warn!("|eps| = {} is outside the unit disc; proceeding anyway", eps.norm());
    }
    Ok(())
}

/// Square operator on a window, stored by bands.
///
/// Band r holds the entries (l + r, l) for every column l with both l and
/// l + r in the window, ordered by l.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    window: BasisWindow,
    bands: BTreeMap<i64, Vec<Complex64>>,
}

impl TruncatedOperator {
    pub fn zeros(window: BasisWindow) -> Self {
        Self {
            window,
            bands: BTreeMap::new(),
        }
    }

    pub fn identity(window: BasisWindow) -> Self {
        Self::diagonal(window, |_| ONE)
    }

    pub fn diagonal(window: BasisWindow, f: impl Fn(i64) -> Complex64) -> Self {
        let mut op = Self::zeros(window);
        op.set_band(0, f);
        op
    }

    pub fn window(&self) -> BasisWindow {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    /// Columns l carrying band r.
    fn band_columns(&self, r: i64) -> std::ops::RangeInclusive<i64> {
        let lo = self.window.kmin.max(self.window.kmin - r);
        let hi = self.window.kmax.min(self.window.kmax - r);
        lo..=hi
    }

    /// Overwrites band r with entries f(l) at (l + r, l).
    pub fn set_band(&mut self, r: i64, f: impl Fn(i64) -> Complex64) {
        if r.unsigned_abs() as usize >= self.dim() {
            return;
        }
        let v: Vec<Complex64> = self.band_columns(r).map(f).collect();
        self.bands.insert(r, v);
    }

    pub fn bands(&self) -> impl Iterator<Item = (i64, &[Complex64])> + '_ {
        self.bands.iter().map(|(&r, v)| (r, v.as_slice()))
    }

    /// Entry (row, col) by basis labels.
    pub fn entry(&self, row: i64, col: i64) -> Complex64 {
        if !self.window.contains(row) || !self.window.contains(col) {
            return ZERO;
        }
        let r = row - col;
        match self.bands.get(&r) {
            Some(v) => v[(col - *self.band_columns(r).start()) as usize],
            None => ZERO,
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::from_element(n, n, ZERO);
        for (&r, v) in &self.bands {
            let start = *self.band_columns(r).start();
            for (j, z) in v.iter().enumerate() {
                let col = start + j as i64;
                let (i, c) = (
                    (col + r - self.window.kmin) as usize,
                    (col - self.window.kmin) as usize,
                );
                m[(i, c)] = *z;
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.window);
        for (&r, v) in &self.bands {
            // (l + r, l) ↦ (l, l + r): band −r at column l + r
            out.bands.insert(-r, v.iter().map(|z| z.conj()).collect());
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for v in out.bands.values_mut() {
            for z in v.iter_mut() {
                *z *= s;
            }
        }
        out
    }

    /// Entrywise map over stored entries, f(row, col, value).
    pub fn map_entries(&self, f: impl Fn(i64, i64, Complex64) -> Complex64) -> Self {
        let mut out = self.clone();
        for (&r, v) in out.bands.iter_mut() {
            let start = self.window.kmin.max(self.window.kmin - r);
            for (j, z) in v.iter_mut().enumerate() {
                let col = start + j as i64;
                *z = f(col + r, col, *z);
            }
        }
        out
    }

    fn same_window(&self, other: &Self) -> Result<()> {
        if self.window != other.window {
            return Err(Error::Parameter("operators live on different windows".into()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_window(other)?;
        let mut out = self.clone();
        for (&r, v) in &other.bands {
            match out.bands.get_mut(&r) {
                Some(w) => w.iter_mut().zip(v).for_each(|(a, b)| *a += *b),
                None => {
                    out.bands.insert(r, v.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(-ONE))
    }

    /// Product of the truncated matrices.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_window(other)?;
        let w = self.window;
        let mut out = Self::zeros(w);
        for (&p, a) in &self.bands {
            let a_start = *self.band_columns(p).start();
            for (&q, b) in &other.bands {
                let r = p + q;
                if r.unsigned_abs() as usize >= w.dim() {
                    continue;
                }
                let b_start = *other.band_columns(q).start();
                let cols = out.band_columns(r);
                let out_start = *cols.start();
                let entry = out
                    .bands
                    .entry(r)
                    .or_insert_with(|| vec![ZERO; cols.clone().count()]);
                for l in cols {
                    // (l+r, l) = A(l+r, l+q) B(l+q, l)
                    let mid = l + q;
                    if !w.contains(mid) {
                        continue;
                    }
                    let bv = b[(l - b_start) as usize];
                    let av = a[(mid - a_start) as usize];
                    entry[(l - out_start) as usize] += av * bv;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.dim()];
        self.matvec_into(x, &mut y);
        y
    }

    pub(crate) fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|z| *z = ZERO);
        let kmin = self.window.kmin;
        for (&r, v) in &self.bands {
            let c0 = (self.band_columns(r).start() - kmin) as usize;
            let r0 = (c0 as i64 + r) as usize;
            for (j, a) in v.iter().enumerate() {
                y[r0 + j] += *a * x[c0 + j];
            }
        }
    }

    pub(crate) fn adjoint_matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|z| *z = ZERO);
        let kmin = self.window.kmin;
        for (&r, v) in &self.bands {
            let c0 = (self.band_columns(r).start() - kmin) as usize;
            let r0 = (c0 as i64 + r) as usize;
            for (j, a) in v.iter().enumerate() {
                y[c0 + j] += a.conj() * x[r0 + j];
            }
        }
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.window != self.window {
            return Err(Error::Parameter("state and operator windows differ".into()));
        }
        StateVector::new(self.window, self.matvec(&psi.components))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.bands
            .values()
            .flat_map(|v| v.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise difference, treating missing bands as zero.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.max_abs_entry())
    }

    /// Restriction to a sub-window.
    pub fn restrict(&self, sub: BasisWindow) -> Result<Self> {
        if !self.window.contains(sub.kmin) || !self.window.contains(sub.kmax) {
            return Err(Error::Parameter("sub-window not contained in window".into()));
        }
        let mut out = Self::zeros(sub);
        for &r in self.bands.keys() {
            if r.unsigned_abs() as usize >= sub.dim() {
                continue;
            }
            out.set_band(r, |l| self.entry(l + r, l));
        }
        Ok(out)
    }

    /// Norm of a single-band operator: the largest |entry|. None when more
    /// than one band is stored.
    pub fn weighted_shift_norm(&self) -> Option<f64> {
        (self.bands.len() <= 1).then(|| self.max_abs_entry())
    }
}

/// π(a) with entries (k + n, k) = a_n.
pub fn represent(a: &AlgebraElement, w: BasisWindow) -> Result<TruncatedOperator> {
    w.check_shift(a.max_shift())?;
    let mut op = TruncatedOperator::zeros(w);
    for (n, c) in a.terms() {
        op.set_band(n, |_| c);
    }
    Ok(op)
}

/// Diagonal Σ p_nm |k+1/2|^{−nε−mε̄}.
pub fn represent_section2(
    p: &Section2Element,
    eps: Complex64,
    w: BasisWindow,
) -> Result<TruncatedOperator> {
    check_eps(eps)?;
    Ok(TruncatedOperator::diagonal(w, |k| {
        let ln = (k as f64 + 0.5).abs().ln();
        p.terms()
            .map(|((n, m), c)| {
                let e = eps * n as f64 + eps.conj() * m as f64;
                c * (-e * ln).exp()
            })
            .sum()
    }))
}

pub fn dirac_matrix(d: &DiracSpec, w: BasisWindow) -> TruncatedOperator {
    TruncatedOperator::diagonal(w, |k| Complex64::new(d.eigenvalue(k), 0.0))
}

/// [D, T] for diagonal D: entry (l + r, l) picks up f(l + r) − f(l).
pub fn commutator(d: &DiracSpec, t: &TruncatedOperator) -> TruncatedOperator {
    let mut out = t.map_entries(|row, col, z| z * d.gap(col, row - col));
    out.bands.remove(&0);
    out
}

/// π(da) = [D, π(a)] from the band formula a_n (f(l + n) − f(l)).
pub fn commutator_band(
    d: &DiracSpec,
    a: &AlgebraElement,
    w: BasisWindow,
) -> Result<TruncatedOperator> {
    w.check_shift(a.max_shift())?;
    let mut op = TruncatedOperator::zeros(w);
    for (n, c) in a.terms() {
        if n != 0 {
            op.set_band(n, |l| c * d.gap(l, n));
        }
    }
    Ok(op)
}

const NORM_SEED: u64 = 0x5eed_0f_d1ac;

/// Largest singular value by power iteration on T†T.
///
/// Starts from the all-equal vector and re-randomizes once (fixed ChaCha
/// seed) if the iterate collapses onto a vector orthogonal to the top space.
pub fn operator_norm(t: &TruncatedOperator, tol: f64, max_iter: usize) -> Result<f64> {
    top_singular_pair(t, tol, max_iter, None).map(|p| p.sigma)
}

/// σ_max with unit vectors u, v such that T v = σ u.
#[derive(Debug, Clone)]
pub struct SingularPair {
    pub sigma: f64,
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

/// Power iteration on T†T, optionally warm-started.
pub fn top_singular_pair(
    t: &TruncatedOperator,
    tol: f64,
    max_iter: usize,
    start: Option<&[Complex64]>,
) -> Result<SingularPair> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }
    let n = t.dim();
    let mut v = match start {
        Some(s) if s.len() == n && norm(s) > 0.0 => {
            let sn = norm(s);
            s.iter().map(|z| *z / sn).collect()
        }
        _ => vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n],
    };
    if t.bands.is_empty() {
        return Ok(SingularPair {
            sigma: 0.0,
            u: v.clone(),
            v,
        });
    }
    let mut tv = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    let mut reseeded = false;
    let mut sigma = 0.0f64;
    let mut gap = f64::INFINITY;
    for _ in 0..max_iter {
        t.matvec_into(&v, &mut tv);
        let s = norm(&tv);
        if s < 1e-300 {
            if reseeded {
                return Ok(SingularPair { sigma: 0.0, u: v.clone(), v });
            }
            reseeded = true;
            v = random_unit(n);
            continue;
        }
        t.adjoint_matvec_into(&tv, &mut w);
        let wn = norm(&w);
        // residual of the eigenpair (s², v) of T†T bounds the error in s
        let s2 = s * s;
        let res: f64 = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (*a - *b * s2).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let prev = sigma;
        sigma = s;
        gap = res / s;
        if (gap <= tol && (sigma - prev).abs() <= tol) || wn == 0.0 {
            let u = tv.iter().map(|z| *z / s).collect();
            return Ok(SingularPair { sigma, u, v });
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = *wi / wn;
        }
        if !reseeded && (sigma - prev).abs() <= 1e-15 * sigma && gap > tol {
            // stagnated away from an eigenvector
            reseeded = true;
            v = random_unit(n);
        }
    }
    Err(Error::NoConvergence(format!(
        "operator norm: last iterate {sigma}, residual gap {gap} after {max_iter} iterations"
    )))
}

fn random_unit(n: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(NORM_SEED);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let s = norm(&v);
    v.iter_mut().for_each(|z| *z /= s);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn window_rules() {
        assert!(BasisWindow::new(3, 3).is_err());
        let w = BasisWindow::new(-2, 2).unwrap();
        assert_eq!(w.dim(), 5);
        assert_eq!(w.doubled().dim(), 10);
    }

    #[test]
    fn unit_is_identity_and_b1_is_subdiagonal() {
        let w = BasisWindow::new(-2, 2).unwrap();
        let id = represent(&AlgebraElement::one(), w).unwrap().to_dense();
        assert_eq!(id, DMatrix::identity(5, 5));
        let s = represent(&AlgebraElement::b(1), w).unwrap().to_dense();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(s[(i, j)], if i == j + 1 { ONE } else { ZERO });
            }
        }
        assert!(represent(&AlgebraElement::b(5), w).is_err());
    }

    #[test]
    fn hermitian_combination_is_self_adjoint() {
        let w = BasisWindow::symmetric(8).unwrap();
        let a = &AlgebraElement::b(1) + &AlgebraElement::b(-1);
        let m = represent(&a, w).unwrap();
        assert_eq!(m.adjoint(), represent(&a.star(), w).unwrap());
        assert_eq!(m.to_dense(), m.to_dense().adjoint());
    }

    #[test]
    fn section2_representatives() {
        let w = BasisWindow::symmetric(20).unwrap();
        let id = represent_section2(&Section2Element::one(), c(0.7), w).unwrap();
        assert!(id.max_abs_diff(&TruncatedOperator::identity(w)).unwrap() < 1e-15);
        let a = Section2Element::monomial(1, 0, ONE);
        let op = represent_section2(&a, c(0.7), w).unwrap();
        for k in w.iter() {
            let e = op.entry(k, k);
            assert!(e.im == 0.0 && e.re > 0.0 && e.re <= 2f64.powf(0.7) + 1e-15);
            assert!((e.re - (k as f64 + 0.5).abs().powf(-0.7)).abs() < 1e-15);
        }
        let eps = Complex64::new(0.5, 0.3);
        let aa = Section2Element::monomial(1, 1, ONE);
        let op = represent_section2(&aa, eps, w).unwrap();
        for k in w.iter() {
            let want = (k as f64 + 0.5).abs().powf(-1.0);
            assert!((op.entry(k, k) - c(want)).norm() < 1e-14);
        }
        assert!(represent_section2(&a, Complex64::new(-0.1, 0.2), w).is_err());
    }

    #[test]
    fn dirac_examples() {
        let w = BasisWindow::new(-2, 2).unwrap();
        let d = dirac_matrix(&DiracSpec::Canonical, w);
        let want = [-1.5, -0.5, 0.5, 1.5, 2.5];
        for (k, v) in w.iter().zip(want) {
            assert_eq!(d.entry(k, k), c(v));
        }
        let w = BasisWindow::new(0, 3).unwrap();
        let d = dirac_matrix(&DiracSpec::deformed(0.1).unwrap(), w);
        for k in 0..4 {
            assert_eq!(d.entry(k, k).re, (k as f64 + 0.5).powf(0.9));
        }
        let w = BasisWindow::symmetric(50).unwrap();
        let d0 = dirac_matrix(&DiracSpec::deformed(0.0).unwrap(), w);
        assert_eq!(d0, dirac_matrix(&DiracSpec::Canonical, w));
    }

    #[test]
    fn commutator_examples() {
        let w = BasisWindow::symmetric(512).unwrap();
        let d = DiracSpec::deformed(0.1).unwrap();
        let cb = commutator_band(&d, &AlgebraElement::b(1), w).unwrap();
        let want = 0.5f64.powf(0.9) * (1.0 - (0.9 * PI).cos());
        assert!((cb.entry(0, -1).re - want).abs() < 1e-15);
        let ws = BasisWindow::symmetric(10).unwrap();
        let can = commutator_band(&DiracSpec::Canonical, &AlgebraElement::b(3), ws).unwrap();
        let shift = represent(&AlgebraElement::b(3), ws).unwrap().scale(c(3.0));
        assert_eq!(can, shift);
        let ce = DiracSpec::complex_example(Complex64::new(0.5, 0.3)).unwrap();
        let p = Section2Element::from_coeffs([((1, 0), ONE), ((2, 1), c(-0.5))]);
        let pi = represent_section2(&p, Complex64::new(0.5, 0.3), ws).unwrap();
        assert_eq!(commutator(&ce, &pi).max_abs_entry(), 0.0);
        for d in [DiracSpec::Canonical, d, ce] {
            let z = commutator_band(&d, &AlgebraElement::one(), ws).unwrap();
            assert_eq!(z.max_abs_entry(), 0.0);
        }
    }

    #[test]
    fn band_commutator_agrees_with_products_away_from_edges() {
        let w = BasisWindow::symmetric(30).unwrap();
        let d = DiracSpec::deformed(0.2).unwrap();
        let a = AlgebraElement::from_coeffs([(2, c(1.0)), (-3, Complex64::new(0.3, 0.4))]);
        let pa = represent(&a, w).unwrap();
        let dm = dirac_matrix(&d, w);
        let prod = dm.try_mul(&pa).unwrap().try_sub(&pa.try_mul(&dm).unwrap()).unwrap();
        let band = commutator_band(&d, &a, w).unwrap();
        assert!(prod.max_abs_diff(&band).unwrap() < 1e-12);
        assert_eq!(commutator(&d, &pa), band);
    }

    #[test]
    fn operator_norm_examples() {
        let w = BasisWindow::symmetric(40).unwrap();
        let id = TruncatedOperator::identity(w);
        assert!((operator_norm(&id, 1e-12, 100).unwrap() - 1.0).abs() < 1e-12);
        let cb = commutator_band(&DiracSpec::Canonical, &AlgebraElement::b(3), w).unwrap();
        assert!((operator_norm(&cb, 1e-12, 100).unwrap() - 3.0).abs() < 1e-12);
        assert!(operator_norm(&id, 0.0, 10).is_err());
        assert_eq!(operator_norm(&TruncatedOperator::zeros(w), 1e-9, 10).unwrap(), 0.0);
    }

    #[test]
    fn deformed_db1_norm_on_large_window() {
        let w = BasisWindow::symmetric(10_000).unwrap();
        let d = DiracSpec::deformed(0.1).unwrap();
        let cb = commutator_band(&d, &AlgebraElement::b(1), w).unwrap();
        let oracle = w
            .iter()
            .filter(|l| w.contains(l + 1))
            .map(|l| d.gap(l, 1).abs())
            .fold(0.0, f64::max);
        let want = 0.5f64.powf(0.9) * (1.0 - (0.9 * PI).cos());
        assert!((oracle - want).abs() < 1e-15);
        let got = operator_norm(&cb, 1e-10, 100_000).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} {want}");
        assert_eq!(cb.weighted_shift_norm(), Some(oracle));
    }

    #[test]
    fn dense_product_matches_banded_product() {
        let w = BasisWindow::new(-4, 5).unwrap();
        let a = AlgebraElement::from_coeffs([(1, c(2.0)), (-2, Complex64::new(0.0, 1.0))]);
        let b = AlgebraElement::from_coeffs([(0, c(1.0)), (3, c(-1.0)), (-1, c(0.5))]);
        let pa = represent(&a, w).unwrap();
        let pb = represent(&b, w).unwrap();
        let dense = pa.to_dense() * pb.to_dense();
        assert_eq!(pa.try_mul(&pb).unwrap().to_dense(), dense);
        let v: Vec<Complex64> = (0..10).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let mv = pa.matvec(&v);
        let dv = pa.to_dense() * nalgebra::DVector::from_vec(v);
        for i in 0..10 {
            assert!((mv[i] - dv[i]).norm() < 1e-14);
        }
    }
}
