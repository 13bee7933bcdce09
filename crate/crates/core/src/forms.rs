//! Universal 1- and 2-forms over the Fourier algebra, their representatives,
//! and numerical junk certificates built on the moment matrix
//! w^{(l)}(n) = f(l+n) − f(l).

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{operator_norm, BasisWindow, DiracSpec, TruncatedOperator};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative SVD threshold below which a singular value counts as null.
pub const NULL_THRESHOLD: f64 = 1e-10;

fn bump(map: &mut BTreeMap<(i64, i64), Complex64>, key: (i64, i64), c: Complex64) {
    let e = map.entry(key).or_insert(ZERO);
    *e += c;
    if *e == ZERO {
        map.remove(&key);
    }
}

/// Σ α_{mn} b_m db_n + Σ β_{nm} db_n b_m.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UniversalOneForm {
    left: BTreeMap<(i64, i64), Complex64>,
    right: BTreeMap<(i64, i64), Complex64>,
}

impl UniversalOneForm {
    pub fn zero() -> Self {
        Self::default()
    }

    /// c · b_m db_n.
    pub fn left_term(m: i64, n: i64, c: Complex64) -> Self {
        let mut f = Self::zero();
        f.add_left(m, n, c);
        f
    }

    /// c · db_n b_m.
    pub fn right_term(n: i64, m: i64, c: Complex64) -> Self {
        let mut f = Self::zero();
        f.add_right(n, m, c);
        f
    }

    pub fn add_left(&mut self, m: i64, n: i64, c: Complex64) {
        bump(&mut self.left, (m, n), c);
    }

    pub fn add_right(&mut self, n: i64, m: i64, c: Complex64) {
        bump(&mut self.right, (n, m), c);
    }

    /// ω_m = b_m db_m − db_m b_m.
    pub fn omega(m: i64) -> Self {
        let mut f = Self::left_term(m, m, Complex64::new(1.0, 0.0));
        f.add_right(m, m, Complex64::new(-1.0, 0.0));
        f
    }

    /// Degree-r form with α_{r−n,n} = v_n.
    pub fn from_degree_vector(r: i64, coeffs: &[(i64, f64)]) -> Self {
        let mut f = Self::zero();
        for &(n, v) in coeffs {
            f.add_left(r - n, n, Complex64::new(v, 0.0));
        }
        f
    }

    pub fn left_terms(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        self.left.iter().map(|(&k, &c)| (k, c))
    }

    pub fn right_terms(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        self.right.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.left.is_empty() && self.right.is_empty()
    }

    fn max_shift(&self) -> i64 {
        self.left
            .keys()
            .chain(self.right.keys())
            .map(|&(a, b)| a.abs().max(b.abs()).max((a + b).abs()))
            .max()
            .unwrap_or(0)
    }

    /// Rewrites db_n b_m = b_0 db_{n+m} − b_n db_m so only left terms remain.
    pub fn left_normal_form(&self) -> Self {
        let mut f = Self {
            left: self.left.clone(),
            right: BTreeMap::new(),
        };
        for ((n, m), c) in self.right_terms() {
            f.add_left(0, n + m, c);
            f.add_left(n, m, -c);
        }
        f
    }
}

/// Σ β_{mn} db_m db_n.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UniversalTwoForm {
    coeffs: BTreeMap<(i64, i64), Complex64>,
}

impl UniversalTwoForm {
    pub fn zero() -> Self {
        Self::default()
    }

    /// c · db_m db_n.
    pub fn term(m: i64, n: i64, c: Complex64) -> Self {
        let mut f = Self::zero();
        f.add(m, n, c);
        f
    }

    pub fn add(&mut self, m: i64, n: i64, c: Complex64) {
        bump(&mut self.coeffs, (m, n), c);
    }

    pub fn coeff(&self, m: i64, n: i64) -> Complex64 {
        self.coeffs.get(&(m, n)).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn max_shift(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|&(a, b)| a.abs().max(b.abs()).max((a + b).abs()))
            .max()
            .unwrap_or(0)
    }
}

fn check_fits(shift: i64, w: BasisWindow) -> Result<()> {
    if shift.unsigned_abs() as usize >= w.dim() {
        return Err(Error::WindowTooSmall { shift, dim: w.dim() });
    }
    Ok(())
}

/// π(ω): b_m db_n sends |l> to (f(l+n) − f(l))|l+m+n>, and db_n b_m sends it
/// to (f(l+m+n) − f(l+m))|l+m+n>.
pub fn pi_one_form(omega: &UniversalOneForm, d: &DiracSpec, w: BasisWindow) -> Result<TruncatedOperator> {
    check_fits(omega.max_shift(), w)?;
    let mut by_band: BTreeMap<i64, Vec<(bool, i64, Complex64)>> = BTreeMap::new();
    for ((m, n), c) in omega.left_terms() {
        by_band.entry(m + n).or_default().push((true, n, c));
    }
    for ((n, m), c) in omega.right_terms() {
        by_band.entry(m + n).or_default().push((false, n, c));
    }
    let mut op = TruncatedOperator::zeros(w);
    for (r, terms) in by_band {
        op.set_band(r, |l| {
            terms
                .iter()
                .map(|&(left, n, c)| {
                    if left {
                        c * d.gap(l, n)
                    } else {
                        c * d.gap(l + r - n, n)
                    }
                })
                .sum()
        });
    }
    Ok(op)
}

/// d under the adopted operational rule: d(b_m db_n) = db_m db_n, and the
/// right-multiplied terms db_n b_m contribute nothing.
pub fn differential(omega: &UniversalOneForm) -> UniversalTwoForm {
    let mut out = UniversalTwoForm::zero();
    for ((m, n), c) in omega.left_terms() {
        out.add(m, n, c);
    }
    out
}

/// d with the graded Leibniz rule, d(db_n b_m) = −db_n db_m.
pub fn differential_graded(omega: &UniversalOneForm) -> UniversalTwoForm {
    let mut out = differential(omega);
    for ((n, m), c) in omega.right_terms() {
        out.add(n, m, -c);
    }
    out
}

/// π(db_m db_n) has entries w^{(l+n)}(m) w^{(l)}(n) on band m + n.
pub fn pi_two_form(eta: &UniversalTwoForm, d: &DiracSpec, w: BasisWindow) -> Result<TruncatedOperator> {
    check_fits(eta.max_shift(), w)?;
    let mut by_band: BTreeMap<i64, Vec<(i64, i64, Complex64)>> = BTreeMap::new();
    for ((m, n), c) in eta.terms() {
        by_band.entry(m + n).or_default().push((m, n, c));
    }
    let mut op = TruncatedOperator::zeros(w);
    for (r, terms) in by_band {
        op.set_band(r, |l| {
            terms
                .iter()
                .map(|&(m, n, c)| c * d.gap(l + n, m) * d.gap(l, n))
                .sum()
        });
    }
    Ok(op)
}

/// Canonical triple only: a 1-form ω with π(ω) = 0 and π(dω) = π(η).
///
/// For each term c db_m db_n, with r = m + n, take v = t(δ_{1} + δ_{−1}) so
/// that Σ v_k k = 0 and π(dω_v) = −2t · shift_r; t = −c·mn/2.
pub fn canonical_junk_preimage(eta: &UniversalTwoForm) -> UniversalOneForm {
    let mut out = UniversalOneForm::zero();
    for ((m, n), c) in eta.terms() {
        let r = m + n;
        let t = -c * (m * n) as f64 / 2.0;
        out.add_left(r - 1, 1, t);
        out.add_left(r + 1, -1, t);
    }
    out
}

/// Rows l ∈ lrange, columns n ∈ nrange, entries f(l+n) − f(l).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    pub lrange: RangeInclusive<i64>,
    pub nrange: RangeInclusive<i64>,
    pub entries: DMatrix<f64>,
}

impl MomentMatrix {
    pub fn column_of(&self, n: i64) -> Option<usize> {
        self.nrange.contains(&n).then(|| (n - self.nrange.start()) as usize)
    }

    pub fn ns(&self) -> impl Iterator<Item = i64> {
        self.nrange.clone()
    }
}

pub fn moment_matrix(
    d: &DiracSpec,
    lrange: RangeInclusive<i64>,
    nrange: RangeInclusive<i64>,
) -> Result<MomentMatrix> {
    if lrange.is_empty() || nrange.is_empty() {
        return Err(Error::Parameter("moment matrix ranges must be nonempty".into()));
    }
    let rows = (lrange.end() - lrange.start() + 1) as usize;
    let cols = (nrange.end() - nrange.start() + 1) as usize;
    let (l0, n0) = (*lrange.start(), *nrange.start());
    let entries = DMatrix::from_fn(rows, cols, |i, j| d.gap(l0 + i as i64, n0 + j as i64));
    Ok(MomentMatrix {
        lrange,
        nrange,
        entries,
    })
}

/// Singular values (descending) and right-singular vectors as columns.
fn svd_right(w: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (r, c) = w.shape();
    // pad so the decomposition returns a full set of right vectors
    let padded = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(w);
        p
    } else {
        w.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = DMatrix::from_fn(c, order.len(), |i, j| vt[(order[j], i)]);
    (sv, v)
}

/// Singular values of W in descending order.
pub fn singular_values(w: &MomentMatrix) -> Vec<f64> {
    svd_right(&w.entries).0
}

/// Orthonormal right-singular vectors with σ ≤ tol · σ_max.
pub fn junk_null_space(w: &MomentMatrix, tol: f64) -> Result<Vec<DVector<f64>>> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }
    let (sv, v) = svd_right(&w.entries);
    let smax = sv.first().copied().unwrap_or(0.0);
    Ok(sv
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol * smax)
        .map(|(j, _)| v.column(j).into_owned())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    JunkPresent,
    JunkAbsentAtTolerance,
}

/// One null vector tested at one total degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub r: i64,
    pub trivial: bool,
    pub coeff_norm: f64,
    pub pi_omega: f64,
    pub pi_domega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    pub r: i64,
    /// Nontrivial null directions after projecting out δ_{n,0}.
    pub null_dimension: usize,
    pub max_pi_domega: f64,
    pub residuals: Vec<Residual>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JunkCertificate {
    pub dirac: DiracSpec,
    pub lrange: RangeInclusive<i64>,
    pub nrange: RangeInclusive<i64>,
    pub window: BasisWindow,
    pub tol: f64,
    /// Descending singular values of the moment matrix.
    pub singular_values: Vec<f64>,
    /// σ_max · NULL_THRESHOLD.
    pub null_threshold: f64,
    /// Null dimension including the trivial direction.
    pub null_dimension: usize,
    /// Smallest singular value once the zero column n = 0 is dropped.
    pub second_smallest: f64,
    pub doubled_null_dimension: usize,
    pub degrees: Vec<DegreeReport>,
    /// max ‖π(dω)‖ over null vectors divided by the SVD threshold ratio.
    pub residual_constant: f64,
    pub verdict: Verdict,
}

fn project_out_trivial(null: &[DVector<f64>], zero_col: Option<usize>) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for v in null {
        let mut u = v.clone();
        if let Some(j) = zero_col {
            u[j] = 0.0;
        }
        for b in &basis {
            let p = b.dot(&u);
            u -= b * p;
        }
        let n = u.norm();
        if n > 1e-8 {
            basis.push(u / n);
        }
    }
    basis
}

const NORM_TOL: f64 = 1e-11;
const NORM_ITERS: usize = 20_000;

/// Certifies presence or absence of junk 1-forms ω with π(ω) = 0, π(dω) ≠ 0.
pub fn junk_certificate(
    d: &DiracSpec,
    nrange: RangeInclusive<i64>,
    lrange: RangeInclusive<i64>,
    window: BasisWindow,
    tol: f64,
) -> Result<JunkCertificate> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }
    let nabs = nrange.start().abs().max(nrange.end().abs());
    let lhalf = (lrange.end() - lrange.start()) / 2;
    if lhalf < 8 * nabs {
        return Err(Error::Inconclusive(format!(
            "lrange half-width {lhalf} is below 8 x {nabs}"
        )));
    }
    let doubled = |r: &RangeInclusive<i64>| (2 * r.start())..=(2 * r.end());
    let w = moment_matrix(d, lrange.clone(), nrange.clone())?;
    let null = junk_null_space(&w, NULL_THRESHOLD)?;
    let sv = svd_right(&w.entries).0;
    let w2 = moment_matrix(d, doubled(&lrange), nrange.clone())?;
    let null2 = junk_null_space(&w2, NULL_THRESHOLD)?;
    if null2.len() != null.len() {
        return Err(Error::Inconclusive(format!(
            "null dimension {} changes to {} when lrange doubles",
            null.len(),
            null2.len()
        )));
    }
    let zero_col = w.column_of(0);
    let second_smallest = match zero_col {
        Some(j) if w.entries.ncols() > 1 => {
            let reduced = w.entries.clone().remove_column(j);
            svd_right(&reduced).0.last().copied().unwrap_or(0.0)
        }
        _ => sv.last().copied().unwrap_or(0.0),
    };
    let nontrivial = project_out_trivial(&null, zero_col);
    let coeffs_of = |v: &DVector<f64>| -> Vec<(i64, f64)> { w.ns().zip(v.iter().copied()).collect() };
    let mut trials: Vec<(Vec<(i64, f64)>, bool)> = nontrivial.iter().map(|v| (coeffs_of(v), false)).collect();
    if zero_col.is_some() {
        trials.push((vec![(0, 1.0)], true));
    }
    let mut degrees = Vec::new();
    let mut verdict = Verdict::JunkAbsentAtTolerance;
    let mut max_dom: f64 = 0.0;
    for r in nrange.clone() {
        let mut residuals = Vec::new();
        for (coeffs, trivial) in &trials {
            let omega = UniversalOneForm::from_degree_vector(r, coeffs);
            let cn = coeffs.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
            let po = operator_norm(&pi_one_form(&omega, d, window)?, NORM_TOL, NORM_ITERS)?;
            let pd = operator_norm(&pi_two_form(&differential(&omega), d, window)?, NORM_TOL, NORM_ITERS)?;
            if !trivial && pd > tol && po <= tol * cn {
                verdict = Verdict::JunkPresent;
            }
            max_dom = max_dom.max(pd);
            residuals.push(Residual {
                r,
                trivial: *trivial,
                coeff_norm: cn,
                pi_omega: po,
                pi_domega: pd,
            });
        }
        degrees.push(DegreeReport {
            r,
            null_dimension: nontrivial.len(),
            max_pi_domega: residuals.iter().map(|x| x.pi_domega).fold(0.0, f64::max),
            residuals,
        });
    }
    let smax = sv.first().copied().unwrap_or(0.0);
    Ok(JunkCertificate {
        dirac: *d,
        lrange,
        nrange,
        window,
        tol,
        null_threshold: smax * NULL_THRESHOLD,
        null_dimension: null.len(),
        second_smallest,
        doubled_null_dimension: null2.len(),
        singular_values: sv,
        degrees,
        residual_constant: max_dom / NULL_THRESHOLD,
        verdict,
    })
}

/// Scaled moment sums |l+1/2|^{m−ε} Σ_n v_n w^{(l)}(n) for one order m.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    pub order: u32,
    pub samples: Vec<(i64, f64)>,
}

/// Sequences for m = 1, 2, 3 at l = 16, 32, … ≤ lmax.
pub fn moment_decay_check(d: &DiracSpec, v: &[(i64, f64)], lmax: i64) -> Result<Vec<MomentSequence>> {
    let eps = match d {
        DiracSpec::Deformed { alpha } if *alpha > 0.0 => 1.0 - alpha,
        _ => return Err(Error::Parameter("moment decay needs a deformed triple with alpha > 0".into())),
    };
    let mut ls = Vec::new();
    let mut l = 16i64;
    while l <= lmax {
        ls.push(l);
        l *= 2;
    }
    Ok((1..=3u32)
        .map(|m| MomentSequence {
            order: m,
            samples: ls
                .iter()
                .map(|&l| {
                    let s: f64 = v.iter().map(|&(n, c)| c * d.gap(l, n)).sum();
                    (l, (l as f64 + 0.5).powf(m as f64 - eps) * s)
                })
                .collect(),
        })
        .collect())
}

/// Limit of the order-m sequence when lower moments vanish: C(ε, m) Σ v_n n^m.
pub fn moment_limit(eps: f64, v: &[(i64, f64)], m: u32) -> f64 {
    let mut binom = 1.0;
    for j in 0..m {
        binom *= (eps - j as f64) / (j as f64 + 1.0);
    }
    binom * v.iter().map(|&(n, c)| c * (n as f64).powi(m as i32)).sum::<f64>()
}
