//! Zeta functions Tr[π(b)|D|^{−z}]: closed forms, direct truncated sums,
//! pole lattices and numerical residues.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{check_eps, AlgebraElement, DiracSpec, Section2Element};
use crate::specfun::{check_alpha, expm1_c, riemann_zeta};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const POLE_TOL: f64 = 1e-9;

/// Closed-form zeta functions of the two triples.
#[derive(Debug, Clone, PartialEq)]
pub enum ZetaClosedForm {
    /// 2 Σ p_nm (2^{s}−1) ζ_R(s), s = z + nε + mε̄.
    Section2 { p: Section2Element, eps: Complex64 },
    /// ζ_{b_0} of the deformed triple.
    DeformedB0 { alpha: f64 },
}

impl ZetaClosedForm {
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            ZetaClosedForm::Section2 { p, eps } => zeta_closed_section2(p, *eps, z),
            ZetaClosedForm::DeformedB0 { alpha } => zeta_closed_deformed(0, *alpha, z),
        }
    }

    /// Declared poles with their residues' sources.
    pub fn declared_poles(&self) -> Vec<(Complex64, PoleSource)> {
        match self {
            ZetaClosedForm::Section2 { p, eps } => p
                .terms()
                .map(|((n, m), _)| (lattice_point(*eps, n, m), PoleSource::Lattice { n, m }))
                .collect(),
            ZetaClosedForm::DeformedB0 { alpha } => vec![(
                Complex64::new(1.0 / (1.0 - alpha), 0.0),
                PoleSource::InverseEpsilon,
            )],
        }
    }
}

/// (2^s − 1) ζ_R(s) = Σ_{j≥0} (j + 1/2)^{−s}.
fn half_integer_zeta(s: Complex64) -> Result<Complex64> {
    Ok(expm1_c(s * LN_2) * riemann_zeta(s)?)
}

fn lattice_point(eps: Complex64, n: u32, m: u32) -> Complex64 {
    ONE - eps * n as f64 - eps.conj() * m as f64
}

pub fn zeta_closed_section2(p: &Section2Element, eps: Complex64, z: Complex64) -> Result<Complex64> {
    check_eps(eps)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for ((n, m), c) in p.terms() {
        let s = z + eps * n as f64 + eps.conj() * m as f64;
        if (s - ONE).norm() <= POLE_TOL {
            return Err(Error::Pole(format!("(n, m) = ({n}, {m})")));
        }
        if s.re <= 0.0 {
            return Err(Error::Domain(format!(
                "term ({n}, {m}) needs Re(z + n eps + m conj(eps)) > 0, got {s}"
            )));
        }
        acc += c * half_integer_zeta(s)? * 2.0;
    }
    Ok(acc)
}

/// Prefactor Σ over both halves of the spectrum: 1 + |cos πε|^{−z}.
fn deformed_prefactor(eps: f64, z: Complex64) -> Result<Complex64> {
    let c = (PI * eps).cos().abs();
    if c < 1e-12 {
        return Err(Error::Singular(
            "eps = 1/2 puts a zero eigenvalue on every negative mode".into(),
        ));
    }
    Ok(ONE + (-z * c.ln()).exp())
}

/// ζ_{b_n}(z) = Σ_k <k|π(b_n)|D|^{−z}|k> of the deformed triple.
///
/// Vanishes for n ≠ 0. For n = 0 it is [1 + |cos πε|^{−z}](2^{εz}−1)ζ_R(εz):
/// the negative modes have |f(k)| = |k+1/2|^ε |cos πε|.
pub fn zeta_closed_deformed(n: i64, alpha: f64, z: Complex64) -> Result<Complex64> {
    check_alpha(alpha)?;
    if n != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let eps = 1.0 - alpha;
    let s = z * eps;
    if (s - ONE).norm() <= POLE_TOL {
        return Err(Error::Pole("1/eps".into()));
    }
    if s.re <= 0.0 {
        return Err(Error::Domain(format!("needs Re(eps z) > 0, got {s}")));
    }
    Ok(deformed_prefactor(eps, z)? * half_integer_zeta(s)?)
}

/// Weight b inserted in the trace.
#[derive(Debug, Clone, PartialEq)]
pub enum ZetaWeight {
    Algebra(AlgebraElement),
    Section2(Section2Element),
}

/// Truncated trace plus Euler–Maclaurin tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectSum {
    pub value: Complex64,
    /// Size of the first omitted Euler–Maclaurin term.
    pub tail_bound: f64,
}

/// Σ_{j > k} (j + 1/2)^{−s} through the h'(k)/12 correction, with the
/// magnitude of the h'''(k)/720 term.
fn em_tail(k: f64, s: Complex64) -> (Complex64, f64) {
    let x = k + 0.5;
    let lx = x.ln();
    let h = (-s * lx).exp();
    let integral = (x * h) / (s - ONE);
    let h1 = -s * h / x;
    let h3 = -s * (s + 1.0) * (s + 2.0) * h / (x * x * x);
    (integral - h / 2.0 - h1 / 12.0, h3.norm() / 720.0)
}

#[derive(Default)]
struct Neumaier {
    sum: Complex64,
    comp: Complex64,
}

impl Neumaier {
    fn add(&mut self, x: Complex64) {
        let t = self.sum + x;
        let fix = |s: f64, x: f64, t: f64| {
            if s.abs() >= x.abs() {
                (s - t) + x
            } else {
                (x - t) + s
            }
        };
        self.comp.re += fix(self.sum.re, x.re, t.re);
        self.comp.im += fix(self.sum.im, x.im, t.im);
        self.sum = t;
    }

    fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// Σ_{|k| ≤ kmax} <k|π(b)|D|^{−z}|k> plus tail correction.
pub fn zeta_direct(d: &DiracSpec, weight: &ZetaWeight, z: Complex64, kmax: u64) -> Result<DirectSum> {
    d.validate()?;
    if kmax == 0 {
        return Err(Error::Parameter("kmax must be positive".into()));
    }
    let kmax_i = kmax as i64;
    match weight {
        ZetaWeight::Algebra(a) => {
            let a0 = a.coeff(0);
            if a0 == Complex64::new(0.0, 0.0) {
                // pure shifts have no diagonal
                return Ok(DirectSum {
                    value: a0,
                    tail_bound: 0.0,
                });
            }
            let eps = d.epsilon();
            let s = z * eps;
            if s.re <= 1.0 {
                return Err(Error::Divergent(format!("needs Re(eps z) > 1, got {s}")));
            }
            let mut acc = Neumaier::default();
            for k in (-kmax_i..=kmax_i).rev() {
                let f = d.eigenvalue(k).abs();
                if f == 0.0 {
                    return Err(Error::Singular(format!("zero eigenvalue at k = {k}")));
                }
                acc.add((-z * f.ln()).exp());
            }
            // tails: k > kmax gives j = k; k < −kmax gives j = −k−1 ≥ kmax
            let neg = match d {
                DiracSpec::Deformed { .. } => (-z * (PI * eps).cos().abs().ln()).exp(),
                _ => ONE,
            };
            let (tp, bp) = em_tail(kmax as f64, s);
            let (tn, bn) = em_tail(kmax as f64 - 1.0, s);
            Ok(DirectSum {
                value: (acc.total() + tp + neg * tn) * a0,
                tail_bound: (bp + neg.norm() * bn) * a0.norm(),
            })
        }
        ZetaWeight::Section2(p) => {
            let eps = match d {
                DiracSpec::ComplexExample { eps } => *eps,
                _ => {
                    return Err(Error::Parameter(
                        "polynomial weights need the ComplexExample triple".into(),
                    ))
                }
            };
            let exps: Vec<(Complex64, Complex64)> = p
                .terms()
                .map(|((n, m), c)| (z + eps * n as f64 + eps.conj() * m as f64, c))
                .collect();
            if let Some((s, _)) = exps.iter().find(|(s, _)| s.re <= 1.0) {
                return Err(Error::Divergent(format!("needs Re s > 1, got {s}")));
            }
            let mut acc = Neumaier::default();
            for k in (-kmax_i..=kmax_i).rev() {
                let lx = (k as f64 + 0.5).abs().ln();
                let mut t = Complex64::new(0.0, 0.0);
                for (s, c) in &exps {
                    t += c * (-s * lx).exp();
                }
                acc.add(t);
            }
            let mut value = acc.total();
            let mut bound = 0.0;
            for (s, c) in &exps {
                let (tp, bp) = em_tail(kmax as f64, *s);
                let (tn, bn) = em_tail(kmax as f64 - 1.0, *s);
                value += c * (tp + tn);
                bound += c.norm() * (bp + bn);
            }
            Ok(DirectSum {
                value,
                tail_bound: bound,
            })
        }
    }
}

/// Where a pole comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleSource {
    Lattice { n: u32, m: u32 },
    InverseEpsilon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pole {
    pub location: Complex64,
    pub residue: Option<Complex64>,
    pub sources: Vec<PoleSource>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoleReport {
    pub poles: Vec<Pole>,
}

impl PoleReport {
    fn insert(&mut self, location: Complex64, source: PoleSource) {
        match self
            .poles
            .iter_mut()
            .find(|p| (p.location - location).norm() <= POLE_TOL)
        {
            Some(p) => p.sources.push(source),
            None => self.poles.push(Pole {
                location,
                residue: None,
                sources: vec![source],
            }),
        }
    }

    pub fn locations(&self) -> Vec<Complex64> {
        self.poles.iter().map(|p| p.location).collect()
    }
}

/// Points 1 − nε − mε̄ for n ≤ nmax, m ≤ mmax, merged within 1e-9.
pub fn dimension_lattice(eps: Complex64, nmax: u32, mmax: u32) -> PoleReport {
    let mut report = PoleReport::default();
    for n in 0..=nmax {
        for m in 0..=mmax {
            report.insert(lattice_point(eps, n, m), PoleSource::Lattice { n, m });
        }
    }
    report
}

/// Lattice with residues of ζ_{P}, filled where p has support.
///
/// The residue at a point only involves the terms of p whose shifted argument
/// hits the pole of ζ_R there; the remaining terms are regular and drop out
/// of the limit.
pub fn dimension_lattice_with_residues(
    eps: Complex64,
    nmax: u32,
    mmax: u32,
    p: &Section2Element,
) -> Result<PoleReport> {
    check_eps(eps)?;
    let mut report = dimension_lattice(eps, nmax, mmax);
    for pole in report.poles.iter_mut() {
        let local = Section2Element::from_coeffs(pole.sources.iter().filter_map(|s| match s {
            PoleSource::Lattice { n, m } => {
                let c = p.coeff(*n, *m);
                (c != Complex64::new(0.0, 0.0)).then_some(((*n, *m), c))
            }
            PoleSource::InverseEpsilon => None,
        }));
        if !local.is_zero() {
            let form = ZetaClosedForm::Section2 { p: local, eps };
            pole.residue = Some(residue_at(&form, pole.location)?);
        }
    }
    Ok(report)
}

/// The pole 1/ε of ζ_{b_0} with its numerical residue.
pub fn deformed_pole(alpha: f64) -> Result<PoleReport> {
    check_alpha(alpha)?;
    let form = ZetaClosedForm::DeformedB0 { alpha };
    let z0 = locate_pole(&form, Complex64::new(1.0, 0.0))?;
    Ok(PoleReport {
        poles: vec![Pole {
            location: z0,
            residue: Some(residue_at(&form, z0)?),
            sources: vec![PoleSource::InverseEpsilon],
        }],
    })
}

const RESIDUE_RADIUS: f64 = 1e-5;

/// Limit of (z − z0)ζ(z) from four directions at radius 1e-5, each with one
/// Richardson step.
pub fn residue_at(form: &ZetaClosedForm, z0: Complex64) -> Result<Complex64> {
    let declared = form
        .declared_poles()
        .iter()
        .any(|(p, _)| (p - z0).norm() <= 1e-6);
    if !declared {
        return Err(Error::Parameter(format!("{z0} is not a declared pole")));
    }
    let g = |dz: Complex64| -> Result<Complex64> {
        let z = z0 + dz;
        Ok((z - z0) * form.eval(z)?)
    };
    let mut est = Vec::with_capacity(4);
    for j in 0..4 {
        let dir = Complex64::from_polar(1.0, j as f64 * PI / 2.0);
        let full = g(dir * RESIDUE_RADIUS)?;
        let half = g(dir * (RESIDUE_RADIUS / 2.0))?;
        est.push(half * 2.0 - full);
    }
    let mean: Complex64 = est.iter().sum::<Complex64>() / 4.0;
    let spread = est.iter().map(|e| (e - mean).norm()).fold(0.0, f64::max);
    if spread > 1e-5 * mean.norm() {
        return Err(Error::InconsistentLimits(format!(
            "estimates {est:?} spread {spread} around {mean}"
        )));
    }
    Ok(mean)
}

/// Secant iteration on 1/ζ(z) from `guess`, finished by symmetric root
/// steps that never sample inside the evaluation guard around the pole.
pub fn locate_pole(form: &ZetaClosedForm, guess: Complex64) -> Result<Complex64> {
    let inv = |z: Complex64| -> Result<Option<Complex64>> {
        match form.eval(z) {
            Ok(v) => Ok(Some(ONE / v)),
            Err(Error::Pole(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let mut a = guess;
    let mut b = guess + 1e-3;
    let mut fa = inv(a)?.unwrap_or_default();
    let mut fb = inv(b)?.unwrap_or_default();
    for _ in 0..100 {
        let denom = fb - fa;
        if denom == Complex64::new(0.0, 0.0) {
            break;
        }
        let c = b - fb * (b - a) / denom;
        a = b;
        fa = fb;
        b = c;
        if (b - a).norm() <= 1e-7 {
            break;
        }
        match inv(b)? {
            Some(v) => fb = v,
            None => break,
        }
    }
    let h = 1e-7;
    let mut step = Complex64::new(f64::INFINITY, 0.0);
    for _ in 0..4 {
        let (Some(gp), Some(gm)) = (inv(b + h)?, inv(b - h)?) else {
            return Err(Error::NoConvergence(format!("pole search hit the guard near {b}")));
        };
        step = (gp + gm) * h / (gp - gm);
        b -= step;
        if step.norm() <= 1e-15 * b.norm().max(1.0) {
            break;
        }
    }
    if step.norm() > 1e-12 * b.norm().max(1.0) {
        return Err(Error::NoConvergence(format!("pole search stalled near {b}")));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const ZETA3: f64 = 1.202_056_903_159_594_2;

    #[test]
    fn section2_examples() {
        let one = Section2Element::one();
        let v = zeta_closed_section2(&one, c(0.5, 0.0), c(3.0, 0.0)).unwrap();
        assert!((v - c(14.0 * ZETA3, 0.0)).norm() < 1e-12);
        match zeta_closed_section2(&one, c(0.5, 0.0), c(1.0, 0.0)) {
            Err(Error::Pole(s)) => assert!(s.contains("(0, 0)")),
            other => panic!("{other:?}"),
        }
        let a = Section2Element::monomial(1, 0, ONE);
        let v = zeta_closed_section2(&a, c(0.5, 0.0), c(2.0, 0.0)).unwrap();
        let z25 = riemann_zeta(c(2.5, 0.0)).unwrap();
        let want = (2f64.powf(2.5) - 1.0) * 2.0 * z25;
        assert!((v - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn deformed_examples() {
        assert_eq!(zeta_closed_deformed(1, 0.1, c(2.0, 1.0)).unwrap(), c(0.0, 0.0));
        let v = zeta_closed_deformed(0, 0.0, c(3.0, 0.0)).unwrap();
        assert!((v - c(14.0 * ZETA3, 0.0)).norm() < 1e-12);
        assert!(matches!(
            zeta_closed_deformed(0, 0.1, c(1.0 / 0.9, 0.0)),
            Err(Error::Pole(_))
        ));
        assert!(matches!(zeta_closed_deformed(0, 0.5, c(3.0, 0.0)), Err(Error::Singular(_))));
    }

    #[test]
    fn direct_sums_match_closed_forms() {
        let one = ZetaWeight::Algebra(AlgebraElement::one());
        let z = c(3.0, 0.0);
        let can = zeta_direct(&DiracSpec::Canonical, &one, z, 100_000).unwrap();
        let want = zeta_closed_deformed(0, 0.0, z).unwrap();
        assert!((can.value - want).norm() / want.norm() < 1e-8);
        let d = DiracSpec::deformed(0.1).unwrap();
        let def = zeta_direct(&d, &one, z, 100_000).unwrap();
        let want = zeta_closed_deformed(0, 0.1, z).unwrap();
        assert!((def.value - want).norm() / want.norm() < 1e-6);
        assert!(def.tail_bound < 1e-20);
        let shift = ZetaWeight::Algebra(AlgebraElement::b(2));
        assert_eq!(zeta_direct(&d, &shift, z, 10).unwrap().value, c(0.0, 0.0));
        assert!(matches!(
            zeta_direct(&d, &one, c(1.05, 0.0), 100),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn section2_direct_sum() {
        let eps = c(0.5, 0.3);
        let p = Section2Element::from_coeffs([((0, 0), ONE), ((1, 1), c(0.5, -1.0)), ((2, 0), c(0.0, 2.0))]);
        let z = c(1.7, 0.4);
        let d = DiracSpec::complex_example(eps).unwrap();
        let direct = zeta_direct(&d, &ZetaWeight::Section2(p.clone()), z, 50_000).unwrap();
        let closed = zeta_closed_section2(&p, eps, z).unwrap();
        assert!((direct.value - closed).norm() / closed.norm() < 1e-8);
    }

    #[test]
    fn figure_lattice_points() {
        let eps = c(1.0, 0.5);
        let rep = dimension_lattice(eps, 1, 1);
        let find = |n: u32, m: u32| {
            rep.poles
                .iter()
                .find(|p| p.sources.contains(&PoleSource::Lattice { n, m }))
                .unwrap()
                .location
        };
        assert_eq!(find(0, 0), c(1.0, 0.0));
        assert_eq!(find(1, 0), c(0.0, -0.5));
        assert_eq!(find(1, 1), c(-1.0, 0.0));
        assert_eq!(rep.poles.len(), 4);
    }

    #[test]
    fn real_eps_lattice_merges_degenerate_points() {
        let rep = dimension_lattice(c(0.5, 0.0), 3, 3);
        // 1 − (n+m)/2 for n + m = 0..6
        assert_eq!(rep.poles.len(), 7);
        let mid = rep.poles.iter().find(|p| p.location == c(-0.5, 0.0)).unwrap();
        assert_eq!(mid.sources.len(), 4);
    }

    #[test]
    fn residues() {
        let can = ZetaClosedForm::DeformedB0 { alpha: 0.0 };
        let r = residue_at(&can, c(1.0, 0.0)).unwrap();
        assert!((r - c(2.0, 0.0)).norm() < 1e-9);
        let s2 = ZetaClosedForm::Section2 {
            p: Section2Element::one(),
            eps: c(0.7, 0.0),
        };
        let r = residue_at(&s2, c(1.0, 0.0)).unwrap();
        assert!((r - c(2.0, 0.0)).norm() < 1e-9);
        let def = ZetaClosedForm::DeformedB0 { alpha: 0.1 };
        let r = residue_at(&def, c(1.0 / 0.9, 0.0)).unwrap();
        let cosv = (0.9 * PI).cos().abs();
        let want = (1.0 + cosv.powf(-1.0 / 0.9)) / 0.9;
        assert!((r - c(want, 0.0)).norm() < 1e-8, "{r} {want}");
        assert!(residue_at(&def, c(2.0, 0.0)).is_err());
    }

    #[test]
    fn pole_location_and_lattice_residues() {
        for alpha in [0.05, 0.1, 0.2] {
            let rep = deformed_pole(alpha).unwrap();
            assert!((rep.poles[0].location - c(1.0 / (1.0 - alpha), 0.0)).norm() < 1e-12);
        }
        let p = Section2Element::from_coeffs([((0, 0), ONE), ((1, 0), c(3.0, 0.0))]);
        let rep = dimension_lattice_with_residues(c(0.5, 0.25), 2, 2, &p).unwrap();
        let origin = rep.poles.iter().find(|q| q.location == c(1.0, 0.0)).unwrap();
        assert!((origin.residue.unwrap() - c(2.0, 0.0)).norm() < 1e-9);
        let shifted = rep.poles.iter().find(|q| (q.location - c(0.5, -0.25)).norm() < 1e-12).unwrap();
        assert!((shifted.residue.unwrap() - c(6.0, 0.0)).norm() < 1e-8);
        assert!(rep.poles.iter().filter(|q| q.residue.is_some()).count() == 2);
    }
}
