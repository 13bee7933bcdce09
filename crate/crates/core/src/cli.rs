//! Command-line front end. CSV goes to stdout or `--output`; summaries and
//! diagnostics go to stderr.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::{junk_certificate, Verdict};
use crate::hilbert::{AlgebraElement, BasisWindow, DiracSpec, Section2Element};
use crate::metric::{distance_lp, distance_opnorm, distance_profile, OptimizerConfig};
use crate::plot::{render, Series};
use crate::spectrum::{
    deformed_pole, dimension_lattice_with_residues, zeta_direct, PoleSource, ZetaClosedForm, ZetaWeight,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_BAD_PARAMS: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "fracdim", version, about = "Spectral triples on the deformed circle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pole lattice of the complex triple or the pole 1/eps of the deformed one.
    Poles(PolesArgs),
    /// Closed-form and direct zeta values on a rectangular grid.
    Zeta(ZetaArgs),
    /// Junk-form certificate of the moment matrix.
    Junk(JunkArgs),
    /// Distance profile x -> d(delta_x, delta_0) on [0, pi].
    Distance(DistanceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TripleKind {
    Canonical,
    Deformed,
    Complex,
}

#[derive(Debug, Clone, Args)]
pub struct TripleArgs {
    #[arg(long, value_enum, default_value = "deformed")]
    pub triple: TripleKind,
    /// Deformation parameter, eps = 1 - alpha.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Complex eps as "re,im".
    #[arg(long, default_value = "1,0.5")]
    pub eps: String,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// CSV destination; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Optional SVG plot.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PolesArgs {
    #[command(flatten)]
    pub triple: TripleArgs,
    #[arg(long, default_value_t = 5)]
    pub nmax: u32,
    #[arg(long, default_value_t = 5)]
    pub mmax: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ZetaArgs {
    #[command(flatten)]
    pub triple: TripleArgs,
    #[arg(long, default_value_t = 1.5)]
    pub re_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub re_max: f64,
    #[arg(long, default_value_t = 0.0)]
    pub im_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub im_max: f64,
    /// Grid points along each axis.
    #[arg(long, default_value_t = 8)]
    pub points: usize,
    #[arg(long, default_value_t = 100_000)]
    pub kmax: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct JunkArgs {
    #[command(flatten)]
    pub triple: TripleArgs,
    /// n ranges over [-nrange, nrange].
    #[arg(long, default_value_t = 8)]
    pub nrange: i64,
    /// l ranges over [-lrange, lrange].
    #[arg(long, default_value_t = 512)]
    pub lrange: i64,
    /// Half-width of the basis window used for operator norms.
    #[arg(long)]
    pub window: Option<i64>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Closed,
    Lp,
    Opnorm,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct DistanceArgs {
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Number of samples on [0, pi], endpoints included.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, value_enum, default_value = "closed")]
    pub method: Method,
    /// Trigonometric degree N of the LP.
    #[arg(long, default_value_t = 64)]
    pub modes: usize,
    /// Constraint points G of the LP.
    #[arg(long, default_value_t = 512)]
    pub grid_points: usize,
    /// Polygon sides P of the LP.
    #[arg(long, default_value_t = 16)]
    pub sides: usize,
    /// Trigonometric degree of the operator-norm estimator.
    #[arg(long, default_value_t = 8)]
    pub opnorm_modes: usize,
    /// Basis-window half-width of the operator-norm estimator.
    #[arg(long, default_value_t = 64)]
    pub window: i64,
    #[arg(long, default_value_t = 400)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Parses `std::env::args` and runs; clap usage errors exit with 2.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(&cli))
}

pub fn run(cli: &Cli) -> u8 {
    let result = match &cli.command {
        Command::Poles(a) => cmd_poles(a),
        Command::Zeta(a) => cmd_zeta(a),
        Command::Junk(a) => cmd_junk(a),
        Command::Distance(a) => cmd_distance(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parameter(_)
        | Error::Domain(_)
        | Error::WindowTooSmall { .. }
        | Error::GammaPole(_)
        | Error::ZetaPole
        | Error::Pole(_)
        | Error::Io(_) => EXIT_BAD_PARAMS,
        _ => EXIT_INCONCLUSIVE,
    }
}

fn parse_eps(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::Parameter(format!("eps must be \"re,im\", got {s:?}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(re.parse().map_err(|_| bad())?, 0.0)),
        [re, im] => Ok(Complex64::new(
            re.parse().map_err(|_| bad())?,
            im.parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn dirac_of(t: &TripleArgs) -> Result<DiracSpec> {
    match t.triple {
        TripleKind::Canonical => Ok(DiracSpec::Canonical),
        TripleKind::Deformed => DiracSpec::deformed(t.alpha),
        TripleKind::Complex => DiracSpec::complex_example(parse_eps(&t.eps)?),
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(out: &OutputArgs, csv: &str) -> Result<()> {
    match &out.output {
        Some(p) => std::fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn emit_plot(out: &OutputArgs, svg: impl FnOnce() -> String) -> Result<()> {
    if let Some(p) = &out.plot {
        std::fs::write(p, svg())?;
    }
    Ok(())
}

pub fn cmd_poles(a: &PolesArgs) -> Result<u8> {
    let d = dirac_of(&a.triple)?;
    let mut csv = String::from("re,im,n,m,residue_re,residue_im\n");
    let mut pts = Vec::new();
    match d {
        DiracSpec::ComplexExample { eps } => {
            // unit weight on every lattice index
            let p = Section2Element::from_coeffs(
                (0..=a.nmax).flat_map(|n| (0..=a.mmax).map(move |m| ((n, m), Complex64::new(1.0, 0.0)))),
            );
            let report = dimension_lattice_with_residues(eps, a.nmax, a.mmax, &p)?;
            for pole in &report.poles {
                let (n, m) = match pole.sources.first() {
                    Some(PoleSource::Lattice { n, m }) => (*n, *m),
                    _ => (0, 0),
                };
                let r = pole.residue.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                let _ = writeln!(
                    csv,
                    "{},{},{n},{m},{},{}",
                    num(pole.location.re),
                    num(pole.location.im),
                    num(r.re),
                    num(r.im)
                );
                pts.push((pole.location.re, pole.location.im));
            }
        }
        DiracSpec::Deformed { alpha } => {
            let report = deformed_pole(alpha)?;
            for pole in &report.poles {
                let r = pole.residue.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                let _ = writeln!(
                    csv,
                    "{},{},,,{},{}",
                    num(pole.location.re),
                    num(pole.location.im),
                    num(r.re),
                    num(r.im)
                );
                pts.push((pole.location.re, pole.location.im));
            }
        }
        DiracSpec::Canonical => {
            let report = deformed_pole(0.0)?;
            for pole in &report.poles {
                let r = pole.residue.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                let _ = writeln!(csv, "{},{},,,{},{}", num(pole.location.re), num(pole.location.im), num(r.re), num(r.im));
                pts.push((pole.location.re, pole.location.im));
            }
        }
    }
    emit(&a.out, &csv)?;
    emit_plot(&a.out, || {
        let s = Series {
            label: "poles".into(),
            points: pts,
            scatter: true,
        };
        render("Dimension spectrum", "Re z", "Im z", &[s])
    })?;
    Ok(EXIT_OK)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect(),
    }
}

pub fn cmd_zeta(a: &ZetaArgs) -> Result<u8> {
    let d = dirac_of(&a.triple)?;
    if a.points == 0 || !(a.re_max >= a.re_min) || !(a.im_max >= a.im_min) {
        return Err(Error::Parameter("empty zeta grid".into()));
    }
    let (closed, weight) = match d {
        DiracSpec::ComplexExample { eps } => (
            ZetaClosedForm::Section2 {
                p: Section2Element::one(),
                eps,
            },
            ZetaWeight::Section2(Section2Element::one()),
        ),
        DiracSpec::Deformed { alpha } => (
            ZetaClosedForm::DeformedB0 { alpha },
            ZetaWeight::Algebra(AlgebraElement::one()),
        ),
        DiracSpec::Canonical => (
            ZetaClosedForm::DeformedB0 { alpha: 0.0 },
            ZetaWeight::Algebra(AlgebraElement::one()),
        ),
    };
    let mut zs = Vec::new();
    for im in linspace(a.im_min, a.im_max, a.points) {
        for re in linspace(a.re_min, a.re_max, a.points) {
            zs.push(Complex64::new(re, im));
        }
    }
    let rows: Vec<Result<String>> = zs
        .par_iter()
        .map(|&z| {
            let head = format!("{},{}", num(z.re), num(z.im));
            let c = match closed.eval(z) {
                Ok(v) => v,
                Err(Error::Pole(_)) | Err(Error::ZetaPole) => return Ok(format!("{head},,,,,,1")),
                Err(e) => return Err(e),
            };
            let direct = match zeta_direct(&d, &weight, z, a.kmax) {
                Ok(s) => format!("{},{},{}", num(s.value.re), num(s.value.im), num(s.tail_bound)),
                Err(Error::Divergent(_)) => ",,".to_string(),
                Err(e) => return Err(e),
            };
            Ok(format!("{head},{},{},{direct},0", num(c.re), num(c.im)))
        })
        .collect();
    let mut csv = String::from("z_re,z_im,closed_re,closed_im,direct_re,direct_im,tail_bound,at_pole\n");
    for r in rows {
        csv.push_str(&r?);
        csv.push('\n');
    }
    emit(&a.out, &csv)?;
    Ok(EXIT_OK)
}

pub fn cmd_junk(a: &JunkArgs) -> Result<u8> {
    let d = dirac_of(&a.triple)?;
    if a.nrange < 1 || a.lrange < 1 {
        return Err(Error::Parameter("nrange and lrange must be positive".into()));
    }
    let half = a.window.unwrap_or((16 * a.nrange).max(64));
    let w = BasisWindow::symmetric(half)?;
    let cert = junk_certificate(&d, -a.nrange..=a.nrange, -a.lrange..=a.lrange, w, a.tol)?;
    eprintln!("triple {:?}, n in [-{}, {}], l in [-{}, {}]", d, a.nrange, a.nrange, a.lrange, a.lrange);
    eprintln!(
        "null dimension {} (doubled lrange: {}), threshold {:.3e}, second smallest {:.3e}",
        cert.null_dimension, cert.doubled_null_dimension, cert.null_threshold, cert.second_smallest
    );
    eprintln!("{:>5} {:>6} {:>14}", "r", "null", "max|pi(dw)|");
    for g in &cert.degrees {
        eprintln!("{:>5} {:>6} {:>14.6e}", g.r, g.null_dimension, g.max_pi_domega);
    }
    eprintln!("verdict: {:?}", cert.verdict);
    let mut csv = String::from("index,singular_value\n");
    for (i, s) in cert.singular_values.iter().enumerate() {
        let _ = writeln!(csv, "{i},{}", num(*s));
    }
    emit(&a.out, &csv)?;
    let expected = if d.epsilon() == 1.0 {
        Verdict::JunkPresent
    } else {
        Verdict::JunkAbsentAtTolerance
    };
    Ok(if cert.verdict == expected { EXIT_OK } else { EXIT_MISMATCH })
}

pub fn cmd_distance(a: &DistanceArgs) -> Result<u8> {
    let d = DiracSpec::deformed(a.alpha)?;
    let eps = d.epsilon();
    if (eps - 0.5).abs() < 1e-12 {
        return Err(Error::Parameter(
            "alpha = 0.5 is excluded: cos(pi eps) vanishes and the closed profile is singular".into(),
        ));
    }
    if a.grid < 2 {
        return Err(Error::Parameter("grid needs at least 2 points".into()));
    }
    let xs = linspace(0.0, PI, a.grid);
    let lp_cfg = OptimizerConfig {
        modes: a.modes,
        grid_points: a.grid_points,
        polygon_sides: a.sides,
        max_iter: a.max_iter,
        tol: a.tol,
    };
    let op_cfg = OptimizerConfig {
        modes: a.opnorm_modes,
        grid_points: a.grid_points.max(4 * a.opnorm_modes),
        ..lp_cfg
    };
    let want = |m: Method| a.method == m || a.method == Method::All;
    if want(Method::Lp) {
        lp_cfg.validate()?;
    }
    if want(Method::Opnorm) {
        op_cfg.validate()?;
    }
    let window = BasisWindow::symmetric(a.window)?;
    let closed = if want(Method::Closed) {
        Some(distance_profile(eps, &xs)?.values)
    } else {
        None
    };
    let column = |f: &(dyn Fn(f64) -> Result<f64> + Sync)| -> Result<Vec<f64>> { xs.par_iter().map(|&x| f(x)).collect() };
    let lp = if want(Method::Lp) {
        Some(column(&|x| distance_lp(0.0, x, &d, &lp_cfg))?)
    } else {
        None
    };
    let op = if want(Method::Opnorm) {
        Some(column(&|x| distance_opnorm(0.0, x, &d, &op_cfg, window).map(|r| r.value))?)
    } else {
        None
    };
    let cell = |c: &Option<Vec<f64>>, i: usize| c.as_ref().map(|v| num(v[i])).unwrap_or_default();
    let mut csv = String::from("x,closed,lp,opnorm,gap\n");
    for (i, &x) in xs.iter().enumerate() {
        let gap = match (&lp, &op) {
            (Some(l), Some(o)) => num(l[i] - o[i]),
            _ => String::new(),
        };
        let _ = writeln!(csv, "{},{},{},{},{gap}", num(x), cell(&closed, i), cell(&lp, i), cell(&op, i));
    }
    emit(&a.out, &csv)?;
    emit_plot(&a.out, || {
        let mut series = Vec::new();
        let named = [("closed", &closed), ("LP", &lp), ("operator norm", &op)];
        for (label, col) in named {
            if let Some(v) = col {
                series.push(Series {
                    label: label.into(),
                    points: xs.iter().copied().zip(v.iter().copied()).collect(),
                    scatter: label != "closed",
                });
            }
        }
        render(&format!("Distance, eps = {eps}"), "x", "D_{-eps}(x)", &series)
    })?;
    Ok(EXIT_OK)
}
