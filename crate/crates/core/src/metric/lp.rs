//! Lipschitz-ball maximization as a linear program.

use std::f64::consts::PI;

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};

use super::{symbol, OptimizerConfig};
use crate::error::{Error, Result};
use crate::hilbert::DiracSpec;

/// raw ≤ sup ≤ upper, with upper = raw / cos(π/P).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpBracket {
    pub raw: f64,
    pub upper: f64,
}

pub(super) fn check_real_spec(d: &DiracSpec) -> Result<()> {
    d.validate()?;
    if let DiracSpec::ComplexExample { .. } = d {
        return Err(Error::Parameter(
            "distance estimators need the Canonical or Deformed triple".into(),
        ));
    }
    Ok(())
}

/// Solves max a(x1) − a(x0) over real a of degree ≤ N with the derivative
/// modulus replaced by an inscribed P-gon at every grid point.
pub fn lp_bracket(x0: f64, x1: f64, d: &DiracSpec, cfg: &OptimizerConfig) -> Result<LpBracket> {
    cfg.validate()?;
    check_real_spec(d)?;
    if x0 == x1 {
        return Ok(LpBracket { raw: 0.0, upper: 0.0 });
    }
    let n_modes = cfg.modes;
    let sides = cfg.polygon_sides;
    let rhs = (PI / sides as f64).cos();
    let obj: Vec<f64> = (1..=n_modes)
        .flat_map(|k| {
            let nf = k as f64;
            [(nf * x1).cos() - (nf * x0).cos(), (nf * x1).sin() - (nf * x0).sin()]
        })
        .collect();
    let bounds: Vec<f64> = (1..=n_modes as i64)
        .map(|n| {
            // |σ(±n) a_{±n}| ≤ sup|D a| ≤ 1 bounds p, q; doubled for slack
            4.0 / symbol(d, n).abs().min(symbol(d, -n).abs())
        })
        .collect();
    let rows = constraint_rows(d, cfg);
    // Constraint generation: solve on a subset of the G·P half-planes, then
    // add the most violated one per grid point until none is violated.
    let per = sides;
    let mut active: Vec<bool> = (0..rows.len())
        .map(|r| (r % per) % (per / 4) == 0)
        .collect();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = obj
        .iter()
        .enumerate()
        .map(|(j, &c)| lp.add_var(c, (-bounds[j / 2], bounds[j / 2])))
        .collect();
    let expr = |r: usize| -> Vec<(Variable, f64)> { vars.iter().copied().zip(rows[r].iter().copied()).collect() };
    let solver_err = |e: microlp::Error| Error::Solver(format!("LP failed: {e}"));
    let interrupted = |_| Error::Solver("LP interrupted".into());
    let cold = |active: &[bool]| -> Result<microlp::Solution> {
        let mut p = lp.clone();
        for (r, &on) in active.iter().enumerate() {
            if on {
                p.add_constraint(expr(r), ComparisonOp::Le, rhs);
            }
        }
        p.solve().map_err(solver_err)?.into_solution().map_err(interrupted)
    };
    let mut sol = cold(&active)?;
    for _ in 0..rows.len() {
        let y: Vec<f64> = vars.iter().map(|&v| sol.var_value(v)).collect();
        let mut violated = Vec::new();
        for g in 0..cfg.grid_points {
            let mut worst = (VIOLATION_TOL, None);
            for r in g * per..(g + 1) * per {
                if active[r] {
                    continue;
                }
                let v: f64 = rows[r].iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() - rhs;
                if v > worst.0 {
                    worst = (v, Some(r));
                }
            }
            if let (_, Some(r)) = worst {
                violated.push(r);
            }
        }
        log::debug!("lp: {} cuts added, objective {}", violated.len(), sol.objective());
        if violated.is_empty() {
            let raw = sol.objective();
            return Ok(LpBracket { raw, upper: raw / rhs });
        }
        // warm-started dual simplex after each added half-plane; a basis
        // breakdown in the incremental path falls back to a cold solve
        let mut warm = Some(sol);
        for &r in &violated {
            active[r] = true;
            if let Some(s) = warm.take() {
                warm = s
                    .add_constraint(expr(r), ComparisonOp::Le, rhs)
                    .ok()
                    .and_then(|o| o.into_solution().ok());
            }
        }
        sol = match warm {
            Some(s) => s,
            None => {
                log::debug!("lp: incremental update failed, re-solving");
                cold(&active)?
            }
        };
    }
    Err(Error::Solver("constraint generation did not terminate".into()))
}

const VIOLATION_TOL: f64 = 1e-9;

/// Half-plane rows cos θ_k Re D(x_g) + sin θ_k Im D(x_g), ordered by g then k,
/// with columns interleaved as p_1, q_1, p_2, q_2, …
fn constraint_rows(d: &DiracSpec, cfg: &OptimizerConfig) -> Vec<Vec<f64>> {
    let sig: Vec<(f64, f64)> = (1..=cfg.modes as i64)
        .map(|n| (symbol(d, n), symbol(d, -n)))
        .collect();
    let sides = cfg.polygon_sides;
    let mut rows = Vec::with_capacity(cfg.grid_points * sides);
    for g in 0..cfg.grid_points {
        let x = 2.0 * PI * g as f64 / cfg.grid_points as f64;
        // ∂D/∂p_n = (i/2)(σ(n)e^{inx} + σ(−n)e^{−inx}),
        // ∂D/∂q_n = (1/2)(σ(n)e^{inx} − σ(−n)e^{−inx})
        let parts: Vec<((f64, f64), (f64, f64))> = sig
            .iter()
            .enumerate()
            .map(|(i, &(sp, sm))| {
                let nx = (i + 1) as f64 * x;
                let (c, s) = (nx.cos(), nx.sin());
                ((-(sp - sm) * s / 2.0, (sp + sm) * c / 2.0), ((sp - sm) * c / 2.0, (sp + sm) * s / 2.0))
            })
            .collect();
        for k in 0..sides {
            let th = 2.0 * PI * k as f64 / sides as f64;
            let (ct, st) = (th.cos(), th.sin());
            rows.push(
                parts
                    .iter()
                    .flat_map(|&(dp, dq)| [ct * dp.0 + st * dp.1, ct * dq.0 + st * dq.1])
                    .collect(),
            );
        }
    }
    rows
}

/// Upper end of the certified LP bracket.
pub fn distance_lp(x0: f64, x1: f64, d: &DiracSpec, cfg: &OptimizerConfig) -> Result<f64> {
    lp_bracket(x0, x1, d, cfg).map(|b| b.upper)
}
