//! Penalty-constrained gradient descent on the augmented diffuse energy.
//!
//! The objective is
//!
//! ```text
//! J(u) = W_eps(u) + ∫ |B^eps|² W(u)/eps dx
//!        + lambda_area (P_eps(u) − target_area)² + lambda_vol (mass(u) − target_mass)²
//! ```
//!
//! discretized with the same stencils and trapezoid weights as the rest of
//! the crate. [`grad_objective`] is the exact derivative of that discrete
//! expression. Descent runs in the plain L² metric (grid ℓ² scaled by `h³`),
//! which is not the `W^{2,2}` topology of the limit analysis and only finds
//! local minimizers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{double_well_second, HelfrichParams, PhaseField, PhaseParams, PointState};
use crate::error::{Error, Result};
use crate::grid::{derivative_adjoint, ScalarField3, Stencils};
use crate::tensor::{Sym3, Vec3};

/// Sufficient-decrease constant of the Armijo test.
const ARMIJO: f64 = 1e-4;
/// Line search gives up below `STEP_UNDERFLOW · step0`.
const STEP_UNDERFLOW: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeConfig {
    pub phase: PhaseParams,
    pub hp: HelfrichParams,
    pub lambda_area: f64,
    pub lambda_vol: f64,
    /// Target value of `P_eps`.
    pub target_area: f64,
    /// Target value of `∫(1+u)/2`.
    pub target_mass: f64,
    pub max_iters: usize,
    pub step0: f64,
    pub grad_tol: f64,
    /// Step shrink factor in `(0, 1)`.
    pub backtrack: f64,
}

impl MinimizeConfig {
    /// Config with no penalties and default descent controls.
    pub fn new(phase: PhaseParams, hp: HelfrichParams) -> Self {
        MinimizeConfig {
            phase,
            hp,
            lambda_area: 0.0,
            lambda_vol: 0.0,
            target_area: 0.0,
            target_mass: 0.0,
            max_iters: 100,
            step0: 1e-3,
            grad_tol: 1e-8,
            backtrack: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.step0 > 0.0 && self.step0.is_finite(), "step0 must be positive and finite"),
            (self.grad_tol > 0.0 && self.grad_tol.is_finite(), "grad_tol must be positive and finite"),
            (self.backtrack > 0.0 && self.backtrack < 1.0, "backtrack must lie in (0, 1)"),
            (self.lambda_area >= 0.0 && self.lambda_area.is_finite(), "lambda_area must be finite and >= 0"),
            (self.lambda_vol >= 0.0 && self.lambda_vol.is_finite(), "lambda_vol must be finite and >= 0"),
            (self.target_area.is_finite() && self.target_mass.is_finite(), "constraint targets must be finite"),
        ];
        match checks.iter().find(|c| !c.0) {
            Some((_, msg)) => Err(Error::precondition(*msg)),
            None => Ok(()),
        }
    }
}

/// Per-point objective density without the penalty terms.
fn density(p: &PointState, hp: &HelfrichParams) -> f64 {
    let bending = 0.5 * hp.kappa_b * p.h_density(hp.h0) + hp.kappa_g * p.k_density_trace();
    bending + augmented(p)
}

/// `|B^eps|² W/eps` with the gradient-floor convention.
fn augmented(p: &PointState) -> f64 {
    if p.active {
        p.m.frobenius_sq() * p.w / (p.eps.powi(3) * p.grad_sq)
    } else {
        0.0
    }
}

struct Parts {
    bending: f64,
    p_eps: f64,
    mass: f64,
}

fn parts(pf: &PhaseField, hp: &HelfrichParams) -> Parts {
    let u = pf.field().values();
    let [bending, p_eps, mass] = pf.grid().integrate_map(|i| {
        let p = pf.point(i);
        [density(&p, hp), p.mu(), 0.5 * (1.0 + u[i])]
    });
    Parts { bending, p_eps, mass }
}

fn combine(parts: &Parts, cfg: &MinimizeConfig) -> f64 {
    let da = parts.p_eps - cfg.target_area;
    let dv = parts.mass - cfg.target_mass;
    parts.bending + cfg.lambda_area * da * da + cfg.lambda_vol * dv * dv
}

/// Augmented energy plus quadratic constraint penalties.
pub fn objective(u: &ScalarField3, cfg: &MinimizeConfig) -> f64 {
    let pf = PhaseField::new(u, cfg.phase);
    combine(&parts(&pf, &cfg.hp), cfg)
}

/// Storage multiplicity of the six `Sym3` slots.
const SLOT_COUNT: [f64; 6] = [1.0, 1.0, 1.0, 2.0, 2.0, 2.0];

/// Partials of the weighted point density with respect to `(u, ∇u, ∇²u)`.
fn point_partials(p: &PointState, hp: &HelfrichParams, ca: f64, cv: f64) -> (f64, Vec3, Sym3) {
    let e = p.eps;
    let c = p.wp / e;
    let wpp = double_well_second(p.u);
    let r = p.f - e * hp.h0 * p.grad_norm;

    // Cotangent of M, collected over every term that sees M.
    let mut gm = Sym3::IDENTITY * (hp.kappa_b * r / e);
    let mut bu = 0.0;
    let mut bg = [0.0; 3];
    if p.grad_norm > 0.0 {
        let s = -hp.kappa_b * hp.h0 * r / p.grad_norm;
        bg = p.grad.map(|g| s * g);
    }
    if p.active {
        let m_sq = p.m.frobenius_sq();
        let tr = p.m.trace();
        gm += (Sym3::IDENTITY * tr - p.m) * (hp.kappa_g / e);
        let scale = p.w / (e.powi(3) * p.grad_sq);
        gm += p.m * (2.0 * scale);
        bu += m_sq * p.wp / (e.powi(3) * p.grad_sq);
        let direct = -2.0 * m_sq * scale / p.grad_norm;
        // M depends on ∇u through ν⊗ν: d(νᵀGν)/dg = 2(I − νν)Gν/|∇u|.
        let gnu = gm.mul_vec(p.nu);
        let along = crate::tensor::dot(gnu, p.nu);
        for a in 0..3 {
            let tangential = gnu[a] - along * p.nu[a];
            bg[a] += direct * p.nu[a] - 2.0 * c * tangential / p.grad_norm;
        }
    }
    // M = eps ∇²u − (W'/eps) ν⊗ν.
    bu += -(wpp / e) * gm.quad_form(p.nu);
    let mut bs = gm * e;
    for (slot, count) in bs.0.iter_mut().zip(SLOT_COUNT) {
        *slot *= count;
    }
    // Penalties: P_eps density and mass density.
    bu += ca * p.wp / e + cv * 0.5;
    for a in 0..3 {
        bg[a] += ca * e * p.grad[a];
    }
    (bu, bg, bs)
}

fn gradient_with(pf: &PhaseField, cfg: &MinimizeConfig, parts: &Parts) -> ScalarField3 {
    let grid = *pf.grid();
    let ca = 2.0 * cfg.lambda_area * (parts.p_eps - cfg.target_area);
    let cv = 2.0 * cfg.lambda_vol * (parts.mass - cfg.target_mass);
    let h3 = grid.spacing().powi(3);
    let partials: Vec<(f64, Vec3, Sym3)> = grid.tabulate(|i| {
        let [a, b, c] = grid.ijk(i);
        let w = grid.trapezoid_weight(a, b, c) * h3;
        let (bu, bg, bs) = point_partials(&pf.point(i), &cfg.hp, ca, cv);
        (bu * w, bg.map(|g| g * w), bs * w)
    });
    let bu: Vec<f64> = partials.iter().map(|p| p.0).collect();
    let bg: Vec<Vec3> = partials.iter().map(|p| p.1).collect();
    let bs: Vec<Sym3> = partials.iter().map(|p| p.2).collect();
    ScalarField3::from_raw(grid, derivative_adjoint(&grid, &bu, &bg, &bs))
}

/// Exact gradient of [`objective`] with respect to every grid value.
pub fn grad_objective(u: &ScalarField3, cfg: &MinimizeConfig) -> ScalarField3 {
    let pf = PhaseField::new(u, cfg.phase);
    let parts = parts(&pf, &cfg.hp);
    gradient_with(&pf, cfg, &parts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub objective: f64,
    /// L² norm of the gradient density `∂J/∂u_i / h³`.
    pub grad_norm: f64,
    /// Accepted step, zero for the initial record.
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescentStatus {
    Converged,
    MaxIterations,
    /// The step fell below `1e-14 · step0` without sufficient decrease.
    LineSearchFailed,
}

impl DescentStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            DescentStatus::Converged => "converged",
            DescentStatus::MaxIterations => "max_iterations",
            DescentStatus::LineSearchFailed => "line_search_failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DescentResult {
    /// Best iterate, which is also the last accepted one.
    pub u: ScalarField3,
    pub history: Vec<IterationRecord>,
    pub status: DescentStatus,
    pub p_eps: f64,
    pub mass: f64,
}

impl DescentResult {
    pub fn final_objective(&self) -> f64 {
        self.history.last().expect("history starts with iteration 0").objective
    }

    /// `|mass − target|/|target|`.
    pub fn volume_residual(&self, cfg: &MinimizeConfig) -> f64 {
        (self.mass - cfg.target_mass).abs() / cfg.target_mass.abs()
    }

    /// Every accepted step lowered (or kept) the objective.
    pub fn is_monotone(&self) -> bool {
        self.history.windows(2).all(|w| w[1].objective <= w[0].objective)
    }
}

struct Eval {
    u: ScalarField3,
    objective: f64,
    grad: ScalarField3,
    parts: Parts,
}

fn evaluate(u: ScalarField3, cfg: &MinimizeConfig, st: &Stencils) -> Eval {
    let pf = PhaseField::with_stencils(&u, cfg.phase, st);
    let parts = parts(&pf, &cfg.hp);
    let grad = gradient_with(&pf, cfg, &parts);
    let objective = combine(&parts, cfg);
    drop(pf);
    Eval {
        u,
        objective,
        grad,
        parts,
    }
}

fn objective_with(u: &ScalarField3, cfg: &MinimizeConfig, st: &Stencils) -> f64 {
    combine(&parts(&PhaseField::with_stencils(u, cfg.phase, st), &cfg.hp), cfg)
}

/// Backtracking L² gradient descent from `u0`.
pub fn descend(u0: &ScalarField3, cfg: &MinimizeConfig) -> Result<DescentResult> {
    cfg.validate()?;
    let grid = *u0.grid();
    let st = Stencils::new(&grid);
    let h3 = grid.spacing().powi(3);
    let grad_norm = |g: &ScalarField3| (g.values().iter().map(|v| v * v).sum::<f64>() / h3).sqrt();

    let mut cur = evaluate(u0.clone(), cfg, &st);
    let mut gn = grad_norm(&cur.grad);
    let mut history = vec![IterationRecord {
        iter: 0,
        objective: cur.objective,
        grad_norm: gn,
        step: 0.0,
    }];
    let mut step = cfg.step0;
    let mut status = DescentStatus::MaxIterations;
    for iter in 1..=cfg.max_iters {
        if gn <= cfg.grad_tol {
            status = DescentStatus::Converged;
            break;
        }
        let decrease = gn * gn;
        let accepted = loop {
            if step < STEP_UNDERFLOW * cfg.step0 {
                break None;
            }
            let trial = cur.u.axpby(1.0, &cur.grad, -step / h3)?;
            let j = objective_with(&trial, cfg, &st);
            if j.is_finite() && j <= cur.objective - ARMIJO * step * decrease {
                break Some(trial);
            }
            step *= cfg.backtrack;
        };
        let Some(next) = accepted else {
            status = DescentStatus::LineSearchFailed;
            break;
        };
        cur = evaluate(next, cfg, &st);
        gn = grad_norm(&cur.grad);
        history.push(IterationRecord {
            iter,
            objective: cur.objective,
            grad_norm: gn,
            step,
        });
        log::debug!("iter {iter}: J = {:.12e}, |g| = {gn:.3e}, step = {step:.3e}", cur.objective);
        step /= cfg.backtrack;
    }
    if status == DescentStatus::MaxIterations && gn <= cfg.grad_tol {
        status = DescentStatus::Converged;
    }
    Ok(DescentResult {
        p_eps: cur.parts.p_eps,
        mass: cur.parts.mass,
        u: cur.u,
        history,
        status,
    })
}

/// `u` plus uniform noise in `[−amplitude, amplitude]` from a seeded stream.
pub fn perturbed(u: &ScalarField3, amplitude: f64, seed: u64) -> ScalarField3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = u
        .values()
        .iter()
        .map(|v| v + amplitude * rng.gen_range(-1.0..=1.0))
        .collect();
    ScalarField3::from_raw(*u.grid(), values)
}
