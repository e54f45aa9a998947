//! Glued transition profile and recovery fields `u_ε = γ̃_ε(d)`.
//!
//! For `s ≥ 0` the profile is
//!
//! * `tanh(s/λ)` on `[0, t]` with `t = λ|ln ε|`,
//! * the parabola `1 − a(s₀ − s)²` on `(t, s₀)`,
//! * `1` on `[s₀, ∞)`,
//!
//! and it is extended oddly to `s < 0`. Matching value and slope at `t`
//! fixes `s₀ = t + λ(1 + ε²)` and `a = 2ε²/(λ²(1 + ε²)³)`; the glue value is
//! `(1 − ε²)/(1 + ε²)` and the glue slope `4ε²/(λ(1 + ε²)²)`.
//!
//! The core width `λ` defaults to `√2 ε`, which makes `tanh(s/λ)` the
//! heteroclinic of `ε²γ'' = W'(γ)` for `W(s) = (1 − s²)²/4`; this is the
//! width for which `B^ε = ∇²d` holds in the core region and the 1D energy
//! tends to `c₀`. [`RecoveryProfile::unit_width`] gives `λ = ε`, whose
//! closed forms are `t = ε|ln ε|`, `s₀ = ε + ε³ + ε|ln ε|` and
//! `a = 2/(1 + ε²)³`.

use crate::energy::{double_well, double_well_prime, PhaseField, PhaseParams};
use crate::error::{Error, Result};
use crate::geometry::ImplicitSurface;
use crate::grid::{Grid3, ScalarField3};
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryProfile {
    eps: f64,
    lambda: f64,
    t_inner: f64,
    s0: f64,
    a: f64,
}

/// Profile value with its first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValue {
    pub value: f64,
    pub d1: f64,
    /// One-sided by piece membership; jumps at the glue point.
    pub d2: f64,
}

/// Which piece of the profile a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    Core,
    Parabola,
    Flat,
}

impl RecoveryProfile {
    /// Equipartitioned profile, `λ = √2 ε`.
    pub fn new(eps: f64) -> Result<Self> {
        Self::with_width(eps, std::f64::consts::SQRT_2 * eps)
    }

    /// `λ = ε`.
    pub fn unit_width(eps: f64) -> Result<Self> {
        Self::with_width(eps, eps)
    }

    pub fn with_width(eps: f64, lambda: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::precondition(format!("eps must lie in (0, 1), got {eps}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::precondition(format!("profile width must be positive, got {lambda}")));
        }
        let e2 = eps * eps;
        let t_inner = lambda * eps.ln().abs();
        let delta = lambda * (1.0 + e2);
        Ok(RecoveryProfile {
            eps,
            lambda,
            t_inner,
            s0: t_inner + delta,
            a: 2.0 * e2 / (lambda * lambda * (1.0 + e2).powi(3)),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Core width `λ`.
    pub fn width(&self) -> f64 {
        self.lambda
    }

    /// Glue point `λ|ln ε|`.
    pub fn t_inner(&self) -> f64 {
        self.t_inner
    }

    /// Support edge: the profile is `±1` for `|s| ≥ s₀`.
    pub fn s0(&self) -> f64 {
        self.s0
    }

    /// Parabola coefficient.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// `(1 − ε²)/(1 + ε²)`.
    pub fn glue_value(&self) -> f64 {
        let e2 = self.eps * self.eps;
        (1.0 - e2) / (1.0 + e2)
    }

    /// `4ε²/(λ(1 + ε²)²)`.
    pub fn glue_slope(&self) -> f64 {
        let e2 = self.eps * self.eps;
        4.0 * e2 / (self.lambda * (1.0 + e2).powi(2))
    }

    pub fn piece(&self, s: f64) -> Piece {
        let r = s.abs();
        if r <= self.t_inner {
            Piece::Core
        } else if r < self.s0 {
            Piece::Parabola
        } else {
            Piece::Flat
        }
    }

    fn core(&self, r: f64) -> ProfileValue {
        let x = r / self.lambda;
        let th = x.tanh();
        let sech2 = 1.0 / x.cosh().powi(2);
        ProfileValue {
            value: th,
            d1: sech2 / self.lambda,
            d2: -2.0 * th * sech2 / (self.lambda * self.lambda),
        }
    }

    fn parabola(&self, r: f64) -> ProfileValue {
        let q = self.s0 - r;
        ProfileValue {
            value: 1.0 - self.a * q * q,
            d1: 2.0 * self.a * q,
            d2: -2.0 * self.a,
        }
    }

    pub fn eval(&self, s: f64) -> ProfileValue {
        let r = s.abs();
        let v = match self.piece(s) {
            Piece::Core => self.core(r),
            Piece::Parabola => self.parabola(r),
            Piece::Flat => ProfileValue {
                value: 1.0,
                d1: 0.0,
                d2: 0.0,
            },
        };
        if s < 0.0 {
            ProfileValue {
                value: -v.value,
                d1: v.d1,
                d2: -v.d2,
            }
        } else {
            v
        }
    }

    /// Value and slope mismatches at the glue point, in ulps of the glue
    /// value and slope: core side versus parabola side.
    pub fn glue_defects_ulps(&self) -> (f64, f64) {
        let left = self.core(self.t_inner);
        let right = self.parabola(self.t_inner);
        (
            ulps(left.value, right.value),
            ulps(left.d1, right.d1),
        )
    }

    /// `∫(ε|γ̃'|²/2 + W(γ̃)/ε) ds` over the real line.
    pub fn energy_1d(&self) -> f64 {
        let eps = self.eps;
        let density = |s: f64| {
            let p = self.eval(s);
            0.5 * eps * p.d1 * p.d1 + double_well(p.value) / eps
        };
        let core = quadrature::integrate(density, 0.0, self.t_inner, 64, 16);
        let band = quadrature::integrate(density, self.t_inner, self.s0, 16, 16);
        2.0 * (core + band)
    }

    /// `∫_t^{s₀} ε|p'|² ds = (4/3) ε a² (s₀ − t)³`.
    pub fn tail_integral(&self) -> f64 {
        let delta = self.s0 - self.t_inner;
        4.0 / 3.0 * self.eps * self.a * self.a * delta.powi(3)
    }

    /// `max |εp'' − W'(p)/ε|` over the parabola band, sampled densely.
    pub fn band_defect(&self) -> f64 {
        let n = 256;
        (0..=n)
            .map(|k| {
                let s = self.t_inner + (self.s0 - self.t_inner) * (k as f64 + 0.5) / (n as f64 + 1.0);
                let p = self.parabola(s);
                (self.eps * p.d2 - double_well_prime(p.value) / self.eps).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn ulps(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        return 0.0;
    }
    let ulp = f64::EPSILON * 2f64.powi(scale.log2().floor() as i32);
    (a - b).abs() / ulp
}

/// Transition width of the core profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProfileWidth {
    /// `λ = √2·ε`, the heteroclinic of the double well.
    #[default]
    Sqrt2,
    /// `λ = ε`.
    Unit,
}

impl ProfileWidth {
    pub fn profile(&self, eps: f64) -> Result<RecoveryProfile> {
        match self {
            ProfileWidth::Sqrt2 => RecoveryProfile::new(eps),
            ProfileWidth::Unit => RecoveryProfile::unit_width(eps),
        }
    }
}

/// Signed distance of `s` sampled on `grid`.
pub fn sample_distance(s: &ImplicitSurface, grid: &Grid3) -> Result<ScalarField3> {
    let values: Vec<Result<f64>> = crate::par::map_indices(grid.len(), |i| s.signed_distance(grid.point_at(i)));
    let values = values.into_iter().collect::<Result<Vec<_>>>()?;
    ScalarField3::new(*grid, values)
}

/// Samples `γ̃_ε(d)` on `grid`.
///
/// Fails if the transition tube `|d| < s₀` reaches the box boundary. Logs a
/// warning when the core `λ|ln ε|` is narrower than four grid spacings.
pub fn build_recovery_field(s: &ImplicitSurface, rp: &RecoveryProfile, grid: &Grid3) -> Result<ScalarField3> {
    let d = sample_distance(s, grid)?;
    recovery_from_distance(&d, rp)
}

/// Same as [`build_recovery_field`] from an already sampled distance.
pub fn recovery_from_distance(d: &ScalarField3, rp: &RecoveryProfile) -> Result<ScalarField3> {
    let grid = *d.grid();
    if let Some(idx) = (0..grid.len()).find(|&i| grid.boundary_depth(i) == 0 && d.values()[i].abs() < rp.s0()) {
        return Err(Error::precondition(format!(
            "transition tube |d| < {:.4} touches the box boundary at {:?}",
            rp.s0(),
            grid.point_at(idx)
        )));
    }
    if rp.t_inner() < 4.0 * grid.spacing() {
        log::warn!(
            "under-resolved profile: core half-width {:.4} < 4h = {:.4}",
            rp.t_inner(),
            4.0 * grid.spacing()
        );
    }
    Ok(d.map(|x| rp.eval(x).value))
}

/// Core-region and band diagnostics of a recovery field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerRegionReport {
    /// `max |H^ε − Δd|` over `|d| < t − 2h`.
    pub max_h_error: f64,
    /// `max |B^ε − ∇²d|` (Frobenius) over `|d| < t − 2h`.
    pub max_b_error: f64,
    pub inner_points: usize,
    /// `max |εp'' − W'(u)/ε|` over grid points in `t < |d| < s₀`.
    pub band_defect: f64,
    pub band_points: usize,
    pub tail_integral: f64,
}

/// Compares `H^ε`, `B^ε` of `u` with `Δd`, `∇²d` in the core region and
/// measures the parabola-band defect.
pub fn inner_region_identities(
    u: &ScalarField3,
    s: &ImplicitSurface,
    rp: &RecoveryProfile,
) -> Result<InnerRegionReport> {
    let grid = *u.grid();
    let d = sample_distance(s, &grid)?;
    let field = PhaseField::new(u, PhaseParams::new(rp.eps())?);
    let limit = rp.t_inner() - 2.0 * grid.spacing();
    let eps = rp.eps();
    let per_point: Vec<Result<(u8, f64, f64)>> = crate::par::map_indices(grid.len(), |i| {
        let di = d.values()[i];
        if di.abs() < limit {
            let hd = s.distance_hessian(grid.point_at(i))?;
            let b = field.point(i).b_eps();
            let eh = (b.trace() - hd.trace()).abs();
            let eb = (b - hd).frobenius_sq().sqrt();
            Ok((1, eh, eb))
        } else if rp.piece(di) == Piece::Parabola {
            let p = rp.eval(di);
            Ok((2, (eps * p.d2 - double_well_prime(u.values()[i]) / eps).abs(), 0.0))
        } else {
            Ok((0, 0.0, 0.0))
        }
    });
    let mut report = InnerRegionReport {
        max_h_error: 0.0,
        max_b_error: 0.0,
        inner_points: 0,
        band_defect: 0.0,
        band_points: 0,
        tail_integral: rp.tail_integral(),
    };
    for r in per_point {
        match r? {
            (1, eh, eb) => {
                report.inner_points += 1;
                report.max_h_error = report.max_h_error.max(eh);
                report.max_b_error = report.max_b_error.max(eb);
            }
            (2, e, _) => {
                report.band_points += 1;
                report.band_defect = report.band_defect.max(e);
            }
            _ => {}
        }
    }
    Ok(report)
}
