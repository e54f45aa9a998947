//! Sharp Helfrich energies and the distance/curvature relations of tubular
//! neighborhoods.

use std::f64::consts::PI;

use super::{ImplicitSurface, SurfaceCurvature, SurfaceKind};
use crate::energy::HelfrichParams;
use crate::error::{Error, Result};
use crate::grid::{self, Grid3, ScalarField3};
use crate::quadrature::gauss_legendre;
use crate::tensor::Vec3;

/// Gauss–Legendre panels per chart direction.
const PANELS: usize = 8;
/// Nodes per panel; `PANELS * ORDER` nodes per direction.
const ORDER: usize = 16;

/// Surface integrals entering the sharp Helfrich energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpHelfrich {
    /// `∫[κ_b/2 (H − H₀)² + κ_G K] dA`.
    pub w_hel: f64,
    pub area: f64,
    pub int_h: f64,
    pub int_h2: f64,
    /// `∫(H − H₀)² dA`.
    pub int_bending: f64,
    pub int_k: f64,
    /// `∫|B|² dA`.
    pub int_b2: f64,
    /// `−l² · area`, present when `−1 < κ_G/κ_b < 0`.
    pub lower_bound: Option<f64>,
}

impl SharpHelfrich {
    fn from_moments(m: Moments, hp: &HelfrichParams) -> Self {
        let int_bending = m.h2 - 2.0 * hp.h0 * m.h + hp.h0 * hp.h0 * m.area;
        let lower_bound = if hp.strict_constraint() {
            hp.l_squared().map(|l2| -l2 * m.area)
        } else {
            None
        };
        SharpHelfrich {
            w_hel: 0.5 * hp.kappa_b * int_bending + hp.kappa_g * m.k,
            area: m.area,
            int_h: m.h,
            int_h2: m.h2,
            int_bending,
            int_k: m.k,
            int_b2: m.b2,
            lower_bound,
        }
    }

    /// `W_hel ≥ −l²·area`, vacuously true without a bound.
    pub fn satisfies_lower_bound(&self) -> bool {
        self.lower_bound.is_none_or(|lb| self.w_hel >= lb)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    area: f64,
    h: f64,
    h2: f64,
    k: f64,
    b2: f64,
}

impl Moments {
    fn add(&mut self, c: &SurfaceCurvature, da: f64) {
        self.area += da;
        self.h += c.h * da;
        self.h2 += c.h * c.h * da;
        self.k += c.k * da;
        self.b2 += c.b_norm_sq * da;
    }

    fn scaled(self, s: f64) -> Self {
        Moments {
            area: s * self.area,
            h: s * self.h,
            h2: s * self.h2,
            k: s * self.k,
            b2: s * self.b2,
        }
    }
}

/// Composite Gauss–Legendre nodes and weights on `[a, b]`.
fn composite_rule(a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(ORDER);
    let width = (b - a) / PANELS as f64;
    (0..PANELS)
        .flat_map(|p| {
            let mid = a + (p as f64 + 0.5) * width;
            x.iter()
                .zip(&w)
                .map(move |(xi, wi)| (mid + 0.5 * width * xi, 0.5 * width * wi))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Integrates over a chart `(s, t) ↦ (point, area element)`.
fn chart_moments<F>(s: &ImplicitSurface, range_s: (f64, f64), range_t: (f64, f64), chart: F) -> Moments
where
    F: Fn(f64, f64) -> (Vec3, f64),
{
    let rs = composite_rule(range_s.0, range_s.1);
    let rt = composite_rule(range_t.0, range_t.1);
    let mut m = Moments::default();
    for &(a, wa) in &rs {
        for &(b, wb) in &rt {
            let (x, jac) = chart(a, b);
            m.add(&s.curvatures_unchecked(x), wa * wb * jac);
        }
    }
    m
}

fn sphere_moments(s: &ImplicitSurface, radius: f64) -> Moments {
    let h = s.orientation().sign() * -2.0 / radius;
    let area = 4.0 * PI * radius * radius;
    Moments {
        area,
        h: h * area,
        h2: 16.0 * PI,
        k: 4.0 * PI,
        b2: 8.0 * PI,
    }
}

/// Sharp Helfrich energy and its surface integrals.
pub fn sharp_helfrich(s: &ImplicitSurface, hp: &HelfrichParams) -> SharpHelfrich {
    let m = match s.kind() {
        SurfaceKind::Sphere { radius } => sphere_moments(s, radius),
        SurfaceKind::SphereChain { count, radius, .. } => {
            sphere_moments(s, radius).scaled(count as f64)
        }
        SurfaceKind::Torus { major, minor } => {
            chart_moments(s, (0.0, 2.0 * PI), (0.0, 2.0 * PI), |theta, phi| {
                let rho = major + minor * theta.cos();
                ([rho * phi.cos(), rho * phi.sin(), minor * theta.sin()], minor * rho)
            })
        }
        SurfaceKind::Ellipsoid { a, b, c } => {
            chart_moments(s, (0.0, PI), (0.0, 2.0 * PI), |theta, phi| {
                let (st, ct) = theta.sin_cos();
                let (sp, cp) = phi.sin_cos();
                let x_t = [a * ct * cp, b * ct * sp, -c * st];
                let x_p = [-a * st * sp, b * st * cp, 0.0];
                let n = [
                    x_t[1] * x_p[2] - x_t[2] * x_p[1],
                    x_t[2] * x_p[0] - x_t[0] * x_p[2],
                    x_t[0] * x_p[1] - x_t[1] * x_p[0],
                ];
                ([a * st * cp, b * st * sp, c * ct], crate::tensor::norm(n))
            })
        }
    };
    SharpHelfrich::from_moments(m, hp)
}

/// One (surface point, offset) row of [`distance_curvature_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceCurvatureRow {
    pub surface_point: Vec3,
    pub offset: f64,
    /// Sharp curvatures at the surface point.
    pub exact: SurfaceCurvature,
    /// `Δd` at the offset point from `κ_i/(1 + tκ_i)`.
    pub laplacian_analytic: f64,
    pub minor_sum_analytic: f64,
    /// `Δd` from a local finite-difference Hessian of sampled `d`.
    pub laplacian_numeric: f64,
    pub minor_sum_numeric: f64,
    /// `C·|t|` with `C = 8 κ_max³`, the allowed analytic deviation in `K`.
    pub k_bound: f64,
}

impl DistanceCurvatureRow {
    pub fn h_error_analytic(&self) -> f64 {
        (self.laplacian_analytic - self.exact.h).abs()
    }

    pub fn k_error_analytic(&self) -> f64 {
        (self.minor_sum_analytic - self.exact.k).abs()
    }

    pub fn h_error_numeric(&self) -> f64 {
        (self.laplacian_numeric - self.exact.h).abs()
    }

    pub fn k_error_numeric(&self) -> f64 {
        (self.minor_sum_numeric - self.exact.k).abs()
    }

    pub fn within_bound(&self) -> bool {
        self.k_error_analytic() <= self.k_bound
    }
}

/// Spacing of the local 5³ grid used for the numerical Hessian.
const LOCAL_H: f64 = 2e-3;

/// Compares `Δd` and `minor_sum(∇²d)` at `y = p + t∇d(p)` with `H(p)` and
/// `K(p)` for every sample point `p` and offset `t`.
pub fn distance_curvature_check(
    s: &ImplicitSurface,
    offsets: &[f64],
) -> Result<Vec<DistanceCurvatureRow>> {
    let kmax = s.max_curvature();
    let tube = 0.5 / kmax;
    if let Some(t) = offsets.iter().find(|t| !(t.abs() < tube)) {
        return Err(Error::precondition(format!(
            "offset {t} leaves the tubular neighborhood |t| < {tube}"
        )));
    }
    let mut rows = Vec::new();
    for p in s.surface_samples() {
        let exact = s.exact_curvatures(p)?;
        let n = s.distance_gradient(p);
        for &t in offsets {
            let y = [p[0] + t * n[0], p[1] + t * n[1], p[2] + t * n[2]];
            let [l1, l2] = exact.principal.map(|k| k / (1.0 + t * k));
            let hess = local_hessian(s, y)?;
            rows.push(DistanceCurvatureRow {
                surface_point: p,
                offset: t,
                exact,
                laplacian_analytic: l1 + l2,
                minor_sum_analytic: l1 * l2,
                laplacian_numeric: hess.trace(),
                minor_sum_numeric: hess.minor_sum(),
                k_bound: 8.0 * kmax.powi(3) * t.abs(),
            });
        }
    }
    Ok(rows)
}

fn local_hessian(s: &ImplicitSurface, y: Vec3) -> Result<crate::tensor::Sym3> {
    let origin = y.map(|c| c - 2.0 * LOCAL_H);
    let g = Grid3::new([5, 5, 5], origin, LOCAL_H)?;
    let values = (0..g.len())
        .map(|i| s.signed_distance(g.point_at(i)))
        .collect::<Result<Vec<_>>>()?;
    let field = ScalarField3::new(g, values)?;
    Ok(grid::hessian(&field).values()[g.index(2, 2, 2)])
}
