//! Benchmark surfaces with exact signed distance and curvature.
//!
//! Sign convention: with [`Orientation::Inside`] the signed distance `d` is
//! positive inside the enclosed set, and the scalar mean curvature is the
//! surface value of `Δd`, so a sphere of radius `R` has `H = −2/R`. The
//! principal curvatures `κ_i` are the nonzero eigenvalues of `∇²d` on the
//! surface, and at signed offset `t` along `∇d` the eigenvalues become
//! `κ_i/(1 + tκ_i)`. [`Orientation::Outside`] flips `d`, which flips `H` and
//! the `κ_i` but leaves `K` unchanged.

mod ellipsoid;
mod sharp;

pub use sharp::{
    distance_curvature_check, sharp_helfrich, DistanceCurvatureRow, SharpHelfrich,
};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tensor::{Sym3, Vec3};

/// Surfaces farther than this from a point are rejected by
/// [`ImplicitSurface::exact_curvatures`].
pub const ON_SURFACE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceKind {
    Sphere { radius: f64 },
    /// Axis `e₃`, centered at the origin.
    Torus { major: f64, minor: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
    /// `count` balls of equal radius on the x-axis, centered about the origin.
    SphereChain { count: usize, radius: f64, spacing: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// `d > 0` inside.
    #[default]
    Inside,
    /// `d > 0` outside.
    Outside,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Inside => 1.0,
            Orientation::Outside => -1.0,
        }
    }

    pub fn from_sign(s: i32) -> Result<Self> {
        match s {
            1 => Ok(Orientation::Inside),
            -1 => Ok(Orientation::Outside),
            _ => Err(Error::precondition(format!("orientation must be +1 or -1, got {s}"))),
        }
    }
}

/// Curvatures at a surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceCurvature {
    /// `κ₁ + κ₂`.
    pub h: f64,
    /// `κ₁ κ₂`.
    pub k: f64,
    /// `κ₁² + κ₂²`.
    pub b_norm_sq: f64,
    pub principal: [f64; 2],
}

impl SurfaceCurvature {
    fn from_principal(k1: f64, k2: f64) -> Self {
        SurfaceCurvature {
            h: k1 + k2,
            k: k1 * k2,
            b_norm_sq: k1 * k1 + k2 * k2,
            principal: [k1, k2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitSurface {
    kind: SurfaceKind,
    orientation: Orientation,
}

impl ImplicitSurface {
    pub fn new(kind: SurfaceKind, orientation: Orientation) -> Result<Self> {
        let ok = match kind {
            SurfaceKind::Sphere { radius } => radius > 0.0,
            SurfaceKind::Torus { major, minor } => 0.0 < minor && minor < major,
            SurfaceKind::Ellipsoid { a, b, c } => a > 0.0 && b > 0.0 && c > 0.0,
            SurfaceKind::SphereChain {
                count,
                radius,
                spacing,
            } => count >= 1 && radius > 0.0 && spacing >= 2.0 * radius,
        };
        if !ok {
            return Err(Error::precondition(format!("invalid surface parameters {kind:?}")));
        }
        Ok(ImplicitSurface { kind, orientation })
    }

    pub fn sphere(radius: f64) -> Result<Self> {
        Self::new(SurfaceKind::Sphere { radius }, Orientation::Inside)
    }

    pub fn torus(major: f64, minor: f64) -> Result<Self> {
        Self::new(SurfaceKind::Torus { major, minor }, Orientation::Inside)
    }

    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(SurfaceKind::Ellipsoid { a, b, c }, Orientation::Inside)
    }

    pub fn sphere_chain(count: usize, radius: f64, spacing: f64) -> Result<Self> {
        Self::new(
            SurfaceKind::SphereChain {
                count,
                radius,
                spacing,
            },
            Orientation::Inside,
        )
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Euler genus of the surface (per component for chains).
    pub fn genus(&self) -> usize {
        match self.kind {
            SurfaceKind::Torus { .. } => 1,
            _ => 0,
        }
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        match self.kind {
            SurfaceKind::SphereChain { count, .. } => count,
            _ => 1,
        }
    }

    /// Largest absolute principal curvature over the surface.
    pub fn max_curvature(&self) -> f64 {
        match self.kind {
            SurfaceKind::Sphere { radius } | SurfaceKind::SphereChain { radius, .. } => 1.0 / radius,
            SurfaceKind::Torus { major, minor } => (1.0 / minor).max(1.0 / (major - minor)),
            SurfaceKind::Ellipsoid { a, b, c } => {
                let mut s = [a, b, c];
                s.sort_by(|x, y| x.partial_cmp(y).unwrap());
                // largest normal curvature is at the end of the longest axis
                s[2] / (s[0] * s[0])
            }
        }
    }

    /// Radius of a ball around the origin containing the surface.
    pub fn bounding_radius(&self) -> f64 {
        match self.kind {
            SurfaceKind::Sphere { radius } => radius,
            SurfaceKind::Torus { major, minor } => major + minor,
            SurfaceKind::Ellipsoid { a, b, c } => a.max(b).max(c),
            SurfaceKind::SphereChain {
                count,
                radius,
                spacing,
            } => 0.5 * (count - 1) as f64 * spacing + radius,
        }
    }

    pub fn chain_centers(count: usize, spacing: f64) -> Vec<Vec3> {
        (0..count)
            .map(|n| [(n as f64 - 0.5 * (count - 1) as f64) * spacing, 0.0, 0.0])
            .collect()
    }

    fn unsigned_inside(&self, x: Vec3) -> Result<f64> {
        Ok(match self.kind {
            SurfaceKind::Sphere { radius } => radius - crate::tensor::norm(x),
            SurfaceKind::Torus { major, minor } => {
                let rho = x[0].hypot(x[1]);
                minor - (rho - major).hypot(x[2])
            }
            SurfaceKind::Ellipsoid { a, b, c } => {
                let (dist, inside) = ellipsoid::distance([a, b, c], x)?;
                if inside {
                    dist
                } else {
                    -dist
                }
            }
            SurfaceKind::SphereChain {
                count,
                radius,
                spacing,
            } => Self::chain_centers(count, spacing)
                .into_iter()
                .map(|c| radius - crate::tensor::norm([x[0] - c[0], x[1] - c[1], x[2] - c[2]]))
                .fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// Signed distance, positive inside for [`Orientation::Inside`].
    pub fn signed_distance(&self, x: Vec3) -> Result<f64> {
        Ok(self.orientation.sign() * self.unsigned_inside(x)?)
    }

    /// `∇²d` at `x` (closed form for spheres and tori, central differences of
    /// the exact distance for ellipsoids).
    pub fn distance_hessian(&self, x: Vec3) -> Result<Sym3> {
        let s = self.orientation.sign();
        let hess = match self.kind {
            SurfaceKind::Sphere { .. } => sphere_distance_hessian(x),
            SurfaceKind::SphereChain { count, spacing, .. } => {
                let c = self.nearest_chain_center(x, count, spacing);
                sphere_distance_hessian([x[0] - c[0], x[1] - c[1], x[2] - c[2]])
            }
            SurfaceKind::Torus { major, .. } => torus_distance_hessian(x, major),
            SurfaceKind::Ellipsoid { .. } => return self.distance_hessian_fd(x, 1e-4),
        };
        Ok(hess * s)
    }

    fn nearest_chain_center(&self, x: Vec3, count: usize, spacing: f64) -> Vec3 {
        Self::chain_centers(count, spacing)
            .into_iter()
            .min_by(|a, b| {
                let da = (x[0] - a[0]).powi(2) + x[1] * x[1] + x[2] * x[2];
                let db = (x[0] - b[0]).powi(2) + x[1] * x[1] + x[2] * x[2];
                da.partial_cmp(&db).unwrap()
            })
            .unwrap()
    }

    fn distance_hessian_fd(&self, x: Vec3, step: f64) -> Result<Sym3> {
        let d = |p: Vec3| self.signed_distance(p);
        let shift = |a: usize, da: f64, b: usize, db: f64| {
            let mut p = x;
            p[a] += da;
            p[b] += db;
            p
        };
        let d0 = d(x)?;
        let mut m = [[0.0; 3]; 3];
        for a in 0..3 {
            let plus = d(shift(a, step, a, 0.0))?;
            let minus = d(shift(a, -step, a, 0.0))?;
            m[a][a] = (plus - 2.0 * d0 + minus) / (step * step);
            for b in a + 1..3 {
                let v = (d(shift(a, step, b, step))? - d(shift(a, step, b, -step))?
                    - d(shift(a, -step, b, step))?
                    + d(shift(a, -step, b, -step))?)
                    / (4.0 * step * step);
                m[a][b] = v;
                m[b][a] = v;
            }
        }
        Ok(Sym3::from_matrix(m))
    }

    /// Unit vector `∇d` at a surface point (inward for [`Orientation::Inside`]).
    pub fn distance_gradient(&self, x: Vec3) -> Vec3 {
        let s = self.orientation.sign();
        let g = match self.kind {
            SurfaceKind::Sphere { .. } => unit([-x[0], -x[1], -x[2]]),
            SurfaceKind::SphereChain { count, spacing, .. } => {
                let c = self.nearest_chain_center(x, count, spacing);
                unit([c[0] - x[0], c[1] - x[1], c[2] - x[2]])
            }
            SurfaceKind::Torus { major, .. } => {
                let rho = x[0].hypot(x[1]);
                let q = (rho - major).hypot(x[2]);
                let w = (rho - major) / q;
                unit([-w * x[0] / rho, -w * x[1] / rho, -x[2] / q])
            }
            SurfaceKind::Ellipsoid { a, b, c } => {
                unit([-x[0] / (a * a), -x[1] / (b * b), -x[2] / (c * c)])
            }
        };
        g.map(|v| v * s)
    }

    /// Exact curvatures at a point on the surface.
    pub fn exact_curvatures(&self, x: Vec3) -> Result<SurfaceCurvature> {
        let d = self.signed_distance(x)?;
        if d.abs() > ON_SURFACE_TOL {
            return Err(Error::precondition(format!(
                "point {x:?} is {d:.3e} away from the surface"
            )));
        }
        Ok(self.curvatures_unchecked(x))
    }

    pub(crate) fn curvatures_unchecked(&self, x: Vec3) -> SurfaceCurvature {
        let s = self.orientation.sign();
        let (k1, k2) = match self.kind {
            SurfaceKind::Sphere { radius } | SurfaceKind::SphereChain { radius, .. } => {
                (-1.0 / radius, -1.0 / radius)
            }
            SurfaceKind::Torus { major, minor } => {
                let rho = x[0].hypot(x[1]);
                let cos_t = (rho - major) / minor;
                (-1.0 / minor, -cos_t / rho)
            }
            SurfaceKind::Ellipsoid { a, b, c } => {
                let h2 = [2.0 / (a * a), 2.0 / (b * b), 2.0 / (c * c)];
                let g = [h2[0] * x[0], h2[1] * x[1], h2[2] * x[2]];
                let g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
                let gn = g2.sqrt();
                // div of the outward unit normal; Δd = −div n
                let div_n = ((h2[0] + h2[1] + h2[2]) * g2
                    - (h2[0] * g[0] * g[0] + h2[1] * g[1] * g[1] + h2[2] * g[2] * g[2]))
                    / (g2 * gn);
                let adj = [h2[1] * h2[2], h2[0] * h2[2], h2[0] * h2[1]];
                let k = (adj[0] * g[0] * g[0] + adj[1] * g[1] * g[1] + adj[2] * g[2] * g[2])
                    / (g2 * g2);
                let h = -div_n;
                let disc = (h * h - 4.0 * k).max(0.0).sqrt();
                (0.5 * (h - disc), 0.5 * (h + disc))
            }
        };
        SurfaceCurvature::from_principal(s * k1, s * k2)
    }

    /// Deterministic sample of surface points.
    pub fn surface_samples(&self) -> Vec<Vec3> {
        let dirs = [
            (0.0, 0.0),
            (PI / 2.0, 0.0),
            (PI / 3.0, PI / 5.0),
            (2.0 * PI / 3.0, 1.2),
            (PI / 2.0, PI / 2.0),
            (1.1, 4.0),
        ];
        match self.kind {
            SurfaceKind::Sphere { radius } => dirs
                .iter()
                .map(|&(t, p)| [radius * t.sin() * p.cos(), radius * t.sin() * p.sin(), radius * t.cos()])
                .collect(),
            SurfaceKind::SphereChain {
                count,
                radius,
                spacing,
            } => {
                let c = Self::chain_centers(count, spacing)[0];
                dirs.iter()
                    .map(|&(t, p)| {
                        [
                            c[0] + radius * t.sin() * p.cos(),
                            radius * t.sin() * p.sin(),
                            radius * t.cos(),
                        ]
                    })
                    .collect()
            }
            SurfaceKind::Ellipsoid { a, b, c } => dirs
                .iter()
                .map(|&(t, p)| [a * t.sin() * p.cos(), b * t.sin() * p.sin(), c * t.cos()])
                .collect(),
            SurfaceKind::Torus { major, minor } => {
                [0.0, PI / 3.0, PI / 2.0, 2.0, PI, 4.5]
                    .iter()
                    .zip([0.0f64, 0.7, 1.9, 3.0, 4.4, 5.5])
                    .map(|(&t, p)| {
                        let rho = major + minor * t.cos();
                        [rho * p.cos(), rho * p.sin(), minor * t.sin()]
                    })
                    .collect()
            }
        }
    }
}

fn unit(v: Vec3) -> Vec3 {
    let n = crate::tensor::norm(v);
    v.map(|c| c / n)
}

/// `∇²(R − |x|) = −(Id − x̂⊗x̂)/|x|`.
fn sphere_distance_hessian(x: Vec3) -> Sym3 {
    let r = crate::tensor::norm(x);
    let xhat = x.map(|c| c / r);
    Sym3::complement_projector(xhat) * (-1.0 / r)
}

/// `∇²(r − q)` with `q` the distance to the core circle of radius `major`.
fn torus_distance_hessian(x: Vec3, major: f64) -> Sym3 {
    let rho = x[0].hypot(x[1]);
    let q = (rho - major).hypot(x[2]);
    let rho_hat = [x[0] / rho, x[1] / rho, 0.0];
    let phi_hat = [-x[1] / rho, x[0] / rho, 0.0];
    let w = (rho - major) / q;
    // unit tangent of the meridian circle
    let t = [-x[2] / q * rho_hat[0], -x[2] / q * rho_hat[1], w];
    let hq = Sym3::outer(t) * (1.0 / q) + Sym3::outer(phi_hat) * (w / rho);
    -hq
}

#[cfg(test)]
mod tests;
