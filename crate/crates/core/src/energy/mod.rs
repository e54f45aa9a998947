//! Double-well potential, physical parameters, and the diffuse-interface
//! densities and functionals.

mod fields;
mod functionals;
mod point;

pub use fields::{
    AConvention, ApproxSff, Densities, LevelSetFrame, PhaseField, Tensor3Field,
};
pub use functionals::{
    du_alternative_k, energy_h, energy_h_spontaneous, energy_k, energy_momentum_check,
    energy_p, energy_w, EnergyReport, KForms, SpontaneousVariant,
};
pub use point::PointState;

use crate::error::{Error, Result};
use crate::quadrature;

/// Default threshold below which `∇u` is treated as zero.
pub const DEFAULT_GRAD_FLOOR: f64 = 1e-12;

/// `W(s) = (1 − s²)² / 4`.
#[inline]
pub fn double_well(s: f64) -> f64 {
    let a = 1.0 - s * s;
    0.25 * a * a
}

/// `W'(s) = s³ − s`.
#[inline]
pub fn double_well_prime(s: f64) -> f64 {
    s * s * s - s
}

/// `W''(s) = 3s² − 1`.
#[inline]
pub fn double_well_second(s: f64) -> f64 {
    3.0 * s * s - 1.0
}

/// Surface-tension constant `c₀ = ∫_{-1}^{1} √(2W(s)) ds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C0 {
    /// Closed form `2√2/3`.
    pub value: f64,
    /// Gauss–Legendre evaluation of the defining integral.
    pub quadrature: f64,
}

pub fn c0_constant() -> C0 {
    let quad = quadrature::integrate(|s| (2.0 * double_well(s)).sqrt(), -1.0, 1.0, 4, 8);
    C0 {
        value: 2.0 * std::f64::consts::SQRT_2 / 3.0,
        quadrature: quad,
    }
}

/// `c₀` as a plain number.
#[inline]
pub fn c0() -> f64 {
    2.0 * std::f64::consts::SQRT_2 / 3.0
}

/// Bending rigidity, Gauss rigidity and spontaneous curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelfrichParams {
    pub kappa_b: f64,
    pub kappa_g: f64,
    pub h0: f64,
}

impl HelfrichParams {
    pub fn new(kappa_b: f64, kappa_g: f64, h0: f64) -> Result<Self> {
        if !(kappa_b > 0.0) {
            return Err(Error::precondition(format!(
                "kappa_b must be positive, got {kappa_b}"
            )));
        }
        if !kappa_g.is_finite() || !h0.is_finite() {
            return Err(Error::precondition("kappa_G and H0 must be finite"));
        }
        Ok(HelfrichParams { kappa_b, kappa_g, h0 })
    }

    /// `−1 < κ_G/κ_b < 0`.
    pub fn strict_constraint(&self) -> bool {
        let r = self.kappa_g / self.kappa_b;
        -1.0 < r && r < 0.0
    }

    /// `κ_G < 0 < (3/2)κ_b + κ_G`.
    pub fn relaxed_constraint(&self) -> bool {
        self.kappa_g < 0.0 && 0.0 < 1.5 * self.kappa_b + self.kappa_g
    }

    /// `l² = H₀² κ_b (κ_b − κ_G) / (2(κ_b + κ_G))`, undefined when
    /// `κ_b + κ_G = 0`.
    pub fn l_squared(&self) -> Option<f64> {
        let s = self.kappa_b + self.kappa_g;
        (s != 0.0)
            .then(|| self.h0 * self.h0 * self.kappa_b * (self.kappa_b - self.kappa_g) / (2.0 * s))
    }
}

/// Interface width and gradient floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseParams {
    pub eps: f64,
    pub grad_floor: f64,
}

impl PhaseParams {
    pub fn new(eps: f64) -> Result<Self> {
        Self::with_floor(eps, DEFAULT_GRAD_FLOOR)
    }

    pub fn with_floor(eps: f64, grad_floor: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::precondition(format!("eps must be positive, got {eps}")));
        }
        if !(grad_floor >= 0.0) {
            return Err(Error::precondition("grad_floor must be nonnegative"));
        }
        Ok(PhaseParams { eps, grad_floor })
    }

    /// Checks `eps` against the smallest extent of `grid`.
    pub fn check_grid(&self, grid: &crate::grid::Grid3) -> Result<()> {
        let ext = grid.extent().into_iter().fold(f64::INFINITY, f64::min);
        if self.eps >= ext {
            return Err(Error::precondition(format!(
                "eps = {} is not smaller than the domain extent {ext}",
                self.eps
            )));
        }
        Ok(())
    }
}


#[cfg(test)]
#[path = "tests.rs"]
mod field_tests;
