use super::{HelfrichParams, PhaseField, PhaseParams, PointState};
use crate::error::{Error, Result};
use crate::grid::ScalarField3;

/// Exponents of the discrepancy norms stored in [`EnergyReport`].
pub const XI_EXPONENTS: [f64; 3] = [1.0, 1.25, 1.4];

/// Both algebraic routes to `K_ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KForms {
    /// `(1/2ε)∫[f² − |M|²]`.
    pub trace: f64,
    /// `(1/ε)∫ Σ_{i<j} det M_ij`.
    pub minors: f64,
}

impl KForms {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.trace.abs().max(self.minors.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.trace - self.minors).abs() / scale
        }
    }
}

/// Which spontaneous-curvature approximant to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpontaneousVariant {
    /// `(1/ε)∫(f − H₀ε|∇u|)²`.
    Gradient,
    /// `(1/ε)∫(f − H₀√(2W(u)))²`.
    Well,
}

/// All diffuse energies and diagnostics of one field at one `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub eps: f64,
    pub hp: HelfrichParams,
    pub p_eps: f64,
    pub h_eps: f64,
    pub k_eps: f64,
    pub k_eps_minors: f64,
    pub w_eps: f64,
    /// `∫(1+u)/2`.
    pub mass: f64,
    /// `μ_ε(Ω)`.
    pub mu_total: f64,
    pub xi_l1: f64,
    pub xi_l1_25: f64,
    pub xi_l1_4: f64,
    /// `∫|B^ε|² dμ̃_ε`.
    pub b_tensor_l2: f64,
    /// `−∫(W'/ε) tr[P^u ∇²u]`, present when `∇u` vanishes near the boundary.
    pub k_alternative: Option<f64>,
}

impl EnergyReport {
    pub fn k_forms(&self) -> KForms {
        KForms {
            trace: self.k_eps,
            minors: self.k_eps_minors,
        }
    }

    /// `(κ_b/2) H_ε + κ_G K_ε` recomputed from the stored terms.
    pub fn w_reconstructed(&self) -> f64 {
        0.5 * self.hp.kappa_b * self.h_eps + self.hp.kappa_g * self.k_eps
    }
}

impl PhaseField<'_> {
    fn integral<F: Fn(&PointState) -> f64 + Sync + Send>(&self, f: F) -> f64 {
        self.grid().integrate_map(|i| [f(&self.point(i))])[0]
    }

    pub fn energy_p(&self) -> f64 {
        self.integral(PointState::mu)
    }

    pub fn energy_h(&self, hp: &HelfrichParams) -> f64 {
        self.integral(|p| p.h_density(hp.h0))
    }

    pub fn energy_h_spontaneous(&self, hp: &HelfrichParams, variant: SpontaneousVariant) -> f64 {
        match variant {
            SpontaneousVariant::Gradient => self.energy_h(hp),
            SpontaneousVariant::Well => self.integral(|p| p.h_density_well(hp.h0)),
        }
    }

    /// Both forms of `K_ε`, from the same per-point `M`.
    pub fn energy_k_forms(&self) -> KForms {
        let [trace, minors] = self
            .grid()
            .integrate_map(|i| {
                let p = self.point(i);
                [p.k_density_trace(), p.k_density_minors()]
            });
        KForms { trace, minors }
    }

    pub fn energy_k(&self) -> f64 {
        self.energy_k_forms().trace
    }

    pub fn energy_w(&self, hp: &HelfrichParams) -> f64 {
        0.5 * hp.kappa_b * self.energy_h(hp) + hp.kappa_g * self.energy_k()
    }

    pub fn mass(&self) -> f64 {
        let v = self.field().values();
        self.grid().integrate_map(|i| [0.5 * (1.0 + v[i])])[0]
    }

    fn flat_near_boundary(&self) -> Result<()> {
        let g = self.grid();
        let floor = self.params().grad_floor;
        for (idx, grad) in self.gradient().values().iter().enumerate() {
            if g.boundary_depth(idx) < 2 && crate::tensor::norm(*grad) > floor {
                return Err(Error::precondition(format!(
                    "gradient {:.3e} above floor in the two outermost layers at {:?}",
                    crate::tensor::norm(*grad),
                    g.ijk(idx)
                )));
            }
        }
        Ok(())
    }

    /// `−∫_{∇u≠0} (W'(u)/ε) tr[P^u ∇²u] dx`; needs `∇u = 0` on the two
    /// outermost grid layers.
    pub fn alternative_k(&self) -> Result<f64> {
        self.flat_near_boundary()?;
        Ok(self.integral(PointState::k_density_alternative))
    }

    /// `|LHS − RHS|` of the energy-momentum identity along `axis` for a test
    /// function `phi` that vanishes on the two outermost layers.
    pub fn energy_momentum_residual(&self, phi: &ScalarField3, axis: usize) -> Result<f64> {
        if axis > 2 {
            return Err(Error::precondition(format!("axis must be 0, 1 or 2, got {axis}")));
        }
        if phi.grid() != self.grid() {
            return Err(Error::precondition("test function lives on a different grid"));
        }
        let g = self.grid();
        if let Some(idx) = (0..g.len()).find(|&i| g.boundary_depth(i) < 2 && phi.values()[i] != 0.0)
        {
            return Err(Error::precondition(format!(
                "test function does not vanish on the outer layers (at {:?})",
                g.ijk(idx)
            )));
        }
        let dphi = crate::grid::gradient(phi);
        let eps = self.params().eps;
        let [lhs, rhs] = g.integrate_map(|i| {
            let p = self.point(i);
            let dp = dphi.values()[i];
            let lhs = (0.5 * eps * p.grad_sq + p.w / eps) * dp[axis]
                - eps * p.grad[axis] * crate::tensor::dot(p.grad, dp);
            let rhs = p.f * phi.values()[i] * p.grad[axis];
            [lhs, rhs]
        });
        Ok((lhs - rhs).abs())
    }

    /// One fused pass over the grid for every quantity in [`EnergyReport`].
    pub fn report(&self, hp: &HelfrichParams) -> EnergyReport {
        let eps = self.params().eps;
        let u = self.field().values();
        let sums = self.grid().integrate_map(|i| {
            let p = self.point(i);
            let xi = p.xi().abs();
            [
                p.mu(),
                p.h_density(hp.h0),
                p.k_density_trace(),
                p.k_density_minors(),
                0.5 * (1.0 + u[i]),
                xi,
                xi.powf(XI_EXPONENTS[1]),
                xi.powf(XI_EXPONENTS[2]),
                p.b_sq_mu_tilde(),
                p.k_density_alternative(),
            ]
        });
        let [p_eps, h_eps, k_eps, k_eps_minors, mass, xi1, xi125, xi14, b_l2, k_alt] = sums;
        EnergyReport {
            eps,
            hp: *hp,
            p_eps,
            h_eps,
            k_eps,
            k_eps_minors,
            w_eps: 0.5 * hp.kappa_b * h_eps + hp.kappa_g * k_eps,
            mass,
            mu_total: p_eps,
            xi_l1: xi1,
            xi_l1_25: xi125.powf(1.0 / XI_EXPONENTS[1]),
            xi_l1_4: xi14.powf(1.0 / XI_EXPONENTS[2]),
            b_tensor_l2: b_l2,
            k_alternative: self.flat_near_boundary().ok().map(|_| k_alt),
        }
    }
}

pub fn energy_p(u: &ScalarField3, p: PhaseParams) -> f64 {
    PhaseField::new(u, p).energy_p()
}

pub fn energy_h(u: &ScalarField3, p: PhaseParams, hp: &HelfrichParams) -> f64 {
    PhaseField::new(u, p).energy_h(hp)
}

pub fn energy_k(u: &ScalarField3, p: PhaseParams) -> f64 {
    PhaseField::new(u, p).energy_k()
}

pub fn energy_w(u: &ScalarField3, p: PhaseParams, hp: &HelfrichParams) -> f64 {
    PhaseField::new(u, p).energy_w(hp)
}

pub fn energy_h_spontaneous(
    u: &ScalarField3,
    p: PhaseParams,
    hp: &HelfrichParams,
    variant: SpontaneousVariant,
) -> f64 {
    PhaseField::new(u, p).energy_h_spontaneous(hp, variant)
}

pub fn du_alternative_k(u: &ScalarField3, p: PhaseParams) -> Result<f64> {
    PhaseField::new(u, p).alternative_k()
}

pub fn energy_momentum_check(
    u: &ScalarField3,
    p: PhaseParams,
    phi: &ScalarField3,
    axis: usize,
) -> Result<f64> {
    PhaseField::new(u, p).energy_momentum_residual(phi, axis)
}
