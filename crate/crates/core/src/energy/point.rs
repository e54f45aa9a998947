use super::{double_well, double_well_prime, PhaseParams};
use crate::tensor::{dot, Sym3, Vec3};

const E3: Vec3 = [0.0, 0.0, 1.0];

/// Everything the densities need at one grid point, computed once from
/// `u`, the discrete gradient and the discrete Hessian.
#[derive(Debug, Clone, Copy)]
pub struct PointState {
    pub eps: f64,
    pub u: f64,
    pub grad: Vec3,
    pub grad_sq: f64,
    pub grad_norm: f64,
    /// `|∇u| > grad_floor`.
    pub active: bool,
    /// `∇u/|∇u|`, or `e₃` on the flat set.
    pub nu: Vec3,
    pub hess: Sym3,
    pub w: f64,
    pub wp: f64,
    /// `εΔu − W'(u)/ε`.
    pub f: f64,
    /// `ε∇²u − (W'(u)/ε) ν⊗ν`.
    pub m: Sym3,
}

impl PointState {
    #[inline]
    pub fn new(u: f64, grad: Vec3, hess: Sym3, params: &PhaseParams) -> Self {
        let eps = params.eps;
        let grad_sq = dot(grad, grad);
        let grad_norm = grad_sq.sqrt();
        let active = grad_norm > params.grad_floor;
        let nu = if active {
            grad.map(|g| g / grad_norm)
        } else {
            E3
        };
        let w = double_well(u);
        let wp = double_well_prime(u);
        let c = wp / eps;
        let f = eps * hess.trace() - c;
        let m = hess * eps - Sym3::outer(nu) * c;
        PointState {
            eps,
            u,
            grad,
            grad_sq,
            grad_norm,
            active,
            nu,
            hess,
            w,
            wp,
            f,
            m,
        }
    }

    /// `ε|∇u|²/2 + W/ε`.
    #[inline]
    pub fn mu(&self) -> f64 {
        0.5 * self.eps * self.grad_sq + self.w / self.eps
    }

    /// Discrepancy density `ε|∇u|²/2 − W/ε`.
    #[inline]
    pub fn xi(&self) -> f64 {
        0.5 * self.eps * self.grad_sq - self.w / self.eps
    }

    /// `ε|∇u|²`.
    #[inline]
    pub fn mu_tilde(&self) -> f64 {
        self.eps * self.grad_sq
    }

    /// Approximate second fundamental form `B^ε`, zero on the flat set.
    #[inline]
    pub fn b_eps(&self) -> Sym3 {
        if self.active {
            self.m * (1.0 / (self.eps * self.grad_norm))
        } else {
            Sym3::ZERO
        }
    }

    /// `(P^u)ᵀ ∇²u P^u / |∇u|`, zero on the flat set.
    pub fn level_set_sff(&self) -> Sym3 {
        if !self.active {
            return Sym3::ZERO;
        }
        let p = Sym3::complement_projector(self.nu);
        crate::tensor::project_unchecked(&p, &self.hess) * (1.0 / self.grad_norm)
    }

    /// `∇ξ = ε∇²u∇u − (W'/ε)∇u`, evaluated pointwise from the shared
    /// derivatives.
    #[inline]
    pub fn grad_xi(&self) -> Vec3 {
        let sg = self.hess.mul_vec(self.grad);
        let c = self.wp / self.eps;
        [
            self.eps * sg[0] - c * self.grad[0],
            self.eps * sg[1] - c * self.grad[1],
            self.eps * sg[2] - c * self.grad[2],
        ]
    }

    /// `R^ε = ∇ξ/(ε|∇u|²)`, zero on the flat set.
    #[inline]
    pub fn r_vector(&self) -> Vec3 {
        if !self.active {
            return [0.0; 3];
        }
        let s = 1.0 / (self.eps * self.grad_sq);
        self.grad_xi().map(|g| g * s)
    }

    /// Gauss density, trace/norm form: `[f² − |M|²]/(2ε)` on the active set.
    #[inline]
    pub fn k_density_trace(&self) -> f64 {
        if self.active {
            (self.f * self.f - self.m.frobenius_sq()) / (2.0 * self.eps)
        } else {
            0.0
        }
    }

    /// Gauss density, principal-minor form: `Σ det M_ij / ε` on the active set.
    #[inline]
    pub fn k_density_minors(&self) -> f64 {
        if self.active {
            self.m.minor_sum() / self.eps
        } else {
            0.0
        }
    }

    /// `(f − εH₀|∇u|)²/ε`.
    #[inline]
    pub fn h_density(&self, h0: f64) -> f64 {
        let r = self.f - self.eps * h0 * self.grad_norm;
        r * r / self.eps
    }

    /// `(f − H₀√(2W))²/ε`.
    #[inline]
    pub fn h_density_well(&self, h0: f64) -> f64 {
        let r = self.f - h0 * (2.0 * self.w).sqrt();
        r * r / self.eps
    }

    /// `|B^ε|² ε|∇u|² = |M|²/ε` on the active set.
    #[inline]
    pub fn b_sq_mu_tilde(&self) -> f64 {
        if self.active {
            self.m.frobenius_sq() / self.eps
        } else {
            0.0
        }
    }

    /// `−(W'/ε) tr[P^u ∇²u]` on the active set.
    #[inline]
    pub fn k_density_alternative(&self) -> f64 {
        if self.active {
            let tr_p = self.hess.trace() - self.hess.quad_form(self.nu);
            -(self.wp / self.eps) * tr_p
        } else {
            0.0
        }
    }
}
