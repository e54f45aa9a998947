use super::{PhaseParams, PointState};
use crate::grid::{self, Grid3, ScalarField3, Stencils, SymTensorField3, VectorField3};
use crate::tensor::{Sym3, Vec3};

/// A phase field together with its discrete gradient and Hessian.
///
/// Construction does the finite differences once; every density, tensor
/// field and functional is then a pointwise map over [`PointState`].
#[derive(Debug, Clone)]
pub struct PhaseField<'a> {
    u: &'a ScalarField3,
    params: PhaseParams,
    grad: VectorField3,
    hess: SymTensorField3,
}

/// `μ`, `ξ`, `μ̃` and the chemical potential `f` as fields.
#[derive(Debug, Clone)]
pub struct Densities {
    pub mu: ScalarField3,
    pub xi: ScalarField3,
    pub mu_tilde: ScalarField3,
    pub f: ScalarField3,
}

/// Unit normal `ν_u` and tangential projector `P^u = Id − ν⊗ν`.
#[derive(Debug, Clone)]
pub struct LevelSetFrame {
    pub nu: VectorField3,
    pub projector: SymTensorField3,
}

/// Approximate second fundamental form and mean curvature.
#[derive(Debug, Clone)]
pub struct ApproxSff {
    pub b_eps: SymTensorField3,
    pub h_eps: ScalarField3,
}

/// Value of `A^u` on the flat set `{|∇u| ≤ floor}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AConvention {
    /// Zero tensor.
    #[default]
    Zero,
    /// `e₃ ⊗ e₃ ⊗ e₃`.
    Paper,
}

/// Rank-3 tensor field, components `t[9 i + 3 j + k]`.
#[derive(Debug, Clone)]
pub struct Tensor3Field {
    grid: Grid3,
    values: Vec<[f64; 27]>,
}

impl Tensor3Field {
    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn values(&self) -> &[[f64; 27]] {
        &self.values
    }

    #[inline]
    pub fn get(&self, idx: usize, i: usize, j: usize, k: usize) -> f64 {
        self.values[idx][9 * i + 3 * j + k]
    }
}

impl<'a> PhaseField<'a> {
    pub fn new(u: &'a ScalarField3, params: PhaseParams) -> Self {
        let (grad, hess) = grid::derivatives(u);
        PhaseField {
            u,
            params,
            grad,
            hess,
        }
    }

    pub(crate) fn with_stencils(u: &'a ScalarField3, params: PhaseParams, st: &Stencils) -> Self {
        let (grad, hess) = grid::derivatives_with(st, u);
        PhaseField {
            u,
            params,
            grad,
            hess,
        }
    }

    pub fn field(&self) -> &ScalarField3 {
        self.u
    }

    pub fn grid(&self) -> &Grid3 {
        self.u.grid()
    }

    pub fn params(&self) -> &PhaseParams {
        &self.params
    }

    pub fn gradient(&self) -> &VectorField3 {
        &self.grad
    }

    pub fn hessian(&self) -> &SymTensorField3 {
        &self.hess
    }

    #[inline]
    pub fn point(&self, idx: usize) -> PointState {
        PointState::new(
            self.u.values()[idx],
            self.grad.values()[idx],
            self.hess.values()[idx],
            &self.params,
        )
    }

    fn scalar<F: Fn(&PointState) -> f64 + Sync + Send>(&self, f: F) -> ScalarField3 {
        let values = self.grid().tabulate(|i| f(&self.point(i)));
        ScalarField3::from_raw(*self.grid(), values)
    }

    fn vector<F: Fn(&PointState) -> Vec3 + Sync + Send>(&self, f: F) -> VectorField3 {
        let values = self.grid().tabulate(|i| f(&self.point(i)));
        VectorField3::new(*self.grid(), values).expect("length matches grid")
    }

    fn tensor<F: Fn(&PointState) -> Sym3 + Sync + Send>(&self, f: F) -> SymTensorField3 {
        let values = self.grid().tabulate(|i| f(&self.point(i)));
        SymTensorField3::new(*self.grid(), values).expect("length matches grid")
    }

    pub fn densities(&self) -> Densities {
        Densities {
            mu: self.scalar(PointState::mu),
            xi: self.scalar(PointState::xi),
            mu_tilde: self.scalar(PointState::mu_tilde),
            f: self.scalar(|p| p.f),
        }
    }

    pub fn level_set_frame(&self) -> LevelSetFrame {
        LevelSetFrame {
            nu: self.vector(|p| p.nu),
            projector: self.tensor(|p| Sym3::complement_projector(p.nu)),
        }
    }

    /// `B^ε` and `H^ε = tr B^ε`.
    pub fn approx_sff(&self) -> ApproxSff {
        let b_eps = self.tensor(PointState::b_eps);
        let h = b_eps.values().iter().map(Sym3::trace).collect();
        ApproxSff {
            h_eps: ScalarField3::from_raw(*self.grid(), h),
            b_eps,
        }
    }

    /// Matrix part `(P^u)ᵀ∇²u P^u/|∇u|` of the level-set second fundamental
    /// form. The full object carries an extra `⊗ν` factor that leaves the
    /// Frobenius norm unchanged.
    pub fn level_set_sff(&self) -> SymTensorField3 {
        self.tensor(PointState::level_set_sff)
    }

    /// `A^u_{ijk} = −P^u_{il} ∂_l(ν_j ν_k)`, with `ν⊗ν` differentiated on the
    /// grid.
    pub fn a_tensor(&self, convention: AConvention) -> Tensor3Field {
        let grid = *self.grid();
        let nu = self.level_set_frame().nu;
        let nn: Vec<Sym3> = nu.values().iter().map(|v| Sym3::outer(*v)).collect();
        let st = Stencils::new(&grid);
        // dnn[slot][axis] = ∂_axis (ν⊗ν)_slot
        let dnn: Vec<[Vec<f64>; 3]> = (0..6)
            .map(|s| {
                let comp: Vec<f64> = nn.iter().map(|m| m.0[s]).collect();
                [st.d1(0, &comp), st.d1(1, &comp), st.d1(2, &comp)]
            })
            .collect();
        let floor = self.params.grad_floor;
        let values = grid.tabulate(|idx| {
            let g = self.grad.values()[idx];
            let mut t = [0.0; 27];
            if crate::tensor::norm(g) <= floor {
                if convention == AConvention::Paper {
                    t[26] = 1.0;
                }
                return t;
            }
            let p = Sym3::complement_projector(nu.values()[idx]);
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let s = crate::tensor::slot(j, k);
                        let mut acc = 0.0;
                        for l in 0..3 {
                            acc += p.get(i, l) * dnn[s][l][idx];
                        }
                        t[9 * i + 3 * j + k] = -acc;
                    }
                }
            }
            t
        });
        Tensor3Field { grid, values }
    }

    /// `R^ε = ∇ξ/(ε|∇u|²)`, zero on the flat set.
    pub fn r_vector(&self) -> VectorField3 {
        self.vector(PointState::r_vector)
    }
}
