//! Uniform 3D grids, sampled fields and second-order finite differences.
//!
//! Values are stored with x fastest: the point `(i, j, k)` lives at linear
//! index `i + n_x * (j + n_y * k)`. A z-slab (`k` fixed) is a contiguous run
//! of `n_x * n_y` values and is the unit of parallel work.
//!
//! All derivative operators are compositions of two 1D line operators:
//!
//! * `D1`: `(f[i+1] - f[i-1]) / 2h` inside, the second-order one-sided
//!   `(-3 f[0] + 4 f[1] - f[2]) / 2h` (and its mirror) at the ends;
//! * `D2`: `(f[i+1] - 2 f[i] + f[i-1]) / h²` inside,
//!   `(2 f[0] - 5 f[1] + 4 f[2] - f[3]) / h²` (and its mirror) at the ends.
//!
//! Mixed second derivatives are `D1` along one axis applied to `D1` along
//! another, which inside the box is exactly the 4-point cross stencil.
//! Because every operator is an explicit sparse matrix, its transpose is
//! available too; [`derivative_adjoint`] uses it to backpropagate through
//! gradients and Hessians.

use crate::error::{Error, Result};
use crate::par;
use crate::tensor::{Sym3, Vec3};

/// Minimum number of points per axis.
pub const MIN_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    n: [usize; 3],
    origin: [f64; 3],
    h: f64,
}

impl Grid3 {
    pub fn new(n: [usize; 3], origin: [f64; 3], h: f64) -> Result<Self> {
        if n.iter().any(|&m| m < MIN_POINTS) {
            return Err(Error::precondition(format!(
                "grid needs at least {MIN_POINTS} points per axis, got {n:?}"
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::precondition(format!("grid spacing must be positive, got {h}")));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::precondition("grid origin must be finite"));
        }
        Ok(Grid3 { n, origin, h })
    }

    /// The cube `[-half_width, half_width]³` sampled with `n` points per axis.
    pub fn cube(n: usize, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::precondition("cube half width must be positive"));
        }
        let h = 2.0 * half_width / (n.max(2) - 1) as f64;
        Grid3::new([n; 3], [-half_width; 3], h)
    }

    #[inline]
    pub fn dims(&self) -> [usize; 3] {
        self.n
    }

    #[inline]
    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn slab_len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    /// Physical length of each axis, `(n_i − 1)·h`.
    pub fn extent(&self) -> [f64; 3] {
        self.n.map(|m| (m - 1) as f64 * self.h)
    }

    pub fn volume(&self) -> f64 {
        self.extent().iter().product()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    #[inline]
    pub fn ijk(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.n[0];
        let r = idx / self.n[0];
        [i, r % self.n[1], r / self.n[1]]
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.origin[0] + i as f64 * self.h,
            self.origin[1] + j as f64 * self.h,
            self.origin[2] + k as f64 * self.h,
        ]
    }

    #[inline]
    pub fn point_at(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.ijk(idx);
        self.point(i, j, k)
    }

    /// Trapezoid weight: ½ per axis on which the point sits on the boundary.
    #[inline]
    pub fn trapezoid_weight(&self, i: usize, j: usize, k: usize) -> f64 {
        let mut w = 1.0;
        for (c, m) in [i, j, k].into_iter().zip(self.n) {
            if c == 0 || c == m - 1 {
                w *= 0.5;
            }
        }
        w
    }

    /// Number of grid layers between the point and the nearest box face.
    #[inline]
    pub fn boundary_depth(&self, idx: usize) -> usize {
        let c = self.ijk(idx);
        (0..3).map(|a| c[a].min(self.n[a] - 1 - c[a])).min().unwrap()
    }

    /// Same grid shifted by `offset` in physical space.
    pub fn translated(&self, offset: [f64; 3]) -> Grid3 {
        Grid3 {
            n: self.n,
            origin: [
                self.origin[0] + offset[0],
                self.origin[1] + offset[1],
                self.origin[2] + offset[2],
            ],
            h: self.h,
        }
    }

    /// Trapezoid-weighted integral of a pointwise map producing `K` values at
    /// once. Slab partials and the final combination both use fixed pairwise
    /// trees, so the result does not depend on the number of threads.
    pub fn integrate_map<const K: usize, F>(&self, f: F) -> [f64; K]
    where
        F: Fn(usize) -> [f64; K] + Sync + Send,
    {
        let slab = self.slab_len();
        let partials = par::map_indices(self.n[2], |k| {
            let base = k * slab;
            let mut buf = Vec::with_capacity(slab);
            for j in 0..self.n[1] {
                for i in 0..self.n[0] {
                    let w = self.trapezoid_weight(i, j, k);
                    let v = f(base + self.n[0] * j + i);
                    buf.push(v.map(|x| w * x));
                }
            }
            par::pairwise_sum(&buf)
        });
        let h3 = self.h * self.h * self.h;
        par::pairwise_sum(&partials).map(|s| s * h3)
    }

    /// Fills a vector with `f(idx)` for every point, in storage order.
    pub fn tabulate<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send + Default + Clone,
        F: Fn(usize) -> T + Sync + Send,
    {
        let mut out = vec![T::default(); self.len()];
        let slab = self.slab_len();
        par::for_each_slab(&mut out, slab, |k, chunk| {
            let base = k * slab;
            for (o, v) in chunk.iter_mut().enumerate() {
                *v = f(base + o);
            }
        });
        out
    }
}

/// Sparse square operator acting on a line of `n` samples.
#[derive(Debug, Clone)]
pub struct LineOp {
    rows: Vec<Vec<(usize, f64)>>,
}

impl LineOp {
    /// Second-order first derivative.
    pub fn first_derivative(n: usize, h: f64) -> Self {
        let c = 1.0 / (2.0 * h);
        let mut rows = Vec::with_capacity(n);
        rows.push(vec![(0, -3.0 * c), (1, 4.0 * c), (2, -c)]);
        for i in 1..n - 1 {
            rows.push(vec![(i - 1, -c), (i + 1, c)]);
        }
        rows.push(vec![(n - 3, c), (n - 2, -4.0 * c), (n - 1, 3.0 * c)]);
        LineOp { rows }
    }

    /// Second-order second derivative.
    pub fn second_derivative(n: usize, h: f64) -> Self {
        let c = 1.0 / (h * h);
        let mut rows = Vec::with_capacity(n);
        rows.push(vec![(0, 2.0 * c), (1, -5.0 * c), (2, 4.0 * c), (3, -c)]);
        for i in 1..n - 1 {
            rows.push(vec![(i - 1, c), (i, -2.0 * c), (i + 1, c)]);
        }
        rows.push(vec![
            (n - 4, -c),
            (n - 3, 4.0 * c),
            (n - 2, -5.0 * c),
            (n - 1, 2.0 * c),
        ]);
        LineOp { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.rows.len()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                rows[j].push((i, w));
            }
        }
        LineOp { rows }
    }

    pub fn apply_line(&self, input: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, w)| w * input[j]).sum())
            .collect()
    }

    /// Applies the operator along `axis` of a full grid array.
    pub fn apply_along(&self, grid: &Grid3, axis: usize, input: &[f64]) -> Vec<f64> {
        let n = grid.dims();
        debug_assert_eq!(self.rows.len(), n[axis]);
        debug_assert_eq!(input.len(), grid.len());
        let stride = [1, n[0], n[0] * n[1]][axis];
        let slab = grid.slab_len();
        let mut out = vec![0.0; grid.len()];
        par::for_each_slab(&mut out, slab, |k, chunk| {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    let c = [i, j, k][axis];
                    let idx = grid.index(i, j, k);
                    let line0 = idx - c * stride;
                    let mut acc = 0.0;
                    for &(m, w) in &self.rows[c] {
                        acc += w * input[line0 + m * stride];
                    }
                    chunk[i + n[0] * j] = acc;
                }
            }
        });
        out
    }
}

/// The six line operators (D1 and D2 per axis) of a grid, with transposes.
#[derive(Debug, Clone)]
pub struct Stencils {
    grid: Grid3,
    d1: [LineOp; 3],
    d2: [LineOp; 3],
}

impl Stencils {
    pub fn new(grid: &Grid3) -> Self {
        let n = grid.dims();
        let h = grid.spacing();
        Stencils {
            grid: *grid,
            d1: n.map(|m| LineOp::first_derivative(m, h)),
            d2: n.map(|m| LineOp::second_derivative(m, h)),
        }
    }

    pub fn transposed(&self) -> Self {
        Stencils {
            grid: self.grid,
            d1: [0, 1, 2].map(|a| self.d1[a].transpose()),
            d2: [0, 1, 2].map(|a| self.d2[a].transpose()),
        }
    }

    pub fn d1(&self, axis: usize, input: &[f64]) -> Vec<f64> {
        self.d1[axis].apply_along(&self.grid, axis, input)
    }

    pub fn d2(&self, axis: usize, input: &[f64]) -> Vec<f64> {
        self.d2[axis].apply_along(&self.grid, axis, input)
    }
}

/// A scalar sampled on every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField3 {
    grid: Grid3,
    values: Vec<f64>,
}

impl ScalarField3 {
    pub fn new(grid: Grid3, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::precondition(format!(
                "field has {} values, grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::precondition(format!(
                "non-finite field value at index {p}"
            )));
        }
        Ok(ScalarField3 { grid, values })
    }

    pub fn constant(grid: Grid3, value: f64) -> Self {
        ScalarField3 {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(grid: Grid3, f: F) -> Self
    where
        F: Fn([f64; 3]) -> f64 + Sync + Send,
    {
        let values = grid.tabulate(|idx| f(grid.point_at(idx)));
        ScalarField3 { grid, values }
    }

    pub(crate) fn from_raw(grid: Grid3, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField3 { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.grid.index(i, j, k)]
    }

    pub fn map<F: Fn(f64) -> f64 + Sync + Send>(&self, f: F) -> Self {
        let values = self.grid.tabulate(|idx| f(self.values[idx]));
        ScalarField3::from_raw(self.grid, values)
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &ScalarField3, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::precondition("fields live on different grids"));
        }
        let values = self
            .grid
            .tabulate(|idx| a * self.values[idx] + b * other.values[idx]);
        Ok(ScalarField3::from_raw(self.grid, values))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    grid: Grid3,
    values: Vec<Vec3>,
}

impl VectorField3 {
    pub fn new(grid: Grid3, values: Vec<Vec3>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::precondition("vector field length mismatch"));
        }
        Ok(VectorField3 { grid, values })
    }

    #[inline]
    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Vec3] {
        &self.values
    }

    pub fn component(&self, c: usize) -> ScalarField3 {
        ScalarField3::from_raw(self.grid, self.values.iter().map(|v| v[c]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField3 {
    grid: Grid3,
    values: Vec<Sym3>,
}

impl SymTensorField3 {
    pub fn new(grid: Grid3, values: Vec<Sym3>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::precondition("tensor field length mismatch"));
        }
        Ok(SymTensorField3 { grid, values })
    }

    #[inline]
    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Sym3] {
        &self.values
    }

    pub fn component(&self, slot: usize) -> ScalarField3 {
        ScalarField3::from_raw(self.grid, self.values.iter().map(|m| m.0[slot]).collect())
    }
}

fn zip3(grid: &Grid3, a: &[f64], b: &[f64], c: &[f64]) -> Vec<Vec3> {
    grid.tabulate(|idx| [a[idx], b[idx], c[idx]])
}

/// Gradient and Hessian together; the mixed Hessian entries reuse the
/// gradient components.
pub fn derivatives(f: &ScalarField3) -> (VectorField3, SymTensorField3) {
    derivatives_with(&Stencils::new(f.grid()), f)
}

pub(crate) fn derivatives_with(st: &Stencils, f: &ScalarField3) -> (VectorField3, SymTensorField3) {
    let grid = *f.grid();
    let v = f.values();
    let gx = st.d1(0, v);
    let gy = st.d1(1, v);
    let gz = st.d1(2, v);
    let hxx = st.d2(0, v);
    let hyy = st.d2(1, v);
    let hzz = st.d2(2, v);
    let hxy = st.d1(0, &gy);
    let hxz = st.d1(0, &gz);
    let hyz = st.d1(1, &gz);
    let hess = grid.tabulate(|i| Sym3([hxx[i], hyy[i], hzz[i], hxy[i], hxz[i], hyz[i]]));
    let grad = zip3(&grid, &gx, &gy, &gz);
    (
        VectorField3 { grid, values: grad },
        SymTensorField3 { grid, values: hess },
    )
}

pub fn gradient(f: &ScalarField3) -> VectorField3 {
    let st = Stencils::new(f.grid());
    let grid = *f.grid();
    let v = f.values();
    let values = zip3(&grid, &st.d1(0, v), &st.d1(1, v), &st.d1(2, v));
    VectorField3 { grid, values }
}

pub fn hessian(f: &ScalarField3) -> SymTensorField3 {
    derivatives(f).1
}

/// Trace of [`hessian`], summed as `xx + yy + zz`.
pub fn laplacian(f: &ScalarField3) -> ScalarField3 {
    let st = Stencils::new(f.grid());
    let v = f.values();
    let hxx = st.d2(0, v);
    let hyy = st.d2(1, v);
    let hzz = st.d2(2, v);
    let values = f.grid().tabulate(|i| hxx[i] + hyy[i] + hzz[i]);
    ScalarField3::from_raw(*f.grid(), values)
}

/// Gradient of each component of a vector field, as rows `∂_l v_c`.
pub fn vector_gradient(v: &VectorField3) -> Vec<[[f64; 3]; 3]> {
    let grid = *v.grid();
    let st = Stencils::new(&grid);
    let comps: Vec<Vec<[f64; 3]>> = (0..3)
        .map(|c| {
            let s: Vec<f64> = v.values().iter().map(|x| x[c]).collect();
            zip3(&grid, &st.d1(0, &s), &st.d1(1, &s), &st.d1(2, &s))
        })
        .collect();
    grid.tabulate(|i| [comps[0][i], comps[1][i], comps[2][i]])
}

/// Trapezoid-rule integral over the whole box.
pub fn integrate(f: &ScalarField3) -> f64 {
    let v = f.values();
    f.grid().integrate_map(|i| [v[i]])[0]
}

/// Backpropagates cotangents through `(u, ∇u, ∇²u)`.
///
/// Given `bu`, `bg` and `bs` (the partial derivatives of some scalar with
/// respect to every value of `u`, of the discrete gradient and of the stored
/// Hessian components), returns the total derivative with respect to `u`.
pub fn derivative_adjoint(grid: &Grid3, bu: &[f64], bg: &[Vec3], bs: &[Sym3]) -> Vec<f64> {
    let st = Stencils::new(grid).transposed();
    let col = |c: usize| -> Vec<f64> { bg.iter().map(|g| g[c]).collect() };
    let slot = |s: usize| -> Vec<f64> { bs.iter().map(|m| m.0[s]).collect() };
    // H_xy = D1_x g_y, H_xz = D1_x g_z, H_yz = D1_y g_z.
    let from_xy = st.d1(0, &slot(3));
    let from_xz = st.d1(0, &slot(4));
    let from_yz = st.d1(1, &slot(5));
    let gx = col(0);
    let gy: Vec<f64> = col(1).iter().zip(&from_xy).map(|(a, b)| a + b).collect();
    let gz: Vec<f64> = col(2)
        .iter()
        .zip(&from_xz)
        .zip(&from_yz)
        .map(|((a, b), c)| a + b + c)
        .collect();
    let terms = [
        st.d1(0, &gx),
        st.d1(1, &gy),
        st.d1(2, &gz),
        st.d2(0, &slot(0)),
        st.d2(1, &slot(1)),
        st.d2(2, &slot(2)),
    ];
    grid.tabulate(|i| bu[i] + terms.iter().map(|t| t[i]).sum::<f64>())
}
