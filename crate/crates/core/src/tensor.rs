//! Symmetric 3x3 matrices and the small amount of vector algebra the
//! curvature formulas need.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Tolerance on `|P^2 - P|` accepted by [`project`].
pub const IDEMPOTENCY_TOL: f64 = 1e-12;

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Symmetric 3x3 matrix stored as its six independent components in the
/// order `[xx, yy, zz, xy, xz, yz]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym3(pub [f64; 6]);

/// Maps `(i, j)` to the storage slot of component `m_ij`.
#[inline]
pub const fn slot(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) | (1, 0) => 3,
        (0, 2) | (2, 0) => 4,
        _ => 5,
    }
}

impl Sym3 {
    pub const ZERO: Sym3 = Sym3([0.0; 6]);
    pub const IDENTITY: Sym3 = Sym3([1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);

    pub fn new(xx: f64, yy: f64, zz: f64, xy: f64, xz: f64, yz: f64) -> Self {
        Sym3([xx, yy, zz, xy, xz, yz])
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Sym3([a, b, c, 0.0, 0.0, 0.0])
    }

    /// `v ⊗ v`.
    pub fn outer(v: Vec3) -> Self {
        Sym3([
            v[0] * v[0],
            v[1] * v[1],
            v[2] * v[2],
            v[0] * v[1],
            v[0] * v[2],
            v[1] * v[2],
        ])
    }

    /// `Id - v ⊗ v`, the orthogonal projector onto `v^⊥` when `|v| = 1`.
    pub fn complement_projector(v: Vec3) -> Self {
        Sym3::IDENTITY - Sym3::outer(v)
    }

    /// Builds a symmetric matrix from a full one, averaging the off-diagonal
    /// pairs.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Self {
        Sym3([
            m[0][0],
            m[1][1],
            m[2][2],
            0.5 * (m[0][1] + m[1][0]),
            0.5 * (m[0][2] + m[2][0]),
            0.5 * (m[1][2] + m[2][1]),
        ])
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[slot(i, j)]
    }

    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        let m = &self.0;
        [[m[0], m[3], m[4]], [m[3], m[1], m[5]], [m[4], m[5], m[2]]]
    }

    #[inline]
    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    /// `tr(Mᵀ M) = Σ m_ij²`.
    #[inline]
    pub fn frobenius_sq(&self) -> f64 {
        let m = &self.0;
        m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + 2.0 * (m[3] * m[3] + m[4] * m[4] + m[5] * m[5])
    }

    /// Sum of the three principal 2x2 minors.
    #[inline]
    pub fn minor_sum(&self) -> f64 {
        let m = &self.0;
        (m[0] * m[1] - m[3] * m[3]) + (m[0] * m[2] - m[4] * m[4]) + (m[1] * m[2] - m[5] * m[5])
    }

    /// `½[(tr M)² − |M|²]`; algebraically equal to [`Sym3::minor_sum`].
    #[inline]
    pub fn minor_sum_from_invariants(&self) -> f64 {
        let t = self.trace();
        0.5 * (t * t - self.frobenius_sq())
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0] * (m[1] * m[2] - m[5] * m[5]) - m[3] * (m[3] * m[2] - m[5] * m[4])
            + m[4] * (m[3] * m[5] - m[1] * m[4])
    }

    #[inline]
    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        let m = &self.0;
        [
            m[0] * v[0] + m[3] * v[1] + m[4] * v[2],
            m[3] * v[0] + m[1] * v[1] + m[5] * v[2],
            m[4] * v[0] + m[5] * v[1] + m[2] * v[2],
        ]
    }

    /// `vᵀ M v`.
    #[inline]
    pub fn quad_form(&self, v: Vec3) -> f64 {
        dot(v, self.mul_vec(v))
    }

    /// Frobenius inner product `A : B`.
    #[inline]
    pub fn contract(&self, other: &Sym3) -> f64 {
        let a = &self.0;
        let b = &other.0;
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + 2.0 * (a[3] * b[3] + a[4] * b[4] + a[5] * b[5])
    }

    /// Full matrix product `self · other` (not symmetric in general).
    pub fn matmul(&self, other: &Sym3) -> [[f64; 3]; 3] {
        let a = self.to_matrix();
        let b = other.to_matrix();
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        out
    }

    /// Largest absolute entry of `self² − self`.
    pub fn idempotency_defect(&self) -> f64 {
        let sq = self.matmul(self);
        let m = self.to_matrix();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((sq[i][j] - m[i][j]).abs());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Add for Sym3 {
    type Output = Sym3;
    fn add(self, rhs: Sym3) -> Sym3 {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Sym3(out)
    }
}

impl AddAssign for Sym3 {
    fn add_assign(&mut self, rhs: Sym3) {
        *self = *self + rhs;
    }
}

impl Sub for Sym3 {
    type Output = Sym3;
    fn sub(self, rhs: Sym3) -> Sym3 {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o -= r;
        }
        Sym3(out)
    }
}

impl Neg for Sym3 {
    type Output = Sym3;
    fn neg(self) -> Sym3 {
        self * -1.0
    }
}

impl Mul<f64> for Sym3 {
    type Output = Sym3;
    fn mul(self, s: f64) -> Sym3 {
        Sym3(self.0.map(|v| v * s))
    }
}

pub fn frobenius_sq(m: &Sym3) -> f64 {
    m.frobenius_sq()
}

pub fn minor_sum(m: &Sym3) -> f64 {
    m.minor_sum()
}

/// `Pᵀ M P` for an orthogonal projector `P`.
pub fn project(p: &Sym3, m: &Sym3) -> Result<Sym3> {
    let defect = p.idempotency_defect();
    if !(defect <= IDEMPOTENCY_TOL) {
        return Err(Error::precondition(format!(
            "projection matrix is not idempotent (|P² − P| = {defect:.3e})"
        )));
    }
    Ok(project_unchecked(p, m))
}

/// `Pᵀ M P` without the idempotency check.
pub fn project_unchecked(p: &Sym3, m: &Sym3) -> Sym3 {
    let mp = m.matmul(p);
    let pm = p.to_matrix();
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| pm[k][i] * mp[k][j]).sum();
        }
    }
    Sym3::from_matrix(out)
}
