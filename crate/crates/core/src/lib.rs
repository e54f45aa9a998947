//! Phase-field approximation of the Helfrich bending energy on uniform 3D grids.
//!
//! The crate evaluates the diffuse-interface functionals `P_eps`, `H_eps`,
//! `K_eps` and `W_eps` on sampled scalar fields, builds recovery fields
//! `u_eps = gamma_eps(d)` for benchmark implicit surfaces, compares the
//! results against exact sharp-interface Helfrich energies, and minimizes a
//! penalty-constrained version of the augmented diffuse energy.
//!
//! Module map:
//!
//! * [`grid`]: uniform grid, sampled fields, finite-difference calculus and
//!   deterministic reductions.
//! * [`tensor`]: symmetric 3x3 matrices.
//! * [`energy`]: pointwise densities and integral functionals.
//! * [`geometry`]: benchmark surfaces with exact distance and curvature.
//! * [`recovery`]: the glued transition profile and recovery fields.
//! * [`experiments`]: epsilon sweeps and diagnostics.
//! * [`minimize`]: penalty-constrained gradient descent.
//! * [`io`]: configuration, CSV and VTK.
//!
//! With the default `parallel` feature, grid kernels run on rayon over
//! z-slabs. Without it everything runs sequentially. Reductions use a fixed
//! pairwise tree, so results are bit-identical in both modes.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose, and the
// tensor algebra reads better with explicit index loops.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod energy;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod minimize;
mod par;
pub mod quadrature;
pub mod recovery;
pub mod tensor;

pub use energy::{EnergyReport, HelfrichParams, PhaseField, PhaseParams};
pub use error::{Error, Result};
pub use geometry::{ImplicitSurface, Orientation, SurfaceKind};
pub use grid::{Grid3, ScalarField3, SymTensorField3, VectorField3};
pub use recovery::RecoveryProfile;
pub use tensor::Sym3;
