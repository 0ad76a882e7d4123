//! Numerical commutants of tensor-word unitary symmetries.
//!
//! Given a word such as `U,U,U^H` (the operator `U ⊗ U ⊗ U†`), the crate
//! computes a Hilbert–Schmidt orthonormal basis of every matrix `W` with
//! `g W g† = W` for all instantiations `g`, recognises the basis against
//! named operators (identity, swap, `Ω`, permutation operators, `M⊗M`),
//! checks block-structure statements, twirls matrices onto the commutant and
//! maps positivity cones of `x·I + y·B` families.
//!
//! The dense kernels in [`matrix`], [`symmetry`] and [`closed_forms`] are
//! generic over [`Real`] (`f32` or `f64`); the commutant solver and twirl,
//! whose tolerances are pinned in double precision, work on [`CMatrix`].

pub mod closed_forms;
pub mod commutant;
pub mod error;
pub mod matrix;
pub mod scalar;
pub mod symmetry;
pub mod twirl;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

/// Double-precision complex matrix, the workhorse type of the crate.
pub type CMatrix = matrix::Matrix<f64>;
/// Single-precision complex matrix.
pub type CMatrix32 = matrix::Matrix<f32>;
/// Double-precision spectrum.
pub type Spectrum = matrix::Spectrum<f64>;
/// Complex double.
pub type C64 = Cx<f64>;
