//! Closure properties of a computed commutant.

use serde::Serialize;

use super::CommutantBasis;
use crate::error::Result;
use crate::matrix::hs_inner;
use crate::CMatrix;

/// Relative distance of `x` from the span of an orthonormal `basis`.
pub fn span_residual(x: &CMatrix, basis: &[CMatrix]) -> Result<f64> {
    let norm = x.frobenius_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let mut r = x.clone();
    for b in basis {
        r.axpy(-hs_inner(b, x)?, b)?;
    }
    Ok(r.frobenius_norm() / norm)
}

/// Worst span residuals of `I`, every `Bᵢ†` and every product `BᵢBⱼ`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AlgebraReport {
    pub identity_residual: f64,
    pub adjoint_residual: f64,
    pub product_residual: f64,
}

pub fn algebra_report(b: &CommutantBasis) -> Result<AlgebraReport> {
    let basis = &b.basis;
    let identity_residual = span_residual(&CMatrix::identity(b.total_dim), basis)?;
    let mut adjoint_residual = 0.0f64;
    let mut product_residual = 0.0f64;
    for x in basis {
        adjoint_residual = adjoint_residual.max(span_residual(&x.adjoint(), basis)?);
        for y in basis {
            product_residual = product_residual.max(span_residual(&x.matmul(y)?, basis)?);
        }
    }
    Ok(AlgebraReport { identity_residual, adjoint_residual, product_residual })
}
