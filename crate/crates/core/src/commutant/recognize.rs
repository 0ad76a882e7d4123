//! Fitting commutant bases against named operators.

use serde::Serialize;

use super::CommutantBasis;
use crate::closed_forms::OperatorLibrary;
use crate::error::{Error, Result};
use crate::matrix::hermitian_eig;
use crate::{CMatrix, C64};

/// Fit residual below which an element counts as recognised.
pub const FIT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ExactSpan,
    Partial,
    Unrecognized,
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementFit {
    /// `(operator, [re, im])` in library order.
    pub terms: Vec<(String, [f64; 2])>,
    /// `‖B − Σ cᵢ Lᵢ‖_F / ‖B‖_F`.
    pub residual: f64,
}

impl ElementFit {
    pub fn coefficient(&self, name: &str) -> Option<C64> {
        self.terms.iter().find(|(n, _)| n == name).map(|(_, c)| C64::new(c[0], c[1]))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RecognitionReport {
    pub library: Vec<String>,
    pub elements: Vec<ElementFit>,
    pub verdict: Verdict,
    /// Relative distance of each library operator from the commutant span.
    pub library_residuals: Vec<(String, f64)>,
    /// Every library operator lies in the commutant.
    pub library_covered: bool,
    /// Exact span and full coverage: the library spans the commutant exactly.
    pub span_equal: bool,
}

pub fn recognize_basis(b: &CommutantBasis, lib: &OperatorLibrary) -> Result<RecognitionReport> {
    recognize_elements(&b.basis, lib)
}

/// Least-squares fit of each (orthonormal) element in the library span.
pub fn recognize_elements(basis: &[CMatrix], lib: &OperatorLibrary) -> Result<RecognitionReport> {
    if let Some(b) = basis.iter().find(|b| b.shape() != (lib.dim(), lib.dim())) {
        return Err(Error::DimensionMismatch { op: "recognize_basis", left: b.shape(), right: (lib.dim(), lib.dim()) });
    }
    if lib.is_empty() {
        return Err(Error::BadParams("empty operator library".into()));
    }
    if let Some(op) = lib.first_dependent() {
        return Err(Error::SingularGram { operator: op.to_string() });
    }
    let gram_inv = hermitian_inverse(&lib.gram())?;

    let mut elements = Vec::with_capacity(basis.len());
    for b in basis {
        let (coeffs, residual) = lib.fit(b, &gram_inv)?;
        let terms = lib.names().into_iter().zip(coeffs).map(|(n, c)| (n.to_string(), [c.re, c.im])).collect();
        elements.push(ElementFit { terms, residual });
    }
    let hits = elements.iter().filter(|e| e.residual < FIT_TOL).count();
    let verdict = match hits {
        h if h == elements.len() && h > 0 => Verdict::ExactSpan,
        0 => Verdict::Unrecognized,
        _ => Verdict::Partial,
    };

    let library_residuals: Vec<(String, f64)> =
        lib.entries().iter().map(|e| Ok((e.name.clone(), super::span_residual(&e.matrix, basis)?))).collect::<Result<_>>()?;
    let library_covered = library_residuals.iter().all(|(_, r)| *r < FIT_TOL);
    Ok(RecognitionReport {
        library: lib.names().into_iter().map(String::from).collect(),
        elements,
        verdict,
        library_residuals,
        library_covered,
        span_equal: verdict == Verdict::ExactSpan && library_covered,
    })
}

fn hermitian_inverse(g: &CMatrix) -> Result<CMatrix> {
    let spec = hermitian_eig(g)?;
    let n = g.rows();
    Ok(CMatrix::from_fn(n, n, |r, c| {
        (0..n).map(|k| spec.eigenvectors[(r, k)] * spec.eigenvectors[(c, k)].conj() / spec.eigenvalues[k]).sum()
    }))
}
