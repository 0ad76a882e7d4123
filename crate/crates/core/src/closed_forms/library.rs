use crate::error::{Error, Result};
use crate::matrix::{hs_inner, Matrix};
use crate::scalar::{Cx, Real};
use crate::symmetry::SymmetryWord;

use super::operators::{omega_projector, permutation_operator, Permutation, MAX_TENSOR_FACTORS};

#[derive(Clone, Debug)]
pub struct LibraryEntry<T: Real> {
    pub name: String,
    pub matrix: Matrix<T>,
}

/// Named closed-form operators of a common dimension, used to recognise
/// numerically computed commutant bases.
#[derive(Clone, Debug)]
pub struct OperatorLibrary<T: Real = f64> {
    dim: usize,
    entries: Vec<LibraryEntry<T>>,
}

/// Relative Gram eigenvalue below which library operators count as dependent.
const DEPENDENCE_TOL: f64 = 1e-10;

impl<T: Real> OperatorLibrary<T> {
    pub fn new(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    /// Adds an entry; names must be unique and matrices `dim × dim`.
    pub fn push(&mut self, name: impl Into<String>, matrix: Matrix<T>) -> Result<()> {
        let name = name.into();
        if matrix.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch { op: "library", left: matrix.shape(), right: (self.dim, self.dim) });
        }
        if self.entries.iter().any(|e| e.name == name) {
            return Err(Error::BadParams(format!("duplicate library operator `{name}`")));
        }
        self.entries.push(LibraryEntry { name, matrix });
        Ok(())
    }

    pub fn with(mut self, name: impl Into<String>, matrix: Matrix<T>) -> Result<Self> {
        self.push(name, matrix)?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[LibraryEntry<T>] {
        &self.entries
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Matrix<T>> {
        self.entries.iter().find(|e| e.name == name).map(|e| &e.matrix)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Hilbert–Schmidt Gram matrix `G_ij = ⟨L_i, L_j⟩`.
    pub fn gram(&self) -> Matrix<T> {
        let k = self.entries.len();
        let mut g = Matrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = hs_inner(&self.entries[i].matrix, &self.entries[j].matrix).expect("same dim");
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
        g
    }

    /// Name of the first entry lying (numerically) in the span of the earlier ones.
    pub fn first_dependent(&self) -> Option<&str> {
        let mut ortho: Vec<Matrix<T>> = Vec::new();
        for e in &self.entries {
            let norm = e.matrix.frobenius_norm();
            let mut r = e.matrix.clone();
            for q in &ortho {
                let c = hs_inner(q, &r).expect("same dim");
                r.axpy(-c, q).expect("same dim");
            }
            let rn = r.frobenius_norm();
            if norm == T::zero() || rn <= T::lit(DEPENDENCE_TOL.sqrt()) * norm {
                return Some(&e.name);
            }
            ortho.push(r.scale_real(T::one() / rn));
        }
        None
    }

    /// Drops entries dependent on earlier ones; returns the pruned library and the dropped names.
    pub fn independent(&self) -> (Self, Vec<String>) {
        let mut kept = Self::new(self.dim);
        let mut dropped = Vec::new();
        for e in &self.entries {
            let mut trial = kept.clone();
            trial.entries.push(e.clone());
            if trial.first_dependent().is_some() {
                dropped.push(e.name.clone());
            } else {
                kept = trial;
            }
        }
        (kept, dropped)
    }

    /// `{I, F, Ω}` on `ℂⁿ ⊗ ℂⁿ`.
    pub fn two_factor(n: usize) -> Result<Self> {
        Self::new(n * n)
            .with("I", Matrix::identity(n * n))?
            .with("F", permutation_operator(&Permutation::from_images(vec![1, 0])?, n)?)?
            .with("Omega", omega_projector(n)?)
    }

    /// Identity plus every permutation operator of the word's tensor slots
    /// (and `Ω` for two slots), pruned to an independent set. Words with
    /// unequal local dimensions or too many slots only get the identity.
    pub fn for_word(word: &SymmetryWord) -> Result<(Self, Vec<String>)> {
        let d = word.total_dim();
        let mut lib = Self::new(d).with("I", Matrix::identity(d))?;
        let k = word.factors().len();
        if let Some(n) = word.uniform_dim().filter(|_| (2..=MAX_TENSOR_FACTORS).contains(&k)) {
            for p in Permutation::all(k).into_iter().filter(|p| !p.is_identity()) {
                lib.push(permutation_label(&p), permutation_operator(&p, n)?)?;
            }
            if k == 2 {
                lib.push("Omega", omega_projector(n)?)?;
            }
        }
        Ok(lib.independent())
    }

    /// Least-squares coefficients of `b` in the library span and the relative residual.
    pub(crate) fn fit(&self, b: &Matrix<T>, gram_inv: &Matrix<T>) -> Result<(Vec<Cx<T>>, T)> {
        let rhs: Vec<Cx<T>> = self.entries.iter().map(|e| hs_inner(&e.matrix, b)).collect::<Result<_>>()?;
        let coeffs = gram_inv.apply(&rhs)?;
        let mut resid = b.clone();
        for (c, e) in coeffs.iter().zip(&self.entries) {
            resid.axpy(-*c, &e.matrix)?;
        }
        let norm = b.frobenius_norm();
        let rel = if norm > T::zero() { resid.frobenius_norm() / norm } else { T::zero() };
        Ok((coeffs, rel))
    }
}

/// `F` and `F⊗I` for the slot swaps they represent, cycle notation otherwise.
pub(crate) fn permutation_label(p: &Permutation) -> String {
    match (p.len(), p.cycle_notation().as_str()) {
        (2, "(1 2)") => "F".into(),
        (3, "(1 2)") => "F⊗I".into(),
        (k, c) => format!("S{k}{c}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::m_tensor_m;
    use crate::symmetry::parse_word;
    use crate::CMatrix;
    use std::collections::BTreeMap;

    #[test]
    fn rejects_duplicates_and_bad_dims() {
        let mut lib = OperatorLibrary::<f64>::new(4);
        lib.push("I", CMatrix::identity(4)).unwrap();
        assert!(lib.push("I", CMatrix::identity(4)).is_err());
        assert!(lib.push("J", CMatrix::identity(3)).is_err());
    }

    #[test]
    fn span_identity_for_two_qubits() {
        // {I, F, Ω} are independent; M⊗M is Ω − F.
        let lib = OperatorLibrary::<f64>::two_factor(2).unwrap();
        assert!(lib.first_dependent().is_none());
        let with_mm = lib.clone().with("M⊗M", m_tensor_m()).unwrap();
        assert_eq!(with_mm.first_dependent(), Some("M⊗M"));
        let (pruned, dropped) = with_mm.independent();
        assert_eq!(pruned.len(), 3);
        assert_eq!(dropped, vec!["M⊗M".to_string()]);
    }

    #[test]
    fn word_library_prunes_dependent_permutations() {
        let dims = BTreeMap::from([("U".to_string(), 2)]);
        let w = parse_word("U,U,U", &dims, &BTreeMap::new()).unwrap();
        let (lib, dropped) = OperatorLibrary::<f64>::for_word(&w).unwrap();
        // S₃ acting on (ℂ²)^{⊗3} spans a 5-dimensional algebra.
        assert_eq!(lib.len(), 5);
        assert_eq!(dropped.len(), 1);
        assert!(lib.get("F⊗I").is_some());

        let dims = BTreeMap::from([("U".to_string(), 2), ("V".to_string(), 3)]);
        let w = parse_word("U,V", &dims, &BTreeMap::new()).unwrap();
        let (lib, _) = OperatorLibrary::<f64>::for_word(&w).unwrap();
        assert_eq!(lib.names(), vec!["I"]);
    }
}
