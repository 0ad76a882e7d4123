//! Joint kernels of stacked linear constraints via the spectrum of the Gram
//! operator `H = Σ Aᵢ† Aᵢ`.

use serde::{Deserialize, Serialize};

use super::{hermitian_eig_with_tol, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Rank decision thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankPolicy {
    /// Eigenvalues of `H` at or below `rel_tol · λ_max` count as zero.
    pub rel_tol: f64,
    /// Minimum ratio between the smallest kept and the largest discarded eigenvalue.
    pub min_gap: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        Self { rel_tol: 1e-10, min_gap: 1e6 }
    }
}

/// Orthonormal kernel basis plus the spectral diagnostics behind the rank decision.
#[derive(Clone, Debug)]
pub struct Nullspace<T: Real> {
    /// Kernel vectors, each of length `unknowns`.
    pub basis: Vec<Vec<Cx<T>>>,
    pub gap: T,
    pub threshold: T,
    /// Ascending spectrum of the Gram operator restricted to the support.
    pub gram_eigenvalues: Vec<T>,
}

impl<T: Real> Nullspace<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Accumulates `Σ Aᵢ† Aᵢ` over constraint blocks, optionally restricted to a
/// subset of the unknowns that is known a priori to contain the kernel.
#[derive(Clone, Debug)]
pub struct GramAccumulator<T: Real> {
    unknowns: usize,
    support: Vec<usize>,
    gram: Matrix<T>,
    blocks: usize,
}

impl<T: Real> GramAccumulator<T> {
    pub fn new(unknowns: usize) -> Self {
        Self::with_support(unknowns, (0..unknowns).collect()).expect("full support is valid")
    }

    /// Only unknowns listed in `support` may be nonzero; the rest are pinned to zero.
    pub fn with_support(unknowns: usize, support: Vec<usize>) -> Result<Self> {
        if support.iter().any(|&s| s >= unknowns) || support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadParams("support must be strictly increasing and within range".into()));
        }
        let s = support.len();
        Ok(Self { unknowns, support, gram: Matrix::zeros(s, s), blocks: 0 })
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn gram(&self) -> &Matrix<T> {
        &self.gram
    }

    /// Adds `A† A` for an explicit constraint block `A` with `unknowns` columns.
    pub fn add_rows(&mut self, a: &Matrix<T>) -> Result<()> {
        if a.cols() != self.unknowns {
            return Err(Error::DimensionMismatch {
                op: "joint_nullspace",
                left: (a.rows(), a.cols()),
                right: (0, self.unknowns),
            });
        }
        let s = self.support.len();
        let mut restricted = vec![Cx::new(T::zero(), T::zero()); s];
        for r in 0..a.rows() {
            let row = a.row(r);
            for (dst, &col) in restricted.iter_mut().zip(&self.support) {
                *dst = row[col];
            }
            for (i, ri) in restricted.iter().enumerate() {
                if ri.re == T::zero() && ri.im == T::zero() {
                    continue;
                }
                let ci = ri.conj();
                let out = &mut self.gram.as_mut_slice()[i * s..(i + 1) * s];
                for (o, rj) in out.iter_mut().zip(&restricted) {
                    *o = *o + ci * rj;
                }
            }
        }
        self.blocks += 1;
        Ok(())
    }

    /// Adds the commutator constraint `gW − Wg = 0` for a `D × D` generator,
    /// where the unknowns are the column-stacked entries of `W` (so
    /// `unknowns == D²`). The constraint operator is `I⊗g − gᵀ⊗I`; for unitary
    /// `g` its Gram block has the closed form `2I − gᵀ⊗g† − ḡ⊗g`.
    pub fn add_commutator(&mut self, g: &Matrix<T>) -> Result<()> {
        let d = g.rows();
        if !g.is_square() || d * d != self.unknowns {
            return Err(Error::DimensionMismatch { op: "add_commutator", left: g.shape(), right: (self.unknowns, 1) });
        }
        if g.unitarity_defect() > T::lit(1e-12) * T::lit(d as f64).sqrt().max(T::one()) * T::lit(10.0) {
            let op = super::kron(&Matrix::identity(d), g)?.sub(&super::kron(&g.transpose(), &Matrix::identity(d))?)?;
            return self.add_rows(&op);
        }
        let s = self.support.len();
        let two = T::lit(2.0);
        let coords: Vec<(usize, usize)> = self.support.iter().map(|&k| (k % d, k / d)).collect();
        let gram = self.gram.as_mut_slice();
        for (i, &(r1, c1)) in coords.iter().enumerate() {
            let out = &mut gram[i * s..(i + 1) * s];
            for (o, &(r2, c2)) in out.iter_mut().zip(&coords) {
                // (gᵀ⊗g†)[(r1,c1),(r2,c2)] = g[c2,c1]·conj(g[r2,r1]); the ḡ⊗g term is its adjoint.
                let t1 = g[(c2, c1)] * g[(r2, r1)].conj();
                let t2 = g[(c1, c2)].conj() * g[(r1, r2)];
                let mut v = -(t1 + t2);
                if r1 == r2 && c1 == c2 {
                    v.re = v.re + two;
                }
                *o = *o + v;
            }
        }
        self.blocks += 1;
        Ok(())
    }

    /// Extracts the kernel; vectors are embedded back into the full unknown space.
    pub fn kernel(&self, policy: &RankPolicy) -> Result<Nullspace<T>> {
        let s = self.support.len();
        // Accumulated round-off can leave the Gram matrix a hair off Hermitian.
        let spectrum = hermitian_eig_with_tol(&self.gram, T::lit(1e-8))?;
        let evals = spectrum.eigenvalues.clone();
        let lambda_max = evals.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
        let eps = T::epsilon();
        let cap = T::one() / eps;

        let (kernel_idx, gap, threshold) = if lambda_max <= T::min_positive_value() {
            ((0..s).collect::<Vec<_>>(), cap, T::zero())
        } else {
            let tau = T::lit(policy.rel_tol) * lambda_max;
            let floor = eps * lambda_max;
            let kernel: Vec<usize> = (0..s).filter(|&i| evals[i] <= tau).collect();
            let discarded = kernel.iter().map(|&i| evals[i]).fold(floor, T::max);
            let retained = (0..s).filter(|&i| evals[i] > tau).map(|i| evals[i]).fold(T::infinity(), T::min);
            let gap = if retained.is_finite() { (retained / discarded).min(cap) } else { cap };
            (kernel, gap, tau)
        };
        if gap < T::lit(policy.min_gap) {
            return Err(Error::AmbiguousRank { gap: gap.to_f64_lossy(), required: policy.min_gap });
        }
        let basis = kernel_idx
            .iter()
            .map(|&k| {
                let mut full = vec![Cx::new(T::zero(), T::zero()); self.unknowns];
                for (row, &dst) in self.support.iter().enumerate() {
                    full[dst] = spectrum.eigenvectors[(row, k)];
                }
                full
            })
            .collect();
        Ok(Nullspace { basis, gap, threshold, gram_eigenvalues: evals })
    }
}

/// Orthonormal basis of the common kernel of the given constraint blocks.
pub fn joint_nullspace<T: Real>(constraint_rows: &[Matrix<T>], policy: &RankPolicy) -> Result<Nullspace<T>> {
    let cols = constraint_rows
        .first()
        .map(Matrix::cols)
        .ok_or_else(|| Error::BadParams("at least one constraint block required".into()))?;
    let mut acc = GramAccumulator::new(cols);
    for block in constraint_rows {
        acc.add_rows(block)?;
    }
    acc.kernel(policy)
}
