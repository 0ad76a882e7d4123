//! Projection onto a commutant: Monte-Carlo Haar averaging and exact
//! projection onto a computed orthonormal basis.
//!
//! When the instantiations of a word do not form a group (`U ⊗ U†` is not
//! multiplicative in `U`), the plain average `E[gWg†]` is a contraction whose
//! fixed points are the commutant but which is not the orthogonal projection.
//! The instantiation set is closed under inverses, so the average over products
//! of `m` independent instantiations is the `m`-th power of that contraction
//! and converges geometrically to the projection. Each MC term therefore
//! conjugates by such a product.

use rayon::prelude::*;
use serde::Serialize;

use crate::commutant::CommutantBasis;
use crate::error::{Error, Result};
use crate::matrix::hs_inner;
use crate::scalar::CompensatedSum;
use crate::symmetry::{instantiate_word, sample_assignment, StreamDomain, SymmetryWord};
use crate::{CMatrix, C64};

/// Terms evaluated per parallel batch; the reduction itself is sequential.
const BATCH: usize = 64;

/// Product length for words whose instantiations are not closed under
/// multiplication. The subleading eigenvalue of one averaging step is about
/// `1/(n²−1)`, so 32 steps leave a bias far below double precision at `n ≥ 2`.
pub const WALK_DEPTH: usize = 32;

/// 1 if the instantiations already form a group (each variable enters only
/// through `U`, `U*` or only through `Uᵀ`, `U†`), else [`WALK_DEPTH`].
pub fn twirl_depth(word: &SymmetryWord) -> usize {
    use crate::matrix::Modifier::*;
    let group_image = word.vars().keys().all(|v| {
        let mods: Vec<_> = word.factors().iter().filter(|f| &f.var == v).map(|f| f.modifier).collect();
        mods.iter().all(|m| matches!(m, Id | Conj)) || mods.iter().all(|m| matches!(m, Transpose | ConjTranspose))
    });
    if group_image {
        1
    } else {
        WALK_DEPTH
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TwirlResult {
    pub output: CMatrix,
    pub n_samples: usize,
    /// Instantiations multiplied per term.
    pub depth: usize,
    pub trace_in: [f64; 2],
    pub trace_out: [f64; 2],
    /// `‖MC − exact‖_F` when a basis was supplied.
    pub mc_error: Option<f64>,
}

/// Running compensated sum of `g W g†` over Twirl-domain samples `0, 1, …`.
struct TwirlSum<'a> {
    w: &'a CMatrix,
    word: &'a SymmetryWord,
    seed: u64,
    depth: usize,
    acc: Vec<CompensatedSum<f64>>,
    count: usize,
}

impl<'a> TwirlSum<'a> {
    fn new(w: &'a CMatrix, word: &'a SymmetryWord, seed: u64, depth: usize) -> Result<Self> {
        let d = word.total_dim();
        if w.shape() != (d, d) {
            return Err(Error::DimensionMismatch { op: "mc_twirl", left: w.shape(), right: (d, d) });
        }
        if depth == 0 {
            return Err(Error::BadParams("twirl depth must be positive".into()));
        }
        Ok(Self { w, word, seed, depth, acc: vec![CompensatedSum::new(); d * d], count: 0 })
    }

    fn extend_to(&mut self, n: usize) -> Result<()> {
        while self.count < n {
            let end = (self.count + BATCH).min(n);
            let terms: Vec<CMatrix> =
                (self.count..end).into_par_iter().map(|i| self.w.conjugate_by(&self.generator(i)?)).collect::<Result<_>>()?;
            for t in &terms {
                for (a, &v) in self.acc.iter_mut().zip(t.as_slice()) {
                    a.add(v);
                }
            }
            self.count = end;
        }
        Ok(())
    }

    fn generator(&self, i: usize) -> Result<CMatrix> {
        let mut g: Option<CMatrix> = None;
        for j in 0..self.depth {
            let sample = (i * self.depth + j) as u64;
            let h = instantiate_word(self.word, &sample_assignment(self.word, self.seed, StreamDomain::Twirl, sample))?;
            g = Some(match g {
                None => h,
                Some(g) => g.matmul(&h)?,
            });
        }
        Ok(g.expect("depth >= 1"))
    }

    fn mean(&self) -> CMatrix {
        let d = self.w.rows();
        let inv = 1.0 / self.count as f64;
        CMatrix::from_fn(d, d, |r, c| self.acc[r * d + c].value() * inv)
    }
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// `(1/N) Σ gᵢ W gᵢ†` over independent Haar assignments of the word.
pub fn mc_twirl(w: &CMatrix, word: &SymmetryWord, n_samples: usize, seed: u64) -> Result<TwirlResult> {
    mc_twirl_against(w, word, n_samples, seed, None)
}

/// As [`mc_twirl`] with an explicit product length per term.
pub fn mc_twirl_with_depth(w: &CMatrix, word: &SymmetryWord, n_samples: usize, seed: u64, depth: usize) -> Result<TwirlResult> {
    twirl_impl(w, word, n_samples, seed, depth, None)
}

/// As [`mc_twirl`], also reporting the distance to the exact projection onto `basis`.
pub fn mc_twirl_against(
    w: &CMatrix,
    word: &SymmetryWord,
    n_samples: usize,
    seed: u64,
    basis: Option<&CommutantBasis>,
) -> Result<TwirlResult> {
    twirl_impl(w, word, n_samples, seed, twirl_depth(word), basis)
}

fn twirl_impl(
    w: &CMatrix,
    word: &SymmetryWord,
    n_samples: usize,
    seed: u64,
    depth: usize,
    basis: Option<&CommutantBasis>,
) -> Result<TwirlResult> {
    if n_samples == 0 {
        return Err(Error::BadParams("at least one twirl sample is required".into()));
    }
    let mut sum = TwirlSum::new(w, word, seed, depth)?;
    sum.extend_to(n_samples)?;
    let output = sum.mean();
    let mc_error = basis.map(|b| exact_project(w, b).and_then(|p| output.distance(&p))).transpose()?;
    Ok(TwirlResult { trace_in: pair(w.trace()), trace_out: pair(output.trace()), output, n_samples, depth, mc_error })
}

/// Orthogonal projection `Σᵢ ⟨Bᵢ, W⟩ Bᵢ` onto the span of an orthonormal basis.
pub fn exact_project(w: &CMatrix, b: &CommutantBasis) -> Result<CMatrix> {
    let d = b.total_dim;
    if w.shape() != (d, d) {
        return Err(Error::DimensionMismatch { op: "exact_project", left: w.shape(), right: (d, d) });
    }
    let mut out = CMatrix::zeros(d, d);
    for e in &b.basis {
        out.axpy(hs_inner(e, w)?, e)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub n: usize,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub points: Vec<ConvergencePoint>,
    /// Least-squares slope of `ln error` against `ln N`; `None` when every error is below the floor.
    pub slope: Option<f64>,
    pub note: Option<String>,
}

/// Errors below this are treated as exact zeros.
pub const ERROR_FLOOR: f64 = 1e-10;

/// MC-vs-exact error along an ascending schedule (nested sample prefixes).
pub fn convergence_report(
    w: &CMatrix,
    word: &SymmetryWord,
    b: &CommutantBasis,
    schedule: &[usize],
    seed: u64,
) -> Result<ConvergenceReport> {
    if schedule.len() < 3 || schedule[0] == 0 || schedule.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::BadParams("schedule must be strictly ascending, positive, with at least 3 points".into()));
    }
    let exact = exact_project(w, b)?;
    let mut sum = TwirlSum::new(w, word, seed, twirl_depth(word))?;
    let mut points = Vec::with_capacity(schedule.len());
    for &n in schedule {
        sum.extend_to(n)?;
        points.push(ConvergencePoint { n, error: sum.mean().distance(&exact)? });
    }
    if points.iter().all(|p| p.error < ERROR_FLOOR) {
        return Ok(ConvergenceReport {
            points,
            slope: None,
            note: Some("all errors below 1e-10: input already invariant, slope undefined".into()),
        });
    }
    let note =
        points.iter().any(|p| p.error < ERROR_FLOOR).then(|| "some errors below 1e-10 were clamped for the fit".to_string());
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.error.max(ERROR_FLOOR).ln()).collect();
    Ok(ConvergenceReport { slope: Some(ls_slope(&xs, &ys)), points, note })
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
