//! Block-structure checks for the words `U,U^H` and `U,U,U^H`.
//!
//! Two factors, `W` cut into `n × n` blocks of size `n`: off-diagonal blocks
//! vanish and every diagonal block is the same multiple of `I_n`.
//!
//! Three factors, `W` cut into `n × n` blocks of size `n²`: block `(i, j)`
//! equals `x·δᵢⱼ·I_{n²} + y·E_ji ⊗ I_n`. In particular `W₁₁ = diag(x+y, x, …, x) ⊗ I_n`
//! and in `W₁₂` only the `(2,1)` sub-block, `y·I_n`, is nonzero.

use serde::Serialize;

use super::CommutantBasis;
use crate::error::{BlockOffense, Error, Result};
use crate::matrix::{kron, Matrix, Modifier};
use crate::symmetry::SymmetryWord;
use crate::{CMatrix, C64};

pub const BLOCK_TOL: f64 = 1e-9;

/// Row-major grid of the `outer × outer` blocks of `w`.
pub fn block_partition(w: &CMatrix, outer: usize) -> Result<Vec<Vec<CMatrix>>> {
    if !w.is_square() || outer == 0 || !w.rows().is_multiple_of(outer) {
        return Err(Error::DimensionMismatch { op: "block_partition", left: w.shape(), right: (outer, outer) });
    }
    let size = w.rows() / outer;
    Ok((0..outer).map(|i| (0..outer).map(|j| w.block(i, j, size)).collect()).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementBlocks {
    pub element: usize,
    /// `[c]` for two factors, `[x, y]` for three; each as `[re, im]`.
    pub coefficients: Vec<[f64; 2]>,
    /// Largest block deviation relative to `max(1, ‖W‖_F)`.
    pub max_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockReport {
    pub word: String,
    pub n: usize,
    pub elements: Vec<ElementBlocks>,
}

#[derive(Clone, Copy, PartialEq)]
enum Shape {
    TwoFactor,
    ThreeFactor,
}

fn classify(word: &SymmetryWord) -> Result<(Shape, usize)> {
    let unsupported = || Error::UnsupportedWord(word.to_string());
    let (_, n) = word.single_unitary_var().ok_or_else(unsupported)?;
    let mods: Vec<Modifier> = word.factors().iter().map(|f| f.modifier).collect();
    match mods.as_slice() {
        [Modifier::Id, Modifier::ConjTranspose] => Ok((Shape::TwoFactor, n)),
        [Modifier::Id, Modifier::Id, Modifier::ConjTranspose] => Ok((Shape::ThreeFactor, n)),
        _ => Err(unsupported()),
    }
}

pub fn verify_block_structure(b: &CommutantBasis) -> Result<BlockReport> {
    verify_block_elements(&b.word, &b.basis)
}

/// Checks every element; all offending blocks are collected before failing.
pub fn verify_block_elements(word: &SymmetryWord, elements: &[CMatrix]) -> Result<BlockReport> {
    let (shape, n) = classify(word)?;
    let d = word.total_dim();
    let mut offenders = Vec::new();
    let mut out = Vec::with_capacity(elements.len());
    for (e, w) in elements.iter().enumerate() {
        if w.shape() != (d, d) {
            return Err(Error::DimensionMismatch { op: "verify_block_structure", left: w.shape(), right: (d, d) });
        }
        let scale = w.frobenius_norm().max(1.0);
        let (coefficients, deviations) = match shape {
            Shape::TwoFactor => two_factor(w, n)?,
            Shape::ThreeFactor => three_factor(w, n)?,
        };
        let mut worst = 0.0f64;
        for (check, block, dev) in deviations {
            let rel = dev / scale;
            worst = worst.max(rel);
            if rel > BLOCK_TOL {
                offenders.push(BlockOffense { element: e, check: check.to_string(), block, magnitude: dev });
            }
        }
        out.push(ElementBlocks {
            element: e,
            coefficients: coefficients.iter().map(|c| [c.re, c.im]).collect(),
            max_deviation: worst,
        });
    }
    if !offenders.is_empty() {
        return Err(Error::StructureViolation { offenders });
    }
    Ok(BlockReport { word: word.to_string(), n, elements: out })
}

type Deviations = Vec<(&'static str, (usize, usize), f64)>;

fn two_factor(w: &CMatrix, n: usize) -> Result<(Vec<C64>, Deviations)> {
    let c = w.trace() / (n * n) as f64;
    let target = CMatrix::identity(n).scale(c);
    let mut devs = Vec::new();
    for (i, row) in block_partition(w, n)?.iter().enumerate() {
        for (j, blk) in row.iter().enumerate() {
            if i == j {
                devs.push(("diagonal block not c·I", (i + 1, j + 1), blk.distance(&target)?));
            } else {
                devs.push(("off-diagonal block nonzero", (i + 1, j + 1), blk.frobenius_norm()));
            }
        }
    }
    Ok((vec![c], devs))
}

fn three_factor(w: &CMatrix, n: usize) -> Result<(Vec<C64>, Deviations)> {
    let grid = block_partition(w, n)?;
    let y = if n >= 2 { grid[0][1].block(1, 0, n).trace() / n as f64 } else { C64::new(0.0, 0.0) };
    let x = (grid[0][0].trace() - y * n as f64) / (n * n) as f64;
    let id_n = CMatrix::identity(n);
    let mut devs = Vec::new();
    for (i, row) in grid.iter().enumerate() {
        for (j, blk) in row.iter().enumerate() {
            let mut target = kron(&Matrix::unit(n, j, i), &id_n)?.scale(y);
            if i == j {
                target = target.add(&CMatrix::identity(n * n).scale(x))?;
            }
            let check = match (i, j) {
                (0, 0) => "W11 form",
                (0, 1) => "W12 form",
                _ if i == j => "diagonal block form",
                _ => "off-diagonal block form",
            };
            devs.push((check, (i + 1, j + 1), blk.distance(&target)?));
        }
    }
    Ok((vec![x, y], devs))
}
