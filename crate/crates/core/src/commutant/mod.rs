//! Commutants of symmetry words.
//!
//! For a word `w` the solver collects generators `g = w(U₁, V₁, …)`, stacks
//! the linear constraints `gW − Wg = 0` into a Gram operator and reads the
//! commutant off its kernel. Two things keep this cheap:
//!
//! * Diagonal unitaries form a subgroup, and `W` can only commute with all of
//!   them if `W_ab = 0` whenever the basis states `a`, `b` carry different
//!   weights. Unknowns outside the equal-weight support are pinned to zero
//!   before any eigenvalue work.
//! * For unitary `g` the Gram block of the commutator has a closed form, so
//!   no `D² × D²` constraint matrix is ever materialised.

mod algebra;
mod blocks;
mod recognize;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{hs_inner, GramAccumulator, MatrixJson, Modifier, RankPolicy, DEFAULT_DIM_CAP};
use crate::symmetry::{
    anchor_generators, instantiate_word, orthogonal_probe, sample_assignment, structured_generators, GeneratorAssignment,
    GeneratorKind, Group, StreamDomain, SymmetryWord,
};
use crate::{CMatrix, C64};

pub use algebra::{algebra_report, span_residual, AlgebraReport};
pub use blocks::{block_partition, verify_block_elements, verify_block_structure, BlockReport, ElementBlocks};
pub use recognize::{recognize_basis, recognize_elements, ElementFit, RecognitionReport, Verdict};

/// Solver settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutantConfig {
    /// Haar samples drawn before the first stability check.
    pub n_samples: usize,
    /// Escalation ceiling.
    pub max_samples: usize,
    /// Fresh samples used to verify every basis element.
    pub verify_samples: usize,
    /// Largest tolerated invariance residual of a unit-norm basis element.
    pub verify_tol: f64,
    pub policy: RankPolicy,
    /// Upper bound on the number of unknowns `D²`.
    pub dim_cap: usize,
    /// Restrict unknowns to the equal-weight support.
    pub weight_reduction: bool,
    /// Append exact structured generators for single unitary-variable words.
    pub anchors: bool,
}

impl Default for CommutantConfig {
    fn default() -> Self {
        Self {
            n_samples: 4,
            max_samples: 12,
            verify_samples: 8,
            verify_tol: 1e-8,
            policy: RankPolicy::default(),
            dim_cap: DEFAULT_DIM_CAP,
            weight_reduction: true,
            anchors: true,
        }
    }
}

/// Hilbert–Schmidt orthonormal basis of a computed commutant.
#[derive(Clone, Debug)]
pub struct CommutantBasis {
    pub word: SymmetryWord,
    pub total_dim: usize,
    pub basis: Vec<CMatrix>,
    /// Spectral gap behind the rank decision.
    pub gap: f64,
    /// Worst `‖gBg† − B‖_F` over verification generators and basis elements.
    pub residual: f64,
    /// Haar samples in the accepted constraint set.
    pub samples_used: usize,
    /// Unknowns left after the weight reduction.
    pub unknowns: usize,
    pub seed: u64,
}

impl CommutantBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Serialize)]
struct BasisJson {
    word: String,
    dims: BTreeMap<String, usize>,
    groups: BTreeMap<String, String>,
    total_dim: usize,
    dim: usize,
    gap: f64,
    residual: f64,
    samples_used: usize,
    unknowns: usize,
    seed: u64,
    basis: Vec<MatrixJson>,
}

impl Serialize for CommutantBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BasisJson {
            word: self.word.to_string(),
            dims: self.word.dims(),
            groups: self.word.groups().into_iter().map(|(k, g)| (k, g.to_string())).collect(),
            total_dim: self.total_dim,
            dim: self.dim(),
            gap: self.gap,
            residual: self.residual,
            samples_used: self.samples_used,
            unknowns: self.unknowns,
            seed: self.seed,
            basis: self.basis.iter().map(MatrixJson::from).collect(),
        }
        .serialize(s)
    }
}

/// Commutant of `word` with default settings and `n_samples` initial samples.
pub fn commutant_basis(word: &SymmetryWord, n_samples: usize, seed: u64) -> Result<CommutantBasis> {
    commutant_basis_with(word, &CommutantConfig { n_samples, ..CommutantConfig::default() }, seed)
}

pub fn commutant_basis_with(word: &SymmetryWord, cfg: &CommutantConfig, seed: u64) -> Result<CommutantBasis> {
    if cfg.n_samples < 2 {
        return Err(Error::BadParams("at least 2 samples are required".into()));
    }
    let d = word.total_dim();
    let unknowns = d.checked_mul(d).ok_or(Error::SizeOverflow { dim: usize::MAX, cap: cfg.dim_cap })?;
    if unknowns > cfg.dim_cap {
        return Err(Error::SizeOverflow { dim: unknowns, cap: cfg.dim_cap });
    }
    let support = if cfg.weight_reduction { weight_support(word) } else { (0..unknowns).collect() };
    let mut acc = GramAccumulator::with_support(unknowns, support)?;

    if cfg.anchors {
        if let Some((var, n)) = word.single_unitary_var() {
            for a in anchor_generators::<f64>(n) {
                acc.add_commutator(&instantiate_word(word, &GeneratorAssignment::single(var, a))?)?;
            }
        }
    }
    let add_samples = |acc: &mut GramAccumulator<f64>, range: std::ops::Range<usize>| -> Result<()> {
        for i in range {
            let g = instantiate_word(word, &sample_assignment(word, seed, StreamDomain::Constraint, i as u64))?;
            acc.add_commutator(&g)?;
        }
        Ok(())
    };

    let mut k = cfg.n_samples;
    add_samples(&mut acc, 0..k)?;
    let mut current = acc.kernel(&cfg.policy);
    let mut observed = Vec::new();
    let (kernel, used) = loop {
        let mut next = acc.clone();
        add_samples(&mut next, k..k + 2)?;
        let candidate = next.kernel(&cfg.policy);
        if let Ok(c) = &current {
            observed.push(c.dim());
        }
        match (&current, &candidate) {
            (Ok(a), Ok(b)) if a.dim() == b.dim() => break (candidate?, k + 2),
            _ => {}
        }
        if k + 2 >= cfg.max_samples {
            if let Ok(c) = &candidate {
                observed.push(c.dim());
            }
            return Err(match candidate {
                Err(e @ Error::AmbiguousRank { .. }) => e,
                Err(e) => e,
                Ok(_) => Error::UnstableDimension { observed },
            });
        }
        acc = next;
        current = candidate;
        k += 2;
    };

    let vectors: Vec<CMatrix> = kernel.basis.iter().map(|v| CMatrix::from_vec_columns(d, v)).collect::<Result<_>>()?;
    let basis = present_basis(&vectors)?;

    let mut residual = 0.0f64;
    for (i, b) in basis.iter().enumerate() {
        let r = invariance_residual(b, word, cfg.verify_samples, seed, StreamDomain::Verification)?;
        if r > cfg.verify_tol {
            return Err(Error::InvarianceViolated { element: i, residual: r });
        }
        residual = residual.max(r);
    }

    Ok(CommutantBasis {
        word: word.clone(),
        total_dim: d,
        basis,
        gap: kernel.gap,
        residual,
        samples_used: used,
        unknowns: acc.support().len(),
        seed,
    })
}

/// Commutant of an explicit generator set (no sampling, full unknown space).
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorCommutant {
    pub basis: Vec<CMatrix>,
    pub gap: f64,
}

impl GeneratorCommutant {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn commutant_of_generators(generators: &[CMatrix], policy: &RankPolicy) -> Result<GeneratorCommutant> {
    let d = generators.first().map(CMatrix::rows).ok_or_else(|| Error::BadParams("no generators".into()))?;
    let mut acc = GramAccumulator::new(d * d);
    for g in generators {
        acc.add_commutator(g)?;
    }
    let kernel = acc.kernel(policy)?;
    let vectors: Vec<CMatrix> = kernel.basis.iter().map(|v| CMatrix::from_vec_columns(d, v)).collect::<Result<_>>()?;
    Ok(GeneratorCommutant { basis: present_basis(&vectors)?, gap: kernel.gap })
}

/// Instantiates `word` on every assignment of the orthogonal probe matrices
/// to its (2-dimensional, orthogonal) variables.
pub fn probe_generators(word: &SymmetryWord) -> Result<Vec<CMatrix>> {
    let probe = orthogonal_probe::<f64>();
    let names: Vec<&String> = word.vars().keys().collect();
    if word.vars().values().any(|v| v.group != Group::Orthogonal || v.dim != 2) {
        return Err(Error::UnsupportedWord(word.to_string()));
    }
    let mut out = Vec::new();
    let total = probe.len().pow(names.len() as u32);
    for mut code in 0..total {
        let mut m = BTreeMap::new();
        for name in &names {
            m.insert((*name).clone(), probe[code % probe.len()].clone());
            code /= probe.len();
        }
        out.push(instantiate_word(word, &GeneratorAssignment::new(m))?);
    }
    Ok(out)
}

/// Largest `‖gWg† − W‖_F` over `trials` Haar generators and the structured
/// generator set of the word.
pub fn check_invariance(w: &CMatrix, word: &SymmetryWord, trials: usize, seed: u64) -> Result<f64> {
    invariance_residual(w, word, trials, seed, StreamDomain::Invariance)
}

fn invariance_residual(w: &CMatrix, word: &SymmetryWord, trials: usize, seed: u64, domain: StreamDomain) -> Result<f64> {
    let d = word.total_dim();
    if w.shape() != (d, d) {
        return Err(Error::DimensionMismatch { op: "check_invariance", left: w.shape(), right: (d, d) });
    }
    let mut worst = 0.0f64;
    let mut test = |g: &CMatrix| -> Result<()> {
        worst = worst.max(w.conjugate_by(g)?.distance(w)?);
        Ok(())
    };
    for i in 0..trials {
        test(&instantiate_word(word, &sample_assignment(word, seed, domain, i as u64))?)?;
    }
    for g in structured_word_generators(word)? {
        test(&g)?;
    }
    Ok(worst)
}

/// Each variable in turn runs through its group's structured set while the
/// others stay at the identity.
pub fn structured_word_generators(word: &SymmetryWord) -> Result<Vec<CMatrix>> {
    let identity: BTreeMap<String, CMatrix> = word.vars().iter().map(|(k, v)| (k.clone(), CMatrix::identity(v.dim))).collect();
    let mut out = Vec::new();
    for (name, spec) in word.vars() {
        let n = spec.dim;
        let set: Vec<CMatrix> = match spec.group {
            Group::Unitary => anchor_generators(n),
            Group::Orthogonal => {
                let mut s = structured_generators(&GeneratorKind::AllTranspositions, n)?;
                if n >= 2 {
                    s.extend(structured_generators(&GeneratorKind::HadamardBlock { at: 1 }, n)?);
                }
                if n == 2 {
                    s.extend(orthogonal_probe());
                }
                s
            }
            Group::Permutation => structured_generators(&GeneratorKind::AllTranspositions, n)?,
        };
        for g in set {
            let mut m = identity.clone();
            m.insert(name.clone(), g);
            out.push(instantiate_word(word, &GeneratorAssignment::new(m))?);
        }
    }
    Ok(out)
}

/// Indices `c·D + r` of the column-stacked unknowns whose row and column
/// basis states carry the same weight under the diagonal subgroup.
///
/// A unitary variable contributes the signed occupation count of each basis
/// index (`+1` for `U`, `Uᵀ`, `−1` for `U*`, `U†`); an orthogonal variable the
/// same counts mod 2 (diagonal sign matrices); permutation variables have no
/// nontrivial diagonal elements and contribute nothing.
pub fn weight_support(word: &SymmetryWord) -> Vec<usize> {
    let d = word.total_dim();
    let dims = word.factor_dims();
    let vars: Vec<&String> = word.vars().keys().collect();
    let offsets: Vec<usize> = vars
        .iter()
        .scan(0, |acc, v| {
            let o = *acc;
            *acc += word.vars()[*v].dim;
            Some(o)
        })
        .collect();
    let width: usize = word.vars().values().map(|v| v.dim).sum();

    let mut ids: HashMap<Vec<i64>, usize> = HashMap::new();
    let labels: Vec<usize> = (0..d)
        .map(|mut a| {
            let mut label = vec![0i64; width];
            for (f, &n) in word.factors().iter().zip(&dims).rev() {
                let i = a % n;
                a /= n;
                let vi = vars.iter().position(|v| **v == f.var).expect("factor var declared");
                let sign = match f.modifier {
                    Modifier::Id | Modifier::Transpose => 1,
                    Modifier::Conj | Modifier::ConjTranspose => -1,
                };
                label[offsets[vi] + i] += sign;
            }
            for (vi, v) in vars.iter().enumerate() {
                let spec = word.vars()[*v];
                let slot = &mut label[offsets[vi]..offsets[vi] + spec.dim];
                match spec.group {
                    Group::Unitary => {}
                    Group::Orthogonal => slot.iter_mut().for_each(|x| *x = x.rem_euclid(2)),
                    Group::Permutation => slot.iter_mut().for_each(|x| *x = 0),
                }
            }
            let next = ids.len();
            *ids.entry(label).or_insert(next)
        })
        .collect();

    let mut support = Vec::new();
    for c in 0..d {
        for r in 0..d {
            if labels[r] == labels[c] {
                support.push(c * d + r);
            }
        }
    }
    support
}

/// Readable orthonormal presentation of a kernel basis: the first element is
/// the normalised projection of `I` (when nonzero), the rest follow by greedy
/// Gram–Schmidt, and each element gets a canonical phase.
fn present_basis(vectors: &[CMatrix]) -> Result<Vec<CMatrix>> {
    let Some(first) = vectors.first() else { return Ok(Vec::new()) };
    let d = first.rows();
    let identity = CMatrix::identity(d);
    let mut out: Vec<CMatrix> = Vec::with_capacity(vectors.len());

    let mut proj = CMatrix::zeros(d, d);
    for b in vectors {
        proj.axpy(hs_inner(b, &identity)?, b)?;
    }
    if proj.frobenius_norm() > 1e-8 {
        out.push(proj.scale_real(1.0 / proj.frobenius_norm()));
    }

    let mut pool: Vec<CMatrix> = vectors.to_vec();
    while out.len() < vectors.len() {
        let mut best: Option<(usize, CMatrix, f64)> = None;
        for (i, v) in pool.iter().enumerate() {
            let mut r = v.clone();
            for _ in 0..2 {
                for q in &out {
                    r.axpy(-hs_inner(q, &r)?, q)?;
                }
            }
            let norm = r.frobenius_norm();
            if best.as_ref().is_none_or(|b| norm > b.2 + 1e-12) {
                best = Some((i, r, norm));
            }
        }
        let (i, r, norm) = best.expect("pool non-empty while basis incomplete");
        pool.remove(i);
        out.push(r.scale_real(1.0 / norm));
    }
    Ok(out.into_iter().map(canonical_phase).collect())
}

/// Rotates the global phase so the trace is real positive, or, for traceless
/// matrices, the first entry of (near-)maximal modulus is.
fn canonical_phase(m: CMatrix) -> CMatrix {
    let tr = m.trace();
    let pivot = if tr.norm() > 1e-8 * m.frobenius_norm().max(1.0) {
        tr
    } else {
        let max = m.max_abs();
        *m.as_slice().iter().find(|z| z.norm() >= max * (1.0 - 1e-6)).unwrap_or(&C64::new(1.0, 0.0))
    };
    if pivot.norm() == 0.0 {
        return m;
    }
    let rot = pivot.conj() / pivot.norm();
    let mut out = m.scale(rot);
    // Entries that should be real or zero come out within a few ulps; clean them.
    for z in out.as_mut_slice() {
        if z.im.abs() < 1e-15 {
            z.im = 0.0;
        }
        if z.re.abs() < 1e-15 {
            z.re = 0.0;
        }
    }
    out
}
