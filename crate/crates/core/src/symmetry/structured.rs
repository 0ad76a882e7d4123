//! Exact unitaries with a prescribed pattern: permutations, phase
//! diagonals, phased permutations, small mixing blocks and the Fourier
//! matrix (a unitary whose first row is constant `1/√n`).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{cx, phase, Cx, Real};

/// Family of structured generators. Indices are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorKind {
    /// `P_ij`: the identity with rows `i` and `j` exchanged.
    Permutation { i: usize, j: usize },
    /// Every transposition `P_ij`, `i < j`.
    AllTranspositions,
    /// `diag(e^{iθ₁}, …, e^{iθₙ})`.
    PhaseDiagonal { thetas: Vec<f64> },
    /// `P_ij` with column `i` scaled by `e^{iθ₁}` and column `j` by `e^{iθ₂}`.
    PhasedPermutation { i: usize, j: usize, theta1: f64, theta2: f64 },
    /// `[[0,1],[i,0]] ⊕ I`.
    SwapPhaseA,
    /// `[[0,i],[1,0]] ⊕ I`.
    SwapPhaseB,
    /// Exchange of basis vectors 1 and 3 with phase `i` on the `3 → 1` entry, `⊕ I`.
    SwapPhaseC,
    /// Discrete Fourier matrix; its first row is constant `1/√n`.
    UniformRow,
    /// `I ⊕ (1/√2)[[1,1],[1,−1]] ⊕ I` with the block starting at row `at`.
    HadamardBlock { at: usize },
    /// `(1/√2)[[1,i],[−1,i]] ⊕ I`.
    MixingBlock,
    /// The four real 2×2 orthogonal matrices `X`, `Z`, rotation by π/4 and the Hadamard reflection.
    OrthogonalProbe,
    /// Default set appended to sampled generators for single-variable unitary words.
    Anchor,
}

/// Permutation matrix sending basis vector `k` to `perm[k]` (0-based).
pub fn permutation_matrix<T: Real>(perm: &[usize]) -> Matrix<T> {
    let n = perm.len();
    let mut m = Matrix::zeros(n, n);
    for (k, &p) in perm.iter().enumerate() {
        m[(p, k)] = Cx::new(T::one(), T::zero());
    }
    m
}

fn transposition<T: Real>(n: usize, i: usize, j: usize) -> Matrix<T> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(i, j);
    permutation_matrix(&perm)
}

/// Embeds a small block at offset `at` (0-based) inside `I_n`.
fn embed<T: Real>(n: usize, at: usize, block: &Matrix<T>) -> Matrix<T> {
    let mut m = Matrix::identity(n);
    for r in 0..block.rows() {
        for c in 0..block.cols() {
            m[(at + r, at + c)] = block[(r, c)];
        }
    }
    m
}

/// General 2×2 unitary
/// `[[e^{iα}cosθ, −e^{i(φ−β)}sinθ], [e^{iβ}sinθ, e^{i(φ−α)}cosθ]]`, determinant `e^{iφ}`.
pub fn unitary_2x2<T: Real>(theta: f64, alpha: f64, beta: f64, phi: f64) -> Matrix<T> {
    let (s, c) = theta.sin_cos();
    let at = |p: f64, scale: f64| phase::<T>(p) * T::lit(scale);
    Matrix::new(2, 2, vec![at(alpha, c), at(phi - beta, -s), at(beta, s), at(phi - alpha, c)]).expect("finite")
}

fn check_index(n: usize, idx: &[usize]) -> Result<()> {
    if idx.iter().any(|&k| k == 0 || k > n) {
        return Err(Error::BadParams(format!("indices {idx:?} out of range for n = {n}")));
    }
    Ok(())
}

fn need(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return Err(Error::BadParams(format!("{what} needs n >= {min}, got {n}")));
    }
    Ok(())
}

pub fn structured_generators<T: Real>(kind: &GeneratorKind, n: usize) -> Result<Vec<Matrix<T>>> {
    need(n, 1, "a generator")?;
    let out = match kind {
        GeneratorKind::Permutation { i, j } => {
            check_index(n, &[*i, *j])?;
            vec![transposition(n, i - 1, j - 1)]
        }
        GeneratorKind::AllTranspositions => {
            let mut v = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    v.push(transposition(n, i, j));
                }
            }
            v
        }
        GeneratorKind::PhaseDiagonal { thetas } => {
            if thetas.len() != n {
                return Err(Error::BadParams(format!("expected {n} phases, got {}", thetas.len())));
            }
            vec![Matrix::diagonal(&thetas.iter().map(|&t| phase(t)).collect::<Vec<_>>())]
        }
        GeneratorKind::PhasedPermutation { i, j, theta1, theta2 } => {
            check_index(n, &[*i, *j])?;
            if i == j {
                return Err(Error::BadParams("phased permutation needs i != j".into()));
            }
            let mut p = transposition::<T>(n, i - 1, j - 1);
            p[(j - 1, i - 1)] = phase(*theta1);
            p[(i - 1, j - 1)] = phase(*theta2);
            vec![p]
        }
        GeneratorKind::SwapPhaseA => {
            need(n, 2, "SwapPhaseA")?;
            vec![embed(n, 0, &Matrix::new(2, 2, vec![cx(0., 0.), cx(1., 0.), cx(0., 1.), cx(0., 0.)])?)]
        }
        GeneratorKind::SwapPhaseB => {
            need(n, 2, "SwapPhaseB")?;
            vec![embed(n, 0, &Matrix::new(2, 2, vec![cx(0., 0.), cx(0., 1.), cx(1., 0.), cx(0., 0.)])?)]
        }
        GeneratorKind::SwapPhaseC => {
            need(n, 3, "SwapPhaseC")?;
            let mut m = Matrix::identity(n);
            m[(0, 0)] = cx(0., 0.);
            m[(2, 2)] = cx(0., 0.);
            m[(0, 2)] = cx(1., 0.);
            m[(2, 0)] = cx(0., 1.);
            vec![m]
        }
        GeneratorKind::UniformRow => {
            let norm = 1.0 / (n as f64).sqrt();
            vec![Matrix::from_fn(n, n, |r, c| phase::<T>(2.0 * PI * ((r * c) % n) as f64 / n as f64) * T::lit(norm))]
        }
        GeneratorKind::HadamardBlock { at } => {
            need(n, 2, "HadamardBlock")?;
            if *at == 0 || at + 1 > n {
                return Err(Error::BadParams(format!("Hadamard block at {at} does not fit n = {n}")));
            }
            let s = FRAC_1_SQRT_2;
            vec![embed(n, at - 1, &Matrix::from_real(2, 2, &[s, s, s, -s])?)]
        }
        GeneratorKind::MixingBlock => {
            need(n, 2, "MixingBlock")?;
            let s = FRAC_1_SQRT_2;
            vec![embed(n, 0, &Matrix::new(2, 2, vec![cx(s, 0.), cx(0., s), cx(-s, 0.), cx(0., s)])?)]
        }
        GeneratorKind::OrthogonalProbe => {
            if n != 2 {
                return Err(Error::BadParams("the orthogonal probe set is 2x2".into()));
            }
            orthogonal_probe()
        }
        GeneratorKind::Anchor => anchor_generators(n),
    };
    Ok(out)
}

/// `X`, `Z`, the π/4 rotation and the Hadamard reflection.
pub fn orthogonal_probe<T: Real>() -> Vec<Matrix<T>> {
    let s = FRAC_1_SQRT_2;
    [[0., 1., 1., 0.], [1., 0., 0., -1.], [s, -s, s, s], [s, s, s, -s]]
        .iter()
        .map(|v| Matrix::from_real(2, 2, v).expect("finite"))
        .collect()
}

/// Exact anchors for a single unitary variable of dimension `n`: all
/// transpositions, a generic phase diagonal, phased permutations, the three
/// swap-with-phase matrices, the Fourier matrix and the two mixing blocks.
pub fn anchor_generators<T: Real>(n: usize) -> Vec<Matrix<T>> {
    // Phases with rationally independent ratios.
    let thetas: Vec<f64> = (0..n).map(|k| if k == 0 { 0.0 } else { (k as f64 * 2f64.sqrt()).rem_euclid(2.0 * PI) }).collect();
    let mut kinds = vec![GeneratorKind::PhaseDiagonal { thetas }, GeneratorKind::AllTranspositions, GeneratorKind::UniformRow];
    if n >= 2 {
        kinds.extend([
            GeneratorKind::SwapPhaseA,
            GeneratorKind::SwapPhaseB,
            GeneratorKind::MixingBlock,
            GeneratorKind::PhasedPermutation { i: 1, j: 2, theta1: 0.7, theta2: 1.9 },
        ]);
    }
    if n >= 3 {
        kinds.extend([
            GeneratorKind::SwapPhaseC,
            GeneratorKind::HadamardBlock { at: 2 },
            GeneratorKind::PhasedPermutation { i: 1, j: 3, theta1: 2.3, theta2: 0.4 },
        ]);
    }
    kinds.iter().flat_map(|k| structured_generators(k, n).expect("valid anchor kind")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CMatrix;
    use std::f64::consts::PI;

    fn det2(m: &CMatrix) -> Cx<f64> {
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
    }

    #[test]
    fn unitary_2x2_examples() {
        let u: CMatrix = unitary_2x2(0., 0., 0., 0.);
        assert!(u.distance(&CMatrix::identity(2)).unwrap() < 1e-15);
        let u: CMatrix = unitary_2x2(PI / 2., 0., 0., 0.);
        let want = CMatrix::from_real(2, 2, &[0., -1., 1., 0.]).unwrap();
        assert!(u.distance(&want).unwrap() < 1e-15);
        let u: CMatrix = unitary_2x2(0.3, 1.1, 2.2, 0.7);
        assert!((det2(&u) - Cx::new(0.7f64.cos(), 0.7f64.sin())).norm() < 1e-12);
        assert!(u.unitarity_defect() < 1e-15);
    }

    #[test]
    fn kind_examples() {
        let p: Vec<CMatrix> = structured_generators(&GeneratorKind::Permutation { i: 1, j: 2 }, 3).unwrap();
        assert_eq!(p[0], CMatrix::from_real(3, 3, &[0., 1., 0., 1., 0., 0., 0., 0., 1.]).unwrap());

        let u1: Vec<CMatrix> = structured_generators(&GeneratorKind::SwapPhaseA, 2).unwrap();
        assert_eq!(u1[0], CMatrix::from_pairs(&[vec![(0., 0.), (1., 0.)], vec![(0., 1.), (0., 0.)]]).unwrap());

        let f: Vec<CMatrix> = structured_generators(&GeneratorKind::UniformRow, 2).unwrap();
        let s = FRAC_1_SQRT_2;
        assert!(f[0].distance(&CMatrix::from_real(2, 2, &[s, s, s, -s]).unwrap()).unwrap() < 1e-15);

        let pp: Vec<CMatrix> =
            structured_generators(&GeneratorKind::PhasedPermutation { i: 1, j: 2, theta1: 0.5, theta2: 1.5 }, 2).unwrap();
        assert_eq!(pp[0][(1, 0)], phase(0.5));
        assert_eq!(pp[0][(0, 1)], phase(1.5));
    }

    #[test]
    fn bad_params() {
        assert!(structured_generators::<f64>(&GeneratorKind::SwapPhaseC, 2).is_err());
        assert!(structured_generators::<f64>(&GeneratorKind::Permutation { i: 0, j: 2 }, 3).is_err());
        assert!(structured_generators::<f64>(&GeneratorKind::PhaseDiagonal { thetas: vec![0.0] }, 3).is_err());
        assert!(structured_generators::<f64>(&GeneratorKind::OrthogonalProbe, 3).is_err());
        assert!(structured_generators::<f64>(&GeneratorKind::HadamardBlock { at: 3 }, 3).is_err());
    }

    #[test]
    fn all_structured_generators_are_unitary() {
        for n in 1..=5 {
            for g in anchor_generators::<f64>(n) {
                assert!(g.unitarity_defect() < 1e-15, "n={n}");
            }
        }
        for g in orthogonal_probe::<f64>() {
            assert!(g.unitarity_defect() < 1e-15 && g.is_real(0.0));
        }
        let first_row = &structured_generators::<f64>(&GeneratorKind::UniformRow, 5).unwrap()[0];
        for c in 0..5 {
            assert!((first_row[(0, c)] - Cx::new(1.0 / 5f64.sqrt(), 0.0)).norm() < 1e-15);
        }
    }
}
