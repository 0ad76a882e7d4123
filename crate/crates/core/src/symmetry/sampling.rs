//! Seeded Haar sampling.
//!
//! Every draw comes from a ChaCha stream keyed by `(seed, domain, sample,
//! variable)`, so results do not depend on evaluation order or thread count.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::structured::permutation_matrix;
use super::word::{GeneratorAssignment, Group, SymmetryWord};
use crate::matrix::Matrix;
use crate::scalar::{Cx, Real};

/// Purpose of a draw; each gets a disjoint family of sub-streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum StreamDomain {
    Direct = 0,
    Constraint = 1,
    Verification = 2,
    Twirl = 3,
    Invariance = 4,
    Auxiliary = 5,
}

/// Independent generator for one `(domain, sample, var)` triple.
pub fn stream_rng(seed: u64, domain: StreamDomain, sample: u64, var: u64) -> ChaCha8Rng {
    debug_assert!(sample < 1 << 40 && var < 1 << 16);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << 56) | (sample << 16) | var);
    rng
}

/// Householder QR of a square matrix; returns `(Q, diag(R))`.
fn householder_qr<T: Real>(mut a: Matrix<T>) -> (Matrix<T>, Vec<Cx<T>>) {
    let n = a.rows();
    let zero = Cx::new(T::zero(), T::zero());
    let mut q = Matrix::<T>::identity(n);
    let mut v = vec![zero; n];
    let two = T::lit(2.0);
    for k in 0..n {
        let alpha = (k..n).map(|r| a[(r, k)].norm_sqr()).sum::<T>().sqrt();
        if alpha == T::zero() {
            continue;
        }
        let x0 = a[(k, k)];
        let x0_abs = x0.norm();
        let ph = if x0_abs > T::zero() { x0 / x0_abs } else { Cx::new(T::one(), T::zero()) };
        for r in k..n {
            v[r] = a[(r, k)];
        }
        v[k] = v[k] + ph * alpha;
        let vnorm = (two * alpha * (alpha + x0_abs)).sqrt();
        for x in &mut v[k..n] {
            *x = *x / vnorm;
        }
        for c in k..n {
            let s = (k..n).fold(zero, |acc, r| acc + v[r].conj() * a[(r, c)]) * two;
            for r in k..n {
                a[(r, c)] = a[(r, c)] - v[r] * s;
            }
        }
        for r in 0..n {
            let s = (k..n).fold(zero, |acc, c| acc + q[(r, c)] * v[c]) * two;
            for c in k..n {
                q[(r, c)] = q[(r, c)] - s * v[c].conj();
            }
        }
    }
    let diag = (0..n).map(|i| a[(i, i)]).collect();
    (q, diag)
}

/// `Q · diag(r_ii / |r_ii|)`: makes the triangular factor's diagonal positive,
/// which is what turns the QR of a Gaussian matrix into a Haar sample.
fn phase_normalised_q<T: Real>(gauss: Matrix<T>) -> Matrix<T> {
    let n = gauss.rows();
    let (q, r_diag) = householder_qr(gauss);
    let phases: Vec<Cx<T>> = r_diag
        .iter()
        .map(|&r| {
            let m = r.norm();
            if m > T::zero() {
                r / m
            } else {
                Cx::new(T::one(), T::zero())
            }
        })
        .collect();
    Matrix::from_fn(n, n, |r, c| q[(r, c)] * phases[c])
}

/// Haar-distributed `n × n` unitary from the given generator.
pub fn haar_unitary_from<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T>
where
    StandardNormal: Distribution<T>,
{
    let scale = T::FRAC_1_SQRT_2();
    let gauss = Matrix::from_fn(n, n, |_, _| {
        let re: T = StandardNormal.sample(rng);
        let im: T = StandardNormal.sample(rng);
        Cx::new(re * scale, im * scale)
    });
    phase_normalised_q(gauss)
}

/// Haar-distributed real orthogonal matrix from the given generator.
pub fn haar_orthogonal_from<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T>
where
    StandardNormal: Distribution<T>,
{
    let gauss = Matrix::from_fn(n, n, |_, _| Cx::new(StandardNormal.sample(rng), T::zero()));
    phase_normalised_q(gauss)
}

/// Uniformly random `n × n` permutation matrix.
pub fn random_permutation_from<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<T> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    permutation_matrix(&perm)
}

pub fn sample_haar_unitary<T: Real>(n: usize, seed: u64) -> Matrix<T>
where
    StandardNormal: Distribution<T>,
{
    haar_unitary_from(n, &mut stream_rng(seed, StreamDomain::Direct, 0, 0))
}

pub fn sample_haar_orthogonal<T: Real>(n: usize, seed: u64) -> Matrix<T>
where
    StandardNormal: Distribution<T>,
{
    haar_orthogonal_from(n, &mut stream_rng(seed, StreamDomain::Direct, 0, 0))
}

/// Draws every variable of `word` from its group's Haar measure.
pub fn sample_assignment<T: Real>(word: &SymmetryWord, seed: u64, domain: StreamDomain, sample: u64) -> GeneratorAssignment<T>
where
    StandardNormal: Distribution<T>,
{
    let matrices = word
        .vars()
        .iter()
        .enumerate()
        .map(|(vi, (name, spec))| {
            let mut rng = stream_rng(seed, domain, sample, vi as u64);
            let m = match spec.group {
                Group::Unitary => haar_unitary_from(spec.dim, &mut rng),
                Group::Orthogonal => haar_orthogonal_from(spec.dim, &mut rng),
                Group::Permutation => random_permutation_from(spec.dim, &mut rng),
            };
            (name.clone(), m)
        })
        .collect();
    GeneratorAssignment::new(matrices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CMatrix;

    #[test]
    fn scalar_case_is_unit_modulus() {
        let u: CMatrix = sample_haar_unitary(1, 3);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
        let q: CMatrix = sample_haar_orthogonal(1, 3);
        assert!((q[(0, 0)].re.abs() - 1.0).abs() < 1e-14 && q[(0, 0)].im == 0.0);
    }

    #[test]
    fn unitarity_and_realness() {
        for seed in 0..20 {
            let u: CMatrix = sample_haar_unitary(3, seed);
            assert!(u.unitarity_defect() < 1e-12);
            let q: CMatrix = sample_haar_orthogonal(4, seed);
            assert!(q.unitarity_defect() < 1e-12);
            assert!(q.is_real(1e-12));
        }
    }

    #[test]
    fn same_seed_same_bits() {
        let a: CMatrix = sample_haar_unitary(4, 99);
        let b: CMatrix = sample_haar_unitary(4, 99);
        assert_eq!(a.as_slice(), b.as_slice());
        let c: CMatrix = sample_haar_unitary(4, 100);
        assert_ne!(a.as_slice(), c.as_slice());
    }

    #[test]
    fn distinct_streams_differ() {
        let mut r1 = stream_rng(1, StreamDomain::Constraint, 0, 0);
        let mut r2 = stream_rng(1, StreamDomain::Constraint, 1, 0);
        let mut r3 = stream_rng(1, StreamDomain::Verification, 0, 0);
        let (a, b, c): (u64, u64, u64) = (r1.random(), r2.random(), r3.random());
        assert!(a != b && a != c && b != c);
    }

    #[test]
    fn single_precision_sampling() {
        let u: crate::CMatrix32 = sample_haar_unitary(3, 5);
        assert!(u.unitarity_defect() < 1e-5);
    }

    #[test]
    fn permutation_sampling_is_a_permutation() {
        let mut rng = stream_rng(4, StreamDomain::Direct, 0, 0);
        let p: CMatrix = random_permutation_from(5, &mut rng);
        assert!(p.unitarity_defect() == 0.0);
        for r in 0..5 {
            assert_eq!(p.row(r).iter().filter(|z| z.re == 1.0).count(), 1);
        }
    }
}
