//! Hermitian eigendecomposition: Householder reduction to a real symmetric
//! tridiagonal matrix followed by the implicit QL iteration (tql2).

use serde::Serialize;

use super::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// QL iterations allowed per eigenvalue before giving up.
const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum<T: Real = f64> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let v = &self.eigenvectors;
        let n = v.rows();
        let scaled = Matrix::from_fn(n, n, |r, c| v[(r, c)] * self.eigenvalues[c]);
        scaled.matmul(&v.adjoint()).expect("square")
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Cx<T>> {
        self.eigenvectors.column(k)
    }
}

/// Eigendecomposition of a Hermitian matrix, checking Hermiticity at the
/// scalar type's default tolerance.
pub fn hermitian_eig<T: Real>(a: &Matrix<T>) -> Result<Spectrum<T>> {
    hermitian_eig_with_tol(a, T::default_tol())
}

pub fn hermitian_eig_with_tol<T: Real>(a: &Matrix<T>, tol: T) -> Result<Spectrum<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { op: "hermitian_eig", left: a.shape(), right: (a.cols(), a.rows()) });
    }
    let deviation = a.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation: deviation.to_f64_lossy() });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Spectrum { eigenvalues: vec![], eigenvectors: Matrix::zeros(0, 0) });
    }

    let half = T::lit(0.5);
    let mut work: Vec<Cx<T>> = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            work.push((a[(r, c)] + a[(c, r)].conj()) * half);
        }
    }

    let (mut diag, mut off, mut q) = tridiagonalize(n, &mut work);
    // `q` now holds Q·D with D the phase fix making the subdiagonal real.
    tql2(&mut diag, &mut off, &mut q, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = Matrix::from_fn(n, n, |r, c| q[r * n + order[c]]);
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Reduces the Hermitian matrix stored row-major in `a` to real symmetric
/// tridiagonal form. Returns `(diagonal, subdiagonal, basis)` where the
/// subdiagonal has `n` entries with the last one zero and `basis` is the
/// row-major unitary mapping tridiagonal coordinates back to the original.
fn tridiagonalize<T: Real>(n: usize, a: &mut [Cx<T>]) -> (Vec<T>, Vec<T>, Vec<Cx<T>>) {
    let zero = Cx::new(T::zero(), T::zero());
    let mut q = vec![zero; n * n];
    for i in 0..n {
        q[i * n + i] = Cx::new(T::one(), T::zero());
    }
    let mut sub: Vec<Cx<T>> = vec![zero; n];
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];

    for k in 0..n.saturating_sub(1) {
        let lo = k + 1;
        let alpha = (lo..n).map(|r| a[r * n + k].norm_sqr()).sum::<T>().sqrt();
        if alpha == T::zero() {
            sub[k] = zero;
            continue;
        }
        let x0 = a[lo * n + k];
        let x0_abs = x0.norm();
        let ph = if x0_abs > T::zero() { x0 / x0_abs } else { Cx::new(T::one(), T::zero()) };
        for r in lo..n {
            v[r] = a[r * n + k];
        }
        v[lo] = v[lo] + ph * alpha;
        let vnorm = (T::lit(2.0) * alpha * (alpha + x0_abs)).sqrt();
        for x in &mut v[lo..n] {
            *x = *x / vnorm;
        }
        sub[k] = -ph * alpha;

        // Trailing block update S ← S − v w† − w v†, w = 2(Sv − (v†Sv) v).
        for r in lo..n {
            let row = &a[r * n + lo..r * n + n];
            p[r] = row.iter().zip(&v[lo..n]).fold(zero, |acc, (s, x)| acc + s * x);
        }
        let rq = (lo..n).fold(zero, |acc, r| acc + v[r].conj() * p[r]).re;
        let two = T::lit(2.0);
        for r in lo..n {
            p[r] = (p[r] - v[r] * rq) * two;
        }
        for r in lo..n {
            let (vr, wr) = (v[r], p[r]);
            let row = &mut a[r * n + lo..r * n + n];
            for (c, s) in row.iter_mut().enumerate() {
                let c = c + lo;
                *s = *s - vr * p[c].conj() - wr * v[c].conj();
            }
        }
        for r in lo..n {
            a[r * n + k] = zero;
            a[k * n + r] = zero;
        }

        // Q ← Q (I − 2 v v†).
        for r in 0..n {
            let row = &mut q[r * n..(r + 1) * n];
            let s = row[lo..].iter().zip(&v[lo..n]).fold(zero, |acc, (qv, x)| acc + qv * x) * two;
            for (qv, x) in row[lo..].iter_mut().zip(&v[lo..n]) {
                *qv = *qv - s * x.conj();
            }
        }
    }

    let diag: Vec<T> = (0..n).map(|i| a[i * n + i].re).collect();
    // Phase fix: δ₀ = 1, δ_{k+1} = δ_k · e_k / |e_k| turns the subdiagonal into |e_k|.
    let mut delta = Cx::new(T::one(), T::zero());
    let mut off = vec![T::zero(); n];
    for k in 0..n {
        if k > 0 {
            let e = sub[k - 1];
            let m = e.norm();
            if m > T::zero() {
                delta = delta * (e / m);
            }
            off[k - 1] = m;
            for r in 0..n {
                q[r * n + k] = q[r * n + k] * delta;
            }
        }
    }
    (diag, off, q)
}

/// Implicit QL on a symmetric tridiagonal matrix; `e[i]` couples `i` and
/// `i + 1`. Rotations are applied to the columns of the row-major `z`.
fn tql2<T: Real>(d: &mut [T], e: &mut [T], z: &mut [Cx<T>], n: usize) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let mut rotations: Vec<(usize, T, T)> = Vec::with_capacity(n);

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence { iterations: MAX_QL_ITERATIONS });
                }
                let two = T::lit(2.0);
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                rotations.clear();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    rotations.push((i, c, s));
                }
                for row in z.chunks_mut(n) {
                    for &(i, c, s) in &rotations {
                        let hz = row[i + 1];
                        let zi = row[i];
                        row[i + 1] = zi * s + hz * c;
                        row[i] = zi * c - hz * s;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::kron;
    use crate::CMatrix;

    fn assert_close(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
        }
    }

    fn check_contract(a: &CMatrix, spec: &Spectrum<f64>) {
        let n = a.rows();
        assert!(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        assert!(spec.eigenvectors.unitarity_defect() < 1e-10);
        let rel = spec.reconstruct().distance(a).unwrap() / a.frobenius_norm().max(1.0);
        assert!(rel < 1e-9, "reconstruction {rel:e} for n={n}");
    }

    #[test]
    fn identity_spectrum() {
        let s = hermitian_eig(&CMatrix::identity(3)).unwrap();
        assert_close(&s.eigenvalues, &[1., 1., 1.], 1e-14);
    }

    #[test]
    fn swap_spectrum() {
        // characteristic polynomial of F₂ is (λ − 1)³(λ + 1)
        let f = CMatrix::from_real(4, 4, &[1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.]).unwrap();
        let s = hermitian_eig(&f).unwrap();
        assert_close(&s.eigenvalues, &[-1., 1., 1., 1.], 1e-12);
        check_contract(&f, &s);
    }

    #[test]
    fn m_tensor_m_spectrum() {
        let m = CMatrix::from_real(2, 2, &[0., 1., -1., 0.]).unwrap();
        let mm = kron(&m, &m).unwrap();
        let s = hermitian_eig(&mm).unwrap();
        assert_close(&s.eigenvalues, &[-1., -1., 1., 1.], 1e-12);
        check_contract(&mm, &s);
    }

    #[test]
    fn kron_spectrum_products() {
        let a = CMatrix::from_real(2, 2, &[1., 0., 0., 2.]).unwrap();
        let b = CMatrix::from_real(2, 2, &[3., 0., 0., 5.]).unwrap();
        let s = hermitian_eig(&kron(&a, &b).unwrap()).unwrap();
        assert_close(&s.eigenvalues, &[3., 5., 6., 10.], 1e-12);
    }

    #[test]
    fn complex_hermitian_with_degeneracy() {
        // (a) complex entries, (b) a repeated eigenvalue via a rank-one update of the identity
        let v = [Cx::new(0.3, 0.4), Cx::new(-0.5, 0.1), Cx::new(0.0, -0.7), Cx::new(0.2, 0.2)];
        let a = CMatrix::from_fn(4, 4, |r, c| {
            let base = if r == c { Cx::new(2.0, 0.0) } else { Cx::new(0.0, 0.0) };
            base + v[r] * v[c].conj()
        });
        let s = hermitian_eig(&a).unwrap();
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert_close(&s.eigenvalues, &[2., 2., 2., 2. + vnorm], 1e-12);
        check_contract(&a, &s);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = CMatrix::from_real(2, 2, &[0., 1., 0., 0.]).unwrap();
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
        // zero matrix counts as Hermitian
        let z = hermitian_eig(&CMatrix::zeros(3, 3)).unwrap();
        assert_close(&z.eigenvalues, &[0., 0., 0.], 0.0);
    }

    #[test]
    fn tiny_sizes() {
        let one = CMatrix::from_real(1, 1, &[-3.5]).unwrap();
        assert_close(&hermitian_eig(&one).unwrap().eigenvalues, &[-3.5], 0.0);
        let a = CMatrix::from_pairs(&[vec![(1., 0.), (0., 2.)], vec![(0., -2.), (1., 0.)]]).unwrap();
        let s = hermitian_eig(&a).unwrap();
        assert_close(&s.eigenvalues, &[-1., 3.], 1e-12);
        check_contract(&a, &s);
    }
}
