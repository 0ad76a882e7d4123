//! Randomised invariants.

mod common;

use common::uword;
use commutant_core::commutant::{check_invariance, commutant_basis};
use commutant_core::matrix::{hermitian_eig, hs_inner, joint_nullspace, kron, RankPolicy};
use commutant_core::symmetry::{instantiate_word, sample_haar_unitary, GeneratorAssignment};
use commutant_core::twirl::{exact_project, mc_twirl};
use commutant_core::{CMatrix, C64};
use proptest::prelude::*;

fn cmatrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| CMatrix::new(n, n, v.into_iter().map(|(re, im)| C64::new(re, im)).collect()).unwrap())
}

fn hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
    cmatrix(n).prop_map(|a| a.add(&a.adjoint()).unwrap().scale_real(0.5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mixed_product(a in cmatrix(2), b in cmatrix(3), c in cmatrix(2), d in cmatrix(3)) {
        let lhs = kron(&a, &b).unwrap().matmul(&kron(&c, &d).unwrap()).unwrap();
        let rhs = kron(&a.matmul(&c).unwrap(), &b.matmul(&d).unwrap()).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn kron_spectrum_is_pairwise_products(a in hermitian(2), b in hermitian(3)) {
        let ea = hermitian_eig(&a).unwrap().eigenvalues;
        let eb = hermitian_eig(&b).unwrap().eigenvalues;
        let mut want: Vec<f64> = ea.iter().flat_map(|x| eb.iter().map(move |y| x * y)).collect();
        want.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let got = hermitian_eig(&kron(&a, &b).unwrap()).unwrap().eigenvalues;
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-9);
        }
    }

    #[test]
    fn eig_reconstructs(a in hermitian(5)) {
        let s = hermitian_eig(&a).unwrap();
        let scale = a.frobenius_norm().max(1e-300);
        prop_assert!(s.reconstruct().distance(&a).unwrap() / scale < 1e-9);
        prop_assert!(s.eigenvectors.unitarity_defect() < 1e-10);
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn word_multiplicativity(s1 in 0u64..1000, s2 in 0u64..1000) {
        let a: CMatrix = sample_haar_unitary(2, s1);
        let b: CMatrix = sample_haar_unitary(2, s2 + 1000);
        let ab = a.matmul(&b).unwrap();
        let inst = |w: &str, m: &CMatrix| instantiate_word(&uword(w, 2), &GeneratorAssignment::single("U", m.clone())).unwrap();

        // U ↦ U ⊗ U is multiplicative.
        let prod = inst("U,U", &a).matmul(&inst("U,U", &b)).unwrap();
        prop_assert!(inst("U,U", &ab).distance(&prod).unwrap() < 1e-12);
        // U ↦ U ⊗ U† is not: the second factor reverses order.
        let prod = inst("U,U^H", &a).matmul(&inst("U,U^H", &b)).unwrap();
        prop_assert!(inst("U,U^H", &ab).distance(&prod).unwrap() > 1e-6);
    }

    #[test]
    fn nullspace_is_orthonormal_and_annihilated(seed in 0u64..500) {
        let g: CMatrix = sample_haar_unitary(2, seed);
        let d = CMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
        let blocks: Vec<CMatrix> = [g, d]
            .iter()
            .map(|m| kron(&CMatrix::identity(2), m).unwrap().sub(&kron(&m.transpose(), &CMatrix::identity(2)).unwrap()).unwrap())
            .collect();
        let ns = joint_nullspace(&blocks, &RankPolicy::default()).unwrap();
        prop_assert_eq!(ns.dim(), 1);
        for (i, u) in ns.basis.iter().enumerate() {
            for (j, v) in ns.basis.iter().enumerate() {
                let ip: C64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((ip - C64::new(want, 0.0)).norm() < 1e-10);
            }
            for blk in &blocks {
                let r = blk.apply(u).unwrap();
                prop_assert!(r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() < 1e-7);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn projection_is_idempotent_and_invariant(w in hermitian(8)) {
        let word = uword("U,U,U^H", 2);
        let b = commutant_basis(&word, 4, 5).unwrap();
        let p = exact_project(&w, &b).unwrap();
        prop_assert!(exact_project(&p, &b).unwrap().distance(&p).unwrap() < 1e-10);
        prop_assert!(check_invariance(&p, &word, 20, 1).unwrap() < 1e-8);
        prop_assert!((p.trace() - w.trace()).norm() < 1e-10);
    }

    #[test]
    fn twirl_preserves_trace_and_hermiticity(w in hermitian(4), seed in 0u64..100) {
        let r = mc_twirl(&w, &uword("U,U^H", 2), 16, seed).unwrap();
        let t = w.trace();
        prop_assert!((r.trace_out[0] - t.re).abs() < 1e-12 && (r.trace_out[1] - t.im).abs() < 1e-12);
        prop_assert!(r.output.hermitian_deviation() < 1e-10);
        prop_assert!(hs_inner(&r.output, &r.output).unwrap().re >= 0.0);
    }
}
