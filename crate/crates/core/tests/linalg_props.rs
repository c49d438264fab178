mod common;

use common::*;
use proptest::prelude::*;
use seqdec_core::linalg::{
    left_nullspace_basis, numerical_rank, pseudo_inverse, subspace_distance,
};

fn shape() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 1usize..10, 0usize..10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nullspace_annihilates_and_counts((seed, t, m) in shape(), rank_cap in 0usize..10) {
        let a = if rank_cap < m && rank_cap > 0 {
            randn(seed, t, rank_cap).matmul(&randn(seed ^ 1, rank_cap, m)).unwrap()
        } else {
            randn(seed, t, m)
        };
        let b = left_nullspace_basis(&a, 0.0).unwrap();
        let tol_eff = t.max(m) as f64 * f64::EPSILON;
        let scale = a.norm_fro().max(1e-300);
        prop_assert!(b.basis().matmul(&a).unwrap().norm_fro() <= 100.0 * tol_eff * scale);
        prop_assert_eq!(b.dim() + numerical_rank(&a, 0.0).unwrap(), t);
        prop_assert!(b.basis().row_orthonormality_error() <= 1e-10 * (b.dim().max(1) as f64).sqrt());
    }

    #[test]
    fn penrose_conditions((seed, n, m) in shape()) {
        let a = randn(seed, n, m.max(1));
        let p = pseudo_inverse(&a).unwrap();
        let apa = a.matmul(&p).unwrap().matmul(&a).unwrap();
        let pap = p.matmul(&a).unwrap().matmul(&p).unwrap();
        let ap = a.matmul(&p).unwrap();
        let pa = p.matmul(&a).unwrap();
        let tol = 1e-9;
        prop_assert!(apa.sub(&a).unwrap().norm_fro() <= tol * a.norm_fro());
        prop_assert!(pap.sub(&p).unwrap().norm_fro() <= tol * p.norm_fro());
        prop_assert!(ap.sub(&ap.adjoint()).unwrap().norm_fro() <= tol * ap.norm_fro());
        prop_assert!(pa.sub(&pa.adjoint()).unwrap().norm_fro() <= tol * pa.norm_fro());
    }

    #[test]
    fn pinv_of_row_orthonormal_is_adjoint(seed in any::<u64>(), t in 2usize..10, m in 1usize..5) {
        prop_assume!(m < t);
        let b = left_nullspace_basis(&randn(seed, t, m), 0.0).unwrap();
        let w = b.basis();
        let p = pseudo_inverse(w).unwrap();
        prop_assert!(p.sub(&w.adjoint()).unwrap().norm_fro() <= 1e-10);
    }

    #[test]
    fn distance_is_a_pseudometric(seed in any::<u64>(), n in 2usize..9, m1 in 0usize..8, m2 in 0usize..8, m3 in 0usize..8) {
        let b1 = left_nullspace_basis(&randn(seed, n, m1.min(n)), 0.0).unwrap();
        let b2 = left_nullspace_basis(&randn(seed ^ 7, n, m2.min(n)), 0.0).unwrap();
        let b3 = left_nullspace_basis(&randn(seed ^ 9, n, m3.min(n)), 0.0).unwrap();
        let d12 = subspace_distance(&b1, &b2).unwrap();
        let d21 = subspace_distance(&b2, &b1).unwrap();
        let d13 = subspace_distance(&b1, &b3).unwrap();
        let d23 = subspace_distance(&b2, &b3).unwrap();
        prop_assert!(d12 >= 0.0);
        prop_assert!((d12 - d21).abs() <= 1e-12);
        prop_assert!(d13 <= d12 + d23 + 1e-9);
        prop_assert!(subspace_distance(&b1, &b1).unwrap() <= 1e-12);
    }
}
