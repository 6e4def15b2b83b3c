use proptest::prelude::*;

use subrank::certify::{certify_lower, sample_leg_subspaces, Mode};
use subrank::linalg::Matrix;
use subrank::oracle::{brute_subrank, certificate_for_diagonal, verify_certificate};
use subrank::subspace::{lift_subspace, sum_rank};
use subrank::tensor::sample_x_r;
use subrank::{FieldSpec, Tensor, TensorSubspace};

fn small_prime() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![Just(2u64), Just(3), Just(5), Just(7), Just(65521), Just(2147483647)]
        .prop_map(|p| FieldSpec::new(p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_is_transpose_invariant(field in small_prime(), r in 1usize..9, c in 1usize..9, seed: u64) {
        let m = Matrix::random(field, r, c, seed);
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert!(m.rank() <= r.min(c));
    }

    #[test]
    fn rank_of_kron_is_product(field in small_prime(), a in 1usize..5, b in 1usize..5, seed: u64) {
        let x = Matrix::random(field, a, b, seed);
        let y = Matrix::random(field, b, a, seed ^ 1);
        prop_assert_eq!(x.kron(&y).unwrap().rank(), x.rank() * y.rank());
    }

    #[test]
    fn restriction_composes(field in small_prime(), seed: u64) {
        let t = Tensor::random(field, &[3, 2, 4], seed);
        let first: Vec<Matrix> = [(2, 3), (3, 2), (2, 4)]
            .iter()
            .enumerate()
            .map(|(i, &(r, c))| Matrix::random(field, r, c, seed.wrapping_add(i as u64 + 1)))
            .collect();
        let second: Vec<Matrix> = [(1, 2), (2, 3), (3, 2)]
            .iter()
            .enumerate()
            .map(|(i, &(r, c))| Matrix::random(field, r, c, seed.wrapping_add(i as u64 + 10)))
            .collect();
        let composed: Vec<Matrix> = second.iter().zip(&first).map(|(b, a)| b.mul(a).unwrap()).collect();
        let stepwise = t.restrict(&first).unwrap().restrict(&second).unwrap();
        prop_assert_eq!(stepwise, t.restrict(&composed).unwrap());
    }

    #[test]
    fn lift_multiplies_dimension(field in small_prime(), n in 1usize..4, leg in 0usize..3, dim in 0usize..5, seed: u64) {
        let x = TensorSubspace::random(field, &[2, 3], dim.min(6), seed).unwrap();
        let lifted = lift_subspace(&x, leg, n).unwrap();
        prop_assert_eq!(lifted.dim(), n * x.dim());
        prop_assert_eq!(lifted.ambient_dim(), n * 6);
    }

    #[test]
    fn sum_rank_is_subadditive(field in small_prime(), a in 0usize..7, b in 0usize..7, seed: u64) {
        let x = TensorSubspace::random(field, &[2, 3], a, seed).unwrap();
        let y = TensorSubspace::coordinates(field, &[2, 3], (0..b.min(6)).collect()).unwrap();
        let s = sum_rank(&[&x, &y]).unwrap();
        prop_assert!(s <= x.dim() + y.dim());
        prop_assert!(s >= x.dim().max(y.dim()));
    }

    #[test]
    fn diagonal_certificates_verify(field in small_prime(), r in 0usize..4, extra in 0usize..3, seed: u64) {
        let dims = [r + extra, r + 1, r + extra + 1];
        let t = sample_x_r(field, &dims, r, seed).unwrap();
        let c = certificate_for_diagonal(&t, r).unwrap();
        prop_assert!(verify_certificate(&c, &t).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn certification_is_deterministic(n in 2usize..9, seed in 0u64..1000) {
        let f = FieldSpec::default();
        let r = (n / 2).max(1);
        let a = certify_lower(f, &[n, n, n], r, Mode::Strong, seed, 2).unwrap();
        let b = certify_lower(f, &[n, n, n], r, Mode::Strong, seed, 2).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(
            sample_leg_subspaces(f, &[n, n, n], r, seed).unwrap(),
            sample_leg_subspaces(f, &[n, n, n], r, seed).unwrap()
        );
    }

    #[test]
    fn weak_success_implies_strong(n in 2usize..12, seed in 0u64..1000) {
        let f = FieldSpec::default();
        for r in 1..=n {
            let weak = certify_lower(f, &[n, n, n], r, Mode::Weak, seed, 1).unwrap();
            if weak.is_certified() {
                prop_assert!(certify_lower(f, &[n, n, n], r, Mode::Strong, seed, 1).unwrap().is_certified());
            }
        }
    }

    #[test]
    fn certified_r_is_monotone_in_n(n in 2usize..10, seed in 0u64..1000) {
        let f = FieldSpec::default();
        for r in 1..=n {
            if certify_lower(f, &[n, n, n], r, Mode::Strong, seed, 3).unwrap().is_certified() {
                prop_assert!(certify_lower(f, &[n + 1, n + 1, n + 1], r, Mode::Strong, seed, 3).unwrap().is_certified());
            }
        }
    }

    #[test]
    fn brute_subrank_bounded_by_sides(bits in 0u32..(1 << 12)) {
        let gf3 = FieldSpec::new(3).unwrap();
        let t = Tensor::new(gf3, vec![2, 2, 3], (0..12).map(|i| u64::from(bits >> i & 1)).collect()).unwrap();
        let q = brute_subrank(&t).unwrap();
        prop_assert!(q <= 2);
        if t.is_zero() {
            prop_assert_eq!(q, 0);
        } else {
            prop_assert!(q >= 1);
        }
    }
}
