mod common;

use common::*;
use kgframes::eigen::hermitian_eig;
use kgframes::module::{douglas_solve, majorizes, range_inclusion};
use kgframes::{AdjOp, Error, Submodule, DEFAULT_TOL};
use proptest::prelude::*;

fn op_close(a: &AdjOp, b: &AdjOp, tol: f64) -> bool {
    rel_diff(a.matrix(), b.matrix()) <= tol
}

/// Paper-order product `T T^*`: apply `T^*`, then `T`.
fn outer(t: &AdjOp) -> AdjOp {
    t.adjoint().then(t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn penrose_identities(seed in any::<u64>(), d in 1usize..3, n in 1usize..4, m in 1usize..4) {
        let mut r = rng(seed);
        let t = maybe_deficient(&mut r, d, n, m);
        let tp = t.pinv(DEFAULT_TOL);
        // T T† T = T and T† T T† = T† in application order.
        prop_assert!(op_close(&t.then(&tp).unwrap().then(&t).unwrap(), &t, 1e-9));
        prop_assert!(op_close(&tp.then(&t).unwrap().then(&tp).unwrap(), &tp, 1e-9));
        let (p_range, p_kernel) = (t.range_projector(DEFAULT_TOL), t.kernel_projector(DEFAULT_TOL));
        for p in [&p_range, &p_kernel] {
            prop_assert!(op_close(&p.adjoint(), p, 1e-9));
            prop_assert!(op_close(&p.then(p).unwrap(), p, 1e-9));
        }
        // P_R(T) fixes R(T); P_N(T) is annihilated by T.
        prop_assert!(op_close(&t.then(&p_range).unwrap(), &t, 1e-9));
        prop_assert!(p_kernel.then(&t).unwrap().op_norm() <= 1e-9 * t.op_norm().max(1.0));
    }

    #[test]
    fn min_gain_squared_is_smallest_gram_eigenvalue(
        seed in any::<u64>(), d in 1usize..3, n in 1usize..4, m in 1usize..4
    ) {
        let t = op(&mut rng(seed), d, n, m);
        // ‖Tx‖² = X (M M^*) X^* over block rows, so the least gain is λ_min(M M^*).
        let gram = t.matrix().mul_adjoint(t.matrix());
        let lmin = hermitian_eig(&gram).unwrap().min().max(0.0);
        let g = t.min_gain();
        prop_assert!((g * g - lmin).abs() <= 1e-9 * gram.frobenius_norm().max(1.0));
    }

    /// Onto iff the adjoint is bounded below, checked against the rank of the
    /// representing matrix and against the existence of a right inverse.
    #[test]
    fn surjectivity_iff_adjoint_bounded_below(
        seed in any::<u64>(), d in 1usize..3, n in 1usize..5, m in 1usize..4
    ) {
        let mut r = rng(seed);
        let t = maybe_deficient(&mut r, d, n, m);
        let full_rank = t.rank(DEFAULT_TOL) == m * d;
        let right_inverse = op_close(
            &t.pinv(DEFAULT_TOL).then(&t).unwrap(),
            &AdjOp::identity(d, m),
            1e-9,
        );
        prop_assert_eq!(t.is_surjective(DEFAULT_TOL), full_rank);
        prop_assert_eq!(full_rank, right_inverse);
        prop_assert_eq!(full_rank, t.adjoint().min_gain() > DEFAULT_TOL * t.op_norm());
    }

    /// `T' = T X` has range inside `R(T)`; the reduced solution solves it and
    /// has least norm among `Q + P_N(T) Z`.
    #[test]
    fn douglas_factorization(seed in any::<u64>(), d in 1usize..3, n in 1usize..4, k in 1usize..4) {
        let mut r = rng(seed);
        let t = maybe_deficient(&mut r, d, n, n);
        let x = op(&mut r, d, k, n);
        let tp = x.then(&t).unwrap();
        prop_assert!(range_inclusion(&tp, &t, DEFAULT_TOL).unwrap());
        let q = douglas_solve(&t, &tp, DEFAULT_TOL).unwrap();
        let residual = q.then(&t).unwrap().try_sub(&tp).unwrap().op_norm();
        prop_assert!(residual <= 1e-9 * tp.op_norm().max(1.0));
        let kernel = t.kernel_projector(DEFAULT_TOL);
        for _ in 0..8 {
            let z = op(&mut r, d, k, n).then(&kernel).unwrap();
            let alt = q.try_add(&z).unwrap();
            prop_assert!(alt.then(&t).unwrap().try_sub(&tp).unwrap().op_norm() <= 1e-8 * tp.op_norm().max(1.0));
            prop_assert!(alt.op_norm() >= q.op_norm() * (1.0 - 1e-12));
        }
        let lambda = majorizes(&t, &tp).unwrap();
        prop_assert!(outer(&tp).loewner_leq(&outer(&t).scale(lambda), 1e-9));
        if lambda > 1e-6 {
            prop_assert!(!outer(&tp).loewner_leq(&outer(&t).scale(lambda * (1.0 - 1e-3)), 1e-12));
        }
    }

    #[test]
    fn douglas_rejects_escaping_range(seed in any::<u64>(), d in 1usize..3, n in 2usize..5) {
        let mut r = rng(seed);
        let t = low_rank(&mut r, d, n, n, n * d - 1);
        let tp = op(&mut r, d, n, n);
        prop_assert!(!range_inclusion(&tp, &t, DEFAULT_TOL).unwrap());
        let rejected = matches!(douglas_solve(&t, &tp, DEFAULT_TOL), Err(Error::NoSolution { .. }));
        prop_assert!(rejected);
        prop_assert!(majorizes(&t, &tp).is_none());
    }

    #[test]
    fn submodule_projector_contains_range(seed in any::<u64>(), d in 1usize..3, n in 1usize..4) {
        let mut r = rng(seed);
        let g = maybe_deficient(&mut r, d, n, n);
        let sub = Submodule::range_of(g.clone());
        let x = vector(&mut r, d, n);
        prop_assert!(sub.contains(&g.apply(&x).unwrap(), DEFAULT_TOL).unwrap());
        let p = sub.projector(DEFAULT_TOL);
        let px = p.apply(&x).unwrap();
        prop_assert!(sub.contains(&px, 1e-8).unwrap());
        prop_assert_eq!(sub.basis(DEFAULT_TOL).rows(), g.rank(DEFAULT_TOL));
    }
}
