mod common;

use common::*;
use kgframes::frame::{
    analysis, bessel_bound, canonical_dual, check_kg_frame, check_kg_frame_on, direct_sum_inner,
    frame_operator, is_k_dual, kk_star, optimal_lower_bisection, optimal_lower_bound, synthesis,
};
use kgframes::module::inner;
use kgframes::{AdjOp, GFrameFamily, ModuleVec, Submodule, DEFAULT_TOL};
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 1usize..3, 1usize..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn analysis_is_adjoint_of_synthesis((seed, d, n) in dims()) {
        let mut r = rng(seed);
        let f = family_maybe_deficient(&mut r, d, n);
        let x = vector(&mut r, d, n);
        let g: Vec<ModuleVec> = f.dst_lens().iter().map(|&m| vector(&mut r, d, m)).collect();
        let lhs = direct_sum_inner(f.space(), &analysis(&f, &x).unwrap(), &g).unwrap();
        let rhs = inner(&x, &synthesis(&f, &g).unwrap()).unwrap();
        prop_assert!(rel_diff(lhs.matrix(), rhs.matrix()) <= 1e-9);
    }

    #[test]
    fn synthesis_after_analysis_is_frame_operator((seed, d, n) in dims()) {
        let mut r = rng(seed);
        let f = family_maybe_deficient(&mut r, d, n);
        let x = vector(&mut r, d, n);
        let via = synthesis(&f, &analysis(&f, &x).unwrap()).unwrap();
        let direct = frame_operator(&f).apply(&x).unwrap();
        prop_assert!(rel_diff(via.block_row(), direct.block_row()) <= 1e-9);
    }

    #[test]
    fn frame_form_is_weighted_sum_of_squares((seed, d, n) in dims()) {
        let mut r = rng(seed);
        let f = family_maybe_deficient(&mut r, d, n);
        let x = vector(&mut r, d, n);
        let coeffs = analysis(&f, &x).unwrap();
        let sum = direct_sum_inner(f.space(), &coeffs, &coeffs).unwrap();
        let form = inner(&frame_operator(&f).apply(&x).unwrap(), &x).unwrap();
        prop_assert!(rel_diff(form.matrix(), sum.matrix()) <= 1e-9);
    }

    /// No sampled Rayleigh quotient exceeds the Bessel bound, and the top
    /// eigenvector attains it.
    #[test]
    fn bessel_bound_is_largest_rayleigh_quotient((seed, d, n) in dims()) {
        let mut r = rng(seed);
        let f = family_maybe_deficient(&mut r, d, n);
        let s = frame_operator(&f);
        let b = bessel_bound(&f);
        let quotient = |x: &ModuleVec| {
            let num = inner(&s.apply(x).unwrap(), x).unwrap().op_norm();
            num / inner(x, x).unwrap().op_norm()
        };
        for _ in 0..200 {
            prop_assert!(quotient(&vector(&mut r, d, n)) <= b * (1.0 + 1e-12));
        }
        let spec = kgframes::eigen::hermitian_eig(s.matrix()).unwrap();
        let top = kgframes::CMatrix::from_fn(d, n * d, |i, j| {
            if i == 0 { spec.basis[(j, n * d - 1)].conj() } else { real(0.0) }
        });
        let q = quotient(&ModuleVec::from_block_row(d, top).unwrap());
        prop_assert!((q - b).abs() <= 1e-9 * b.max(1.0));
    }

    #[test]
    fn weight_scaling_is_covariant((seed, d, n) in dims(), c in 0.1f64..10.0) {
        let mut r = rng(seed);
        let f = spanning_family(&mut r, d, n);
        let k = op(&mut r, d, n, n);
        let g = f.scale_weights(c).unwrap();
        let (s1, s2) = (frame_operator(&f), frame_operator(&g));
        prop_assert!(rel_diff(s2.matrix(), &s1.matrix().scale_real(c)) <= 1e-12);
        let (b1, b2) = (bessel_bound(&f), bessel_bound(&g));
        prop_assert!((b2 - c * b1).abs() <= 1e-12 * (c * b1).max(1.0));
        let (l1, l2) = (optimal_lower_bound(&f, &k).unwrap(), optimal_lower_bound(&g, &k).unwrap());
        prop_assert!((l2 - c * l1).abs() <= 1e-12 * (c * l1).max(1.0));
    }

    /// With `R(K) ⊆ R(S)` the closed form and the bisection agree.
    #[test]
    fn bisection_matches_closed_form((seed, d, n) in dims()) {
        let mut r = rng(seed);
        let f = family_maybe_deficient(&mut r, d, n);
        let s = frame_operator(&f);
        let k = op(&mut r, d, n, n).then(&s.range_projector(DEFAULT_TOL)).unwrap();
        let closed = optimal_lower_bound(&f, &k).unwrap();
        let bis = optimal_lower_bisection(&f, &k).unwrap();
        prop_assert!(closed > 0.0);
        prop_assert!((closed - bis).abs() <= 1e-7 * closed);
        // A·KK^* ≤ S holds at the optimum and fails just past it.
        let kk = kk_star(&k);
        prop_assert!(kk.scale(closed).loewner_leq(&s, 1e-9));
        prop_assert!(!kk.scale(closed * (1.0 + 1e-4)).loewner_leq(&s, 1e-12));
    }

    /// Invertible `K` on a spanning family: a K-g-frame with lower bound at
    /// least `λ_min(S)/‖K‖²`.
    #[test]
    fn spanning_family_with_invertible_k_is_a_frame((seed, d, n) in dims()) {
        let mut r = rng(seed);
        let f = spanning_family(&mut r, d, n);
        let k = op(&mut r, d, n, n);
        let rep = check_kg_frame(&f, &k, DEFAULT_TOL).unwrap();
        let s = frame_operator(&f);
        let floor = s.min_eigenvalue() / k.op_norm().powi(2);
        prop_assert!(rep.is_bessel);
        prop_assert!(rep.optimal_lower >= floor * (1.0 - 1e-9));
        prop_assert_eq!(rep.is_kg_frame, floor > DEFAULT_TOL);
    }

    #[test]
    fn canonical_dual_reproduces_k((seed, d, n) in dims()) {
        let mut r = rng(seed);
        let f = family_maybe_deficient(&mut r, d, n);
        let k = op(&mut r, d, n, n).then(&frame_operator(&f).range_projector(DEFAULT_TOL)).unwrap();
        let dual = canonical_dual(&f, &k, DEFAULT_TOL).unwrap();
        prop_assert!(is_k_dual(&f, &dual, &k, 1e-8).unwrap());
    }

    /// Restricting to a subspace can only raise the lower bound and lower the
    /// Bessel bound.
    #[test]
    fn restriction_is_monotone((seed, d, n) in dims()) {
        let mut r = rng(seed);
        let f = spanning_family(&mut r, d, n);
        let k = op(&mut r, d, n, n);
        let sub = Submodule::range_of(maybe_deficient(&mut r, d, n, n));
        let global = check_kg_frame(&f, &k, DEFAULT_TOL).unwrap();
        let local = check_kg_frame_on(&f, &k, &sub, DEFAULT_TOL).unwrap();
        prop_assert!(local.bessel_bound <= global.bessel_bound * (1.0 + 1e-9));
        prop_assert!(local.optimal_lower >= global.optimal_lower * (1.0 - 1e-9));
        let whole = check_kg_frame_on(&f, &k, &Submodule::full(d, n), DEFAULT_TOL).unwrap();
        prop_assert!((whole.bessel_bound - global.bessel_bound).abs() <= 1e-9 * global.bessel_bound.max(1.0));
    }

    #[test]
    fn frame_check_on_identity_family_is_parseval(d in 1usize..4, n in 1usize..4) {
        let f = GFrameFamily::from_weights(vec![1.0], vec![AdjOp::identity(d, n)]).unwrap();
        let rep = check_kg_frame(&f, &AdjOp::identity(d, n), DEFAULT_TOL).unwrap();
        prop_assert!(rep.is_parseval);
        prop_assert_eq!(rep.tight_constant, Some(1.0));
    }
}
