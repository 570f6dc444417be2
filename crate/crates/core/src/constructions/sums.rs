//! Constructions that add two families memberwise.

use std::collections::BTreeMap;

use super::single::scaled;
use super::{
    gain_on_range, inv_sq, negligible, pinv_norm, triangle_sq, trivial_intersection,
    ConstructionResult, INFO_CLOSED_RANGE, INFO_COMPLEMENTED,
};
use crate::error::{Error, Result};
use crate::frame::{
    bessel_bound, check_kg_frame, cross_operator, duality_defect, frame_operator, FrameBounds,
    GFrameFamily,
};
use crate::module::{majorizes_with_tol, range_inclusion, AdjOp};

fn same_destinations(f: &GFrameFamily, g: &GFrameFamily) -> Result<()> {
    if f.dst_lens() != g.dst_lens() || f.source_len() != g.source_len() {
        return Err(Error::ShapeMismatch(format!(
            "members map into {:?} and {:?}",
            f.dst_lens(),
            g.dst_lens()
        )));
    }
    Ok(())
}

fn member_sum(f: &GFrameFamily, g: &GFrameFamily) -> Result<GFrameFamily> {
    f.zip_members(g, |a, b| a.try_add(b))
}

/// `{Υ_ξ + Φ_ξ}` for a dual pair with `K₁ ≥ 0`, whose frame operator is
/// `S_Υ + S_Φ + K₁ + K₁^*`.
///
/// Corrected upper constant: `(√B₁ + √B₂)²`, since the cross terms do not
/// vanish; the claimed `B₁ + B₂` is reported only.
pub fn dual_sum(
    upsilon: &GFrameFamily,
    phi: &GFrameFamily,
    k1: &AdjOp,
    tol: f64,
) -> Result<ConstructionResult> {
    same_destinations(upsilon, phi)?;
    if !k1.is_positive(tol) {
        return Err(Error::NotPositive {
            min_eigenvalue: k1.min_eigenvalue(),
        });
    }
    let defect = duality_defect(upsilon, phi, k1)?;
    if defect > tol * k1.op_norm().max(1.0) {
        return Err(Error::DualityFailed { defect });
    }
    let family = member_sum(upsilon, phi)?;
    let s_sum = frame_operator(&family);
    let s_u = frame_operator(upsilon);
    let s_p = frame_operator(phi);
    let predicted = s_u.try_add(&s_p)?.try_add(k1)?.try_add(&k1.adjoint())?;
    let identity_defect = s_sum.try_sub(&predicted)?.op_norm();
    let scale = s_u.op_norm() + s_p.op_norm() + 2.0 * k1.op_norm();

    let base = check_kg_frame(upsilon, k1, tol)?;
    let (c, b1) = (base.optimal_lower, base.bessel_bound);
    let b2 = bessel_bound(phi);
    let certified = check_kg_frame(&family, k1, tol)?;

    let mut checks = BTreeMap::new();
    checks.insert("upsilon_is_kg_frame".to_string(), base.is_kg_frame);
    checks.insert(
        "frame_operator_identity".to_string(),
        negligible(identity_defect, scale, tol),
    );
    Ok(ConstructionResult::new(
        "3.1i",
        family,
        FrameBounds::new(c, b1 + b2),
        FrameBounds::new(c, triangle_sq(&[(b1, 1.0), (b2, 1.0)])),
        certified,
        checks,
        vec![INFO_CLOSED_RANGE.to_string()],
    ))
}

/// `{Υ_ξ + Φ_ξ}` as a `(K₁+K₂)`-g-frame when `T_Υ T_Φ^* = 0`.
///
/// Corrected lower constant: `min{A₁, A₂}/2`; the claimed `min{A₁, A₂}`
/// omits the parallelogram factor.
pub fn orthogonal_sum(
    upsilon: &GFrameFamily,
    phi: &GFrameFamily,
    k1: &AdjOp,
    k2: &AdjOp,
    tol: f64,
) -> Result<ConstructionResult> {
    same_destinations(upsilon, phi)?;
    let b1 = bessel_bound(upsilon);
    let b2 = bessel_bound(phi);
    let cross = cross_operator(upsilon, phi)?.op_norm();
    if cross > tol * (b1 * b2).sqrt().max(1.0) {
        return Err(Error::NotOrthogonal { defect: cross });
    }
    let family = member_sum(upsilon, phi)?;
    let split_defect = frame_operator(&family)
        .try_sub(&frame_operator(upsilon).try_add(&frame_operator(phi))?)?
        .op_norm();
    let r1 = check_kg_frame(upsilon, k1, tol)?;
    let r2 = check_kg_frame(phi, k2, tol)?;
    let k = k1.try_add(k2)?;
    let certified = check_kg_frame(&family, &k, tol)?;
    let a_min = r1.optimal_lower.min(r2.optimal_lower);

    let mut checks = BTreeMap::new();
    checks.insert("upsilon_is_k1_frame".to_string(), r1.is_kg_frame);
    checks.insert("phi_is_k2_frame".to_string(), r2.is_kg_frame);
    checks.insert(
        "energy_splits".to_string(),
        negligible(split_defect, b1 + b2, tol),
    );
    Ok(ConstructionResult::new(
        "3.1ii",
        family,
        FrameBounds::new(a_min, b1 + b2),
        FrameBounds::new(a_min / 2.0, b1 + b2),
        certified,
        checks,
        vec![INFO_CLOSED_RANGE.to_string()],
    ))
}

/// `Θ₁ T_Υ T_Φ^* Θ₂^*` for `Θ_i : A^n → A^p`.
fn mixed_cross(
    upsilon: &GFrameFamily,
    phi: &GFrameFamily,
    theta1: &AdjOp,
    theta2: &AdjOp,
) -> Result<AdjOp> {
    let c = cross_operator(upsilon, phi)?;
    theta2.adjoint().then(&c)?.then(theta1)
}

fn check_theta_shapes(f: &GFrameFamily, theta1: &AdjOp, theta2: &AdjOp, k2: &AdjOp) -> Result<()> {
    let n = f.source_len();
    let p = theta1.dst_len();
    if theta1.src_len() != n || theta2.src_len() != n || theta2.dst_len() != p {
        return Err(Error::DimensionMismatch(
            "Θ₁ and Θ₂ must both map the source module into a common module".into(),
        ));
    }
    if k2.src_len() != p || k2.dst_len() != p {
        return Err(Error::DimensionMismatch(
            "K₂ must be an endomorphism of the destination of Θ₁".into(),
        ));
    }
    Ok(())
}

/// `{Υ_ξ Θ₁^* + Φ_ξ Θ₂^*}` as a K₂-g-frame on the destination of `Θ_i`.
///
/// Corrected constants: lower `α₁ γ²` with `γ` the gain of `Θ₁^*` on
/// `R(K₂^*)`, upper `(√β₁‖Θ₁‖ + √β₂‖Θ₂‖)²`.
#[allow(clippy::too_many_arguments)]
pub fn weighted_operator_sum(
    upsilon: &GFrameFamily,
    phi: &GFrameFamily,
    k1: &AdjOp,
    k2: &AdjOp,
    theta1: &AdjOp,
    theta2: &AdjOp,
    tol: f64,
) -> Result<ConstructionResult> {
    same_destinations(upsilon, phi)?;
    check_theta_shapes(upsilon, theta1, theta2, k2)?;
    let (t1s, t2s) = (theta1.adjoint(), theta2.adjoint());
    let family = upsilon.zip_members(phi, |u, f| t1s.then(u)?.try_add(&t2s.then(f)?))?;

    let m = mixed_cross(upsilon, phi, theta1, theta2)?;
    let s_phi = frame_operator(phi);
    let hyp = m
        .try_add(&m.adjoint())?
        .try_add(&t2s.then(&s_phi)?.then(theta2)?)?;
    let intertwining = k1.then(theta1)?.try_sub(&theta1.then(k2)?)?.op_norm();

    let base = check_kg_frame(upsilon, k1, tol)?;
    let (a1, b1) = (base.optimal_lower, base.bessel_bound);
    let b2 = bessel_bound(phi);
    let (n1, n2) = (theta1.op_norm(), theta2.op_norm());
    let certified = check_kg_frame(&family, k2, tol)?;

    let mut checks = BTreeMap::new();
    checks.insert("upsilon_is_k1_frame".to_string(), base.is_kg_frame);
    checks.insert(
        "cross_hypothesis_positive".to_string(),
        hyp.is_positive(tol),
    );
    checks.insert(
        "theta1_intertwines".to_string(),
        negligible(intertwining, n1 * k1.op_norm().max(k2.op_norm()), tol),
    );
    checks.insert(
        "range_k2_star_meets_kernel_theta1_star_trivially".to_string(),
        trivial_intersection(&k2.adjoint(), &t1s, tol),
    );

    let claimed = FrameBounds::new(
        scaled(a1, inv_sq(pinv_norm(theta1, tol))),
        b1 * n1 * n1 + b2 * n2 * n2,
    );
    let corrected_lower = match gain_on_range(&t1s, &k2.adjoint(), tol) {
        None => f64::INFINITY,
        Some(g) => scaled(a1, g * g),
    };
    let corrected = FrameBounds::new(corrected_lower, triangle_sq(&[(b1, n1), (b2, n2)]));
    Ok(ConstructionResult::new(
        "3.2",
        family,
        claimed,
        corrected,
        certified,
        checks,
        vec![INFO_CLOSED_RANGE.to_string()],
    ))
}

/// `{α₁ Υ_ξ Θ₁^* + α₂ Φ_ξ Θ₂^*}` as a K₂-g-frame when one of the range
/// conditions holds for `P = α₁Θ₁ + α₂Θ₂` or `Q = α₁Θ₁ - α₂Θ₂`.
///
/// Lower constant `(λ/2) α^{-1} ‖K₁^†‖^{-2}` for the branch that holds
/// (the larger one when both do). Corrected upper
/// `(α₁√B₁‖Θ₁‖ + α₂√B₂‖Θ₂‖)²`.
#[allow(clippy::too_many_arguments)]
pub fn scalar_weighted_sum(
    upsilon: &GFrameFamily,
    phi: &GFrameFamily,
    k1: &AdjOp,
    k2: &AdjOp,
    theta1: &AdjOp,
    theta2: &AdjOp,
    alpha1: f64,
    alpha2: f64,
    tol: f64,
) -> Result<ConstructionResult> {
    same_destinations(upsilon, phi)?;
    check_theta_shapes(upsilon, theta1, theta2, k2)?;
    for (name, a) in [("alpha1", alpha1), ("alpha2", alpha2)] {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::Validation {
                field: name.to_string(),
                message: format!("weight must be finite and non-negative, got {a}"),
            });
        }
    }
    let (t1s, t2s) = (theta1.adjoint(), theta2.adjoint());
    let family = upsilon.zip_members(phi, |u, f| {
        t1s.then(u)?
            .scale(alpha1)
            .try_add(&t2s.then(f)?.scale(alpha2))
    })?;
    let p = theta1.scale(alpha1).try_add(&theta2.scale(alpha2))?;
    let q = theta1.scale(alpha1).try_sub(&theta2.scale(alpha2))?;
    let branch = |x: &AdjOp| -> Result<bool> {
        Ok(range_inclusion(k2, x, tol)? && range_inclusion(&x.adjoint(), k1, tol)?)
    };
    let (cond_p, cond_q) = (branch(&p)?, branch(&q)?);

    let m = mixed_cross(upsilon, phi, theta1, theta2)?;
    let cross_positive = m.try_add(&m.adjoint())?.is_positive(tol);

    let r1 = check_kg_frame(upsilon, k1, tol)?;
    let r2 = check_kg_frame(phi, k1, tol)?;
    let (b1, b2) = (r1.bessel_bound, r2.bessel_bound);
    let lambda = r1.optimal_lower.min(r2.optimal_lower);
    let k1_factor = inv_sq(pinv_norm(k1, tol));
    let branch_lower = |x: &AdjOp| -> f64 {
        match majorizes_with_tol(x, k2, tol) {
            None => 0.0,
            Some(a) if a == 0.0 => f64::INFINITY,
            Some(a) => scaled(lambda / 2.0, k1_factor / a),
        }
    };
    let mut lower: f64 = 0.0;
    if cond_p {
        lower = lower.max(branch_lower(&p));
    }
    if cond_q {
        lower = lower.max(branch_lower(&q));
    }
    let (n1, n2) = (theta1.op_norm(), theta2.op_norm());
    let certified = check_kg_frame(&family, k2, tol)?;

    let mut checks = BTreeMap::new();
    checks.insert("upsilon_is_k1_frame".to_string(), r1.is_kg_frame);
    checks.insert("phi_is_k1_frame".to_string(), r2.is_kg_frame);
    checks.insert("cross_hypothesis_positive".to_string(), cross_positive);
    checks.insert(
        "range_condition_sum_or_difference".to_string(),
        cond_p || cond_q,
    );
    let informational = vec![
        INFO_CLOSED_RANGE.to_string(),
        INFO_COMPLEMENTED.to_string(),
        format!("condition (i) through the sum: {cond_p}"),
        format!("condition (ii) through the difference: {cond_q}"),
    ];
    Ok(ConstructionResult::new(
        "3.3",
        family,
        FrameBounds::new(
            lower,
            alpha1 * alpha1 * b1 * n1 * n1 + alpha2 * alpha2 * b2 * n2 * n2,
        ),
        FrameBounds::new(lower, triangle_sq(&[(b1, alpha1 * n1), (b2, alpha2 * n2)])),
        certified,
        checks,
        informational,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_TOL;
    use crate::constructions::ENVELOPE_TOL;
    use crate::matrix::CMatrix;

    fn scalar(rows: &[&[f64]]) -> AdjOp {
        AdjOp::from_scalar_matrix(1, &CMatrix::from_real_rows(rows))
    }

    fn one_atom(m: AdjOp) -> GFrameFamily {
        GFrameFamily::from_weights(vec![1.0], vec![m]).unwrap()
    }

    #[test]
    fn dual_sum_of_parseval_identity() {
        let f = one_atom(AdjOp::identity(1, 2));
        let r = dual_sum(&f, &f, &AdjOp::identity(1, 2), DEFAULT_TOL).unwrap();
        assert!(r.hypotheses_hold());
        assert!((r.certified.optimal_lower - 4.0).abs() < 1e-12);
        assert!((r.certified.bessel_bound - 4.0).abs() < 1e-12);
        assert!(r.envelope_holds(ENVELOPE_TOL));
        // B₁ + B₂ = 2 is below the true Bessel bound 4.
        assert!(!r.discrepancy_notes.is_empty());
    }

    #[test]
    fn dual_sum_with_zero_partner() {
        let f = one_atom(scalar(&[&[1.0, 0.0], &[0.0, 2.0]]));
        let g = one_atom(AdjOp::zero(1, 2, 2));
        let r = dual_sum(&f, &g, &AdjOp::zero(1, 2, 2), DEFAULT_TOL).unwrap();
        assert!(r.certified.degenerate_k);
        assert!(
            frame_operator(&r.family)
                .matrix()
                .max_abs_diff(frame_operator(&f).matrix())
                < 1e-15
        );
    }

    #[test]
    fn dual_sum_preconditions() {
        let f = one_atom(AdjOp::identity(1, 2));
        let neg = scalar(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(matches!(
            dual_sum(&f, &f, &neg, DEFAULT_TOL),
            Err(Error::NotPositive { .. })
        ));
        let half = AdjOp::identity(1, 2).scale(0.5);
        assert!(matches!(
            dual_sum(&f, &f, &half, DEFAULT_TOL),
            Err(Error::DualityFailed { .. })
        ));
        let other = one_atom(
            AdjOp::identity(1, 2)
                .then(&scalar(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]))
                .unwrap(),
        );
        assert!(matches!(
            dual_sum(&f, &other, &AdjOp::identity(1, 2), DEFAULT_TOL),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn orthogonal_sum_on_disjoint_blocks() {
        let f = one_atom(scalar(&[&[1.0, 0.0], &[0.0, 0.0]]));
        let g = one_atom(scalar(&[&[0.0, 0.0], &[0.0, 1.0]]));
        let k1 = scalar(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let k2 = scalar(&[&[0.0, 0.0], &[0.0, 1.0]]);
        let r = orthogonal_sum(&f, &g, &k1, &k2, DEFAULT_TOL).unwrap();
        assert!(r.hypotheses_hold(), "{:?}", r.hypothesis_checks);
        assert!((r.certified.optimal_lower - 1.0).abs() < 1e-12);
        assert!(r.envelope_holds(ENVELOPE_TOL));
        assert!(matches!(
            orthogonal_sum(&f, &f, &k1, &k1, DEFAULT_TOL),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn weighted_operator_sum_reduces_to_input() {
        let f = GFrameFamily::from_weights(
            vec![1.0, 0.5],
            vec![
                scalar(&[&[1.0, 0.2], &[0.5, 1.0]]),
                scalar(&[&[0.3, 0.0], &[1.0, 0.4]]),
            ],
        )
        .unwrap();
        let k = scalar(&[&[1.0, 0.3], &[0.0, 0.7]]);
        let base = check_kg_frame(&f, &k, DEFAULT_TOL).unwrap();
        let r = weighted_operator_sum(
            &f,
            &f,
            &k,
            &k,
            &AdjOp::identity(1, 2),
            &AdjOp::zero(1, 2, 2),
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(r.hypotheses_hold(), "{:?}", r.hypothesis_checks);
        assert!((r.certified.optimal_lower - base.optimal_lower).abs() < 1e-12);
        assert!((r.corrected.lower - base.optimal_lower).abs() < 1e-12);
        assert!((r.corrected.upper - base.bessel_bound).abs() < 1e-12);
    }

    #[test]
    fn scalar_weighted_sum_forced_branch() {
        let f = one_atom(scalar(&[&[1.0, 0.0], &[0.0, 2.0]]));
        let id = AdjOp::identity(1, 2);
        let k2 = scalar(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let r = scalar_weighted_sum(&f, &f, &id, &k2, &id, &id, 1.0, 1.0, DEFAULT_TOL).unwrap();
        assert!(r.hypotheses_hold(), "{:?}", r.hypothesis_checks);
        assert!(r.informational.iter().any(|s| s.ends_with("sum: true")));
        assert!(r
            .informational
            .iter()
            .any(|s| s.ends_with("difference: false")));
        assert!(r.envelope_holds(ENVELOPE_TOL));
    }
}
