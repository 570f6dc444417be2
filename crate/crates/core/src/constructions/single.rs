//! Constructions that transform a single family: precomposition with an
//! adjoint, recovery, tight-frame equivalences, transfer between ranges,
//! range characterization and sums of the operator `K`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    commutator_norm, gain_on_range, inv_sq, lower_ok, negligible, pinv_norm, trivial_intersection,
    ConstructionResult, ENVELOPE_TOL, INFO_CLOSED_RANGE, INFO_COMPLEMENTED,
};
use crate::error::{Error, Result};
use crate::frame::{
    check_kg_frame, check_kg_frame_on, synthesis_operator, FrameBounds, GFrameFamily,
};
use crate::matrix::CMatrix;
use crate::module::{douglas_solve, majorizes_with_tol, range_inclusion, AdjOp, Submodule};

/// `a · f` where an infinite `a` (vacuous lower bound) stays infinite and a
/// zero `a` stays zero.
pub(crate) fn scaled(a: f64, f: f64) -> f64 {
    if a.is_infinite() {
        f64::INFINITY
    } else if a == 0.0 || f == 0.0 {
        0.0
    } else {
        a * f
    }
}

fn precompose_with_adjoint(family: &GFrameFamily, theta: &AdjOp) -> Result<GFrameFamily> {
    let theta_star = theta.adjoint();
    family.map_members(|_, m| theta_star.then(m))
}

fn precompose(family: &GFrameFamily, theta: &AdjOp) -> Result<GFrameFamily> {
    family.map_members(|_, m| theta.then(m))
}

/// Commutation check `‖XY - YX‖ ≤ tol · max(1, ‖X‖‖Y‖)`.
fn commutes(x: &AdjOp, y: &AdjOp, tol: f64) -> Result<bool> {
    Ok(negligible(
        commutator_norm(x, y)?,
        x.op_norm() * y.op_norm(),
        tol,
    ))
}

/// `{Υ_ξ Θ^*}` for `Θ` commuting with `K`.
///
/// Corrected lower constant: `A·γ²` with `γ` the smallest gain of `Θ^*` on
/// `R(K^*)`. The claimed `A‖(Θ^*)^†‖^{-2}` needs `R(K^*) ⊆ R(Θ)`, which the
/// trivial-intersection hypothesis alone does not provide.
pub fn precompose_adjoint(
    family: &GFrameFamily,
    k: &AdjOp,
    theta: &AdjOp,
    tol: f64,
) -> Result<ConstructionResult> {
    let base = check_kg_frame(family, k, tol)?;
    let (a, b) = (base.optimal_lower, base.bessel_bound);
    let new_family = precompose_with_adjoint(family, theta)?;
    let certified = check_kg_frame(&new_family, k, tol)?;
    let theta_star = theta.adjoint();
    let theta_norm_sq = theta.op_norm().powi(2);

    let mut checks = BTreeMap::new();
    checks.insert("input_is_kg_frame".to_string(), base.is_kg_frame);
    checks.insert("commutes_with_k".to_string(), commutes(theta, k, tol)?);
    checks.insert(
        "range_k_star_meets_kernel_theta_star_trivially".to_string(),
        trivial_intersection(&k.adjoint(), &theta_star, tol),
    );

    let claimed = FrameBounds::new(
        scaled(a, inv_sq(pinv_norm(&theta_star, tol))),
        b * theta_norm_sq,
    );
    let gamma = gain_on_range(&theta_star, &k.adjoint(), tol);
    let corrected_lower = match gamma {
        None => f64::INFINITY,
        Some(g) => scaled(a, g * g),
    };
    let corrected = FrameBounds::new(corrected_lower, b * theta_norm_sq);
    Ok(ConstructionResult::new(
        "2.1",
        new_family,
        claimed,
        corrected,
        certified,
        checks,
        vec![INFO_CLOSED_RANGE.to_string()],
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct RecoveryVerdict {
    pub k_surjective: bool,
    pub commutes: bool,
    pub theta_family_is_frame: bool,
    pub theta_star_family_is_frame: bool,
    pub hypotheses_hold: bool,
    /// Whether the original family is a K-g-frame; checked only when the
    /// hypotheses hold.
    pub conclusion: Option<bool>,
}

impl RecoveryVerdict {
    pub fn consistent(&self) -> bool {
        !self.hypotheses_hold || self.conclusion == Some(true)
    }
}

/// If `K` is onto, `Θ` commutes with `K` and both `{Υ_ξ Θ}` and
/// `{Υ_ξ Θ^*}` are K-g-frames, then `{Υ_ξ}` is one.
pub fn recover_frame_check(
    family: &GFrameFamily,
    k: &AdjOp,
    theta: &AdjOp,
    tol: f64,
) -> Result<RecoveryVerdict> {
    let k_surjective = k.is_surjective(tol);
    let commutes = commutes(theta, k, tol)?;
    let theta_family_is_frame = check_kg_frame(&precompose(family, theta)?, k, tol)?.is_kg_frame;
    let theta_star_family_is_frame =
        check_kg_frame(&precompose_with_adjoint(family, theta)?, k, tol)?.is_kg_frame;
    let hypotheses_hold =
        k_surjective && commutes && theta_family_is_frame && theta_star_family_is_frame;
    let conclusion = if hypotheses_hold {
        Some(check_kg_frame(family, k, tol)?.is_kg_frame)
    } else {
        None
    };
    Ok(RecoveryVerdict {
        k_surjective,
        commutes,
        theta_family_is_frame,
        theta_star_family_is_frame,
        hypotheses_hold,
        conclusion,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TightSurjectivityVerdict {
    pub delta: f64,
    pub k_star_gain: f64,
    pub commutes: bool,
    pub theta_surjective: bool,
    pub precomposed_is_frame: bool,
}

impl TightSurjectivityVerdict {
    pub fn agree(&self) -> bool {
        self.theta_surjective == self.precomposed_is_frame
    }
}

/// For a δ-tight family with `K^*` bounded below and `Θ` commuting with
/// `K`: `Θ` is onto iff `{Υ_ξ Θ^*}` is a K-g-frame.
pub fn tight_surjectivity_equivalence(
    family: &GFrameFamily,
    k: &AdjOp,
    theta: &AdjOp,
    tol: f64,
) -> Result<TightSurjectivityVerdict> {
    let base = check_kg_frame(family, k, tol)?;
    let delta = base
        .tight_constant
        .ok_or_else(|| Error::NotTight(format!("optimal lower {:.6e}", base.optimal_lower)))?;
    let k_star_gain = k.adjoint().min_gain();
    if k_star_gain <= tol * k.op_norm() {
        return Err(Error::HypothesisFailed(format!(
            "K^* is not bounded below (gain {k_star_gain:.3e})"
        )));
    }
    let commutes = commutes(theta, k, tol)?;
    let theta_surjective = theta.is_surjective(tol);
    let precomposed_is_frame =
        check_kg_frame(&precompose_with_adjoint(family, theta)?, k, tol)?.is_kg_frame;
    Ok(TightSurjectivityVerdict {
        delta,
        k_star_gain,
        commutes,
        theta_surjective,
        precomposed_is_frame,
    })
}

/// Moves a K-g-frame `{Υ_ξ T^*}` on `R(T)` to `{Υ_ξ Θ^*}` on `R(Θ)` through
/// `P = Θ T^†`, which satisfies `P T = Θ` when `N(Θ) = N(T)`.
///
/// Corrected lower constant: `C·γ²` with `γ` the smallest gain of `P^*` on
/// `K^*(R(Θ))`. The claimed constant uses the gain of `P^*` on `R(Θ)`,
/// which is only sufficient when `K^*` maps `R(Θ)` into itself.
pub fn transfer_frame(
    family: &GFrameFamily,
    k: &AdjOp,
    t: &AdjOp,
    theta: &AdjOp,
    tol: f64,
) -> Result<ConstructionResult> {
    let p = t.pinv(tol).then(theta)?;
    let range_t = Submodule::range_of(t.clone());
    let range_theta = Submodule::range_of(theta.clone());

    let base = check_kg_frame_on(&precompose_with_adjoint(family, t)?, k, &range_t, tol)?;
    let (c, b) = (base.optimal_lower, base.bessel_bound);
    let new_family = precompose_with_adjoint(family, theta)?;
    let certified = check_kg_frame_on(&new_family, k, &range_theta, tol)?;

    let kernel_t = t.kernel_projector(tol);
    let kernel_theta = theta.kernel_projector(tol);
    let kernels_equal = range_inclusion(&kernel_t, &kernel_theta, tol)?
        && range_inclusion(&kernel_theta, &kernel_t, tol)?;
    let p_invertible = match gain_on_range(&p, t, tol) {
        None => true,
        Some(g) => g > tol * p.op_norm(),
    };

    let mut checks = BTreeMap::new();
    checks.insert("input_is_kg_frame_on_range_t".to_string(), base.is_kg_frame);
    checks.insert("kernels_equal".to_string(), kernels_equal);
    checks.insert(
        "range_k_star_meets_kernel_theta_star_trivially".to_string(),
        trivial_intersection(&k.adjoint(), &theta.adjoint(), tol),
    );
    checks.insert(
        "k_commutes_with_theta_t_pinv".to_string(),
        commutes(k, &p, tol)?,
    );
    checks.insert("transfer_invertible_on_range_t".to_string(), p_invertible);

    let p_star = p.adjoint();
    let p_norm_sq = p.op_norm().powi(2);
    let claimed_lower = match gain_on_range(&p_star, theta, tol) {
        None => f64::INFINITY,
        Some(g) => scaled(c, g * g),
    };
    let corrected_lower = match gain_on_range(&p_star, &theta.then(&k.adjoint())?, tol) {
        None => f64::INFINITY,
        Some(g) => scaled(c, g * g),
    };
    Ok(ConstructionResult::new(
        "2.4",
        new_family,
        FrameBounds::new(claimed_lower, b * p_norm_sq),
        FrameBounds::new(corrected_lower, b * p_norm_sq),
        certified,
        checks,
        vec![INFO_CLOSED_RANGE.to_string()],
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct RangeEqualityVerdict {
    /// `R(K) = R(T_Υ)`.
    pub range_equal: bool,
    /// Least `λ₁` with `KK^* ≤ λ₁ T_Υ T_Υ^*`.
    pub lambda1: Option<f64>,
    /// Least `λ₂` with `T_Υ T_Υ^* ≤ λ₂ KK^*`.
    pub lambda2: Option<f64>,
    pub two_sided_bounds: bool,
    pub is_kg_frame: bool,
    /// `‖Q‖²` for the reduced solution of `K Q = T_Υ`.
    pub factor_bound: Option<f64>,
    pub factor_bessel: Option<f64>,
    /// `max_ξ ‖Υ_ξ - Φ_ξ K^*‖`.
    pub reproduction_defect: Option<f64>,
    pub factorization: bool,
    #[serde(skip)]
    pub factor_family: Option<GFrameFamily>,
}

impl RangeEqualityVerdict {
    pub fn agree(&self) -> bool {
        self.range_equal == self.two_sided_bounds && self.two_sided_bounds == self.factorization
    }
}

/// Evaluates, independently, range equality `R(K) = R(T_Υ)`, two-sided
/// comparability with `KK^*`, and the factorization `Υ_ξ = Φ_ξ K^*` through
/// a Bessel family.
pub fn range_equality_characterization(
    family: &GFrameFamily,
    k: &AdjOp,
    tol: f64,
) -> Result<RangeEqualityVerdict> {
    let syn = synthesis_operator(family);
    if k.src_len() != family.source_len() || k.dst_len() != family.source_len() {
        return Err(Error::DimensionMismatch(
            "K must be an endomorphism of the source".into(),
        ));
    }
    let range_equal = range_inclusion(k, &syn, tol)? && range_inclusion(&syn, k, tol)?;
    let lambda1 = majorizes_with_tol(&syn, k, tol);
    let lambda2 = majorizes_with_tol(k, &syn, tol);
    let two_sided_bounds = lambda1.is_some() && lambda2.is_some();
    let is_kg_frame = check_kg_frame(family, k, tol)?.is_kg_frame;

    let (mut factor_bound, mut factor_bessel, mut reproduction_defect, mut factor_family) =
        (None, None, None, None);
    if let Ok(q) = douglas_solve(k, &syn, tol) {
        let phi = factor_family_from(family, &q)?;
        let k_star = k.adjoint();
        let defect = family
            .members()
            .iter()
            .zip(phi.members())
            .map(|(u, f)| Ok(u.try_sub(&k_star.then(f)?)?.op_norm()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        factor_bound = Some(q.op_norm().powi(2));
        factor_bessel = Some(crate::frame::bessel_bound(&phi));
        reproduction_defect = Some(defect);
        factor_family = Some(phi);
    }
    let factorization = is_kg_frame && factor_family.is_some();
    Ok(RangeEqualityVerdict {
        range_equal,
        lambda1,
        lambda2,
        two_sided_bounds,
        is_kg_frame,
        factor_bound,
        factor_bessel,
        reproduction_defect,
        factorization,
        factor_family,
    })
}

/// `Φ_ξ h = (Q^* h)(ξ)`, undoing the `√ν_ξ` normalization of the direct sum.
fn factor_family_from(family: &GFrameFamily, q: &AdjOp) -> Result<GFrameFamily> {
    let q_star = q.matrix().adjoint();
    let d = family.alg_dim();
    let rows = q_star.rows();
    let mut offset = 0;
    let mut members = Vec::with_capacity(family.atom_count());
    for (m, w) in family.members().iter().zip(family.weights()) {
        let cols = m.dst_len() * d;
        let block: CMatrix = q_star
            .block(0, offset, rows, cols)
            .scale_real(1.0 / w.sqrt());
        members.push(AdjOp::new(d, family.source_len(), m.dst_len(), block)?);
        offset += cols;
    }
    GFrameFamily::new(family.space().clone(), members)
}

/// A family that is a K₁- and a K₂-g-frame is a (K₁+K₂)-g-frame.
///
/// Corrected constants: lower `min{A₁, A₂}/4`, upper `B`. The claimed
/// `min{A₁/2, A₂/2}` drops the factor in `‖(K₁+K₂)^*f‖² ≤ 2‖K₁^*f‖² +
/// 2‖K₂^*f‖²`, and the claimed upper `max{B₁, B₂}/2` halves the Bessel bound.
pub fn k_sum_frame(
    family: &GFrameFamily,
    k1: &AdjOp,
    k2: &AdjOp,
    tol: f64,
) -> Result<ConstructionResult> {
    let r1 = check_kg_frame(family, k1, tol)?;
    let r2 = check_kg_frame(family, k2, tol)?;
    let k = k1.try_add(k2)?;
    let certified = check_kg_frame(family, &k, tol)?;
    let b = r1.bessel_bound;
    let a_min = r1.optimal_lower.min(r2.optimal_lower);

    let mut checks = BTreeMap::new();
    checks.insert("is_k1_frame".to_string(), r1.is_kg_frame);
    checks.insert("is_k2_frame".to_string(), r2.is_kg_frame);
    Ok(ConstructionResult::new(
        "2.6",
        family.clone(),
        FrameBounds::new(a_min / 2.0, b / 2.0),
        FrameBounds::new(a_min / 4.0, b),
        certified,
        checks,
        vec![INFO_COMPLEMENTED.to_string()],
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct KSumTightVerdict {
    pub delta: f64,
    pub is_k2_frame: bool,
    pub range_included: bool,
    /// Least `γ` with `K₂K₂^* ≤ γ K₁K₁^*`.
    pub gamma: Option<f64>,
    /// `δ/γ` when `γ` exists.
    pub implied_lower: Option<f64>,
    pub certified_lower: f64,
}

impl KSumTightVerdict {
    pub fn agree(&self) -> bool {
        self.is_k2_frame == self.range_included
    }

    pub fn lower_consistent(&self) -> bool {
        match self.implied_lower {
            Some(l) => lower_ok(self.certified_lower, l, ENVELOPE_TOL),
            None => true,
        }
    }
}

/// For a δ-tight K₁-g-frame: it is a K₂-g-frame iff `R(K₂) ⊆ R(K₁)`, with
/// lower bound `δ/γ`.
pub fn k_sum_tight_equivalence(
    family: &GFrameFamily,
    k1: &AdjOp,
    k2: &AdjOp,
    tol: f64,
) -> Result<KSumTightVerdict> {
    let r1 = check_kg_frame(family, k1, tol)?;
    let delta = r1
        .tight_constant
        .ok_or_else(|| Error::NotTight(format!("optimal lower {:.6e}", r1.optimal_lower)))?;
    let r2 = check_kg_frame(family, k2, tol)?;
    let range_included = range_inclusion(k2, k1, tol)?;
    let gamma = majorizes_with_tol(k1, k2, tol);
    let implied_lower = gamma.map(|g| if g == 0.0 { f64::INFINITY } else { delta / g });
    Ok(KSumTightVerdict {
        delta,
        is_k2_frame: r2.is_kg_frame,
        range_included,
        gamma,
        implied_lower,
        certified_lower: r2.optimal_lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_TOL;
    use crate::frame::check_kg_frame;

    fn scalar(rows: &[&[f64]]) -> AdjOp {
        AdjOp::from_scalar_matrix(1, &CMatrix::from_real_rows(rows))
    }

    fn family(weights: &[f64], members: Vec<AdjOp>) -> GFrameFamily {
        GFrameFamily::from_weights(weights.to_vec(), members).unwrap()
    }

    fn sample() -> (GFrameFamily, AdjOp) {
        let f = family(
            &[1.0, 0.5],
            vec![
                scalar(&[&[1.0, 0.0], &[0.5, 1.0]]),
                scalar(&[&[0.2], &[1.0]]),
            ],
        );
        (f, scalar(&[&[1.0, 0.3], &[0.0, 0.7]]))
    }

    #[test]
    fn doubling_theta_scales_bounds_by_four() {
        let (f, k) = sample();
        let base = check_kg_frame(&f, &k, DEFAULT_TOL).unwrap();
        let r = precompose_adjoint(&f, &k, &AdjOp::identity(1, 2).scale(2.0), DEFAULT_TOL).unwrap();
        assert!(r.hypotheses_hold());
        assert!((r.claimed.lower - 4.0 * base.optimal_lower).abs() < 1e-12 * base.optimal_lower);
        assert!((r.claimed.upper - 4.0 * base.bessel_bound).abs() < 1e-12 * base.bessel_bound);
        assert!(
            (r.certified.optimal_lower - 4.0 * base.optimal_lower).abs()
                < 1e-12 * base.optimal_lower
        );
        assert!(r.envelope_holds(ENVELOPE_TOL));
    }

    #[test]
    fn identity_theta_leaves_family() {
        let (f, k) = sample();
        let r = precompose_adjoint(&f, &k, &AdjOp::identity(1, 2), DEFAULT_TOL).unwrap();
        assert_eq!(r.family, f);
        assert!(r.discrepancy_notes.is_empty());
    }

    /// Trivial intersection of `R(K^*)` with `N(Θ^*)` does not put `K^*f`
    /// in `R(Θ)`. Acting on column vectors, `Θ^* = [[1,1],[0,0]]`, `K = Θ`
    /// and `S = diag(1,4)` give a claimed lower constant
    /// `A‖(Θ^*)^†‖^{-2} = 1.6` while the optimal one is 1.
    #[test]
    fn claimed_lower_constant_can_fail() {
        // Row-convention matrix, the transpose of the column-vector one.
        let theta = scalar(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let k = theta.clone();
        let f = family(&[1.0], vec![scalar(&[&[1.0, 0.0], &[0.0, 2.0]])]);
        let r = precompose_adjoint(&f, &k, &theta, DEFAULT_TOL).unwrap();
        assert!(r.hypotheses_hold(), "{:?}", r.hypothesis_checks);
        assert!((r.claimed.lower - 1.6).abs() < 1e-12);
        assert!((r.certified.optimal_lower - 1.0).abs() < 1e-12);
        assert!(!r.discrepancy_notes.is_empty());
        assert!(r.envelope_holds(ENVELOPE_TOL));
    }

    #[test]
    fn recovery_examples() {
        let f = family(&[1.0], vec![AdjOp::identity(1, 2)]);
        let k = AdjOp::identity(1, 2);
        let v = recover_frame_check(&f, &k, &AdjOp::identity(1, 2), DEFAULT_TOL).unwrap();
        assert!(v.hypotheses_hold && v.conclusion == Some(true));
        let v = recover_frame_check(&f, &k, &AdjOp::zero(1, 2, 2), DEFAULT_TOL).unwrap();
        assert!(!v.theta_family_is_frame && v.conclusion.is_none() && v.consistent());
    }

    #[test]
    fn tight_surjectivity_examples() {
        let f = family(&[1.0], vec![AdjOp::identity(1, 2)]);
        let k = AdjOp::identity(1, 2);
        let v = tight_surjectivity_equivalence(&f, &k, &k, DEFAULT_TOL).unwrap();
        assert!(v.theta_surjective && v.precomposed_is_frame);
        let singular = scalar(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let v = tight_surjectivity_equivalence(&f, &k, &singular, DEFAULT_TOL).unwrap();
        assert!(!v.theta_surjective && !v.precomposed_is_frame && v.agree());
        let loose = family(&[1.0], vec![scalar(&[&[1.0, 0.0], &[0.0, 2.0]])]);
        assert!(matches!(
            tight_surjectivity_equivalence(&loose, &k, &k, DEFAULT_TOL),
            Err(Error::NotTight(_))
        ));
    }

    #[test]
    fn self_transfer_uses_projection() {
        let (f, k) = sample();
        let t = scalar(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let r = transfer_frame(&f, &k, &t, &t, DEFAULT_TOL).unwrap();
        assert!(r.hypotheses_hold(), "{:?}", r.hypothesis_checks);
        assert!(r.envelope_holds(ENVELOPE_TOL));
        assert!((r.claimed.lower - r.certified.optimal_lower).abs() < 1e-9);
    }

    #[test]
    fn range_equality_examples() {
        let f = family(&[1.0], vec![AdjOp::identity(1, 2)]);
        let v = range_equality_characterization(&f, &AdjOp::identity(1, 2), DEFAULT_TOL).unwrap();
        assert!(v.range_equal && v.two_sided_bounds && v.factorization && v.agree());
        let phi = v.factor_family.unwrap();
        assert!(
            phi.members()[0]
                .matrix()
                .max_abs_diff(f.members()[0].matrix())
                < 1e-12
        );
        let v = range_equality_characterization(&f, &AdjOp::zero(1, 2, 2), DEFAULT_TOL).unwrap();
        assert!(!v.range_equal && !v.two_sided_bounds && !v.factorization);
    }

    #[test]
    fn k_sum_examples() {
        let f = family(&[1.0], vec![AdjOp::identity(1, 2)]);
        let id = AdjOp::identity(1, 2);
        let r = k_sum_frame(&f, &id, &id, DEFAULT_TOL).unwrap();
        assert!(r.hypotheses_hold() && r.envelope_holds(ENVELOPE_TOL));
        assert!((r.certified.optimal_lower - 0.25).abs() < 1e-12);
        let v = k_sum_tight_equivalence(&f, &id, &id, DEFAULT_TOL).unwrap();
        assert!(v.agree() && v.range_included && v.lower_consistent());
        let zero = AdjOp::zero(1, 2, 2);
        let r = k_sum_frame(&f, &id, &zero, DEFAULT_TOL).unwrap();
        assert!((r.certified.optimal_lower - 1.0).abs() < 1e-12);
    }
}
