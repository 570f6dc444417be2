//! Executable constructions of new K-g-frames from old ones.
//!
//! Every construction returns the new family together with three sets of
//! constants: the `claimed` ones (the closed-form constants the theorem
//! states), the `corrected` ones (constants that provably hold under the
//! same hypotheses), and the `certified` optimal bounds measured on the
//! constructed family. Only the corrected envelope is ever asserted.
//!
//! Operator products are written in the usual right-to-left order in the
//! docs; in code `X.after(&Y)` is `XY` and `Y.then(&X)` is the same thing.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::frame::{FrameBounds, FrameReport, GFrameFamily};
use crate::module::{self, AdjOp};

mod single;
mod sums;

pub use single::{
    k_sum_frame, k_sum_tight_equivalence, precompose_adjoint, range_equality_characterization,
    recover_frame_check, tight_surjectivity_equivalence, transfer_frame, KSumTightVerdict,
    RangeEqualityVerdict, RecoveryVerdict, TightSurjectivityVerdict,
};
pub use sums::{dual_sum, orthogonal_sum, scalar_weighted_sum, weighted_operator_sum};

/// Slack allowed when comparing a certified bound with a constant, scaled
/// by `max(1, |constant|)`.
pub const ENVELOPE_TOL: f64 = 1e-7;

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionResult {
    pub theorem: String,
    #[serde(skip)]
    pub family: GFrameFamily,
    pub claimed: FrameBounds,
    pub corrected: FrameBounds,
    pub certified: FrameReport,
    pub hypothesis_checks: BTreeMap<String, bool>,
    /// Hypotheses that hold automatically in finite dimension.
    pub informational: Vec<String>,
    pub discrepancy_notes: Vec<String>,
}

impl ConstructionResult {
    pub(crate) fn new(
        theorem: &str,
        family: GFrameFamily,
        claimed: FrameBounds,
        corrected: FrameBounds,
        certified: FrameReport,
        hypothesis_checks: BTreeMap<String, bool>,
        informational: Vec<String>,
    ) -> Self {
        let mut r = Self {
            theorem: theorem.to_string(),
            family,
            claimed,
            corrected,
            certified,
            hypothesis_checks,
            informational,
            discrepancy_notes: Vec::new(),
        };
        r.discrepancy_notes = r.claimed_violations(ENVELOPE_TOL);
        r
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypothesis_checks.values().all(|v| *v)
    }

    pub fn failed_hypotheses(&self) -> Vec<&str> {
        self.hypothesis_checks
            .iter()
            .filter(|(_, v)| !**v)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// Violations of the corrected constants by the certified bounds.
    pub fn envelope_violations(&self, tol: f64) -> Vec<String> {
        bound_violations(&self.corrected, &self.certified, tol, "corrected")
    }

    pub fn envelope_holds(&self, tol: f64) -> bool {
        self.envelope_violations(tol).is_empty()
    }

    /// Violations of the theorem's stated constants; informational.
    pub fn claimed_violations(&self, tol: f64) -> Vec<String> {
        bound_violations(&self.claimed, &self.certified, tol, "claimed")
    }
}

fn bound_violations(c: &FrameBounds, cert: &FrameReport, tol: f64, label: &str) -> Vec<String> {
    let mut out = Vec::new();
    if !lower_ok(cert.optimal_lower, c.lower, tol) {
        out.push(format!(
            "{label} lower {:.6e} exceeds certified optimal lower {:.6e}",
            c.lower, cert.optimal_lower
        ));
    }
    if !upper_ok(cert.bessel_bound, c.upper, tol) {
        out.push(format!(
            "{label} upper {:.6e} is below certified Bessel bound {:.6e}",
            c.upper, cert.bessel_bound
        ));
    }
    out
}

/// `certified ≥ constant - tol·max(1, |constant|)`.
pub fn lower_ok(certified: f64, constant: f64, tol: f64) -> bool {
    if constant.is_infinite() {
        return certified.is_infinite();
    }
    certified >= constant - tol * constant.abs().max(1.0)
}

/// `certified ≤ constant + tol·max(1, |constant|)`.
pub fn upper_ok(certified: f64, constant: f64, tol: f64) -> bool {
    constant.is_infinite() || certified <= constant + tol * constant.abs().max(1.0)
}

/// `‖XY - YX‖` for endomorphisms.
pub(crate) fn commutator_norm(x: &AdjOp, y: &AdjOp) -> Result<f64> {
    let xy = x.after(y)?;
    let yx = y.after(x)?;
    Ok(xy.try_sub(&yx)?.op_norm())
}

/// Relative smallness used by identity-type hypotheses.
pub(crate) fn negligible(defect: f64, scale: f64, tol: f64) -> bool {
    defect <= tol * scale.max(1.0)
}

/// `x^{-2}` with `0^{-2} = +∞`.
pub(crate) fn inv_sq(x: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (x * x)
    }
}

/// `‖X^†‖ = 1 / σ_min^+(X)`; zero for `X = 0`.
pub(crate) fn pinv_norm(x: &AdjOp, tol: f64) -> f64 {
    x.pinv(tol).op_norm()
}

/// Smallest gain of `op` on `R(gen)`; `None` when `R(gen) = {0}`.
pub(crate) fn gain_on_range(op: &AdjOp, gen: &AdjOp, tol: f64) -> Option<f64> {
    module::restricted_min_gain(op, &gen.range_basis(tol))
}

/// `R(a) ∩ N(b) = {0}` for `a` and `b` with a common source of `b`,
/// decided by the gain of `b` on `R(a)`.
pub(crate) fn trivial_intersection(range_of: &AdjOp, kernel_of: &AdjOp, tol: f64) -> bool {
    match gain_on_range(kernel_of, range_of, tol) {
        None => true,
        Some(g) => g > tol * kernel_of.op_norm().max(f64::MIN_POSITIVE),
    }
}

/// `√a·x + √b·y` squared, the triangle-inequality Bessel bound for a sum.
pub(crate) fn triangle_sq(terms: &[(f64, f64)]) -> f64 {
    let s: f64 = terms.iter().map(|(b, n)| b.sqrt() * n).sum();
    s * s
}

pub(crate) const INFO_CLOSED_RANGE: &str = "closed range holds automatically in finite dimension";
pub(crate) const INFO_COMPLEMENTED: &str =
    "orthogonal complementedness holds automatically in finite dimension";
