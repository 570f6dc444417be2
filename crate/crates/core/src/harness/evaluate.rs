//! Runs the operation behind a theorem kind on a scenario and turns the
//! outcome into hard checks, hypothesis flags and bound comparisons.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::scenario::{Scenario, TheoremKind};
use crate::algebra::is_psd;
use crate::constructions::{
    dual_sum, k_sum_frame, k_sum_tight_equivalence, lower_ok, orthogonal_sum, precompose_adjoint,
    range_equality_characterization, recover_frame_check, scalar_weighted_sum,
    tight_surjectivity_equivalence, transfer_frame, upper_ok, weighted_operator_sum,
    ConstructionResult, ENVELOPE_TOL,
};
use crate::error::{Error, Result};
use crate::frame::{
    analysis, canonical_dual, check_kg_frame, direct_sum_inner, duality_defect, frame_operator,
    kk_star, optimal_lower_bisection, synthesis, synthesis_operator, FrameBounds, GFrameFamily,
};
use crate::matrix::{c64, CMatrix};
use crate::module::{module_norm, AdjOp, ModuleVec};

/// Relative agreement required between bisection and the closed form.
pub const BISECTION_AGREEMENT: f64 = 1e-7;
/// Relative slack for identities that hold exactly in exact arithmetic.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub theorem: TheoremKind,
    pub hypotheses: BTreeMap<String, bool>,
    /// Hard checks; the evaluation passes iff all hold.
    pub checks: BTreeMap<String, bool>,
    pub claimed: Option<FrameBounds>,
    pub corrected: Option<FrameBounds>,
    pub certified: Option<FrameBounds>,
    pub discrepancies: Vec<String>,
    pub notes: Vec<String>,
}

impl Evaluation {
    fn new(theorem: TheoremKind) -> Self {
        Self {
            theorem,
            hypotheses: BTreeMap::new(),
            checks: BTreeMap::new(),
            claimed: None,
            corrected: None,
            certified: None,
            discrepancies: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.values().all(|v| *v)
    }

    pub fn passed(&self) -> bool {
        self.checks.values().all(|v| *v)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, v)| !**v)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("evaluation serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let flags = |m: &BTreeMap<String, bool>, yes: &str, no: &str| {
            m.iter()
                .map(|(k, v)| format!("  {:<52} {}\n", k, if *v { yes } else { no }))
                .collect::<String>()
        };
        let bounds = |b: &Option<FrameBounds>| {
            b.map_or("-".to_string(), |b| {
                format!("lower {:.9e}  upper {:.9e}", b.lower, b.upper)
            })
        };
        out.push_str(&format!("theorem    {}\n", self.theorem));
        out.push_str(&format!(
            "verdict    {}\n",
            if self.passed() { "pass" } else { "FAIL" }
        ));
        out.push_str("hypotheses\n");
        out.push_str(&flags(&self.hypotheses, "holds", "fails"));
        out.push_str("checks\n");
        out.push_str(&flags(&self.checks, "pass", "FAIL"));
        out.push_str(&format!("certified  {}\n", bounds(&self.certified)));
        if self.corrected.is_some() {
            out.push_str(&format!("corrected  {}\n", bounds(&self.corrected)));
            out.push_str(&format!("claimed    {}\n", bounds(&self.claimed)));
        }
        for d in &self.discrepancies {
            out.push_str(&format!("discrepancy: {d}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }

    fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.to_string(), ok);
    }

    fn hypothesis(&mut self, name: &str, ok: bool) {
        self.hypotheses.insert(name.to_string(), ok);
    }

    fn absorb(&mut self, r: ConstructionResult) {
        self.hypotheses.extend(r.hypothesis_checks.clone());
        self.claimed = Some(r.claimed);
        self.corrected = Some(r.corrected);
        self.certified = Some(r.certified.bounds());
        self.notes.extend(r.informational.iter().cloned());
        if r.hypotheses_hold() {
            self.discrepancies
                .extend(r.discrepancy_notes.iter().cloned());
            self.check(
                "envelope_lower",
                lower_ok(r.certified.optimal_lower, r.corrected.lower, ENVELOPE_TOL),
            );
            self.check(
                "envelope_upper",
                upper_ok(r.certified.bessel_bound, r.corrected.upper, ENVELOPE_TOL),
            );
        }
    }
}

/// Evaluates `s` under its own theorem kind.
pub fn evaluate(s: &Scenario, tol: f64) -> Result<Evaluation> {
    evaluate_as(s, s.theorem, tol)
}

/// Evaluates `s` under `kind`, which may differ from the recorded one.
pub fn evaluate_as(s: &Scenario, kind: TheoremKind, tol: f64) -> Result<Evaluation> {
    let mut e = Evaluation::new(kind);
    let f = &s.upsilon;
    match kind {
        TheoremKind::SynthesisAnalysis => synthesis_analysis(&mut e, f)?,
        TheoremKind::FrameCheck => frame_check(&mut e, f, s.op("K")?, tol)?,
        TheoremKind::PrecomposeAdjoint => {
            e.absorb(precompose_adjoint(f, s.op("K")?, s.op("Theta")?, tol)?)
        }
        TheoremKind::Recovery => {
            let v = recover_frame_check(f, s.op("K")?, s.op("Theta")?, tol)?;
            e.hypothesis("k_surjective", v.k_surjective);
            e.hypothesis("commutes", v.commutes);
            e.hypothesis("theta_family_is_frame", v.theta_family_is_frame);
            e.hypothesis("theta_star_family_is_frame", v.theta_star_family_is_frame);
            e.check("conclusion_holds", v.consistent());
        }
        TheoremKind::TightSurjectivity => {
            match tight_surjectivity_equivalence(f, s.op("K")?, s.op("Theta")?, tol) {
                Ok(v) => {
                    e.hypothesis("tight", true);
                    e.hypothesis("k_star_bounded_below", true);
                    e.hypothesis("commutes", v.commutes);
                    if v.commutes {
                        e.check("equivalence_agrees", v.agree());
                    }
                    e.notes.push(format!(
                        "theta surjective: {}, precomposed family is a frame: {}",
                        v.theta_surjective, v.precomposed_is_frame
                    ));
                }
                Err(Error::NotTight(msg)) => {
                    e.hypothesis("tight", false);
                    e.notes.push(msg);
                }
                Err(Error::HypothesisFailed(msg)) => {
                    e.hypothesis("k_star_bounded_below", false);
                    e.notes.push(msg);
                }
                Err(other) => return Err(other),
            }
        }
        TheoremKind::Transfer => e.absorb(transfer_frame(
            f,
            s.op("K")?,
            s.op("T")?,
            s.op("Theta")?,
            tol,
        )?),
        TheoremKind::RangeEquality => {
            let v = range_equality_characterization(f, s.op("K")?, tol)?;
            e.check("equivalence_agrees", v.agree());
            if let Some(defect) = v.reproduction_defect {
                let scale = synthesis_operator(f).op_norm().max(1.0);
                e.check("factor_family_reproduces", defect <= 1e-6 * scale);
            }
            e.notes.push(format!(
                "range equal: {}, two-sided bounds: {}, factorization: {}",
                v.range_equal, v.two_sided_bounds, v.factorization
            ));
        }
        TheoremKind::KSum => {
            let (k1, k2) = (s.op("K1")?, s.op("K2")?);
            e.absorb(k_sum_frame(f, k1, k2, tol)?);
            match k_sum_tight_equivalence(f, k1, k2, tol) {
                Ok(v) => {
                    e.check("equivalence_agrees", v.agree());
                    e.check("implied_lower_holds", v.lower_consistent());
                    e.notes.push(format!(
                        "K2-frame: {}, range included: {}",
                        v.is_k2_frame, v.range_included
                    ));
                }
                Err(Error::NotTight(_)) => e
                    .notes
                    .push("family is not tight for K1; equivalence not evaluated".into()),
                Err(other) => return Err(other),
            }
        }
        TheoremKind::DualSum => {
            let (phi, k1) = (s.phi()?, s.op("K1")?);
            let r = dual_sum(f, phi, k1, tol)?;
            let s_sum = frame_operator(&r.family);
            let (s_u, s_p) = (frame_operator(f), frame_operator(phi));
            let predicted = s_u.try_add(&s_p)?.try_add(k1)?.try_add(&k1.adjoint())?;
            let defect = s_sum.try_sub(&predicted)?.op_norm();
            let scale = s_u.op_norm() + s_p.op_norm() + 2.0 * k1.op_norm();
            e.check(
                "frame_operator_identity",
                defect <= IDENTITY_TOL * scale.max(1.0),
            );
            e.absorb(r);
        }
        TheoremKind::OrthogonalSum => {
            e.absorb(orthogonal_sum(f, s.phi()?, s.op("K1")?, s.op("K2")?, tol)?)
        }
        TheoremKind::WeightedOperatorSum => e.absorb(weighted_operator_sum(
            f,
            s.phi()?,
            s.op("K1")?,
            s.op("K2")?,
            s.op("Theta1")?,
            s.op("Theta2")?,
            tol,
        )?),
        TheoremKind::ScalarWeightedSum => e.absorb(scalar_weighted_sum(
            f,
            s.phi()?,
            s.op("K1")?,
            s.op("K2")?,
            s.op("Theta1")?,
            s.op("Theta2")?,
            s.scalar("alpha1")?,
            s.scalar("alpha2")?,
            tol,
        )?),
    }
    Ok(e)
}

/// Unit block rows `e_j` in the first row of `A^len`.
fn unit_vectors(d: usize, len: usize) -> Vec<ModuleVec> {
    (0..len * d)
        .map(|j| {
            let mut row = CMatrix::zeros(d, len * d);
            row[(0, j)] = c64(1.0, 0.0);
            ModuleVec::from_block_row(d, row).expect("unit row has block shape")
        })
        .collect()
}

/// Probes adjointness of analysis and synthesis and `‖T G‖ ≤ √B ‖G‖` on
/// unit vectors of both sides.
fn synthesis_analysis(e: &mut Evaluation, f: &GFrameFamily) -> Result<()> {
    let d = f.alg_dim();
    let space = f.space();
    let sqrt_b = crate::frame::bessel_bound(f).sqrt();
    let fields: Vec<Vec<ModuleVec>> = f
        .dst_lens()
        .iter()
        .enumerate()
        .flat_map(|(atom, &m)| {
            let lens = f.dst_lens();
            unit_vectors(d, m).into_iter().map(move |u| {
                lens.iter()
                    .enumerate()
                    .map(|(i, &mi)| {
                        if i == atom {
                            u.clone()
                        } else {
                            ModuleVec::zeros(d, mi)
                        }
                    })
                    .collect()
            })
        })
        .collect();
    let syn: Vec<ModuleVec> = fields
        .iter()
        .map(|g| synthesis(f, g))
        .collect::<Result<_>>()?;

    let mut adjoint_defect: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for x in unit_vectors(d, f.source_len()) {
        let ax = analysis(f, &x)?;
        for (g, tg) in fields.iter().zip(&syn) {
            let lhs = direct_sum_inner(space, &ax, g)?;
            let rhs = crate::module::inner(&x, tg)?;
            adjoint_defect = adjoint_defect.max((lhs.matrix() - rhs.matrix()).max_abs());
            scale = scale.max(lhs.op_norm());
        }
    }
    let mut norm_ok = true;
    for (g, tg) in fields.iter().zip(&syn) {
        let g_norm = direct_sum_inner(space, g, g)?.op_norm().sqrt();
        norm_ok &= module_norm(tg) <= sqrt_b * g_norm + 1e-7;
    }
    e.check("adjointness", adjoint_defect <= IDENTITY_TOL * scale);
    e.check("synthesis_norm_bound", norm_ok);
    e.certified = Some(FrameBounds::new(0.0, sqrt_b * sqrt_b));
    Ok(())
}

/// Internal consistency of the reported bounds of `f` against `K`.
fn frame_check(e: &mut Evaluation, f: &GFrameFamily, k: &AdjOp, tol: f64) -> Result<()> {
    let r = check_kg_frame(f, k, tol)?;
    let s = frame_operator(f);
    let s_norm = s.op_norm();
    let b = r.bessel_bound;
    let upper_gap = AdjOp::identity(f.alg_dim(), f.source_len())
        .scale(b)
        .try_sub(&s)?;
    e.check(
        "bessel_bound_is_spectral_max",
        (b - s.max_eigenvalue()).abs() <= IDENTITY_TOL * b.max(1.0)
            && upper_gap.is_positive(IDENTITY_TOL),
    );
    let kk = kk_star(k);
    if r.is_kg_frame && r.optimal_lower.is_finite() {
        let gap = s.matrix() - &kk.matrix().scale_real(r.optimal_lower);
        e.check(
            "lower_bound_certificate",
            is_psd(&gap, IDENTITY_TOL.max(tol)),
        );
        let bis = optimal_lower_bisection(f, k)?;
        e.check(
            "bisection_agrees",
            (bis - r.optimal_lower).abs() <= BISECTION_AGREEMENT * r.optimal_lower,
        );
        let dual = canonical_dual(f, k, tol)?;
        let defect = duality_defect(f, &dual, k)?;
        e.check(
            "canonical_dual_reproduces",
            defect <= 1e-7 * k.op_norm().max(1.0),
        );
    }
    e.notes.push(format!(
        "K-g-frame: {}, tight: {}, Parseval: {}, ‖S‖ = {:.6e}",
        r.is_kg_frame,
        r.tight_constant.is_some(),
        r.is_parseval,
        s_norm
    ));
    e.certified = Some(r.bounds());
    Ok(())
}
