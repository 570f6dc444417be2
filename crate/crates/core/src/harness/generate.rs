//! Seeded instance generators.
//!
//! Entries are drawn Ginibre and then structured so the target hypotheses
//! hold by construction:
//!
//! - commuting pairs are polynomials in a common operator, or share an
//!   eigenbasis `V` with `cond(V) ≤ 1e3`;
//! - kernel-equality pairs are `Θ = X·T` with `X` invertible on `R(T)`;
//! - orthogonal synthesis pairs live on complementary coordinates of each
//!   destination after a common unitary;
//! - tight families are `√δ·Ψ_ξ K^*` with `Ψ` Parseval;
//! - positivity hypotheses use functions of the frame operator.
//!
//! A candidate is kept only if the evaluator confirms its hypotheses;
//! otherwise it is redrawn, at most [`MAX_ATTEMPTS`] times.

use super::config::Dims;
use super::evaluate::{evaluate, Evaluation};
use super::rng::TrialRng;
use super::scenario::{Scenario, TheoremKind};
use crate::algebra::{psd_sqrt, DEFAULT_TOL};
use crate::error::Result;
use crate::frame::{
    canonical_dual, cross_operator, frame_operator, synthesis_operator, GFrameFamily, MeasureSpace,
};
use crate::matrix::{CMatrix, C64};
use crate::module::AdjOp;
use crate::svd;

pub const MAX_ATTEMPTS: usize = 1000;
/// Largest condition number accepted for a shared eigenbasis.
pub const MAX_CONDITION: f64 = 1e3;

#[derive(Clone, Debug, PartialEq)]
pub enum Generated {
    Ready(Scenario),
    /// Rejection sampling exhausted, with the last reason.
    Skipped(String),
}

pub(crate) enum Outcome {
    Ready {
        scenario: Scenario,
        evaluation: Evaluation,
        attempts: usize,
    },
    Skipped {
        reason: String,
        attempts: usize,
    },
}

/// Deterministic in `(seed, dims, kind)`: draws come from stream 0 of
/// `seed`.
pub fn generate_instance(seed: u64, dims: &Dims, kind: TheoremKind) -> Result<Generated> {
    let mut rng = TrialRng::new(seed, 0);
    Ok(
        match generate_evaluated(&mut rng, dims, kind, DEFAULT_TOL)? {
            Outcome::Ready { scenario, .. } => Generated::Ready(scenario),
            Outcome::Skipped { reason, .. } => Generated::Skipped(reason),
        },
    )
}

/// Kinds whose generators need an invertible frame operator.
pub fn needs_spanning(kind: TheoremKind) -> bool {
    matches!(
        kind,
        TheoremKind::Recovery
            | TheoremKind::TightSurjectivity
            | TheoremKind::KSum
            | TheoremKind::ScalarWeightedSum
    )
}

fn admissible(kind: TheoremKind, e: &Evaluation) -> bool {
    match kind {
        TheoremKind::SynthesisAnalysis | TheoremKind::FrameCheck | TheoremKind::RangeEquality => {
            true
        }
        // Both outcomes of the equivalence are wanted; only tightness is required.
        TheoremKind::KSum => e.checks.contains_key("equivalence_agrees"),
        _ => e.hypotheses_hold(),
    }
}

pub(crate) fn generate_evaluated(
    rng: &mut TrialRng,
    dims: &Dims,
    kind: TheoremKind,
    tol: f64,
) -> Result<Outcome> {
    dims.validate()?;
    if needs_spanning(kind) && !dims.spans_source() {
        return Ok(Outcome::Skipped {
            reason: "destinations too small for an invertible frame operator".into(),
            attempts: 0,
        });
    }
    let mut reason = String::new();
    for attempt in 1..=MAX_ATTEMPTS {
        let Some(candidate) = build(rng, dims, kind, tol)? else {
            reason = "candidate rejected by the generator".into();
            continue;
        };
        match evaluate(&candidate, tol) {
            Ok(e) if admissible(kind, &e) => {
                return Ok(Outcome::Ready {
                    scenario: candidate,
                    evaluation: e,
                    attempts: attempt,
                })
            }
            Ok(e) => {
                let failed: Vec<&str> = e
                    .hypotheses
                    .iter()
                    .filter(|(_, v)| !**v)
                    .map(|(k, _)| k.as_str())
                    .collect();
                reason = format!("hypotheses failed: {}", failed.join(", "));
            }
            Err(err) => reason = err.to_string(),
        }
    }
    Ok(Outcome::Skipped {
        reason,
        attempts: MAX_ATTEMPTS,
    })
}

fn op(rng: &mut TrialRng, d: usize, src: usize, dst: usize) -> AdjOp {
    AdjOp::new(d, src, dst, rng.ginibre(src * d, dst * d)).expect("Ginibre block has op shape")
}

fn weights(rng: &mut TrialRng, atoms: usize) -> MeasureSpace {
    let w = (0..atoms).map(|_| rng.uniform_in(0.25, 2.0)).collect();
    MeasureSpace::new(w).expect("weights are positive")
}

fn family_on(rng: &mut TrialRng, space: MeasureSpace, dims: &Dims) -> Result<GFrameFamily> {
    let members = dims
        .dst_lens
        .iter()
        .map(|&m| op(rng, dims.alg_dim, dims.source_len, m))
        .collect();
    GFrameFamily::new(space, members)
}

fn family(rng: &mut TrialRng, dims: &Dims) -> Result<GFrameFamily> {
    let space = weights(rng, dims.atoms());
    family_on(rng, space, dims)
}

/// `A^n → A^r → A^n` with `1 ≤ r < n`.
fn low_rank(rng: &mut TrialRng, d: usize, n: usize) -> Result<AdjOp> {
    let r = rng.index(1, n - 1);
    op(rng, d, n, r).then(&op(rng, d, r, n))
}

/// A full endomorphism, or half the time a rank-deficient one when `n > 1`.
fn endo(rng: &mut TrialRng, d: usize, n: usize) -> Result<AdjOp> {
    if n > 1 && rng.coin() {
        low_rank(rng, d, n)
    } else {
        Ok(op(rng, d, n, n))
    }
}

/// `P_{R(S)} Y`, so that `f` is a frame for it.
fn range_restricted(rng: &mut TrialRng, f: &GFrameFamily, tol: f64) -> Result<AdjOp> {
    let y = endo(rng, f.alg_dim(), f.source_len())?;
    y.then(&frame_operator(f).range_projector(tol))
}

/// `c₀ + c₁K + c₂K²`, without the constant term when `constant` is false.
fn polynomial(rng: &mut TrialRng, k: &AdjOp, constant: bool) -> Result<AdjOp> {
    let id = AdjOp::identity(k.alg_dim(), k.src_len());
    let c0 = if constant {
        rng.normal()
    } else {
        C64::new(0.0, 0.0)
    };
    let (c1, c2) = (rng.normal(), rng.normal());
    id.scale_complex(c0)
        .try_add(&k.scale_complex(c1))?
        .try_add(&k.then(k)?.scale_complex(c2))
}

/// `h₀ + h₁S/‖S‖` with `h₀ > 0`, `h₁ ≥ 0`: positive, commuting with `S`
/// and of norm at most 2, so the sums stay as well conditioned as `S`.
fn positive_function(rng: &mut TrialRng, s: &AdjOp) -> Result<AdjOp> {
    let id = AdjOp::identity(s.alg_dim(), s.src_len());
    let norm = s.op_norm();
    let h1 = if norm > 0.0 {
        rng.uniform_in(0.0, 1.0) / norm
    } else {
        0.0
    };
    id.scale(rng.uniform_in(0.1, 1.0)).try_add(&s.scale(h1))
}

/// `Ψ_ξ S₀^{-1/2}` for a random family with invertible `S₀`.
fn parseval(rng: &mut TrialRng, dims: &Dims, tol: f64) -> Result<Option<GFrameFamily>> {
    let f = family(rng, dims)?;
    let s = frame_operator(&f);
    if s.min_eigenvalue() <= 1e-10 * s.max_eigenvalue() {
        return Ok(None);
    }
    let root = psd_sqrt(s.matrix(), tol)?;
    let inv_root = AdjOp::new(
        dims.alg_dim,
        dims.source_len,
        dims.source_len,
        svd::pinv(&root, tol),
    )?;
    Ok(Some(f.map_members(|_, m| inv_root.then(m))?))
}

/// `√δ·Ψ_ξ K^*`, whose frame operator is `δ·KK^*` for Parseval `Ψ`.
fn tight(psi: &GFrameFamily, k: &AdjOp, delta: f64) -> Result<GFrameFamily> {
    let k_star = k.adjoint();
    psi.map_members(|_, m| Ok(k_star.then(m)?.scale(delta.sqrt())))
}

fn build(rng: &mut TrialRng, dims: &Dims, kind: TheoremKind, tol: f64) -> Result<Option<Scenario>> {
    let (d, n) = (dims.alg_dim, dims.source_len);
    let s = match kind {
        TheoremKind::SynthesisAnalysis => Scenario::new(kind, family(rng, dims)?),
        TheoremKind::FrameCheck => {
            let f = family(rng, dims)?;
            let k = if rng.coin() {
                range_restricted(rng, &f, tol)?
            } else {
                endo(rng, d, n)?
            };
            Scenario::new(kind, f).with_operator("K", k)
        }
        TheoremKind::PrecomposeAdjoint => {
            let f = family(rng, dims)?;
            let k = range_restricted(rng, &f, tol)?;
            let constant = rng.coin();
            let theta = polynomial(rng, &k, constant)?;
            Scenario::new(kind, f)
                .with_operator("K", k)
                .with_operator("Theta", theta)
        }
        TheoremKind::Recovery => {
            let f = family(rng, dims)?;
            let k = op(rng, d, n, n);
            let theta = polynomial(rng, &k, true)?;
            Scenario::new(kind, f)
                .with_operator("K", k)
                .with_operator("Theta", theta)
        }
        TheoremKind::TightSurjectivity => return tight_surjectivity(rng, dims, tol),
        TheoremKind::Transfer => {
            let f = family(rng, dims)?;
            let t = endo(rng, d, n)?;
            let pt = t.range_projector(tol);
            let qt = AdjOp::identity(d, n).try_sub(&pt)?;
            let (a, b) = (op(rng, d, n, n), op(rng, d, n, n));
            // X preserves R(T) and its complement.
            let x = pt.then(&a)?.then(&pt)?.try_add(&qt.then(&b)?.then(&qt)?)?;
            let theta = t.then(&x)?;
            let p = pt.then(&x)?;
            let k = polynomial(rng, &p, false)?;
            Scenario::new(kind, f)
                .with_operator("K", k)
                .with_operator("T", t)
                .with_operator("Theta", theta)
        }
        TheoremKind::RangeEquality => {
            let f = family(rng, dims)?;
            let k = match rng.index(0, 2) {
                0 => {
                    let syn = synthesis_operator(&f);
                    op(rng, d, n, syn.src_len()).then(&syn)?
                }
                1 => op(rng, d, n, n),
                _ => endo(rng, d, n)?,
            };
            Scenario::new(kind, f).with_operator("K", k)
        }
        TheoremKind::KSum => {
            let Some(psi) = parseval(rng, dims, tol)? else {
                return Ok(None);
            };
            let k1 = endo(rng, d, n)?;
            let delta = rng.uniform_in(0.5, 2.0);
            let f = tight(&psi, &k1, delta)?;
            let k2 = if rng.coin() {
                op(rng, d, n, n).then(&k1)?
            } else {
                op(rng, d, n, n)
            };
            Scenario::new(kind, f)
                .with_operator("K1", k1)
                .with_operator("K2", k2)
        }
        TheoremKind::DualSum => {
            let f = family(rng, dims)?;
            let s = frame_operator(&f);
            let r = if n > 1 && rng.coin() {
                rng.index(1, n - 1)
            } else {
                n
            };
            let z = op(rng, d, r, n).then(&s.range_projector(tol))?;
            let k1 = z.adjoint().then(&z)?;
            let mut phi = canonical_dual(&f, &k1, tol)?;
            if rng.coin() {
                // Adds W with Σ ν Υ^* W = 0.
                let extra = family_on(rng, f.space().clone(), dims)?;
                let pre = cross_operator(&f, &extra)?.then(&s.pinv(tol))?;
                let w = extra.zip_members(&f, |e, u| e.try_sub(&pre.then(u)?))?;
                phi = phi.zip_members(&w, |a, b| a.try_add(b))?;
            }
            Scenario::new(kind, f).with_phi(phi).with_operator("K1", k1)
        }
        TheoremKind::OrthogonalSum => {
            let space = weights(rng, dims.atoms());
            let (mut us, mut ps) = (Vec::new(), Vec::new());
            for &m in &dims.dst_lens {
                let md = m * d;
                let unitary = svd::svd(&rng.ginibre(md, md)).u;
                let side: Vec<bool> = (0..md).map(|_| rng.coin()).collect();
                let j1: Vec<f64> = side.iter().map(|s| if *s { 1.0 } else { 0.0 }).collect();
                let j2: Vec<f64> = side.iter().map(|s| if *s { 0.0 } else { 1.0 }).collect();
                let a = rng.ginibre(n * d, md);
                let b = rng.ginibre(n * d, md);
                let mu = a.matmul(&CMatrix::diag_real(&j1)).matmul(&unitary);
                let mp = b.matmul(&CMatrix::diag_real(&j2)).matmul(&unitary);
                us.push(AdjOp::new(d, n, m, mu)?);
                ps.push(AdjOp::new(d, n, m, mp)?);
            }
            let f = GFrameFamily::new(space.clone(), us)?;
            let phi = GFrameFamily::new(space, ps)?;
            let k1 = range_restricted(rng, &f, tol)?;
            let k2 = range_restricted(rng, &phi, tol)?;
            Scenario::new(kind, f)
                .with_phi(phi)
                .with_operator("K1", k1)
                .with_operator("K2", k2)
        }
        TheoremKind::WeightedOperatorSum => {
            let p = rng.index(n, n + 2);
            let f = family(rng, dims)?;
            let k1 = range_restricted(rng, &f, tol)?;
            let theta1 = op(rng, d, n, p);
            let k2 = theta1.pinv(tol).then(&k1)?.then(&theta1)?;
            let (phi, mut theta2) = positive_pair(rng, &f, &theta1)?;
            // Perturbing through Theta1 keeps N(Theta2^*) ⊇ N(Theta1^*); a generic
            // perturbation makes the PSD hypothesis borderline on that kernel.
            if rng.coin() {
                let e = op(rng, d, n, n).then(&theta1)?;
                let eps = rng.uniform_in(0.0, 0.3) * theta2.op_norm() / e.op_norm();
                theta2 = theta2.try_add(&e.scale(eps))?;
            }
            Scenario::new(kind, f)
                .with_phi(phi)
                .with_operator("K1", k1)
                .with_operator("K2", k2)
                .with_operator("Theta1", theta1)
                .with_operator("Theta2", theta2)
        }
        TheoremKind::ScalarWeightedSum => {
            let p = rng.index(n.saturating_sub(1).max(1), n + 1);
            let f = family(rng, dims)?;
            let k1 = op(rng, d, n, n);
            let theta1 = op(rng, d, n, p);
            let (phi, theta2) = positive_pair(rng, &f, &theta1)?;
            let (a1, a2) = (rng.uniform_in(0.25, 2.0), rng.uniform_in(0.25, 2.0));
            let x = if rng.coin() {
                theta1.scale(a1).try_add(&theta2.scale(a2))?
            } else {
                theta1.scale(a1).try_sub(&theta2.scale(a2))?
            };
            let k2 = op(rng, d, p, n).then(&x)?;
            Scenario::new(kind, f)
                .with_phi(phi)
                .with_operator("K1", k1)
                .with_operator("K2", k2)
                .with_operator("Theta1", theta1)
                .with_operator("Theta2", theta2)
                .with_scalar("alpha1", a1)
                .with_scalar("alpha2", a2)
        }
    };
    Ok(Some(s))
}

/// `Φ_ξ = Υ_ξ H` and `Θ₂ = Θ₁ G` with `H`, `G` positive functions of `S`,
/// so `Θ₁ T_Υ T_Φ^* Θ₂^* = Θ₁ S H G Θ₁^*` is positive.
fn positive_pair(
    rng: &mut TrialRng,
    f: &GFrameFamily,
    theta1: &AdjOp,
) -> Result<(GFrameFamily, AdjOp)> {
    let s = frame_operator(f);
    let h = positive_function(rng, &s)?;
    let g = positive_function(rng, &s)?;
    let phi = f.map_members(|_, m| h.then(m))?;
    Ok((phi, g.then(theta1)?))
}

fn tight_surjectivity(rng: &mut TrialRng, dims: &Dims, tol: f64) -> Result<Option<Scenario>> {
    let (d, n) = (dims.alg_dim, dims.source_len);
    let nd = n * d;
    let v = rng.ginibre(nd, nd);
    let sv = svd::svd(&v);
    let smin = sv.sigma.last().copied().unwrap_or(0.0);
    if smin == 0.0 || sv.max() / smin > MAX_CONDITION {
        return Ok(None);
    }
    let v_inv = svd::pinv(&v, tol);
    let eig: Vec<C64> = (0..nd).map(|_| rng.normal()).collect();
    let mut vals: Vec<C64> = (0..nd).map(|_| rng.normal()).collect();
    if rng.coin() {
        let mut any = false;
        for z in vals.iter_mut() {
            if rng.coin() {
                *z = C64::new(0.0, 0.0);
                any = true;
            }
        }
        if !any {
            let i = rng.index(0, nd - 1);
            vals[i] = C64::new(0.0, 0.0);
        }
    }
    let similar = |diag: &[C64]| {
        let dm = CMatrix::from_fn(
            nd,
            nd,
            |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) },
        );
        v.matmul(&dm).matmul(&v_inv)
    };
    let k = AdjOp::new(d, n, n, similar(&eig))?;
    let theta = AdjOp::new(d, n, n, similar(&vals))?;
    let Some(psi) = parseval(rng, dims, tol)? else {
        return Ok(None);
    };
    let delta = rng.uniform_in(0.5, 2.0);
    let f = tight(&psi, &k, delta)?;
    Ok(Some(
        Scenario::new(TheoremKind::TightSurjectivity, f)
            .with_operator("K", k)
            .with_operator("Theta", theta),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{check_kg_frame, cross_operator};

    fn ready(seed: u64, dims: &Dims, kind: TheoremKind) -> Scenario {
        match generate_instance(seed, dims, kind).unwrap() {
            Generated::Ready(s) => s,
            Generated::Skipped(r) => panic!("skipped: {r}"),
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let dims = Dims::uniform(1, 2, 2, 1);
        let a = ready(42, &dims, TheoremKind::PrecomposeAdjoint);
        let b = ready(42, &dims, TheoremKind::PrecomposeAdjoint);
        assert_eq!(a.to_json(), b.to_json());
        assert_ne!(
            a.to_json(),
            ready(43, &dims, TheoremKind::PrecomposeAdjoint).to_json()
        );
    }

    #[test]
    fn tight_generator_commutes() {
        for seed in 0..20 {
            let s = ready(
                seed,
                &Dims::uniform(2, 3, 3, 2),
                TheoremKind::TightSurjectivity,
            );
            let (k, t) = (s.op("K").unwrap(), s.op("Theta").unwrap());
            let c = k
                .then(t)
                .unwrap()
                .try_sub(&t.then(k).unwrap())
                .unwrap()
                .op_norm();
            assert!(c <= 1e-12 * k.op_norm() * t.op_norm(), "seed {seed}: {c:e}");
        }
    }

    #[test]
    fn orthogonal_generator_is_orthogonal() {
        for seed in 0..20 {
            let s = ready(seed, &Dims::uniform(2, 3, 3, 2), TheoremKind::OrthogonalSum);
            let c = cross_operator(&s.upsilon, s.phi.as_ref().unwrap())
                .unwrap()
                .op_norm();
            assert!(c <= 1e-12, "seed {seed}: {c:e}");
        }
    }

    #[test]
    fn every_kind_generates_valid_scenarios() {
        let dims = Dims::uniform(2, 3, 3, 2);
        for kind in TheoremKind::ALL {
            let s = ready(5, &dims, kind);
            s.validate().unwrap();
            assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
        }
    }

    #[test]
    fn tight_families_are_tight() {
        let s = ready(9, &Dims::uniform(1, 3, 2, 2), TheoremKind::KSum);
        let r = check_kg_frame(&s.upsilon, s.op("K1").unwrap(), DEFAULT_TOL).unwrap();
        assert!(r.tight_constant.is_some());
    }

    #[test]
    fn infeasible_dims_are_skipped() {
        let dims = Dims::uniform(1, 4, 1, 1);
        assert!(matches!(
            generate_instance(1, &dims, TheoremKind::TightSurjectivity).unwrap(),
            Generated::Skipped(_)
        ));
    }
}
