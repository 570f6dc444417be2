//! Frame families over a finite weighted measure space.
//!
//! Integrals over `Ω` are weighted sums `Σ_ξ ν_ξ (·)`. The direct sum
//! `⊕_ξ K_ξ` carries the weighted inner product `Σ_ξ ν_ξ ⟨F_ξ, G_ξ⟩`.
//! Whenever the direct sum has to be an ordinary module `A^M` (for the
//! synthesis operator as an [`AdjOp`]) it is identified with `A^{Σ m_ξ}`
//! through the isometry `F ↦ (√ν_ξ F_ξ)_ξ`.
//!
//! All bounds are optimal constants of the sandwich
//! `A·KK^* ≤ S ≤ B·I`; the measurability requirement on `ξ ↦ Υ_ξ h` is
//! vacuous for finitely many atoms.

use serde::{Deserialize, Serialize};

use crate::algebra::{self, AlgElem, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C64};
use crate::module::{AdjOp, ModuleVec, Submodule};
use crate::serde_float;
use crate::svd;

/// PSD tolerance of the bisection oracle. Near the spectral rounding floor so
/// small optimal lower bounds still resolve to relative 1e-7.
pub const BISECTION_PSD_TOL: f64 = 1e-14;
pub const BISECTION_STEPS: usize = 60;

/// Finitely many atoms with positive weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpace {
    weights: Vec<f64>,
}

impl MeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid(
                "weights",
                "measure space needs at least one atom",
            ));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::invalid(
                format!("weights[{i}]"),
                format!("weight must be finite and positive, got {w}"),
            ));
        }
        Ok(Self { weights })
    }

    pub fn uniform(atoms: usize) -> Result<Self> {
        Self::new(vec![1.0; atoms])
    }

    pub fn atom_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `{Υ_ξ : A^n → A^{m_ξ}}` indexed by the atoms of a [`MeasureSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct GFrameFamily {
    space: MeasureSpace,
    alg_dim: usize,
    source_len: usize,
    members: Vec<AdjOp>,
}

impl GFrameFamily {
    pub fn new(space: MeasureSpace, members: Vec<AdjOp>) -> Result<Self> {
        if members.len() != space.atom_count() {
            return Err(Error::dims(format!(
                "{} members for {} atoms",
                members.len(),
                space.atom_count()
            )));
        }
        let first = &members[0];
        let (d, n) = (first.alg_dim(), first.src_len());
        if let Some(i) = members
            .iter()
            .position(|m| m.alg_dim() != d || m.src_len() != n)
        {
            return Err(Error::dims(format!(
                "member {i} does not act on A^{n} over M_{d}"
            )));
        }
        Ok(Self {
            space,
            alg_dim: d,
            source_len: n,
            members,
        })
    }

    pub fn from_weights(weights: Vec<f64>, members: Vec<AdjOp>) -> Result<Self> {
        Self::new(MeasureSpace::new(weights)?, members)
    }

    /// Same weights and members `Υ_ξ ↦ f(ξ, Υ_ξ)`.
    pub fn map_members(&self, f: impl Fn(usize, &AdjOp) -> Result<AdjOp>) -> Result<Self> {
        let members = self
            .members
            .iter()
            .enumerate()
            .map(|(i, m)| f(i, m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.space.clone(), members)
    }

    /// Memberwise `f(Υ_ξ, Φ_ξ)` over a shared measure space.
    pub fn zip_members(
        &self,
        other: &GFrameFamily,
        f: impl Fn(&AdjOp, &AdjOp) -> Result<AdjOp>,
    ) -> Result<Self> {
        self.same_space(other)?;
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.space.clone(), members)
    }

    /// Family with every weight multiplied by `c > 0`.
    pub fn scale_weights(&self, c: f64) -> Result<Self> {
        let w = self.space.weights.iter().map(|w| w * c).collect();
        Self::new(MeasureSpace::new(w)?, self.members.clone())
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.space.weights
    }

    pub fn alg_dim(&self) -> usize {
        self.alg_dim
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn members(&self) -> &[AdjOp] {
        &self.members
    }

    pub fn atom_count(&self) -> usize {
        self.members.len()
    }

    pub fn dst_lens(&self) -> Vec<usize> {
        self.members.iter().map(AdjOp::dst_len).collect()
    }

    fn same_space(&self, other: &GFrameFamily) -> Result<()> {
        if self.space != other.space {
            return Err(Error::dims("families live on different measure spaces"));
        }
        if self.alg_dim != other.alg_dim || self.source_len != other.source_len {
            return Err(Error::dims("families act on different source modules"));
        }
        Ok(())
    }

    fn check_endomorphism(&self, k: &AdjOp, name: &str) -> Result<()> {
        if k.alg_dim() != self.alg_dim
            || k.src_len() != self.source_len
            || k.dst_len() != self.source_len
        {
            return Err(Error::dims(format!(
                "{name} must be an endomorphism of A^{} over M_{}",
                self.source_len, self.alg_dim
            )));
        }
        Ok(())
    }
}

/// Frame bounds `lower ≤ upper`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    #[serde(with = "serde_float")]
    pub lower: f64,
    #[serde(with = "serde_float")]
    pub upper: f64,
}

impl FrameBounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub is_bessel: bool,
    #[serde(with = "serde_float")]
    pub bessel_bound: f64,
    pub is_kg_frame: bool,
    /// `+∞` when `K = 0` on the tested subspace.
    #[serde(with = "serde_float")]
    pub optimal_lower: f64,
    #[serde(with = "serde_float::option")]
    pub tight_constant: Option<f64>,
    pub is_parseval: bool,
    /// `K` vanishes on the tested subspace, so the lower inequality is vacuous.
    pub degenerate_k: bool,
    /// The tested subspace is `{0}`.
    pub vacuous: bool,
    pub tol: f64,
}

impl FrameReport {
    pub fn bounds(&self) -> FrameBounds {
        FrameBounds::new(self.optimal_lower, self.bessel_bound)
    }
}

/// `(T_Υ^* f)(ξ) = Υ_ξ f`.
pub fn analysis(family: &GFrameFamily, f: &ModuleVec) -> Result<Vec<ModuleVec>> {
    family.members.iter().map(|m| m.apply(f)).collect()
}

/// `T_Υ G = Σ_ξ ν_ξ Υ_ξ^* G_ξ`.
pub fn synthesis(family: &GFrameFamily, g: &[ModuleVec]) -> Result<ModuleVec> {
    if g.len() != family.atom_count() {
        return Err(Error::dims(format!(
            "{} coefficient blocks for {} atoms",
            g.len(),
            family.atom_count()
        )));
    }
    let mut acc = ModuleVec::zeros(family.alg_dim, family.source_len);
    for ((m, w), gx) in family.members.iter().zip(family.weights()).zip(g) {
        let term = m.adjoint().apply(gx)?;
        acc = &acc + &term.scale(C64::new(*w, 0.0));
    }
    Ok(acc)
}

/// `Σ_ξ ν_ξ ⟨F_ξ, G_ξ⟩` on the direct sum.
pub fn direct_sum_inner(space: &MeasureSpace, f: &[ModuleVec], g: &[ModuleVec]) -> Result<AlgElem> {
    if f.len() != space.atom_count() || g.len() != space.atom_count() {
        return Err(Error::dims(
            "direct-sum element has the wrong number of atoms",
        ));
    }
    let d = f
        .first()
        .map(ModuleVec::alg_dim)
        .ok_or_else(|| Error::dims("empty direct-sum element"))?;
    let mut acc = AlgElem::zero(d);
    for ((x, y), w) in f.iter().zip(g).zip(space.weights()) {
        acc = &acc + &crate::module::inner(x, y)?.scale(C64::new(*w, 0.0));
    }
    Ok(acc)
}

/// Synthesis operator `A^{Σ m_ξ} → A^n` in normalized coordinates: the
/// representing matrix stacks the blocks `√ν_ξ M_ξ^*`.
pub fn synthesis_operator(family: &GFrameFamily) -> AdjOp {
    let blocks: Vec<CMatrix> = family
        .members
        .iter()
        .zip(family.weights())
        .map(|(m, w)| m.matrix().adjoint().scale_real(w.sqrt()))
        .collect();
    let refs: Vec<&CMatrix> = blocks.iter().collect();
    let total: usize = family.dst_lens().iter().sum();
    AdjOp::new(
        family.alg_dim,
        total,
        family.source_len,
        CMatrix::vstack(&refs),
    )
    .expect("stacked member adjoints have consistent shape")
}

/// `S = Σ_ξ ν_ξ Υ_ξ^* Υ_ξ`.
pub fn frame_operator(family: &GFrameFamily) -> AdjOp {
    let nd = family.alg_dim * family.source_len;
    let mut acc = CMatrix::zeros(nd, nd);
    for (m, w) in family.members.iter().zip(family.weights()) {
        acc = &acc + &m.matrix().mul_adjoint(m.matrix()).scale_real(*w);
    }
    AdjOp::new(
        family.alg_dim,
        family.source_len,
        family.source_len,
        acc.hermitian_part(),
    )
    .expect("frame operator is an endomorphism")
}

/// `Σ_ξ ν_ξ Υ_ξ^* Φ_ξ`, which equals `T_Υ T_Φ^*`.
pub fn cross_operator(upsilon: &GFrameFamily, phi: &GFrameFamily) -> Result<AdjOp> {
    upsilon.same_space(phi)?;
    let nd = upsilon.alg_dim * upsilon.source_len;
    let mut acc = CMatrix::zeros(nd, nd);
    for ((u, p), w) in upsilon
        .members
        .iter()
        .zip(&phi.members)
        .zip(upsilon.weights())
    {
        if u.dst_len() != p.dst_len() {
            return Err(Error::ShapeMismatch(
                "paired members have different destination modules".into(),
            ));
        }
        acc = &acc + &p.matrix().mul_adjoint(u.matrix()).scale_real(*w);
    }
    Ok(
        AdjOp::new(upsilon.alg_dim, upsilon.source_len, upsilon.source_len, acc)
            .expect("square by construction"),
    )
}

/// Optimal Bessel bound `λ_max(S) = ‖T_Υ‖²`.
pub fn bessel_bound(family: &GFrameFamily) -> f64 {
    let n = synthesis_operator(family).op_norm();
    n * n
}

/// `KK^*` as an endomorphism.
pub fn kk_star(k: &AdjOp) -> AdjOp {
    k.adjoint().then(k).expect("K^* then K composes")
}

/// Supremum of `A ≥ 0` with `A·KK^* ≤ S`.
pub fn optimal_lower_bound(family: &GFrameFamily, k: &AdjOp) -> Result<f64> {
    optimal_lower_bound_with_tol(family, k, DEFAULT_TOL)
}

/// Closed form: `+∞` for `K = 0`, `0` when `R(K) ⊄ R(S)`, otherwise
/// `1/λ_max(K^* S^† K)`.
pub fn optimal_lower_bound_with_tol(family: &GFrameFamily, k: &AdjOp, tol: f64) -> Result<f64> {
    family.check_endomorphism(k, "K")?;
    let analysis_rows = synthesis_operator(family).matrix().clone();
    Ok(lower_from_factors(&analysis_rows, k.matrix(), tol))
}

/// Sup of `A` with `A·Fk^*Fk ≤ Fs^*Fs` for factors sharing a column count.
/// Finite and positive iff the row space of `Fk` lies in that of `Fs`, in
/// which case it is `1/‖Fk Fs^†‖²`.
fn lower_from_factors(fs: &CMatrix, fk: &CMatrix, tol: f64) -> f64 {
    let k_norm = svd::spectral_norm(fk);
    if k_norm == 0.0 {
        return f64::INFINITY;
    }
    let fs_pinv = svd::pinv(fs, tol);
    let proj = fs_pinv.matmul(fs);
    let defect = svd::spectral_norm(&(fk - &fk.matmul(&proj)));
    if defect > tol * k_norm.max(1.0) {
        return 0.0;
    }
    let q = svd::spectral_norm(&fk.matmul(&fs_pinv));
    1.0 / (q * q)
}

/// Bisection for the lower bound with a PSD oracle on `S - A·KK^*` over
/// `[0, B/‖K‖²]`. `+∞` when `K = 0`.
pub fn optimal_lower_bisection(family: &GFrameFamily, k: &AdjOp) -> Result<f64> {
    family.check_endomorphism(k, "K")?;
    let k_norm = k.op_norm();
    if k_norm == 0.0 {
        return Ok(f64::INFINITY);
    }
    let s = frame_operator(family);
    let kk = kk_star(k);
    let (mut lo, mut hi) = (0.0, bessel_bound(family) / (k_norm * k_norm));
    let feasible = |a: f64| {
        let diff = s.matrix() - &kk.matrix().scale_real(a);
        algebra::is_psd(&diff, BISECTION_PSD_TOL)
    };
    if feasible(hi) {
        return Ok(hi);
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Verdicts and optimal bounds of the sandwich `A·KK^* ≤ S ≤ B·I`.
pub fn check_kg_frame(family: &GFrameFamily, k: &AdjOp, tol: f64) -> Result<FrameReport> {
    family.check_endomorphism(k, "K")?;
    let bessel = bessel_bound(family);
    let lower = optimal_lower_bound_with_tol(family, k, tol)?;
    let s = frame_operator(family);
    let kk = kk_star(k);
    Ok(assemble_report(bessel, lower, s.matrix(), kk.matrix(), tol))
}

fn assemble_report(bessel: f64, lower: f64, s: &CMatrix, kk: &CMatrix, tol: f64) -> FrameReport {
    let degenerate_k = lower.is_infinite();
    let tight_constant = if lower.is_finite() && lower > tol {
        let defect = svd::spectral_norm(&(s - &kk.scale_real(lower)));
        (defect <= tol * svd::spectral_norm(s)).then_some(lower)
    } else {
        None
    };
    FrameReport {
        is_bessel: bessel.is_finite(),
        bessel_bound: bessel,
        is_kg_frame: lower > tol,
        optimal_lower: lower,
        tight_constant,
        is_parseval: tight_constant.is_some_and(|d| (d - 1.0).abs() <= tol),
        degenerate_k,
        vacuous: false,
        tol,
    }
}

/// [`check_kg_frame`] with both inequalities tested only on `range(sub)`.
pub fn check_kg_frame_on(
    family: &GFrameFamily,
    k: &AdjOp,
    sub: &Submodule,
    tol: f64,
) -> Result<FrameReport> {
    family.check_endomorphism(k, "K")?;
    if sub.alg_dim() != family.alg_dim || sub.ambient_len() != family.source_len {
        return Err(Error::dims("subspace does not live in the source module"));
    }
    let w = sub.basis(tol);
    if w.rows() == 0 {
        return Ok(FrameReport {
            is_bessel: true,
            bessel_bound: 0.0,
            is_kg_frame: true,
            optimal_lower: f64::INFINITY,
            tight_constant: None,
            is_parseval: false,
            degenerate_k: true,
            vacuous: true,
            tol,
        });
    }
    // Factors of the restricted forms W S W^* and W KK^* W^*.
    let fs = synthesis_operator(family).matrix().mul_adjoint(&w);
    let fk = k.matrix().mul_adjoint(&w);
    let bessel = {
        let n = svd::spectral_norm(&fs);
        n * n
    };
    let lower = lower_from_factors(&fs, &fk, tol);
    let s = fs.adjoint().matmul(&fs);
    let kk = fk.adjoint().matmul(&fk);
    Ok(assemble_report(bessel, lower, &s, &kk, tol))
}

/// `‖K - Σ_ξ ν_ξ Υ_ξ^* Φ_ξ‖ ≤ tol · max(1, ‖K‖)`.
pub fn is_k_dual(upsilon: &GFrameFamily, phi: &GFrameFamily, k: &AdjOp, tol: f64) -> Result<bool> {
    Ok(duality_defect(upsilon, phi, k)? <= tol * k.op_norm().max(1.0))
}

/// `‖K - Σ_ξ ν_ξ Υ_ξ^* Φ_ξ‖`.
pub fn duality_defect(upsilon: &GFrameFamily, phi: &GFrameFamily, k: &AdjOp) -> Result<f64> {
    upsilon.check_endomorphism(k, "K")?;
    let cross = cross_operator(upsilon, phi)?;
    Ok(k.try_sub(&cross)?.op_norm())
}

/// `Φ_ξ = Υ_ξ S^† K`, a dual of `Υ` for `K` whenever `R(K) ⊆ R(S)`.
pub fn canonical_dual(family: &GFrameFamily, k: &AdjOp, tol: f64) -> Result<GFrameFamily> {
    family.check_endomorphism(k, "K")?;
    let s_pinv = frame_operator(family).pinv(tol);
    let pre = k.then(&s_pinv)?;
    family.map_members(|_, m| pre.then(m))
}
