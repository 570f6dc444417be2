//! The C*-algebra `A = M_d` of d×d complex matrices.
//!
//! Involution is the conjugate transpose and the norm is the operator
//! (spectral) norm, so `‖a^* a‖ = ‖a‖²` holds exactly in exact arithmetic.
//! The positivity and Loewner-order predicates here are also used for
//! operators on modules, which reduce to plain complex matrices.

use std::ops::{Add, Mul, Sub};

use crate::eigen::{self, Spectrum};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C64};
use crate::svd;

/// Default relative tolerance, scaled by `max(1, ‖input‖)` where it applies.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Element of `M_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgElem(CMatrix);

impl AlgElem {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::dims(format!(
                "algebra element must be a nonempty square matrix, got {:?}",
                m.shape()
            )));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite("algebra element".into()));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        debug_assert!(m.is_square());
        Self(m)
    }

    pub fn zero(d: usize) -> Self {
        Self(CMatrix::zeros(d, d))
    }

    pub fn identity(d: usize) -> Self {
        Self(CMatrix::identity(d))
    }

    pub fn scalar(d: usize, z: C64) -> Self {
        Self(CMatrix::identity(d).scale(z))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn involution(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn op_norm(&self) -> f64 {
        svd::spectral_norm(&self.0)
    }

    pub fn hermitian_eig(&self) -> Result<Spectrum> {
        eigen::hermitian_eig(&self.0)
    }

    pub fn is_positive(&self, tol: f64) -> bool {
        is_psd(&self.0, tol)
    }

    /// `self ≤ other` in the Loewner order.
    pub fn loewner_leq(&self, other: &AlgElem, tol: f64) -> bool {
        loewner_leq(&self.0, &other.0, tol)
    }

    /// Positive square root. Requires `is_positive(DEFAULT_TOL)`.
    pub fn sqrt_pos(&self) -> Result<Self> {
        psd_sqrt(&self.0, DEFAULT_TOL).map(Self)
    }

    /// `|a| = (a^* a)^{1/2}`.
    pub fn abs_elem(&self) -> Self {
        let gram = self.0.adjoint().matmul(&self.0);
        Self(eigen::jacobi(&gram.hermitian_part()).map(|x| x.max(0.0).sqrt()))
    }

    pub fn scale(&self, z: C64) -> Self {
        Self(self.0.scale(z))
    }
}

impl Mul for &AlgElem {
    type Output = AlgElem;
    fn mul(self, rhs: &AlgElem) -> AlgElem {
        AlgElem(&self.0 * &rhs.0)
    }
}

impl Add for &AlgElem {
    type Output = AlgElem;
    fn add(self, rhs: &AlgElem) -> AlgElem {
        AlgElem(&self.0 + &rhs.0)
    }
}

impl Sub for &AlgElem {
    type Output = AlgElem;
    fn sub(self, rhs: &AlgElem) -> AlgElem {
        AlgElem(&self.0 - &rhs.0)
    }
}

/// Decomposition of a square matrix into the quantities the positivity
/// rule needs.
#[derive(Clone, Copy, Debug)]
pub struct PositivityProbe {
    /// `‖a - a^*‖`.
    pub skew_norm: f64,
    /// Smallest eigenvalue of `(a + a^*)/2`.
    pub min_eigenvalue: f64,
    /// `‖a‖`.
    pub norm: f64,
}

impl PositivityProbe {
    pub fn of(a: &CMatrix) -> Self {
        assert!(a.is_square(), "positivity probe needs a square matrix");
        let spec = eigen::jacobi(&a.hermitian_part());
        let skew = a.skew_part();
        let (skew_norm, norm) = if skew.max_abs() == 0.0 {
            (0.0, spec.min().abs().max(spec.max().abs()))
        } else {
            // i(a - a^*) is Hermitian.
            let h = skew.scale(C64::new(0.0, 2.0));
            let s = eigen::jacobi(&h.hermitian_part());
            (s.min().abs().max(s.max().abs()), svd::spectral_norm(a))
        };
        Self {
            skew_norm,
            min_eigenvalue: spec.min(),
            norm,
        }
    }

    pub fn is_positive(&self, tol: f64) -> bool {
        let scale = tol * self.norm.max(1.0);
        self.skew_norm <= scale && self.min_eigenvalue >= -scale
    }
}

/// `‖a - a^*‖ ≤ tol·max(1,‖a‖)` and `λ_min((a + a^*)/2) ≥ -tol·max(1,‖a‖)`.
pub fn is_psd(a: &CMatrix, tol: f64) -> bool {
    PositivityProbe::of(a).is_positive(tol)
}

pub fn loewner_leq(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    assert_eq!(a.shape(), b.shape(), "loewner_leq shape mismatch");
    is_psd(&(b - a), tol)
}

/// Square root of a positive matrix; negative rounding eigenvalues are clipped.
pub fn psd_sqrt(a: &CMatrix, tol: f64) -> Result<CMatrix> {
    let probe = PositivityProbe::of(a);
    if !probe.is_positive(tol) {
        return Err(Error::NotPositive {
            min_eigenvalue: probe.min_eigenvalue,
        });
    }
    Ok(eigen::jacobi(&a.hermitian_part()).map(|x| x.max(0.0).sqrt()))
}
