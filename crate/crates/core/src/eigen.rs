//! Hermitian eigendecomposition by the cyclic complex Jacobi method.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies a real plane rotation, so the 2x2 transform on
//! coordinates `(p, q)` is
//!
//! ```text
//! G = [ c            s          ]
//!     [ -s e^{-iφ}   c e^{-iφ}  ]      a_pq = |a_pq| e^{iφ}
//! ```
//!
//! and `A <- G^* A G`, `V <- V G`.

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C64};

const MAX_SWEEPS: usize = 100;

/// Tolerance (relative to the Frobenius norm) on `‖a - a^*‖` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Real spectrum and unitary eigenbasis of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, each phase-normalized so that its first
    /// non-negligible component is real and positive.
    pub basis: CMatrix,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `U diag(f(λ)) U^*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let u = &self.basis;
        let n = u.rows();
        let mut scaled = u.clone();
        for (j, lam) in self.eigenvalues.iter().enumerate() {
            let s = f(*lam);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        scaled.mul_adjoint(u)
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Fails with [`Error::NotHermitian`] when `‖a - a^*‖_F > 1e-10 · max(1, ‖a‖_F)`.
/// Inputs within that tolerance are symmetrized before the sweep.
pub fn hermitian_eig(a: &CMatrix) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_eig needs a square matrix, got {:?}",
            a.shape()
        )));
    }
    let skew = a.skew_part().frobenius_norm() * 2.0;
    let scale = a.frobenius_norm().max(1.0);
    if skew > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian {
            defect: skew,
            tol: HERMITIAN_TOL * scale,
        });
    }
    Ok(jacobi(&a.hermitian_part()))
}

/// Jacobi sweep on an exactly Hermitian input. No checks.
pub(crate) fn jacobi(h: &CMatrix) -> Spectrum {
    let n = h.rows();
    let mut a = h.clone();
    let mut v = CMatrix::identity(n);
    let fro = a.frobenius_norm();

    if fro > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].norm_sqr())
                .sum();
            if off.sqrt() <= 1e-17 * fro {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut basis = v;
    for j in 0..n {
        normalize_phase(&mut basis, j);
    }
    let spread = values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    // Near-equal values form clusters by chaining neighbours in sorted order;
    // only within a cluster does the basis break ties, keeping the order total.
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let mut start = 0;
    for end in 1..=n {
        if end == n || values[order[end]] - values[order[end - 1]] > 1e-12 * spread {
            order[start..end].sort_by(|&i, &j| lexicographic(&basis, i, j).then(i.cmp(&j)));
            start = end;
        }
    }

    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let sorted = CMatrix::from_fn(n, n, |r, c| basis[(r, order[c])]);
    Spectrum {
        eigenvalues,
        basis: sorted,
    }
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let r = g.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Rotation would only perturb rounding noise.
    if r <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase_conj = (g / r).conj();
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let gpp = C64::new(c, 0.0);
    let gpq = C64::new(s, 0.0);
    let gqp = phase_conj * (-s);
    let gqq = phase_conj * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..v.rows() {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

/// First component with modulus above 1e-12 becomes real positive.
pub(crate) fn normalize_phase(m: &mut CMatrix, col: usize) {
    let n = m.rows();
    if let Some(z) = (0..n).map(|i| m[(i, col)]).find(|z| z.norm() > 1e-12) {
        let phase = z.conj() / z.norm();
        for i in 0..n {
            m[(i, col)] *= phase;
        }
    }
}

fn lexicographic(m: &CMatrix, i: usize, j: usize) -> std::cmp::Ordering {
    for r in 0..m.rows() {
        let (a, b) = (m[(r, i)], m[(r, j)]);
        let ord = b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im));
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}
