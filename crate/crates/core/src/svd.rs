//! Singular value decomposition by one-sided (Hestenes) Jacobi.
//!
//! Column pairs of a working copy of the input are rotated with the same 2x2
//! unitary a two-sided Jacobi step on `m^* m` would use, so the sweep is an
//! implicit Jacobi diagonalization of the Gram matrix. Small singular values
//! keep their relative accuracy because the Gram matrix is never formed.

use crate::matrix::{CMatrix, C64};

const MAX_SWEEPS: usize = 80;

/// `m = U · diag(σ) · V^*` with full unitary `U` (p×p) and `V` (q×q).
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    /// Descending, length `min(p, q)`.
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `tol · σ_max`; zero for the zero matrix.
    pub fn rank(&self, tol: f64) -> usize {
        let smax = self.max();
        if smax == 0.0 {
            return 0;
        }
        self.sigma.iter().filter(|s| **s > tol * smax).count()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let (p, q) = (self.u.rows(), self.v.rows());
        let mut us = CMatrix::zeros(p, q);
        for (k, s) in self.sigma.iter().enumerate() {
            for i in 0..p {
                us[(i, k)] = self.u[(i, k)] * *s;
            }
        }
        us.mul_adjoint(&self.v)
    }

    /// Orthonormal rows spanning the row space of the decomposed matrix
    /// (rank decided at `tol`), as an `r × q` matrix.
    pub fn row_space(&self, tol: f64) -> CMatrix {
        let r = self.rank(tol);
        let q = self.v.rows();
        CMatrix::from_fn(r, q, |i, j| self.v[(j, i)].conj())
    }

    /// Orthonormal columns spanning the column space, `p × r`.
    pub fn column_space(&self, tol: f64) -> CMatrix {
        let r = self.rank(tol);
        self.u.block(0, 0, self.u.rows(), r)
    }
}

pub fn svd(m: &CMatrix) -> Svd {
    let (p, q) = m.shape();
    if p < q {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        };
    }

    let mut a = m.clone();
    let mut v = CMatrix::identity(q);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..q {
            for j in (i + 1)..q {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, C64::new(0.0, 0.0));
                for k in 0..p {
                    let (x, y) = (a[(k, i)], a[(k, j)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase_conj = (gamma / g).conj();
                let theta = (beta - alpha) / (2.0 * g);
                let t = {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = phase_conj * (-s);
                let gqq = phase_conj * c;
                for k in 0..p {
                    let (x, y) = (a[(k, i)], a[(k, j)]);
                    a[(k, i)] = x * gpp + y * gqp;
                    a[(k, j)] = x * gpq + y * gqq;
                }
                for k in 0..q {
                    let (x, y) = (v[(k, i)], v[(k, j)]);
                    v[(k, i)] = x * gpp + y * gqp;
                    v[(k, j)] = x * gpq + y * gqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..q)
        .map(|j| (0..p).map(|k| a[(k, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));

    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let v_sorted = CMatrix::from_fn(q, q, |r, c| v[(r, order[c])]);

    let smax = sigma.first().copied().unwrap_or(0.0);
    let mut u_cols: Vec<Vec<C64>> = Vec::with_capacity(p);
    for (k, &j) in order.iter().enumerate() {
        let s = sigma[k];
        if s > 0.0 && s > 1e-300 && (smax == 0.0 || s > f64::EPSILON * 1e-6 * smax) {
            u_cols.push((0..p).map(|r| a[(r, j)] / s).collect());
        } else {
            break;
        }
    }
    complete_orthonormal(&mut u_cols, p);

    let mut u = CMatrix::zeros(p, p);
    for (j, col) in u_cols.iter().enumerate() {
        u.set_column(j, col);
    }
    Svd {
        u,
        sigma,
        v: v_sorted,
    }
}

/// Extends orthonormal columns to a basis of `C^p` by Gram–Schmidt against
/// the standard basis (two passes per candidate).
fn complete_orthonormal(cols: &mut Vec<Vec<C64>>, p: usize) {
    let mut e = 0;
    while cols.len() < p && e < p {
        let mut cand = vec![C64::new(0.0, 0.0); p];
        cand[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in cols.iter() {
                let proj: C64 = c.iter().zip(&cand).map(|(x, y)| x.conj() * y).sum();
                for (y, x) in cand.iter_mut().zip(c) {
                    *y -= proj * x;
                }
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(cand.into_iter().map(|z| z / norm).collect());
        }
        e += 1;
    }
}

/// Moore–Penrose inverse with singular values `σ ≤ tol · σ_max` treated as zero.
pub fn pinv(m: &CMatrix, tol: f64) -> CMatrix {
    let dec = svd(m);
    let r = dec.rank(tol);
    let (p, q) = m.shape();
    // V_r Σ_r^{-1} U_r^*
    let mut vs = CMatrix::zeros(q, r);
    for k in 0..r {
        let inv = 1.0 / dec.sigma[k];
        for i in 0..q {
            vs[(i, k)] = dec.v[(i, k)] * inv;
        }
    }
    let ur = dec.u.block(0, 0, p, r);
    vs.mul_adjoint(&ur)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    svd(m).max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;

    fn unitary_defect(u: &CMatrix) -> f64 {
        (&u.adjoint() * u).max_abs_diff(&CMatrix::identity(u.cols()))
    }

    #[test]
    fn diag_with_zero() {
        let d = svd(&CMatrix::diag_real(&[2.0, 0.0]));
        assert_eq!(d.sigma, vec![2.0, 0.0]);
        assert!(unitary_defect(&d.u) < 1e-15);
        assert_eq!(d.rank(1e-9), 1);
    }

    #[test]
    fn zero_matrix() {
        let d = svd(&CMatrix::zeros(3, 2));
        assert!(d.sigma.iter().all(|s| *s == 0.0));
        assert_eq!(d.rank(1e-9), 0);
        assert!(unitary_defect(&d.u) < 1e-15);
        assert!(unitary_defect(&d.v) < 1e-15);
    }

    #[test]
    fn wide_matrix_reconstructs() {
        let m = CMatrix::from_fn(2, 4, |i, j| {
            c64((i * 4 + j) as f64 * 0.3 - 1.0, (j as f64) - i as f64)
        });
        let d = svd(&m);
        assert_eq!(d.u.shape(), (2, 2));
        assert_eq!(d.v.shape(), (4, 4));
        assert!(d.reconstruct().max_abs_diff(&m) < 1e-13);
        assert!(unitary_defect(&d.u) < 1e-14);
        assert!(unitary_defect(&d.v) < 1e-14);
    }

    #[test]
    fn pinv_of_diag() {
        let p = pinv(&CMatrix::diag_real(&[2.0, 0.0]), 1e-9);
        assert!(p.max_abs_diff(&CMatrix::diag_real(&[0.5, 0.0])) < 1e-15);
    }

    #[test]
    fn shift_norm() {
        let m = CMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
        assert!((spectral_norm(&m) - 2.0).abs() < 1e-15);
    }
}
