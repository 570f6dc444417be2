//! The Hilbert `A`-module `H = A^n` and its adjointable operators.
//!
//! A vector `x = (x_1, …, x_n)` is stored as its d×(n·d) block row
//! `X = [x_1 … x_n]`. The inner product is `⟨x, y⟩ = Σ_i x_i y_i^* = X Y^*`
//! and the left action is `a·x = (a x_1, …, a x_n)`, i.e. `a X`.
//!
//! # Representation of adjointable maps
//!
//! For the full matrix algebra `A = M_d`, the adjointable `A`-linear maps
//! `A^n → A^m` are exactly right multiplications `X ↦ X M` of the block row
//! by an arbitrary (n·d)×(m·d) complex matrix `M`, whose (i, j) block is the
//! coefficient `t_ij` in `(Tx)_j = Σ_i x_i t_ij`. Left linearity
//! `T(a·x) = a·T(x)` is automatic, and since `⟨Tx, y⟩ = X M Y^*` the module
//! adjoint is represented by `M^*`. Consequently every operator-level
//! question (norms, ranges, Moore–Penrose inverses, positivity, the Loewner
//! order) is answered by the corresponding question about `M`:
//!
//! * `‖T‖` is the spectral norm of `M`;
//! * `R(T)` is the set of block rows whose rows lie in the row space of `M`;
//! * an endomorphism is positive iff `M` is positive semidefinite.
//!
//! Application order reads left to right in this representation:
//! `compose(S, T)` is "S, then T" and is represented by `M_S M_T`. The
//! operator product `ST` of the usual (right-to-left) notation is
//! [`AdjOp::after`].

use std::ops::{Add, Sub};

use crate::algebra::{self, AlgElem, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C64};
use crate::svd;

/// Element of `A^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleVec {
    alg_dim: usize,
    len: usize,
    row: CMatrix,
}

impl ModuleVec {
    pub fn new(blocks: Vec<AlgElem>) -> Result<Self> {
        let d = blocks
            .first()
            .map(AlgElem::dim)
            .ok_or_else(|| Error::dims("module vector needs at least one block"))?;
        if blocks.iter().any(|b| b.dim() != d) {
            return Err(Error::dims(
                "module vector blocks differ in algebra dimension",
            ));
        }
        let parts: Vec<&CMatrix> = blocks.iter().map(AlgElem::matrix).collect();
        Ok(Self {
            alg_dim: d,
            len: blocks.len(),
            row: CMatrix::hstack(&parts),
        })
    }

    /// From the d×(n·d) block row.
    pub fn from_block_row(alg_dim: usize, row: CMatrix) -> Result<Self> {
        if alg_dim == 0 || row.rows() != alg_dim || row.cols() % alg_dim != 0 {
            return Err(Error::dims(format!(
                "block row of shape {:?} does not fit algebra dimension {alg_dim}",
                row.shape()
            )));
        }
        if !row.is_finite() {
            return Err(Error::NonFinite("module vector".into()));
        }
        Ok(Self {
            alg_dim,
            len: row.cols() / alg_dim,
            row,
        })
    }

    pub fn zeros(alg_dim: usize, len: usize) -> Self {
        Self {
            alg_dim,
            len,
            row: CMatrix::zeros(alg_dim, alg_dim * len),
        }
    }

    pub fn alg_dim(&self) -> usize {
        self.alg_dim
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn block_row(&self) -> &CMatrix {
        &self.row
    }

    pub fn block(&self, i: usize) -> AlgElem {
        let d = self.alg_dim;
        AlgElem::from_matrix_unchecked(self.row.block(0, i * d, d, d))
    }

    pub fn blocks(&self) -> Vec<AlgElem> {
        (0..self.len).map(|i| self.block(i)).collect()
    }

    /// Left module action `a·x`.
    pub fn scale_left(&self, a: &AlgElem) -> Result<Self> {
        if a.dim() != self.alg_dim {
            return Err(Error::dims("algebra element and module vector differ in d"));
        }
        Ok(Self {
            row: a.matrix() * &self.row,
            ..self.clone()
        })
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            row: self.row.scale(z),
            ..self.clone()
        }
    }

    fn same_shape(&self, other: &ModuleVec) -> Result<()> {
        if self.alg_dim != other.alg_dim || self.len != other.len {
            return Err(Error::dims(format!(
                "module vectors (d={}, n={}) and (d={}, n={})",
                self.alg_dim, self.len, other.alg_dim, other.len
            )));
        }
        Ok(())
    }
}

impl Add for &ModuleVec {
    type Output = ModuleVec;
    fn add(self, rhs: &ModuleVec) -> ModuleVec {
        self.same_shape(rhs).expect("ModuleVec add");
        ModuleVec {
            row: &self.row + &rhs.row,
            ..self.clone()
        }
    }
}

impl Sub for &ModuleVec {
    type Output = ModuleVec;
    fn sub(self, rhs: &ModuleVec) -> ModuleVec {
        self.same_shape(rhs).expect("ModuleVec sub");
        ModuleVec {
            row: &self.row - &rhs.row,
            ..self.clone()
        }
    }
}

/// `⟨x, y⟩ = Σ_i x_i y_i^*`.
pub fn inner(x: &ModuleVec, y: &ModuleVec) -> Result<AlgElem> {
    x.same_shape(y)?;
    Ok(AlgElem::from_matrix_unchecked(x.row.mul_adjoint(&y.row)))
}

/// `‖x‖ = ‖⟨x, x⟩‖^{1/2}`.
pub fn module_norm(x: &ModuleVec) -> f64 {
    algebra_norm_of_gram(&x.row.mul_adjoint(&x.row)).sqrt()
}

fn algebra_norm_of_gram(g: &CMatrix) -> f64 {
    crate::eigen::jacobi(&g.hermitian_part()).max().max(0.0)
}

/// Adjointable `A`-linear map `A^n → A^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjOp {
    alg_dim: usize,
    src_len: usize,
    dst_len: usize,
    matrix: CMatrix,
}

impl AdjOp {
    /// From the (n·d)×(m·d) representing matrix.
    pub fn new(alg_dim: usize, src_len: usize, dst_len: usize, matrix: CMatrix) -> Result<Self> {
        if alg_dim == 0 {
            return Err(Error::dims("algebra dimension must be positive"));
        }
        if matrix.shape() != (src_len * alg_dim, dst_len * alg_dim) {
            return Err(Error::dims(format!(
                "operator A^{src_len} -> A^{dst_len} over M_{alg_dim} needs a {}x{} matrix, got {:?}",
                src_len * alg_dim,
                dst_len * alg_dim,
                matrix.shape()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite("operator matrix".into()));
        }
        Ok(Self {
            alg_dim,
            src_len,
            dst_len,
            matrix,
        })
    }

    pub(crate) fn from_parts(
        alg_dim: usize,
        src_len: usize,
        dst_len: usize,
        matrix: CMatrix,
    ) -> Self {
        debug_assert_eq!(matrix.shape(), (src_len * alg_dim, dst_len * alg_dim));
        Self {
            alg_dim,
            src_len,
            dst_len,
            matrix,
        }
    }

    /// From the n×m array of coefficient blocks `t_ij`.
    pub fn from_blocks(blocks: &[Vec<AlgElem>]) -> Result<Self> {
        let n = blocks.len();
        let m = blocks.first().map_or(0, Vec::len);
        let d = blocks
            .first()
            .and_then(|r| r.first())
            .map(AlgElem::dim)
            .ok_or_else(|| Error::dims("operator needs at least one block"))?;
        let mut matrix = CMatrix::zeros(n * d, m * d);
        for (i, row) in blocks.iter().enumerate() {
            if row.len() != m {
                return Err(Error::dims("ragged block array"));
            }
            for (j, t) in row.iter().enumerate() {
                if t.dim() != d {
                    return Err(Error::dims("blocks differ in algebra dimension"));
                }
                matrix.set_block(i * d, j * d, t.matrix());
            }
        }
        Self::new(d, n, m, matrix)
    }

    /// Operator whose blocks are `c_ij · 1_A` for a scalar n×m matrix `c`.
    pub fn from_scalar_matrix(alg_dim: usize, c: &CMatrix) -> Self {
        let (n, m) = c.shape();
        let d = alg_dim;
        let mut matrix = CMatrix::zeros(n * d, m * d);
        for i in 0..n {
            for j in 0..m {
                for k in 0..d {
                    matrix[(i * d + k, j * d + k)] = c[(i, j)];
                }
            }
        }
        Self::from_parts(d, n, m, matrix)
    }

    pub fn identity(alg_dim: usize, len: usize) -> Self {
        Self::from_parts(alg_dim, len, len, CMatrix::identity(alg_dim * len))
    }

    pub fn zero(alg_dim: usize, src_len: usize, dst_len: usize) -> Self {
        Self::from_parts(
            alg_dim,
            src_len,
            dst_len,
            CMatrix::zeros(alg_dim * src_len, alg_dim * dst_len),
        )
    }

    pub fn alg_dim(&self) -> usize {
        self.alg_dim
    }

    pub fn src_len(&self) -> usize {
        self.src_len
    }

    pub fn dst_len(&self) -> usize {
        self.dst_len
    }

    /// The representing (n·d)×(m·d) matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn block(&self, i: usize, j: usize) -> AlgElem {
        let d = self.alg_dim;
        AlgElem::from_matrix_unchecked(self.matrix.block(i * d, j * d, d, d))
    }

    pub fn is_endomorphism(&self) -> bool {
        self.src_len == self.dst_len
    }

    pub fn apply(&self, x: &ModuleVec) -> Result<ModuleVec> {
        if x.alg_dim != self.alg_dim || x.len != self.src_len {
            return Err(Error::dims(format!(
                "operator expects A^{} over M_{}, got A^{} over M_{}",
                self.src_len, self.alg_dim, x.len, x.alg_dim
            )));
        }
        Ok(ModuleVec {
            alg_dim: self.alg_dim,
            len: self.dst_len,
            row: x.row.matmul(&self.matrix),
        })
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(
            self.alg_dim,
            self.dst_len,
            self.src_len,
            self.matrix.adjoint(),
        )
    }

    /// `self`, then `next`. Same as [`compose`].
    pub fn then(&self, next: &AdjOp) -> Result<AdjOp> {
        if self.alg_dim != next.alg_dim || self.dst_len != next.src_len {
            return Err(Error::dims(format!(
                "cannot compose A^{}->A^{} with A^{}->A^{}",
                self.src_len, self.dst_len, next.src_len, next.dst_len
            )));
        }
        Ok(Self::from_parts(
            self.alg_dim,
            self.src_len,
            next.dst_len,
            self.matrix.matmul(&next.matrix),
        ))
    }

    /// Operator product `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &AdjOp) -> Result<AdjOp> {
        first.then(self)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale_real(s),
            ..self.clone()
        }
    }

    pub fn scale_complex(&self, z: C64) -> Self {
        Self {
            matrix: self.matrix.scale(z),
            ..self.clone()
        }
    }

    pub fn try_add(&self, other: &AdjOp) -> Result<AdjOp> {
        self.same_type(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            ..self.clone()
        })
    }

    pub fn try_sub(&self, other: &AdjOp) -> Result<AdjOp> {
        self.same_type(other)?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
            ..self.clone()
        })
    }

    fn same_type(&self, other: &AdjOp) -> Result<()> {
        if self.alg_dim != other.alg_dim
            || self.src_len != other.src_len
            || self.dst_len != other.dst_len
        {
            return Err(Error::dims(format!(
                "operators A^{}->A^{} and A^{}->A^{} (d={} vs {})",
                self.src_len,
                self.dst_len,
                other.src_len,
                other.dst_len,
                self.alg_dim,
                other.alg_dim
            )));
        }
        Ok(())
    }

    pub fn op_norm(&self) -> f64 {
        svd::spectral_norm(&self.matrix)
    }

    /// Moore–Penrose inverse; singular values `≤ tol · σ_max` are dropped.
    pub fn pinv(&self, tol: f64) -> AdjOp {
        Self::from_parts(
            self.alg_dim,
            self.dst_len,
            self.src_len,
            svd::pinv(&self.matrix, tol),
        )
    }

    /// Numerical rank of the representing matrix.
    pub fn rank(&self, tol: f64) -> usize {
        svd::svd(&self.matrix).rank(tol)
    }

    /// Largest `m` with `‖Tx‖ ≥ m‖x‖` for all `x`: the smallest singular
    /// value of the representing matrix, counting the `n·d - m·d` forced
    /// zeros when the source is larger than the destination.
    pub fn min_gain(&self) -> f64 {
        let (rows, cols) = self.matrix.shape();
        if rows == 0 {
            return f64::INFINITY;
        }
        if rows > cols {
            return 0.0;
        }
        svd::svd(&self.matrix).sigma.last().copied().unwrap_or(0.0)
    }

    /// `T` is onto iff `T^*` is bounded below: `min_gain(T^*) > tol·‖T‖`.
    pub fn is_surjective(&self, tol: f64) -> bool {
        self.adjoint().min_gain() > tol * self.op_norm()
    }

    /// Orthogonal projection onto `R(T)` as an endomorphism of the
    /// destination, `T T^†`.
    pub fn range_projector(&self, tol: f64) -> AdjOp {
        self.pinv(tol)
            .then(self)
            .expect("pinv shapes always compose")
    }

    /// Orthogonal projection onto `N(T)`, `I - T^† T`.
    pub fn kernel_projector(&self, tol: f64) -> AdjOp {
        let p = self
            .then(&self.pinv(tol))
            .expect("pinv shapes always compose");
        AdjOp::identity(self.alg_dim, self.src_len)
            .try_sub(&p)
            .expect("same shape")
    }

    /// Orthonormal rows (r × m·d) spanning the row space that represents `R(T)`.
    pub fn range_basis(&self, tol: f64) -> CMatrix {
        svd::svd(&self.matrix).row_space(tol)
    }

    /// Positivity of an endomorphism, decided on the representing matrix.
    pub fn is_positive(&self, tol: f64) -> bool {
        self.is_endomorphism() && algebra::is_psd(&self.matrix, tol)
    }

    pub fn loewner_leq(&self, other: &AdjOp, tol: f64) -> bool {
        self.same_type(other).is_ok() && algebra::loewner_leq(&self.matrix, &other.matrix, tol)
    }

    /// Largest eigenvalue of a self-adjoint endomorphism.
    pub fn max_eigenvalue(&self) -> f64 {
        crate::eigen::jacobi(&self.matrix.hermitian_part()).max()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::eigen::jacobi(&self.matrix.hermitian_part()).min()
    }
}

/// `compose(S, T)(x) = T(S(x))`.
pub fn compose(s: &AdjOp, t: &AdjOp) -> Result<AdjOp> {
    s.then(t)
}

/// Smallest gain of `op` on the subspace spanned by the orthonormal rows of
/// `basis` (a subspace of the source). `None` for the zero subspace.
pub fn restricted_min_gain(op: &AdjOp, basis: &CMatrix) -> Option<f64> {
    let r = basis.rows();
    if r == 0 {
        return None;
    }
    let restricted = basis.matmul(op.matrix());
    if r > restricted.cols() {
        return Some(0.0);
    }
    Some(svd::svd(&restricted).sigma.last().copied().unwrap_or(0.0))
}

/// Largest gain of `op` on a subspace given by orthonormal rows.
pub fn restricted_norm(op: &AdjOp, basis: &CMatrix) -> f64 {
    if basis.rows() == 0 {
        return 0.0;
    }
    svd::spectral_norm(&basis.matmul(op.matrix()))
}

/// `R(T') ⊆ R(T)` iff `‖(I - T T^†) T'‖ ≤ tol · max(1, ‖T'‖)`.
pub fn range_inclusion(tp: &AdjOp, t: &AdjOp, tol: f64) -> Result<bool> {
    Ok(range_defect(tp, t, tol)? <= tol * tp.op_norm().max(1.0))
}

/// `‖(I - T T^†) T'‖`.
pub fn range_defect(tp: &AdjOp, t: &AdjOp, tol: f64) -> Result<f64> {
    if tp.alg_dim != t.alg_dim || tp.dst_len != t.dst_len {
        return Err(Error::dims(
            "range inclusion needs a common destination module",
        ));
    }
    let proj = t.range_projector(tol);
    let residual = &tp.matrix - &tp.matrix.matmul(proj.matrix());
    Ok(svd::spectral_norm(&residual))
}

/// Reduced solution `Q = T^† T'` of `T Q = T'`.
pub fn douglas_solve(t: &AdjOp, tp: &AdjOp, tol: f64) -> Result<AdjOp> {
    let defect = range_defect(tp, t, tol)?;
    if defect > tol * tp.op_norm().max(1.0) {
        return Err(Error::NoSolution { defect });
    }
    tp.then(&t.pinv(tol))
}

/// Least `λ ≥ 0` with `T' T'^* ≤ λ T T^*`, or `None` when `R(T') ⊄ R(T)`.
pub fn majorizes(t: &AdjOp, tp: &AdjOp) -> Option<f64> {
    majorizes_with_tol(t, tp, DEFAULT_TOL)
}

pub fn majorizes_with_tol(t: &AdjOp, tp: &AdjOp, tol: f64) -> Option<f64> {
    // For the reduced solution Q of T Q = T', the optimal constant is ‖Q‖².
    let q = douglas_solve(t, tp, tol).ok()?;
    let n = q.op_norm();
    Some(n * n)
}

/// Submodule given as the range of a generating operator into the ambient module.
#[derive(Clone, Debug)]
pub struct Submodule {
    generator: AdjOp,
}

impl Submodule {
    pub fn range_of(generator: AdjOp) -> Self {
        Self { generator }
    }

    /// The whole of `A^n`.
    pub fn full(alg_dim: usize, len: usize) -> Self {
        Self::range_of(AdjOp::identity(alg_dim, len))
    }

    pub fn zero(alg_dim: usize, len: usize) -> Self {
        Self::range_of(AdjOp::zero(alg_dim, 1, len))
    }

    pub fn generator(&self) -> &AdjOp {
        &self.generator
    }

    pub fn alg_dim(&self) -> usize {
        self.generator.alg_dim
    }

    pub fn ambient_len(&self) -> usize {
        self.generator.dst_len
    }

    pub fn projector(&self, tol: f64) -> AdjOp {
        self.generator.range_projector(tol)
    }

    /// Orthonormal rows spanning the represented subspace.
    pub fn basis(&self, tol: f64) -> CMatrix {
        self.generator.range_basis(tol)
    }

    pub fn contains(&self, x: &ModuleVec, tol: f64) -> Result<bool> {
        let p = self.projector(tol);
        let px = p.apply(x)?;
        let residual = x - &px;
        Ok(module_norm(&residual) <= tol * module_norm(x).max(1.0))
    }
}
