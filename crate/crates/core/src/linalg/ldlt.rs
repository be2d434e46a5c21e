//! Sparse `LDLᵀ` factorization without pivoting (up-looking, row by row).
//!
//! Works for real SPD matrices and for complex *symmetric* matrices such as
//! `s²M + A` with `Re s > 0`. The symbolic phase (ordering, elimination tree,
//! column counts) depends only on the pattern and is shared between numeric
//! factorizations through an [`Arc`].

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::ordering::Ordering;
use super::scalar::Scalar;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// Pattern analysis of a symmetric matrix `PAPᵀ = LDLᵀ`.
#[derive(Clone, Debug)]
pub struct SymbolicLdl {
    n: usize,
    /// `perm[k]` is the original index eliminated at step k.
    perm: Vec<usize>,
    /// Inverse of `perm`.
    pinv: Vec<usize>,
    parent: Vec<usize>,
    /// Column pointers of the strictly lower factor `L`.
    col_ptr: Vec<usize>,
    pattern_row_ptr: Vec<usize>,
    pattern_col_idx: Vec<usize>,
}

impl SymbolicLdl {
    /// Analyzes the pattern of a structurally symmetric square matrix.
    pub fn analyze<T: Scalar>(a: &CsrMatrix<T>, ordering: Ordering) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::invalid("LDLᵀ needs a square matrix"));
        }
        let n = a.nrows();
        let perm = ordering.permutation(a);
        let mut pinv = vec![0; n];
        for (k, &p) in perm.iter().enumerate() {
            pinv[p] = k;
        }

        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for &j in a.row(perm[k]).0 {
                let mut i = pinv[j];
                if i >= k {
                    continue;
                }
                while flag[i] != k {
                    if parent[i] == NONE {
                        parent[i] = k;
                    }
                    lnz[i] += 1;
                    flag[i] = k;
                    i = parent[i];
                }
            }
        }
        let mut col_ptr = vec![0; n + 1];
        for k in 0..n {
            col_ptr[k + 1] = col_ptr[k] + lnz[k];
        }
        Ok(Self {
            n,
            perm,
            pinv,
            parent,
            col_ptr,
            pattern_row_ptr: a.row_ptr().to_vec(),
            pattern_col_idx: a.col_idx().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Nonzeros in the strictly lower triangle of `L`.
    pub fn factor_nnz(&self) -> usize {
        self.col_ptr[self.n]
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    fn matches<T: Scalar>(&self, a: &CsrMatrix<T>) -> bool {
        a.nrows() == self.n
            && a.row_ptr() == self.pattern_row_ptr.as_slice()
            && a.col_idx() == self.pattern_col_idx.as_slice()
    }
}

/// Numeric factor `PAPᵀ = LDLᵀ` with unit lower-triangular `L`.
#[derive(Clone, Debug)]
pub struct LdlFactor<T> {
    symbolic: Arc<SymbolicLdl>,
    row_idx: Vec<usize>,
    lx: Vec<T>,
    d: Vec<T>,
}

impl<T: Scalar> LdlFactor<T> {
    /// Analyzes and factors in one go.
    pub fn new(a: &CsrMatrix<T>, ordering: Ordering) -> Result<Self> {
        let symbolic = Arc::new(SymbolicLdl::analyze(a, ordering)?);
        Self::factor(symbolic, a)
    }

    /// Numeric factorization reusing a symbolic analysis of the same pattern.
    pub fn factor(symbolic: Arc<SymbolicLdl>, a: &CsrMatrix<T>) -> Result<Self> {
        if !symbolic.matches(a) {
            return Err(Error::invalid("matrix pattern differs from the symbolic analysis"));
        }
        let n = symbolic.n;
        let nnz = symbolic.factor_nnz();
        let sym = &*symbolic;
        let mut row_idx = vec![0usize; nnz];
        let mut lx = vec![T::ZERO; nnz];
        let mut d = vec![T::ZERO; n];
        let mut y = vec![T::ZERO; n];
        let mut pattern = vec![0usize; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];

        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            let (cols, vals) = a.row(sym.perm[k]);
            for (&j, &v) in cols.iter().zip(vals) {
                let mut i = sym.pinv[j];
                if i > k {
                    continue;
                }
                y[i] += v;
                let mut len = 0;
                while flag[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = sym.parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            d[k] = y[k];
            y[k] = T::ZERO;
            while top < n {
                let i = pattern[top];
                top += 1;
                let yi = y[i];
                y[i] = T::ZERO;
                let start = sym.col_ptr[i];
                let end = start + lnz[i];
                for p in start..end {
                    let r = row_idx[p];
                    y[r] -= lx[p] * yi;
                }
                let l_ki = yi / d[i];
                d[k] -= l_ki * yi;
                row_idx[end] = k;
                lx[end] = l_ki;
                lnz[i] += 1;
            }
            if d[k] == T::ZERO || !d[k].is_finite() {
                return Err(Error::NumericalFailure(alloc::format!(
                    "zero or non-finite pivot at elimination step {k} (row {})",
                    sym.perm[k]
                )));
            }
        }
        Ok(Self { symbolic, row_idx, lx, d })
    }

    pub fn dim(&self) -> usize {
        self.symbolic.n
    }

    pub fn symbolic(&self) -> &Arc<SymbolicLdl> {
        &self.symbolic
    }

    /// Diagonal of `D` in elimination order.
    pub fn diagonal(&self) -> &[T] {
        &self.d
    }

    /// Overwrites `b` with `A⁻¹ b`.
    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.dim();
        assert_eq!(b.len(), n, "right-hand side has the wrong length");
        let mut x: Vec<T> = self.symbolic.perm.iter().map(|&p| b[p]).collect();
        self.lower_solve(&mut x);
        for (xi, &di) in x.iter_mut().zip(&self.d) {
            *xi = *xi / di;
        }
        self.lower_transpose_solve(&mut x);
        for (k, &p) in self.symbolic.perm.iter().enumerate() {
            b[p] = x[k];
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// `x ← L⁻¹ x` in elimination order.
    pub(crate) fn lower_solve(&self, x: &mut [T]) {
        let cp = &self.symbolic.col_ptr;
        for j in 0..self.dim() {
            let xj = x[j];
            if xj == T::ZERO {
                continue;
            }
            for p in cp[j]..cp[j + 1] {
                x[self.row_idx[p]] -= self.lx[p] * xj;
            }
        }
    }

    /// `x ← L⁻ᵀ x` in elimination order.
    pub(crate) fn lower_transpose_solve(&self, x: &mut [T]) {
        let cp = &self.symbolic.col_ptr;
        for j in (0..self.dim()).rev() {
            let mut acc = x[j];
            for p in cp[j]..cp[j + 1] {
                acc -= self.lx[p] * x[self.row_idx[p]];
            }
            x[j] = acc;
        }
    }

    /// `x ← Lᵀ x` in elimination order.
    pub(crate) fn lower_transpose_mul(&self, x: &mut [T]) {
        let cp = &self.symbolic.col_ptr;
        for j in 0..self.dim() {
            let mut acc = x[j];
            for p in cp[j]..cp[j + 1] {
                acc += self.lx[p] * x[self.row_idx[p]];
            }
            x[j] = acc;
        }
    }

    /// Strict lower entries of column `j` of `L` as `(row, value)` pairs.
    pub fn lower_column(&self, j: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let cp = &self.symbolic.col_ptr;
        (cp[j]..cp[j + 1]).map(move |p| (self.row_idx[p], self.lx[p]))
    }
}
