//! Dense column-major matrices and the factorizations the reduced model needs.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use super::{axpy, dot};
use crate::error::{Error, Result};

/// Dense `f64` matrix stored column by column.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![0.0; nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Wraps column-major data.
    pub fn from_column_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        Error::check_len(nrows * ncols, data.len())?;
        Ok(Self { nrows, ncols, data })
    }

    pub fn from_columns(nrows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(nrows * columns.len());
        for c in columns {
            Error::check_len(nrows, c.len())?;
            data.extend_from_slice(c);
        }
        Ok(Self { nrows, ncols: columns.len(), data })
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    /// Copy of the first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Self {
        assert!(k <= self.ncols);
        Self { nrows: self.nrows, ncols: k, data: self.data[..k * self.nrows].to_vec() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                axpy(xj, self.column(j), &mut y);
            }
        }
        y
    }

    /// `y = Aᵀ x`
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        (0..self.ncols).map(|j| dot(self.column(j), x)).collect()
    }

    /// `A B`
    pub fn mul(&self, b: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.ncols, b.nrows);
        let mut c = DenseMatrix::zeros(self.nrows, b.ncols);
        for j in 0..b.ncols {
            let bj = b.column(j);
            let cj = &mut c.data[j * self.nrows..(j + 1) * self.nrows];
            for (k, &bkj) in bj.iter().enumerate() {
                if bkj != 0.0 {
                    axpy(bkj, &self.data[k * self.nrows..(k + 1) * self.nrows], cj);
                }
            }
        }
        c
    }

    /// `Aᵀ B`
    pub fn tr_mul(&self, b: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.nrows, b.nrows);
        DenseMatrix::from_fn(self.ncols, b.ncols, |i, j| dot(self.column(i), b.column(j)))
    }

    /// Largest absolute entry of `A − B`.
    pub fn max_abs_diff(&self, b: &DenseMatrix) -> f64 {
        assert_eq!((self.nrows, self.ncols), (b.nrows, b.ncols));
        self.data.iter().zip(&b.data).map(|(x, y)| libm::fabs(x - y)).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.nrows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.nrows + i]
    }
}

/// Dense Cholesky `A = L Lᵀ` of an SPD matrix.
#[derive(Clone, Debug)]
pub struct DenseCholesky {
    l: DenseMatrix,
}

impl DenseCholesky {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::invalid("Cholesky needs a square matrix"));
        }
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut djj = a[(j, j)];
            for k in 0..j {
                djj -= l[(j, k)] * l[(j, k)];
            }
            if !(djj > 0.0) || !djj.is_finite() {
                return Err(Error::NumericalFailure(alloc::format!(
                    "matrix is not positive definite (pivot {j} = {djj:e})"
                )));
            }
            let ljj = libm::sqrt(djj);
            l[(j, j)] = ljj;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Self { l })
    }

    pub fn lower(&self) -> &DenseMatrix {
        &self.l
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.l.nrows();
        assert_eq!(b.len(), n);
        for j in 0..n {
            b[j] /= self.l[(j, j)];
            let bj = b[j];
            let col = self.l.column(j);
            for i in j + 1..n {
                b[i] -= col[i] * bj;
            }
        }
        for j in (0..n).rev() {
            let col = self.l.column(j);
            let s = dot(&col[j + 1..], &b[j + 1..]);
            b[j] = (b[j] - s) / self.l[(j, j)];
        }
    }
}

/// Thin SVD `A ≈ U Σ Vᵀ` keeping left vectors and singular values.
#[derive(Clone, Debug)]
pub struct ThinSvd {
    /// `m × min(m, n)`, columns ordered like `singular_values`.
    pub u: DenseMatrix,
    /// Nonincreasing.
    pub singular_values: Vec<f64>,
}

/// Thin SVD by column-pivoted Householder QR followed by one-sided Jacobi on
/// the transposed triangular factor. Wide matrices are handled through their
/// transpose.
pub fn thin_svd(a: &DenseMatrix) -> ThinSvd {
    thin_svd_leading(a, usize::MAX)
}

/// Like [`thin_svd`], but forms only the first `k` left singular vectors.
/// All singular values are still returned.
pub fn thin_svd_leading(a: &DenseMatrix, k: usize) -> ThinSvd {
    if a.nrows() >= a.ncols() {
        // A P = Q R and Rᵀ V = W give A = (Q V) Σ (W Σ⁻¹)ᵀ Pᵀ
        let qr = HouseholderQr::new(a.clone());
        let (w, v) = jacobi_svd(qr.r().transpose(), true);
        let v = v.unwrap();
        let order = descending_order(&w);
        let sigma = sorted_norms(&w, &order);
        let keep = k.min(order.len());
        let ur = DenseMatrix::from_fn(v.nrows(), keep, |i, j| v[(i, order[j])]);
        ThinSvd { u: qr.q_mul(&ur), singular_values: sigma }
    } else {
        // Aᵀ P = Q R gives A = P Rᵀ Qᵀ, and Rᵀ V = W gives the left factor
        let qr = HouseholderQr::new(a.transpose());
        let (w, _) = jacobi_svd(qr.r().transpose(), false);
        let order = descending_order(&w);
        let sigma = sorted_norms(&w, &order);
        let keep = k.min(order.len());
        let mut u = DenseMatrix::zeros(a.nrows(), keep);
        for (dst, &src) in order.iter().take(keep).enumerate() {
            let s = sigma[dst];
            if s > 0.0 {
                for (i, &x) in w.column(src).iter().enumerate() {
                    u[(qr.perm[i], dst)] = x / s;
                }
            }
        }
        ThinSvd { u, singular_values: sigma }
    }
}

fn column_norms(w: &DenseMatrix) -> Vec<f64> {
    (0..w.ncols()).map(|j| libm::sqrt(dot(w.column(j), w.column(j)))).collect()
}

fn descending_order(w: &DenseMatrix) -> Vec<usize> {
    let norms = column_norms(w);
    let mut order: Vec<usize> = (0..w.ncols()).collect();
    // stable sort keeps ties deterministic
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap_or(core::cmp::Ordering::Equal));
    order
}

fn sorted_norms(w: &DenseMatrix, order: &[usize]) -> Vec<f64> {
    let norms = column_norms(w);
    order.iter().map(|&j| norms[j]).collect()
}

/// One-sided (Hestenes) Jacobi: rotates columns of `a` until mutually
/// orthogonal, so that `A V = W`. Returns `W` and optionally `V`.
fn jacobi_svd(mut a: DenseMatrix, want_v: bool) -> (DenseMatrix, Option<DenseMatrix>) {
    let n = a.ncols();
    let mut v = want_v.then(|| DenseMatrix::identity(n));
    let tol = f64::EPSILON * libm::sqrt(a.nrows().max(1) as f64);
    for _sweep in 0..80 {
        let mut norms: Vec<f64> = (0..n).map(|j| dot(a.column(j), a.column(j))).collect();
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(a.column(p), a.column(q));
                if libm::fabs(gamma) <= tol * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_columns(&mut a, p, q, c, s);
                if let Some(v) = v.as_mut() {
                    rotate_columns(v, p, q, c, s);
                }
                norms[p] = alpha - t * gamma;
                norms[q] = beta + t * gamma;
                if norms[p] < 1e-2 * alpha {
                    norms[p] = dot(a.column(p), a.column(p));
                }
                if norms[q] < 1e-2 * beta {
                    norms[q] = dot(a.column(q), a.column(q));
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (a, v)
}

fn rotate_columns(a: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let m = a.nrows();
    let (lo, hi) = a.data.split_at_mut(q * m);
    let cp = &mut lo[p * m..(p + 1) * m];
    let cq = &mut hi[..m];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Householder QR with column pivoting, `A P = Q R`, of a tall matrix.
/// Reflectors are stored below the diagonal.
struct HouseholderQr {
    qr: DenseMatrix,
    tau: Vec<f64>,
    /// Column `k` of `A P` is column `perm[k]` of `A`.
    perm: Vec<usize>,
}

impl HouseholderQr {
    fn new(mut a: DenseMatrix) -> Self {
        let (m, n) = (a.nrows(), a.ncols());
        debug_assert!(m >= n);
        let mut tau = vec![0.0; n];
        let mut perm: Vec<usize> = (0..n).collect();
        let mut partial: Vec<f64> = (0..n).map(|j| libm::sqrt(dot(a.column(j), a.column(j)))).collect();
        let mut reference = partial.clone();
        let recompute_tol = libm::sqrt(f64::EPSILON);
        for k in 0..n {
            let pivot = (k..n).fold(k, |best, j| if partial[j] > partial[best] { j } else { best });
            if pivot != k {
                let (head, tail) = a.data.split_at_mut(pivot * m);
                head[k * m..(k + 1) * m].swap_with_slice(&mut tail[..m]);
                perm.swap(k, pivot);
                partial.swap(k, pivot);
                reference.swap(k, pivot);
            }
            let col = &mut a.column_mut(k)[k..];
            let norm = libm::sqrt(dot(col, col));
            if norm == 0.0 {
                continue;
            }
            let alpha = if col[0] > 0.0 { -norm } else { norm };
            let v0 = col[0] - alpha;
            // v = (1, col[1..]/v0), tau = -v0/alpha
            for x in col[1..].iter_mut() {
                *x /= v0;
            }
            col[0] = alpha;
            tau[k] = -v0 / alpha;
            for j in k + 1..n {
                let (head, tail) = a.data.split_at_mut(j * m);
                let vk = &head[k * m + k..k * m + m];
                let cj = &mut tail[k..m];
                let s = tau[k] * (cj[0] + dot(&vk[1..], &cj[1..]));
                cj[0] -= s;
                axpy(-s, &vk[1..], &mut cj[1..]);
                if partial[j] > 0.0 {
                    let ratio = libm::fabs(cj[0]) / partial[j];
                    let shrink = (1.0 - ratio * ratio).max(0.0);
                    let rel = partial[j] / reference[j];
                    if shrink * rel * rel <= recompute_tol {
                        partial[j] = libm::sqrt(dot(&cj[1..], &cj[1..]));
                        reference[j] = partial[j];
                    } else {
                        partial[j] *= libm::sqrt(shrink);
                    }
                }
            }
        }
        Self { qr: a, tau, perm }
    }

    fn r(&self) -> DenseMatrix {
        let n = self.qr.ncols();
        DenseMatrix::from_fn(n, n, |i, j| if i <= j { self.qr[(i, j)] } else { 0.0 })
    }

    /// `Q [X; 0]` for an `n × k` matrix `X`.
    fn q_mul(&self, x: &DenseMatrix) -> DenseMatrix {
        let (m, n) = (self.qr.nrows(), self.qr.ncols());
        assert_eq!(x.nrows(), n);
        let mut out = DenseMatrix::zeros(m, x.ncols());
        for j in 0..x.ncols() {
            out.column_mut(j)[..n].copy_from_slice(x.column(j));
        }
        for k in (0..n).rev() {
            if self.tau[k] == 0.0 {
                continue;
            }
            let vk = &self.qr.column(k)[k..];
            for j in 0..out.ncols() {
                let cj = &mut out.column_mut(j)[k..];
                let s = self.tau[k] * (cj[0] + dot(&vk[1..], &cj[1..]));
                cj[0] -= s;
                axpy(-s, &vk[1..], &mut cj[1..]);
            }
        }
        out
    }
}
