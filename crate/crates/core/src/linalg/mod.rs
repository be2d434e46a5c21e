//! Linear algebra kernels used by the solver: CSR matrices, a sparse
//! LDLᵀ factorization with nested-dissection ordering (real and complex
//! symmetric), and dense column-major routines (Cholesky, thin SVD).

pub mod dense;
pub mod ldlt;
pub mod ordering;
pub mod scalar;
pub mod sparse;

pub use dense::{thin_svd, thin_svd_leading, DenseCholesky, DenseMatrix, ThinSvd};
pub use ldlt::{LdlFactor, SymbolicLdl};
pub use ordering::Ordering;
pub use scalar::Scalar;
pub use sparse::CsrMatrix;

/// Euclidean dot product.
#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub fn norm2(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

/// `y += a * x`
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
