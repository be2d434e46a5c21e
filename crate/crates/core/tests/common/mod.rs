#![allow(dead_code)]

use ltrb_core::linalg::{CsrMatrix, DenseMatrix};
use ltrb_core::{assemble_operators, build_structured_mesh, Mesh, OperatorSet, Rect};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub fn setup(n: usize, c: f64) -> (Mesh, OperatorSet) {
    let mesh = build_structured_mesh(n, Rect::default()).unwrap();
    let ops = assemble_operators(&mesh, c).unwrap();
    (mesh, ops)
}

pub fn to_na(a: &CsrMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.triplets() {
        d[(i, j)] += v;
    }
    d
}

pub fn dense_to_na(a: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(a.nrows(), a.ncols(), a.as_slice())
}

/// Generalized eigenpairs of `(A, M)` in ascending order, eigenvectors
/// M-normalized, via `L⁻¹ A L⁻ᵀ` with `M = L Lᵀ`.
pub fn generalized_eigen(a: &CsrMatrix, m: &CsrMatrix) -> (Vec<f64>, Vec<DVector<f64>>) {
    let a = to_na(a);
    let chol = to_na(m).cholesky().expect("mass matrix is SPD");
    let l = chol.l();
    let linv = l.clone().try_inverse().unwrap();
    let c = &linv * a * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let lt = l.transpose();
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = order
        .iter()
        .map(|&k| lt.clone().solve_upper_triangular(&eig.eigenvectors.column(k).into_owned()).unwrap())
        .collect();
    (vals, vecs)
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}
