//! Weighted proper orthogonal decomposition in the H¹₀ inner product.
//!
//! With `B_h = R_hᵀ R_h`, `S` the snapshot matrix and `D = diag(ω)`, the thin
//! SVD of `Š = R_h S D^{1/2}` gives left vectors `ζ̌_k`, and the basis is
//! `Φ = (R_h⁻¹ ζ̌_1, …, R_h⁻¹ ζ̌_R)`, which satisfies `Φᵀ B_h Φ = I`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fem::OperatorSet;
use crate::laplace::SnapshotSet;
use crate::linalg::{dot, thin_svd_leading, DenseMatrix, LdlFactor, Ordering};

/// Singular values below `RANK_TOL · σ̌_1` count as zero.
pub const RANK_TOL: f64 = 1e-12;

/// Cholesky factor `B_h = R_hᵀ R_h`, with `R_h = D^{1/2} Lᵀ P`.
///
/// `P` is the fill-reducing permutation, so `R_h` is upper triangular in the
/// permuted column order.
#[derive(Clone, Debug)]
pub struct GramFactor {
    ldl: LdlFactor<f64>,
    sqrt_d: Vec<f64>,
    mesh_hash: u64,
}

pub fn cholesky_gram(ops: &OperatorSet) -> Result<GramFactor> {
    GramFactor::new(&ops.gram_h10, ops.mesh_hash)
}

impl GramFactor {
    /// Factors an SPD matrix.
    pub fn new(b: &crate::linalg::CsrMatrix, mesh_hash: u64) -> Result<Self> {
        let ldl = LdlFactor::new(b, Ordering::NestedDissection)
            .map_err(|e| Error::InvalidOperator(format!("Gram matrix is not SPD: {e}")))?;
        let mut sqrt_d = Vec::with_capacity(ldl.dim());
        for (k, &d) in ldl.diagonal().iter().enumerate() {
            if !(d > 0.0) {
                return Err(Error::InvalidOperator(format!("Gram matrix is not SPD: pivot {k} = {d:e}")));
            }
            sqrt_d.push(libm::sqrt(d));
        }
        Ok(Self { ldl, sqrt_d, mesh_hash })
    }

    pub fn dim(&self) -> usize {
        self.ldl.dim()
    }

    pub fn mesh_hash(&self) -> u64 {
        self.mesh_hash
    }

    pub fn permutation(&self) -> &[usize] {
        self.ldl.symbolic().permutation()
    }

    /// `R_h x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim());
        let mut y: Vec<f64> = self.permutation().iter().map(|&p| x[p]).collect();
        self.ldl.lower_transpose_mul(&mut y);
        for (yi, s) in y.iter_mut().zip(&self.sqrt_d) {
            *yi *= s;
        }
        y
    }

    /// `R_h⁻¹ y`
    pub fn solve(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.dim());
        let mut z: Vec<f64> = y.iter().zip(&self.sqrt_d).map(|(v, s)| v / s).collect();
        self.ldl.lower_transpose_solve(&mut z);
        let mut x = vec![0.0; z.len()];
        for (k, &p) in self.permutation().iter().enumerate() {
            x[p] = z[k];
        }
        x
    }

    /// Dense `R_h`.
    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let perm = self.permutation();
        let mut r = DenseMatrix::zeros(n, n);
        for k in 0..n {
            let s = self.sqrt_d[k];
            r[(k, perm[k])] = s;
            for (i, l) in self.ldl.lower_column(k) {
                r[(k, perm[i])] = s * l;
            }
        }
        r
    }
}

/// B-orthonormal reduced basis and the singular values it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedBasis {
    /// `N_h × R`
    phi: DenseMatrix,
    /// `σ̌_1 ≥ … ≥ σ̌_r > 0`
    singular_values: Vec<f64>,
    rank: usize,
    requested: usize,
    mesh_hash: u64,
}

impl ReducedBasis {
    /// Wraps a precomputed basis, e.g. one read back from disk.
    pub fn new(phi: DenseMatrix, singular_values: Vec<f64>, requested: usize, mesh_hash: u64) -> Result<Self> {
        let rank = singular_values.len();
        if phi.ncols() > rank {
            return Err(Error::invalid(format!("basis has {} columns but only {rank} singular values", phi.ncols())));
        }
        if singular_values.windows(2).any(|w| w[0] < w[1]) || singular_values.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::invalid("singular values must be positive and nonincreasing"));
        }
        Ok(Self { phi, singular_values, rank, requested, mesh_hash })
    }

    pub fn phi(&self) -> &DenseMatrix {
        &self.phi
    }

    /// Retained dimension `R`.
    pub fn dim(&self) -> usize {
        self.phi.ncols()
    }

    pub fn n_dofs(&self) -> usize {
        self.phi.nrows()
    }

    /// Numerical rank `r` of the weighted snapshot matrix.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension that was asked for; larger than [`dim`](Self::dim) when the
    /// snapshots did not have enough rank.
    pub fn requested(&self) -> usize {
        self.requested
    }

    pub fn truncated(&self) -> bool {
        self.requested > self.dim()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn mesh_hash(&self) -> u64 {
        self.mesh_hash
    }

    /// The first `r` basis vectors.
    pub fn leading(&self, r: usize) -> Result<Self> {
        if r == 0 || r > self.dim() {
            return Err(Error::invalid(format!("cannot take {r} of {} basis vectors", self.dim())));
        }
        Ok(Self { phi: self.phi.leading_columns(r), requested: r, ..self.clone() })
    }

    /// `max |Φᵀ B Φ − I|`
    pub fn orthonormality_defect(&self, ops: &OperatorSet) -> f64 {
        let r = self.dim();
        let mut worst: f64 = 0.0;
        for j in 0..r {
            let bj = ops.gram_h10.mul_vec(self.phi.column(j));
            for i in 0..r {
                let g = dot(self.phi.column(i), &bj);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max(libm::fabs(g - target));
            }
        }
        worst
    }
}

/// POD basis of dimension `min(r_target, rank)` from weighted snapshots.
pub fn build_reduced_basis(snaps: &SnapshotSet, factor: &GramFactor, r_target: usize) -> Result<ReducedBasis> {
    if r_target < 1 {
        return Err(Error::invalid("reduced dimension must be at least 1"));
    }
    if snaps.is_empty() {
        return Err(Error::invalid("snapshot set is empty"));
    }
    Error::check_len(factor.dim(), snaps.n_dofs())?;
    Error::check_len(snaps.len(), snaps.weights.len())?;
    if snaps.weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::invalid("snapshot weights must be positive"));
    }

    let n = snaps.n_dofs();
    let m = snaps.len();
    let mut weighted = DenseMatrix::zeros(n, m);
    for j in 0..m {
        let col = factor.apply(snaps.columns.column(j));
        let w = libm::sqrt(snaps.weights[j]);
        for (dst, v) in weighted.column_mut(j).iter_mut().zip(col) {
            *dst = w * v;
        }
    }
    let svd = thin_svd_leading(&weighted, r_target);
    let sigma1 = svd.singular_values.first().copied().unwrap_or(0.0);
    if !(sigma1 > 0.0) {
        return Err(Error::invalid("snapshot set has rank zero"));
    }
    let rank = svd.singular_values.iter().take_while(|&&s| s > RANK_TOL * sigma1).count();
    let keep = r_target.min(rank);
    let columns: Vec<Vec<f64>> = (0..keep).map(|k| factor.solve(svd.u.column(k))).collect();
    let phi = DenseMatrix::from_columns(n, &columns)?;
    Ok(ReducedBasis {
        phi,
        singular_values: svd.singular_values[..rank].to_vec(),
        rank,
        requested: r_target,
        mesh_hash: factor.mesh_hash(),
    })
}

/// `Σ_j ω_j ‖s_j − Φ_R Φ_Rᵀ B s_j‖²_B`, evaluated directly from the snapshots.
pub fn pod_projection_error(basis: &ReducedBasis, snaps: &SnapshotSet, ops: &OperatorSet, r: usize) -> Result<f64> {
    if r == 0 || r > basis.dim() {
        return Err(Error::invalid(format!("projection dimension {r} outside 1..={}", basis.dim())));
    }
    Error::check_len(ops.n_dofs, basis.n_dofs())?;
    Error::check_len(ops.n_dofs, snaps.n_dofs())?;
    Error::check_len(snaps.len(), snaps.weights.len())?;
    let phi = basis.phi();
    let mut total = 0.0;
    for j in 0..snaps.len() {
        let s = snaps.columns.column(j);
        let bs = ops.gram_h10.mul_vec(s);
        let mut e = s.to_vec();
        for k in 0..r {
            let c = dot(phi.column(k), &bs);
            crate::linalg::axpy(-c, phi.column(k), &mut e);
        }
        total += snaps.weights[j] * ops.gram_h10.quadratic_form(&e);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assemble_operators;
    use crate::laplace::make_quadrature;
    use crate::linalg::CsrMatrix;
    use crate::mesh::{build_structured_mesh, Rect};

    #[test]
    fn one_by_one_factor() {
        let b = CsrMatrix::from_triplets(1, 1, &[(0, 0, 4.0)]).unwrap();
        let f = GramFactor::new(&b, 0).unwrap();
        assert_eq!(f.to_dense()[(0, 0)], 2.0);
    }

    #[test]
    fn identity_factor() {
        let f = GramFactor::new(&CsrMatrix::identity(7), 0).unwrap();
        assert_eq!(f.to_dense(), DenseMatrix::identity(7));
    }

    #[test]
    fn indefinite_gram_is_rejected() {
        let b = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(GramFactor::new(&b, 0), Err(Error::InvalidOperator(_))));
    }

    #[test]
    fn apply_and_solve_are_inverse() {
        let mesh = build_structured_mesh(9, Rect::default()).unwrap();
        let ops = assemble_operators(&mesh, 1.0).unwrap();
        let f = cholesky_gram(&ops).unwrap();
        let x: Vec<f64> = (0..ops.n_dofs).map(|i| libm::cos(i as f64)).collect();
        let back = f.solve(&f.apply(&x));
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
        // ‖R x‖² = xᵀ B x
        let rx = f.apply(&x);
        assert!((dot(&rx, &rx) - ops.gram_h10.quadratic_form(&x)).abs() < 1e-10);
    }

    #[test]
    fn single_snapshot_basis() {
        let mesh = build_structured_mesh(6, Rect::default()).unwrap();
        let ops = assemble_operators(&mesh, 1.0).unwrap();
        let f = cholesky_gram(&ops).unwrap();
        let v: Vec<f64> = (0..ops.n_dofs).map(|i| 1.0 + (i % 3) as f64).collect();
        let rule = make_quadrature(5.0, 2.0, 2).unwrap();
        let omega = 0.37;
        let snaps = SnapshotSet {
            columns: DenseMatrix::from_columns(ops.n_dofs, core::slice::from_ref(&v)).unwrap(),
            weights: alloc::vec![omega],
            rule,
            n_solves: 0,
        };
        let basis = build_reduced_basis(&snaps, &f, 1).unwrap();
        let norm_b = libm::sqrt(ops.gram_h10.quadratic_form(&v));
        assert_eq!(basis.rank(), 1);
        assert!((basis.singular_values()[0] - libm::sqrt(omega) * norm_b).abs() < 1e-12 * norm_b);
        let phi = basis.phi().column(0);
        // same direction up to sign
        let sign = phi[0].signum() * v[0].signum();
        for (p, x) in phi.iter().zip(&v) {
            assert!((sign * p - x / norm_b).abs() < 1e-12);
        }
        assert!(build_reduced_basis(&snaps, &f, 0).is_err());
        let big = build_reduced_basis(&snaps, &f, 4).unwrap();
        assert_eq!(big.dim(), 1);
        assert!(big.truncated());
    }
}
