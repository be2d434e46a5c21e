//! Laplace-domain sampling: quadrature nodes on the line `Re{s} = α`,
//! the discrete problems `(s² M_h + A_h) û = f̂(s) + s M_h u₀ + M_h u₁`, and
//! the real snapshot matrix used by the POD.
//!
//! Nodes `i` and `M − i` are complex conjugates, so only `M/2` systems are
//! solved; node `M/2` sits on the real axis and is solved in real arithmetic.
//! The last node is replaced by the initial datum `u₀` with weight `π/(Mβ)`.

use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem::OperatorSet;
use crate::forcing::Forcing;
use crate::linalg::{DenseMatrix, LdlFactor, Ordering, SymbolicLdl};

/// Nodes `s_i = α + iβ cot(θ_i/2)` and weights `ω_i = πβ / (M sin²(θ_i/2))`
/// with `θ_i = 2πi/M`, `i = 1..M`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub alpha: f64,
    pub beta: f64,
    pub m: usize,
    /// `s_1 .. s_{M−1}`; `s_M` is replaced and has no finite value.
    pub nodes: Vec<Complex64>,
    /// `ω_1 .. ω_M`
    pub weights: Vec<f64>,
    /// `θ_1 .. θ_M`
    pub thetas: Vec<f64>,
    /// Node `M` carries `u₀` with weight `π/(Mβ)` instead of a Laplace solve.
    pub replaced_last: bool,
}

impl QuadratureRule {
    /// Node of column `j` (0-based), `None` for the replaced last column.
    pub fn node(&self, j: usize) -> Option<Complex64> {
        self.nodes.get(j).copied()
    }

    /// 0-based columns that need a linear solve: `0 .. M/2`.
    pub fn effective_columns(&self) -> core::ops::Range<usize> {
        0..self.m / 2
    }
}

pub fn make_quadrature(alpha: f64, beta: f64, m: usize) -> Result<QuadratureRule> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::invalid(format!("beta must be positive, got {beta}")));
    }
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::invalid(format!("node count must be even and at least 2, got {m}")));
    }
    let half = m / 2;
    let thetas: Vec<f64> = (1..=m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();
    let mut nodes = Vec::with_capacity(m - 1);
    let mut weights = Vec::with_capacity(m);
    for i in 1..=half {
        let t = 0.5 * thetas[i - 1];
        let (sin, cos) = (libm::sin(t), libm::cos(t));
        let im = if i == half { 0.0 } else { beta * cos / sin };
        nodes.push(Complex64::new(alpha, im));
        weights.push(PI * beta / (m as f64 * sin * sin));
    }
    // mirrored half: s_{M−i} = conj(s_i), ω_{M−i} = ω_i
    for i in half + 1..m {
        let k = m - i;
        nodes.push(nodes[k - 1].conj());
        weights.push(weights[k - 1]);
    }
    weights.push(PI / (m as f64 * beta));
    Ok(QuadratureRule { alpha, beta, m, nodes, weights, thetas, replaced_last: true })
}

/// Reusable solver for `(s² M_h + A_h) û = f̂(s) + s M_h u₀ + M_h u₁`.
///
/// The sparsity analysis is done once; every node pays one numeric
/// factorization.
pub struct LaplaceSolver<'a> {
    ops: &'a OperatorSet,
    forcing: &'a Forcing,
    symbolic: Arc<SymbolicLdl>,
    mass_u0: Vec<f64>,
    mass_u1: Vec<f64>,
}

impl<'a> LaplaceSolver<'a> {
    pub fn new(ops: &'a OperatorSet, u0h: &[f64], u1h: &[f64], forcing: &'a Forcing) -> Result<Self> {
        let n = ops.n_dofs;
        Error::check_len(n, u0h.len())?;
        Error::check_len(n, u1h.len())?;
        if !forcing.profile.is_empty() {
            Error::check_len(n, forcing.profile.len())?;
        }
        let symbolic = Arc::new(SymbolicLdl::analyze(&ops.mass, Ordering::NestedDissection)?);
        Ok(Self { ops, forcing, symbolic, mass_u0: ops.mass.mul_vec(u0h), mass_u1: ops.mass.mul_vec(u1h) })
    }

    /// Solves at a complex node with the forcing's transformed load.
    pub fn solve(&self, s: Complex64) -> Result<Vec<Complex64>> {
        self.forcing.temporal.check_abscissa(s.re)?;
        let load = self.forcing.laplace_load(s);
        self.solve_with_load(s, load.as_deref())
    }

    /// Solves at a complex node with an explicit transformed load.
    pub fn solve_with_load(&self, s: Complex64, load: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
        if !(s.re > 0.0) || !s.im.is_finite() {
            return Err(Error::invalid(format!("Laplace node must satisfy Re(s) > 0, got {s}")));
        }
        if let Some(l) = load {
            Error::check_len(self.ops.n_dofs, l.len())?;
        }
        let s2 = s * s;
        let k = self.ops.mass.zip_map(&self.ops.stiffness, |m, a| s2 * m + a)?;
        let factor = LdlFactor::factor(self.symbolic.clone(), &k)
            .map_err(|e| Error::NumericalFailure(format!("factorization of s²M + A at s = {s}: {e}")))?;
        let mut rhs: Vec<Complex64> =
            self.mass_u0.iter().zip(&self.mass_u1).map(|(&mu0, &mu1)| s * mu0 + mu1).collect();
        if let Some(l) = load {
            for (r, &f) in rhs.iter_mut().zip(l) {
                *r += f;
            }
        }
        factor.solve_in_place(&mut rhs);
        Ok(rhs)
    }

    /// Real-arithmetic solve at a real node `s > 0`.
    pub fn solve_real(&self, s: f64) -> Result<Vec<f64>> {
        if !(s > 0.0) {
            return Err(Error::invalid(format!("Laplace node must be positive, got {s}")));
        }
        self.forcing.temporal.check_abscissa(s)?;
        let s2 = s * s;
        let k = self.ops.mass.zip_map(&self.ops.stiffness, |m, a| s2 * m + a)?;
        let factor = LdlFactor::factor(self.symbolic.clone(), &k)
            .map_err(|e| Error::NumericalFailure(format!("factorization of s²M + A at s = {s}: {e}")))?;
        let mut rhs: Vec<f64> = self.mass_u0.iter().zip(&self.mass_u1).map(|(&mu0, &mu1)| s * mu0 + mu1).collect();
        if let Some(l) = self.forcing.laplace_load(Complex64::new(s, 0.0)) {
            for (r, f) in rhs.iter_mut().zip(l) {
                *r += f.re;
            }
        }
        factor.solve_in_place(&mut rhs);
        Ok(rhs)
    }

    /// `Re{û_h(s_j)}` for a solved column `j < M/2`.
    pub fn snapshot_column(&self, rule: &QuadratureRule, j: usize) -> Result<Vec<f64>> {
        let s = rule.node(j).ok_or_else(|| Error::invalid(format!("column {j} has no Laplace node")))?;
        let wrap = |e: Error| Error::NodeFailure { index: j + 1, source: Box::new(e) };
        if s.im == 0.0 {
            self.solve_real(s.re).map_err(wrap)
        } else {
            Ok(self.solve(s).map_err(wrap)?.into_iter().map(|z| z.re).collect())
        }
    }
}

/// One-shot solve of a single Laplace-domain problem.
pub fn solve_laplace(
    ops: &OperatorSet,
    s: Complex64,
    f_hat: Option<&[Complex64]>,
    u0h: &[f64],
    u1h: &[f64],
) -> Result<Vec<Complex64>> {
    let none = Forcing::zero();
    LaplaceSolver::new(ops, u0h, u1h, &none)?.solve_with_load(s, f_hat)
}

/// Weighted real snapshots `S = (Re{û_h(s_1)}, …, Re{û_h(s_{M−1})}, u₀)`.
#[derive(Clone, Debug)]
pub struct SnapshotSet {
    /// `N_h × M`
    pub columns: DenseMatrix,
    pub weights: Vec<f64>,
    pub rule: QuadratureRule,
    /// Number of linear systems solved to build the set.
    pub n_solves: usize,
}

impl SnapshotSet {
    /// Fills the full snapshot matrix from the `M/2` solved columns, mirroring
    /// conjugate nodes and putting `u₀` in the last column.
    pub fn from_solved(rule: QuadratureRule, solved: Vec<Vec<f64>>, u0h: &[f64]) -> Result<Self> {
        let m = rule.m;
        Error::check_len(m / 2, solved.len())?;
        let n = u0h.len();
        let mut columns = DenseMatrix::zeros(n, m);
        for (j, col) in solved.iter().enumerate() {
            Error::check_len(n, col.len())?;
            columns.column_mut(j).copy_from_slice(col);
        }
        for j in m / 2..m - 1 {
            let mirror = m - 2 - j;
            let src = solved[mirror].as_slice();
            columns.column_mut(j).copy_from_slice(src);
        }
        columns.column_mut(m - 1).copy_from_slice(u0h);
        let weights = rule.weights.clone();
        Ok(Self { columns, weights, rule, n_solves: solved.len() })
    }

    pub fn n_dofs(&self) -> usize {
        self.columns.nrows()
    }

    pub fn len(&self) -> usize {
        self.columns.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.ncols() == 0 || self.columns.nrows() == 0
    }
}

/// Serial snapshot computation: `M/2` solves, conjugate columns mirrored.
pub fn compute_snapshots(
    ops: &OperatorSet,
    rule: &QuadratureRule,
    u0h: &[f64],
    u1h: &[f64],
    forcing: &Forcing,
) -> Result<SnapshotSet> {
    let solver = LaplaceSolver::new(ops, u0h, u1h, forcing)?;
    let solved = rule.effective_columns().map(|j| solver.snapshot_column(rule, j)).collect::<Result<Vec<_>>>()?;
    SnapshotSet::from_solved(rule.clone(), solved, u0h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn four_node_rule() {
        let r = make_quadrature(5.0, 1.0, 4).unwrap();
        assert_eq!(r.nodes.len(), 3);
        assert!((r.nodes[0] - Complex64::new(5.0, 1.0)).norm() < 1e-15);
        assert!((r.weights[0] - PI / 2.0).abs() < 1e-15);
        assert_eq!(r.nodes[1], Complex64::new(5.0, 0.0));
        assert!((r.weights[1] - PI / 4.0).abs() < 1e-15);
        assert_eq!(r.nodes[2], r.nodes[0].conj());
        assert!((r.weights[3] - PI / 4.0).abs() < 1e-15);
        assert!(r.replaced_last);
        assert_eq!(r.effective_columns(), 0..2);
        assert_eq!(r.node(3), None);
    }

    #[test]
    fn odd_or_tiny_node_counts_are_rejected() {
        assert!(make_quadrature(5.0, 1.0, 5).is_err());
        assert!(make_quadrature(5.0, 1.0, 0).is_err());
        assert!(make_quadrature(0.0, 1.0, 4).is_err());
        assert!(make_quadrature(5.0, -1.0, 4).is_err());
    }

    #[test]
    fn two_node_rule_has_one_real_node() {
        let r = make_quadrature(2.0, 3.0, 2).unwrap();
        assert_eq!(r.nodes, alloc::vec![Complex64::new(2.0, 0.0)]);
        assert!((r.weights[0] - PI * 3.0 / 2.0).abs() < 1e-15);
        assert!((r.weights[1] - PI / 6.0).abs() < 1e-15);
    }
}
