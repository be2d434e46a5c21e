//! Largest eigenvalue of the pencil `(A_h, M_h)` and the sampling parameter
//! it determines.

use alloc::format;
use alloc::vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem::OperatorSet;
use crate::linalg::{norm2, LdlFactor, Ordering};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 5000;

/// Outcome of [`max_generalized_eigenvalue`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerIteration {
    pub lambda_max: f64,
    pub iterations: usize,
    /// False when `max_iter` ran out; `lambda_max` is then the last estimate.
    pub converged: bool,
}

/// Power iteration on `M_h⁻¹ A_h` with Rayleigh-quotient estimates.
///
/// Starts from the normalized all-ones vector and stops once two successive
/// estimates differ by at most `tol · λ`.
pub fn max_generalized_eigenvalue(ops: &OperatorSet, tol: f64, max_iter: usize) -> Result<PowerIteration> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    let n = ops.n_dofs;
    if n == 0 {
        return Err(Error::invalid("operator set has no degrees of freedom"));
    }
    let mass = LdlFactor::new(&ops.mass, Ordering::NestedDissection)?;
    let mut x = vec![1.0 / libm::sqrt(n as f64); n];
    let mut ax = vec![0.0; n];
    let mut mx = vec![0.0; n];
    let mut lambda = f64::NAN;
    for it in 1..=max_iter {
        ops.stiffness.mul_vec_into(&x, &mut ax);
        ops.mass.mul_vec_into(&x, &mut mx);
        let num: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        let den: f64 = x.iter().zip(&mx).map(|(a, b)| a * b).sum();
        let next = num / den;
        if !next.is_finite() {
            return Err(Error::NumericalFailure("Rayleigh quotient is not finite".into()));
        }
        if libm::fabs(next - lambda) <= tol * libm::fabs(next) {
            return Ok(PowerIteration { lambda_max: next, iterations: it, converged: true });
        }
        lambda = next;
        // x ← M⁻¹ A x / ‖·‖
        mass.solve_in_place(&mut ax);
        let nrm = norm2(&ax);
        if nrm == 0.0 {
            return Err(Error::NumericalFailure("power iteration collapsed to zero".into()));
        }
        for (xi, yi) in x.iter_mut().zip(&ax) {
            *xi = yi / nrm;
        }
    }
    Ok(PowerIteration { lambda_max: lambda, iterations: max_iter, converged: false })
}

/// Optimal sampling circle for a Laplace abscissa `alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaSelection {
    pub alpha: f64,
    pub lambda_max: f64,
    /// `√(α² + λ_max)`
    pub beta_opt: f64,
    /// Predicted convergence factor, always `> 1`.
    pub eta: f64,
}

/// `β_opt = √(α² + λ_max)` and
/// `η = |(i√λ_max − α − β_opt) / (i√λ_max − α + β_opt)|`.
pub fn optimal_beta(alpha: f64, lambda_max: f64) -> Result<BetaSelection> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::invalid(format!("lambda_max must be positive, got {lambda_max}")));
    }
    let beta_opt = libm::sqrt(alpha * alpha + lambda_max);
    // the singularity √(−λ_max) is purely imaginary
    let sing = Complex64::new(0.0, libm::sqrt(lambda_max));
    let eta = ((sing - alpha - beta_opt) / (sing - alpha + beta_opt)).norm();
    Ok(BetaSelection { alpha, lambda_max, beta_opt, eta })
}
