//! Separable source terms `f(x, t) = g(x) q(t)` with closed-form Laplace
//! transforms of `q`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Temporal factor `q(t)` from a fixed catalog.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum TemporalProfile {
    #[default]
    Zero,
    /// `e^{−a t}`, transform `1/(s + a)`.
    Exponential { rate: f64 },
    /// `sin(ω t)`, transform `ω/(s² + ω²)`.
    Sine { omega: f64 },
    /// `1`, transform `1/s`.
    Constant,
}

impl TemporalProfile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TemporalProfile::Zero => 0.0,
            TemporalProfile::Exponential { rate } => libm::exp(-rate * t),
            TemporalProfile::Sine { omega } => libm::sin(omega * t),
            TemporalProfile::Constant => 1.0,
        }
    }

    pub fn laplace(&self, s: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            TemporalProfile::Zero => Complex64::new(0.0, 0.0),
            TemporalProfile::Exponential { rate } => one / (s + rate),
            TemporalProfile::Sine { omega } => Complex64::new(omega, 0.0) / (s * s + omega * omega),
            TemporalProfile::Constant => one / s,
        }
    }

    /// Checks that the transform exists on `Re{s} = alpha`.
    pub fn check_abscissa(&self, alpha: f64) -> Result<()> {
        match *self {
            TemporalProfile::Exponential { rate } if !(alpha + rate > 0.0) => {
                Err(Error::invalid(format!("e^(-{rate} t) has no Laplace transform on Re(s) = {alpha}")))
            }
            _ => Ok(()),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            TemporalProfile::Exponential { rate } => rate.is_finite(),
            TemporalProfile::Sine { omega } => omega.is_finite(),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("non-finite forcing parameter in {self:?}")))
        }
    }
}

/// Source term as a spatial load vector times a temporal profile.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Forcing {
    /// `(g, φ_i)_{L²}` over interior dofs; empty means no forcing.
    pub profile: Vec<f64>,
    pub temporal: TemporalProfile,
}

impl Forcing {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(profile: Vec<f64>, temporal: TemporalProfile) -> Result<Self> {
        temporal.validate()?;
        if profile.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite forcing profile"));
        }
        Ok(Self { profile, temporal })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.temporal, TemporalProfile::Zero) || self.profile.iter().all(|&v| v == 0.0)
    }

    /// Writes `f_h(t)` into `out`.
    pub fn load_at(&self, t: f64, out: &mut [f64]) {
        if self.is_zero() {
            out.fill(0.0);
            return;
        }
        let q = self.temporal.value(t);
        for (o, &b) in out.iter_mut().zip(&self.profile) {
            *o = q * b;
        }
    }

    /// Laplace-transformed load `q̂(s) · b`, or `None` when there is no forcing.
    pub fn laplace_load(&self, s: Complex64) -> Option<Vec<Complex64>> {
        if self.is_zero() {
            return None;
        }
        let q = self.temporal.laplace(s);
        Some(self.profile.iter().map(|&b| q * b).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trapezoidal approximation of ∫₀^∞ e^{-st} q(t) dt for real s.
    fn numeric_transform(p: TemporalProfile, s: f64) -> f64 {
        let (t_end, n) = (40.0, 400_000);
        let dt = t_end / n as f64;
        let mut acc = 0.5 * p.value(0.0);
        for k in 1..n {
            let t = k as f64 * dt;
            acc += libm::exp(-s * t) * p.value(t);
        }
        acc * dt
    }

    #[test]
    fn catalog_transforms_match_quadrature() {
        let s = 2.0;
        for p in [
            TemporalProfile::Exponential { rate: 0.7 },
            TemporalProfile::Sine { omega: 3.0 },
            TemporalProfile::Constant,
        ] {
            let exact = p.laplace(Complex64::new(s, 0.0));
            assert!(exact.im.abs() < 1e-15);
            assert!((exact.re - numeric_transform(p, s)).abs() < 1e-6, "{p:?}");
        }
        assert_eq!(TemporalProfile::Zero.laplace(Complex64::new(1.0, 1.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn abscissa_check() {
        assert!(TemporalProfile::Exponential { rate: -6.0 }.check_abscissa(5.0).is_err());
        assert!(TemporalProfile::Exponential { rate: -4.0 }.check_abscissa(5.0).is_ok());
    }
}
