//! Model parameters and small value types shared by every other module.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wraps an angle into the principal range (-π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Parameters of the distribution of `Z = Σ X_l·Y_l`.
///
/// `sigma_x` and `sigma_y` are standard deviations (so `E|X|² = sigma_x²`),
/// `mu_abs` and `epsilon` are the magnitude and phase of the (non-conjugated)
/// correlation `E[X·Y] / (sigma_x·sigma_y)`, and `big_l` is the number of
/// summed products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub mu_abs: f64,
    pub epsilon: f64,
    #[serde(rename = "L")]
    pub big_l: u32,
}

impl ModelParams {
    /// Builds and validates a parameter set. `epsilon` is wrapped into (-π, π].
    pub fn new(sigma_x: f64, sigma_y: f64, mu_abs: f64, epsilon: f64, big_l: u32) -> Result<Self> {
        validate(ModelParams {
            sigma_x,
            sigma_y,
            mu_abs,
            epsilon,
            big_l,
        })
    }

    /// The experiment used throughout the validation harness:
    /// σ_X = 0.7, σ_Y = 1.5, μ = 0.5·e^{jπ/6}.
    pub fn reference(big_l: u32) -> Self {
        ModelParams {
            sigma_x: 0.7,
            sigma_y: 1.5,
            mu_abs: 0.5,
            epsilon: PI / 6.0,
            big_l,
        }
    }

    pub fn with_l(self, big_l: u32) -> Self {
        ModelParams { big_l, ..self }
    }

    /// σ_X·σ_Y
    pub fn sigma_prod(&self) -> f64 {
        self.sigma_x * self.sigma_y
    }

    /// 1 − |μ|²
    pub fn one_minus_mu2(&self) -> f64 {
        1.0 - self.mu_abs * self.mu_abs
    }

    /// Radial rate `2 / (σ_Xσ_Y(1−|μ|²))`; the Bessel-K argument is this times r.
    pub fn radial_rate(&self) -> f64 {
        2.0 / (self.sigma_prod() * self.one_minus_mu2())
    }

    /// D(θ) = |μ|·cos(θ − ε).
    pub fn d_of_theta(&self, theta: f64) -> f64 {
        self.mu_abs * (theta - self.epsilon).cos()
    }

    /// The correlation coefficient μ as a complex number.
    pub fn mu(&self) -> ComplexValue {
        ComplexValue::new(
            self.mu_abs * self.epsilon.cos(),
            self.mu_abs * self.epsilon.sin(),
        )
    }
}

/// Checks every parameter invariant; returns the parameters with `epsilon`
/// normalized to (-π, π].
pub fn validate(params: ModelParams) -> Result<ModelParams> {
    let ModelParams {
        sigma_x,
        sigma_y,
        mu_abs,
        epsilon,
        big_l,
    } = params;
    if !(sigma_x.is_finite() && sigma_x > 0.0) {
        return Err(Error::domain(format!("sigma_x must be positive and finite, got {sigma_x}")));
    }
    if !(sigma_y.is_finite() && sigma_y > 0.0) {
        return Err(Error::domain(format!("sigma_y must be positive and finite, got {sigma_y}")));
    }
    if !(0.0..1.0).contains(&mu_abs) {
        return Err(Error::domain(format!("mu_abs must lie in [0, 1), got {mu_abs}")));
    }
    if !epsilon.is_finite() {
        return Err(Error::domain(format!("epsilon must be finite, got {epsilon}")));
    }
    if big_l < 1 {
        return Err(Error::domain("L must be at least 1"));
    }
    Ok(ModelParams {
        epsilon: wrap_angle(epsilon),
        ..params
    })
}

/// D = |μ|·cos(θ − ε).
pub fn d_of_theta(params: &ModelParams, theta: f64) -> f64 {
    params.d_of_theta(theta)
}

pub type ComplexValue = num_complex::Complex64;

/// A point in polar coordinates, `theta` in (-π, π].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) || !theta.is_finite() {
            return Err(Error::domain(format!("invalid polar point ({r}, {theta})")));
        }
        Ok(PolarPoint {
            r,
            theta: wrap_angle(theta),
        })
    }

    pub fn from_complex(z: ComplexValue) -> Self {
        PolarPoint {
            r: z.norm(),
            theta: z.im.atan2(z.re),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn accepts_reference_and_unit_cases() {
        let p = ModelParams::new(0.7, 1.5, 0.5, PI / 6.0, 5).unwrap();
        assert_eq!(p, ModelParams::reference(5));
        assert!(ModelParams::new(1.0, 1.0, 0.0, 0.0, 1).is_ok());
    }

    #[test]
    fn rejects_degenerate_correlation() {
        let err = ModelParams::new(1.0, 1.0, 1.0, 0.0, 1).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("mu_abs")));
        assert!(ModelParams::new(0.0, 1.0, 0.1, 0.0, 1).is_err());
        assert!(ModelParams::new(1.0, -1.0, 0.1, 0.0, 1).is_err());
        assert!(ModelParams::new(1.0, 1.0, -0.1, 0.0, 1).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.1, f64::NAN, 1).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.1, 0.0, 0).is_err());
    }

    #[test]
    fn epsilon_is_wrapped() {
        let p = ModelParams::new(1.0, 1.0, 0.2, 3.0 * PI, 1).unwrap();
        assert!((p.epsilon - PI).abs() < 1e-12);
        let p = ModelParams::new(1.0, 1.0, 0.2, -PI, 1).unwrap();
        assert!((p.epsilon - PI).abs() < 1e-12);
    }

    #[test]
    fn d_examples() {
        let p = ModelParams::reference(1);
        assert!((p.d_of_theta(PI / 6.0) - 0.5).abs() < 1e-15);
        assert!(p.d_of_theta(PI / 6.0 + PI / 2.0).abs() < 1e-15);
        let p0 = ModelParams::new(1.0, 1.0, 0.0, 1.0, 1).unwrap();
        assert_eq!(p0.d_of_theta(0.3), 0.0);
    }

    #[test]
    fn params_from_flat_toml() {
        let p: ModelParams =
            toml::from_str("sigma_x = 0.7\nsigma_y = 1.5\nmu_abs = 0.5\nepsilon = 0.5235987755982988\nL = 5\n")
                .unwrap();
        assert_eq!(validate(p).unwrap(), ModelParams::reference(5));
    }

    proptest! {
        #[test]
        fn d_bounded_and_even(mu in 0.0..0.999f64, eps in -3.1..3.1f64, th in -10.0..10.0f64, delta in -4.0..4.0f64) {
            let p = ModelParams::new(1.0, 1.0, mu, eps, 2).unwrap();
            prop_assert!(p.d_of_theta(th).abs() <= mu + 1e-15);
            let a = p.d_of_theta(p.epsilon + delta);
            let b = p.d_of_theta(p.epsilon - delta);
            prop_assert!((a - b).abs() < 1e-14);
        }

        #[test]
        fn validate_is_idempotent(sx in 0.01..10.0f64, sy in 0.01..10.0f64, mu in 0.0..0.999f64, eps in -20.0..20.0f64, l in 1u32..20) {
            let once = validate(ModelParams { sigma_x: sx, sigma_y: sy, mu_abs: mu, epsilon: eps, big_l: l }).unwrap();
            prop_assert_eq!(validate(once).unwrap(), once);
            prop_assert!(once.epsilon > -PI && once.epsilon <= PI);
        }
    }
}
