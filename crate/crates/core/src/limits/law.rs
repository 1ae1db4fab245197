use std::fmt;

use crate::error::{Error, Result};
use crate::limits::regime::RegimeSpec;

/// A one-dimensional limit distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitLaw {
    /// Point mass at zero.
    Degenerate,
    /// `Beta(1, b)`: `F(x) = 1 - (1 - x)^b` on `[0, 1]`.
    Beta1 { b: u32 },
    /// Exponential with the given rate: `F(x) = 1 - exp(-rate x)`.
    Exponential { rate: f64 },
    /// Linear-exponential law `F(x) = 1 - exp(-(lambda x + nu x^2 / 2))`;
    /// `lambda = 0` gives a Rayleigh law.
    LinearExponential { lambda: f64, nu: f64 },
    /// `P{Y = l} = (rho + rho^l) / (1 + rho)^(l + 1)` for `l >= 1`.
    GeometricMixture { rho: f64 },
    /// `P{X = k} = ((1 - rho) / (1 + rho)) (2 rho / (1 + rho))^k` for `k >= 0`.
    ShiftedGeometric { rho: f64 },
}

impl LimitLaw {
    pub fn is_discrete(&self) -> bool {
        matches!(
            self,
            LimitLaw::Degenerate | LimitLaw::GeometricMixture { .. } | LimitLaw::ShiftedGeometric { .. }
        )
    }

    /// `P{X <= x}`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match *self {
            LimitLaw::Degenerate => f64::from(u8::from(x >= 0.0)),
            LimitLaw::Beta1 { b } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    -(f64::from(b) * (-x).ln_1p()).exp_m1()
                }
            }
            LimitLaw::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            LimitLaw::LinearExponential { lambda, nu } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-(lambda * x + nu * x * x / 2.0)).exp_m1()
                }
            }
            LimitLaw::GeometricMixture { rho } => {
                if x < 1.0 {
                    return 0.0;
                }
                let n = x.floor();
                let a = 1.0 / (1.0 + rho);
                let b = rho / (1.0 + rho);
                a * (1.0 - a.powf(n)) + b * (1.0 - b.powf(n))
            }
            LimitLaw::ShiftedGeometric { rho } => {
                if x < 0.0 {
                    return 0.0;
                }
                1.0 - (2.0 * rho / (1.0 + rho)).powf(x.floor() + 1.0)
            }
        }
    }

    /// `P{X < x}`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        if !self.is_discrete() {
            return self.cdf(x);
        }
        let below = if x == x.floor() { x - 1.0 } else { x.floor() };
        self.cdf(below)
    }

    /// `P{X = k}` for the discrete laws; `None` for the continuous ones.
    pub fn pmf(&self, k: i64) -> Option<f64> {
        let value = match *self {
            LimitLaw::Degenerate => f64::from(u8::from(k == 0)),
            LimitLaw::GeometricMixture { rho } => {
                if k < 1 {
                    0.0
                } else {
                    (rho + rho.powi(k as i32)) / (1.0 + rho).powi(k as i32 + 1)
                }
            }
            LimitLaw::ShiftedGeometric { rho } => {
                if k < 0 {
                    0.0
                } else {
                    (1.0 - rho) / (1.0 + rho) * (2.0 * rho / (1.0 + rho)).powi(k as i32)
                }
            }
            _ => return None,
        };
        Some(value)
    }

    /// Density for the continuous laws; `None` for the discrete ones.
    pub fn density(&self, x: f64) -> Option<f64> {
        let value = match *self {
            LimitLaw::Beta1 { b } => {
                if (0.0..1.0).contains(&x) {
                    f64::from(b) * (1.0 - x).powi(b as i32 - 1)
                } else {
                    0.0
                }
            }
            LimitLaw::Exponential { rate } => {
                if x >= 0.0 {
                    rate * (-rate * x).exp()
                } else {
                    0.0
                }
            }
            LimitLaw::LinearExponential { lambda, nu } => {
                if x >= 0.0 {
                    (lambda + nu * x) * (-(lambda * x + nu * x * x / 2.0)).exp()
                } else {
                    0.0
                }
            }
            _ => return None,
        };
        Some(value)
    }

    pub fn mean(&self) -> f64 {
        match *self {
            LimitLaw::Degenerate => 0.0,
            LimitLaw::Beta1 { b } => 1.0 / (1.0 + f64::from(b)),
            LimitLaw::Exponential { rate } => 1.0 / rate,
            LimitLaw::LinearExponential { lambda, nu } => {
                // E X = int_0^inf exp(-(lambda x + nu x^2 / 2)) dx
                //     = sqrt(pi / (2 nu)) exp(lambda^2 / (2 nu)) erfc(lambda / sqrt(2 nu)).
                let s = (2.0 * nu).sqrt();
                (std::f64::consts::PI / (2.0 * nu)).sqrt()
                    * (lambda * lambda / (2.0 * nu)).exp()
                    * statrs::function::erf::erfc(lambda / s)
            }
            LimitLaw::GeometricMixture { rho } => (rho * rho + 1.0) / rho,
            LimitLaw::ShiftedGeometric { rho } => 2.0 * rho / (1.0 - rho),
        }
    }

    /// Inverts the cumulative hazard of a linear-exponential law:
    /// maps an `Exp(1)` variate `z` to `(-lambda + sqrt(lambda^2 + 2 nu z)) / nu`.
    pub fn linexp_from_exponential(lambda: f64, nu: f64, z: f64) -> f64 {
        // Rationalized form avoids cancellation when lambda^2 >> nu z.
        2.0 * z / (lambda + (lambda * lambda + 2.0 * nu * z).sqrt())
    }
}

impl fmt::Display for LimitLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitLaw::Degenerate => write!(f, "Degenerate(0)"),
            LimitLaw::Beta1 { b } => write!(f, "Beta(1, {b})"),
            LimitLaw::Exponential { rate } => write!(f, "Exp({rate})"),
            LimitLaw::LinearExponential { lambda, nu } if *lambda == 0.0 => {
                write!(f, "Rayleigh(sigma = {})", (1.0 / nu).sqrt())
            }
            LimitLaw::LinearExponential { lambda, nu } => write!(f, "LinExp({lambda}, {nu})"),
            LimitLaw::GeometricMixture { rho } => write!(f, "GeometricMixture(rho = {rho})"),
            LimitLaw::ShiftedGeometric { rho } => write!(f, "Geom({}) - 1", (1.0 - rho) / (1.0 + rho)),
        }
    }
}

/// The limit of the scaled counter in a one-dimensional regime.
///
/// The joint central regime has a bivariate limit; use
/// [`crate::limits::JointLimitLaw`] for it.
pub fn limit_law(regime: &RegimeSpec) -> Result<LimitLaw> {
    regime.validate()?;
    Ok(match *regime {
        RegimeSpec::TFixedM2 { m2 } => LimitLaw::Beta1 { b: m2 },
        RegimeSpec::TSublinear => LimitLaw::Exponential { rate: 1.0 },
        RegimeSpec::TLinear { rho } => LimitLaw::GeometricMixture { rho },
        RegimeSpec::WSublinear => LimitLaw::Degenerate,
        RegimeSpec::WLinear { rho } => LimitLaw::ShiftedGeometric { rho },
        RegimeSpec::WNearDiagonalLargeD => LimitLaw::Exponential { rate: 0.5 },
        RegimeSpec::WNearDiagonalAlpha { alpha } => LimitLaw::LinearExponential { lambda: alpha / 2.0, nu: 0.5 },
        RegimeSpec::WNearDiagonalSmallD => LimitLaw::LinearExponential { lambda: 0.0, nu: 0.5 },
        RegimeSpec::JointCentral { .. } => {
            return Err(Error::domain(
                "limit_law",
                "the joint central regime has a bivariate limit; use the joint limit law",
            ))
        }
    })
}
