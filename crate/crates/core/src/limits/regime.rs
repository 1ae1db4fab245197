use std::fmt;

use crate::deck::DeckComposition;
use crate::error::{Error, Result};

/// Largest accepted gap `|m2/m1 - rho|` for decks used with a ratio regime.
pub const RATIO_TOLERANCE: f64 = 0.1;

/// Largest accepted relative gap `|d - alpha sqrt(m1)| / (alpha sqrt(m1))`, with one card of slack.
pub const ALPHA_TOLERANCE: f64 = 0.1;

/// An asymptotic growth class of `m2` relative to `m1`, named by the caller.
///
/// A single finite deck cannot tell these classes apart, so the regime is
/// never inferred; [`RegimeIndicators`] only reports the relevant ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeSpec {
    /// `m2 >= 1` fixed: `T / m1 -> Beta(1, m2)`.
    TFixedM2 { m2: u32 },
    /// `m2 -> inf`, `m2 = o(m1)`: `m2 T / m1 -> Exp(1)`.
    TSublinear,
    /// `m2 ~ rho m1`, `0 < rho <= 1`: `T` converges to a mixture of two geometric laws.
    TLinear { rho: f64 },
    /// `m2 = o(m1)`: `W -> 0`.
    WSublinear,
    /// `m2 ~ rho m1`, `0 < rho < 1`: `W` converges to `Geom((1-rho)/(1+rho)) - 1`.
    WLinear { rho: f64 },
    /// `sqrt(m1) << d << m1`: `d W / m1 -> Exp(1/2)`.
    WNearDiagonalLargeD,
    /// `d ~ alpha sqrt(m1)`: `W / sqrt(m1) -> LinExp(alpha/2, 1/2)`.
    WNearDiagonalAlpha { alpha: f64 },
    /// `d = o(sqrt(m1))`: `W / sqrt(m1) -> Rayleigh(sqrt 2)`.
    WNearDiagonalSmallD,
    /// `m2 ~ rho m1`, `0 < rho < 1`: `(W, T)` converges jointly to a dependent pair.
    JointCentral { rho: f64 },
}

/// Which counter a regime describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Counter {
    W,
    T,
    Both,
}

impl RegimeSpec {
    /// Parameter checks: `rho` in `(0, 1]` (or `(0, 1)`), `alpha > 0`, `m2 >= 1`.
    pub fn validate(&self) -> Result<()> {
        match *self {
            RegimeSpec::TFixedM2 { m2 } if m2 == 0 => {
                Err(Error::parameter("m2", m2, "the fixed-m2 regime needs m2 >= 1"))
            }
            RegimeSpec::TLinear { rho } if !(rho > 0.0 && rho <= 1.0) => {
                Err(Error::parameter("rho", rho, "must lie in (0, 1]"))
            }
            RegimeSpec::WLinear { rho } | RegimeSpec::JointCentral { rho } if !(rho > 0.0 && rho < 1.0) => {
                Err(Error::parameter("rho", rho, "must lie in (0, 1)"))
            }
            RegimeSpec::WNearDiagonalAlpha { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(Error::parameter("alpha", alpha, "must be positive and finite"))
            }
            _ => Ok(()),
        }
    }

    pub fn counter(&self) -> Counter {
        match self {
            RegimeSpec::TFixedM2 { .. } | RegimeSpec::TSublinear | RegimeSpec::TLinear { .. } => Counter::T,
            RegimeSpec::JointCentral { .. } => Counter::Both,
            _ => Counter::W,
        }
    }

    /// Multiplier applied to the counter before comparing with the limit.
    pub fn scale(&self, deck: &DeckComposition) -> f64 {
        let m1 = f64::from(deck.m1());
        match self {
            RegimeSpec::TFixedM2 { .. } => 1.0 / m1,
            RegimeSpec::TSublinear => f64::from(deck.m2()) / m1,
            RegimeSpec::WNearDiagonalLargeD => f64::from(deck.difference()) / m1,
            RegimeSpec::WNearDiagonalAlpha { .. } | RegimeSpec::WNearDiagonalSmallD => 1.0 / m1.sqrt(),
            RegimeSpec::TLinear { .. }
            | RegimeSpec::WSublinear
            | RegimeSpec::WLinear { .. }
            | RegimeSpec::JointCentral { .. } => 1.0,
        }
    }

    /// Rejects decks for which the regime's scaling is degenerate or whose
    /// shape is far from the named growth class.
    pub fn check_deck(&self, deck: &DeckComposition) -> Result<()> {
        self.validate()?;
        let reject = |reason: String| Err(Error::domain("regime/deck consistency", format!("{self} with deck {deck}: {reason}")));
        let (m1, m2, d) = (deck.m1(), deck.m2(), deck.difference());
        if m1 == 0 {
            return reject("the deck is empty".into());
        }
        let ratio = f64::from(m2) / f64::from(m1);
        let check_ratio = |rho: f64| {
            if (ratio - rho).abs() > RATIO_TOLERANCE {
                reject(format!("m2/m1 = {ratio:.4} is farther than {RATIO_TOLERANCE} from rho"))
            } else {
                Ok(())
            }
        };
        match *self {
            RegimeSpec::TFixedM2 { m2: fixed } if fixed != m2 => reject(format!("the regime fixes m2 = {fixed}")),
            RegimeSpec::TSublinear if m2 == 0 || d == 0 => reject("needs 1 <= m2 < m1".into()),
            RegimeSpec::WSublinear if m2 > 0 && d == 0 => reject("needs m2 < m1".into()),
            RegimeSpec::TLinear { rho } => {
                if m2 == 0 {
                    return reject("needs m2 >= 1".into());
                }
                check_ratio(rho)
            }
            RegimeSpec::WLinear { rho } | RegimeSpec::JointCentral { rho } => {
                if m2 == 0 || d == 0 {
                    return reject("needs 1 <= m2 < m1".into());
                }
                check_ratio(rho)
            }
            RegimeSpec::WNearDiagonalLargeD if d == 0 || m2 == 0 => reject("needs 1 <= m2 < m1".into()),
            RegimeSpec::WNearDiagonalAlpha { alpha } => {
                let target = alpha * f64::from(m1).sqrt();
                if m2 == 0 || (f64::from(d) - target).abs() > ALPHA_TOLERANCE * target + 1.0 {
                    reject(format!("d = {d} is not close to alpha sqrt(m1) = {target:.3}"))
                } else {
                    Ok(())
                }
            }
            RegimeSpec::WNearDiagonalSmallD if m2 == 0 || f64::from(d) > f64::from(m1).sqrt() => {
                reject("needs m2 >= 1 and d <= sqrt(m1)".into())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for RegimeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeSpec::TFixedM2 { m2 } => write!(f, "T-fixed-m2(m2={m2})"),
            RegimeSpec::TSublinear => write!(f, "T-sublinear"),
            RegimeSpec::TLinear { rho } => write!(f, "T-linear(rho={rho})"),
            RegimeSpec::WSublinear => write!(f, "W-sublinear"),
            RegimeSpec::WLinear { rho } => write!(f, "W-linear(rho={rho})"),
            RegimeSpec::WNearDiagonalLargeD => write!(f, "W-near-diagonal-large-d"),
            RegimeSpec::WNearDiagonalAlpha { alpha } => write!(f, "W-near-diagonal-alpha(alpha={alpha})"),
            RegimeSpec::WNearDiagonalSmallD => write!(f, "W-near-diagonal-small-d"),
            RegimeSpec::JointCentral { rho } => write!(f, "joint-central(rho={rho})"),
        }
    }
}

/// Shape ratios that help a caller choose a regime for a concrete deck.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeIndicators {
    /// `m2 / m1`.
    pub ratio: f64,
    /// `d / sqrt(m1)`.
    pub difference_over_sqrt: f64,
    /// `d / m1`.
    pub difference_over_m1: f64,
}

pub fn regime_indicators(deck: &DeckComposition) -> Result<RegimeIndicators> {
    if deck.m1() == 0 {
        return Err(Error::domain("regime_indicators", "the deck is empty"));
    }
    let m1 = f64::from(deck.m1());
    let d = f64::from(deck.difference());
    Ok(RegimeIndicators {
        ratio: f64::from(deck.m2()) / m1,
        difference_over_sqrt: d / m1.sqrt(),
        difference_over_m1: d / m1,
    })
}
