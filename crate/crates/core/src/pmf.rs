//! Exact rationals and finite probability mass functions.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in canonical form (positive denominator, reduced).
pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Renders as `"num/den"`, including `"1/1"` and `"0/1"`.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `"num/den"` or a bare integer back into a canonical rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::parameter("rational", text, "expected \"num/den\" with a nonzero denominator");
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let numer = BigInt::from_str(numer).map_err(|_| bad())?;
    let denom = BigInt::from_str(denom).map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(numer, denom))
}

/// Nearest double. Correctly handles numerators and denominators far beyond `f64` range.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Exact law of an integer-valued random variable with finite support.
///
/// Zero masses are never stored, so the key set is the support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscretePmf {
    mass: BTreeMap<i64, Rational>,
}

impl DiscretePmf {
    /// Validated constructor: masses must be nonnegative and sum to exactly one.
    pub fn new(masses: impl IntoIterator<Item = (i64, Rational)>) -> Result<Self> {
        let pmf = Self::from_masses(masses)?;
        let total = pmf.total();
        if !total.is_one() {
            return Err(Error::Verification(format!(
                "masses sum to {} instead of 1",
                format_rational(&total)
            )));
        }
        Ok(pmf)
    }

    /// Accumulates masses (repeated keys add up) without the normalization check.
    pub(crate) fn from_masses(masses: impl IntoIterator<Item = (i64, Rational)>) -> Result<Self> {
        let mut mass: BTreeMap<i64, Rational> = BTreeMap::new();
        for (k, p) in masses {
            if p.is_negative() {
                return Err(Error::Verification(format!(
                    "negative mass {} at {k}",
                    format_rational(&p)
                )));
            }
            if p.is_zero() {
                continue;
            }
            *mass.entry(k).or_insert_with(Rational::zero) += p;
        }
        Ok(Self { mass })
    }

    pub fn point_mass(at: i64) -> Self {
        Self {
            mass: BTreeMap::from([(at, Rational::one())]),
        }
    }

    pub fn mass(&self, k: i64) -> Rational {
        self.mass.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.mass.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> + '_ {
        self.mass.iter().map(|(k, p)| (*k, p))
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.mass.values().fold(Rational::zero(), |acc, p| acc + p)
    }

    /// `P{X <= x}`.
    pub fn cdf(&self, x: i64) -> Rational {
        self.mass
            .range(..=x)
            .fold(Rational::zero(), |acc, (_, p)| acc + p)
    }

    /// `E[f(X)]` for an exact integer-valued `f`.
    pub fn expect(&self, f: impl Fn(i64) -> BigInt) -> Rational {
        self.mass.iter().fold(Rational::zero(), |acc, (k, p)| {
            acc + p * Rational::from_integer(f(*k))
        })
    }

    /// Law of `X + offset`.
    pub fn shifted(&self, offset: i64) -> Self {
        Self {
            mass: self.mass.iter().map(|(k, p)| (k + offset, p.clone())).collect(),
        }
    }

    /// Law of `offset - X`.
    pub fn reflected(&self, offset: i64) -> Self {
        Self {
            mass: self.mass.iter().map(|(k, p)| (offset - k, p.clone())).collect(),
        }
    }

    pub fn mean(&self) -> Rational {
        self.expect(BigInt::from)
    }

    /// Masses converted to doubles, in support order.
    pub fn to_f64_masses(&self) -> Vec<(i64, f64)> {
        self.mass.iter().map(|(k, p)| (*k, to_f64(p))).collect()
    }
}

/// Exact joint law of `(W, T)`; keys are `(k, l)` with `k` the value of `W`
/// and `l` the value of `T`. Iteration is lexicographic in `(k, l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointPmf {
    mass: BTreeMap<(u32, u32), Rational>,
}

impl JointPmf {
    pub(crate) fn from_map(mass: BTreeMap<(u32, u32), Rational>) -> Self {
        Self {
            mass: mass.into_iter().filter(|(_, p)| !p.is_zero()).collect(),
        }
    }

    pub fn mass(&self, k: u32, l: u32) -> Rational {
        self.mass.get(&(k, l)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), &Rational)> + '_ {
        self.mass.iter().map(|(key, p)| (*key, p))
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.mass.values().fold(Rational::zero(), |acc, p| acc + p)
    }

    /// Law of `W` (summing over `l`).
    pub fn marginal_w(&self) -> DiscretePmf {
        DiscretePmf::from_masses(self.mass.iter().map(|((k, _), p)| (i64::from(*k), p.clone())))
            .expect("joint masses are nonnegative")
    }

    /// Law of `T` (summing over `k`).
    pub fn marginal_t(&self) -> DiscretePmf {
        DiscretePmf::from_masses(self.mass.iter().map(|((_, l), p)| (i64::from(*l), p.clone())))
            .expect("joint masses are nonnegative")
    }

    /// `P{W <= k and T <= l}` by direct summation.
    pub fn cdf(&self, k: u32, l: u32) -> Rational {
        self.mass
            .iter()
            .filter(|((kk, ll), _)| *kk <= k && *ll <= l)
            .fold(Rational::zero(), |acc, (_, p)| acc + p)
    }
}
