//! Truncated multivariate power series and the closed-form generating function
//! `F(z, y, u, w) = sum C(m1 + m2, m1) E[u^T w^W] z^m1 y^m2` over `m1 >= m2 >= 0`.
//!
//! Series live in the variables `(z, y, u, w)` and are truncated to a box of
//! per-variable maximum degrees. Arithmetic is exact inside the box.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::deck::DeckComposition;
use crate::error::{Error, Result};
use crate::exact::binomial;
use crate::pmf::{JointPmf, Rational};

/// Default budget for the number of coefficient slots in a truncation box.
pub const DEFAULT_COEFFICIENT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Z = 0,
    Y = 1,
    U = 2,
    W = 3,
}

pub type Exponents = [u32; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries {
    order: Exponents,
    coeffs: HashMap<Exponents, Rational>,
}

impl FormalSeries {
    pub fn zero(order: Exponents) -> Self {
        Self {
            order,
            coeffs: HashMap::new(),
        }
    }

    pub fn constant(order: Exponents, value: Rational) -> Self {
        Self::monomial(order, [0; 4], value)
    }

    pub fn one(order: Exponents) -> Self {
        Self::constant(order, Rational::one())
    }

    /// A single term; dropped when it lies outside the box.
    pub fn monomial(order: Exponents, exps: Exponents, coeff: Rational) -> Self {
        let mut series = Self::zero(order);
        series.add_term(exps, coeff);
        series
    }

    pub fn var(order: Exponents, var: Var) -> Self {
        let mut exps = [0; 4];
        exps[var as usize] = 1;
        Self::monomial(order, exps, Rational::one())
    }

    /// Builds from `(exponents, coefficient)` pairs; out-of-box terms are dropped.
    pub fn from_terms(order: Exponents, terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Self {
        let mut series = Self::zero(order);
        for (exps, coeff) in terms {
            series.add_term(exps, coeff);
        }
        series
    }

    pub fn order(&self) -> Exponents {
        self.order
    }

    fn in_box(&self, exps: &Exponents) -> bool {
        exps.iter().zip(self.order.iter()).all(|(e, o)| e <= o)
    }

    fn add_term(&mut self, exps: Exponents, coeff: Rational) {
        if coeff.is_zero() || !self.in_box(&exps) {
            return;
        }
        let entry = self.coeffs.entry(exps).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(&exps);
        }
    }

    pub fn coefficient(&self, exps: Exponents) -> Rational {
        self.coeffs.get(&exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> + '_ {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.order, other.order, "series truncated to different boxes");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut sum = self.clone();
        for (exps, c) in &other.coeffs {
            sum.add_term(*exps, c.clone());
        }
        sum
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::from_terms(self.order, self.coeffs.iter().map(|(e, c)| (*e, c * factor)))
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut product = Self::zero(self.order);
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let exps = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                if product.in_box(&exps) {
                    product.add_term(exps, ca * cb);
                }
            }
        }
        product
    }

    /// `1 / (1 - self)` as the geometric series `sum self^j`.
    ///
    /// Needs a zero constant term; the powers then eventually leave the box.
    pub fn one_minus_inverse(&self) -> Result<Self> {
        if !self.coefficient([0; 4]).is_zero() {
            return Err(Error::domain(
                "one_minus_inverse",
                "the series must have zero constant term",
            ));
        }
        let mut sum = Self::one(self.order);
        let mut power = Self::one(self.order);
        loop {
            power = power.mul(self);
            if power.is_zero() {
                return Ok(sum);
            }
            sum = sum.add(&power);
        }
    }

    /// Substitutes `z -> z * y` in a series that only involves `z`.
    pub fn substitute_zy(&self, order: Exponents) -> Self {
        debug_assert!(self.coeffs.keys().all(|e| e[1] == 0 && e[2] == 0 && e[3] == 0));
        Self::from_terms(order, self.coeffs.iter().map(|(e, c)| ([e[0], e[0], 0, 0], c.clone())))
    }

    /// Divides by `z` in a series whose `z`-free part vanishes.
    pub fn divide_by_z(&self) -> Result<Self> {
        if self.coeffs.keys().any(|e| e[0] == 0) {
            return Err(Error::domain("divide_by_z", "the series has terms free of z"));
        }
        Ok(Self::from_terms(
            self.order,
            self.coeffs.iter().map(|(e, c)| ([e[0] - 1, e[1], e[2], e[3]], c.clone())),
        ))
    }
}

fn univariate_order(order: u32) -> Exponents {
    [order, 0, 0, 0]
}

/// The shifted Catalan series `P(q) = sum_{n>=1} C_{n-1} q^n` (in the variable `z`),
/// computed by iterating the fixed point `P = q / (1 - P)`.
pub fn catalan_series(order: u32) -> FormalSeries {
    let box_ = univariate_order(order);
    let q = FormalSeries::var(box_, Var::Z);
    let mut p = FormalSeries::zero(box_);
    for _ in 0..order {
        p = q.mul(&p.one_minus_inverse().expect("P has zero constant term"));
    }
    p
}

/// The kernel root `lambda(z, 1) = (1 - sqrt(1 - 4z)) / (2z)` built as `1 / (1 - P(z))`.
pub fn kernel_root_series(order: u32) -> FormalSeries {
    catalan_series(order)
        .one_minus_inverse()
        .expect("P has zero constant term")
}

/// The same root built as `P(z) / z`, one order lower because of the division.
pub fn kernel_root_series_by_division(order: u32) -> FormalSeries {
    let p = catalan_series(order + 1).divide_by_z().expect("P starts at z^1");
    FormalSeries::from_terms(univariate_order(order), p.terms().map(|(e, c)| (*e, c.clone())))
}

/// Coefficient bookkeeping for [`series_fhat`].
#[derive(Debug, Clone)]
pub struct FhatSeries {
    max_m1: u32,
    series: FormalSeries,
}

impl FhatSeries {
    pub fn max_m1(&self) -> u32 {
        self.max_m1
    }

    pub fn series(&self) -> &FormalSeries {
        &self.series
    }

    /// `[z^m1 y^m2 u^l w^k]`. Only meaningful for `m2 <= m1`; above the
    /// diagonal the expansion carries terms that are not probabilities.
    pub fn coefficient(&self, m1: u32, m2: u32, l: u32, k: u32) -> Rational {
        self.series.coefficient([m1, m2, l, k])
    }

    /// Reads the `(W, T)` law of a deck with `m1 <= max_m1`.
    pub fn joint_wt(&self, deck: &DeckComposition) -> Result<JointPmf> {
        if deck.m1() > self.max_m1 {
            return Err(Error::domain(
                "FhatSeries::joint_wt",
                format!("deck {deck} lies beyond the truncation order {}", self.max_m1),
            ));
        }
        let denom = Rational::from_integer(binomial(deck.total().into(), deck.m1().into()));
        let mass = (0..=deck.m2())
            .flat_map(|k| (0..=deck.m1()).map(move |l| (k, l)))
            .map(|(k, l)| ((k, l), self.coefficient(deck.m1(), deck.m2(), l, k) / &denom))
            .collect();
        Ok(JointPmf::from_map(mass))
    }
}

/// Expands
/// `(1-z)/((1-y-z)(1-uz)) - y/(1-y-z) + uzy(2w(1-y)-1) / ((1-y-z)(1-2wP(zy))(1-uP(zy)))`
/// through `z`, `y`, `u` and `w` degree `max_m1`.
///
/// Refuses boxes with more than `budget` coefficient slots.
pub fn series_fhat(max_m1: u32, budget: u64) -> Result<FhatSeries> {
    if max_m1 == 0 {
        return Err(Error::parameter("max_m1", max_m1, "must be at least 1"));
    }
    let slots = u64::from(max_m1 + 1).pow(4);
    if slots > budget {
        return Err(Error::CapExceeded {
            what: "series coefficient count",
            requested: slots,
            cap: budget,
        });
    }
    let n = max_m1;
    let order = [n, n, n, n];
    let int = |v: i64| Rational::from_integer(BigInt::from(v));
    let z = FormalSeries::var(order, Var::Z);
    let y = FormalSeries::var(order, Var::Y);
    let u = FormalSeries::var(order, Var::U);
    let w = FormalSeries::var(order, Var::W);
    let one = FormalSeries::one(order);

    let catalan = catalan_series(n).substitute_zy(order);
    let inv_yz = y.add(&z).one_minus_inverse()?;
    let inv_uz = u.mul(&z).one_minus_inverse()?;
    let inv_w = w.scale(&int(2)).mul(&catalan).one_minus_inverse()?;
    let inv_u = u.mul(&catalan).one_minus_inverse()?;

    let first = one.sub(&z).mul(&inv_yz).mul(&inv_uz);
    let second = y.mul(&inv_yz);
    // u z y (2w(1 - y) - 1)
    let numerator = u
        .mul(&z)
        .mul(&y)
        .mul(&w.scale(&int(2)).mul(&one.sub(&y)).sub(&one));
    let third = numerator.mul(&inv_w.mul(&inv_u)).mul(&inv_yz);

    Ok(FhatSeries {
        max_m1,
        series: first.sub(&second).add(&third),
    })
}
