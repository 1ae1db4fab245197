//! Dynamic-programming oracle for the weighted generating polynomials
//! `Phi_{m1,m2}(u1, u2, w) = C(m1 + m2, m1) * E[u1^L u2^T w^W]`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::deck::DeckComposition;
use crate::exact::binomial;
use crate::pmf::{JointPmf, Rational};

/// Finite polynomial `sum coeff * u1^a * u2^l * w^k`, keyed by `(a, l, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TrivariatePolynomial {
    coefficients: BTreeMap<(u32, u32, u32), Rational>,
}

impl TrivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(a: u32, l: u32, k: u32, coeff: Rational) -> Self {
        let mut poly = Self::zero();
        poly.add_term((a, l, k), coeff);
        poly
    }

    fn add_term(&mut self, key: (u32, u32, u32), coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coefficients.entry(key).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coefficients.remove(&key);
        }
    }

    /// Multiplies by `factor * u1^da * u2^dl * w^dk`.
    pub fn shifted(&self, da: u32, dl: u32, dk: u32, factor: &Rational) -> Self {
        Self {
            coefficients: self
                .coefficients
                .iter()
                .map(|(&(a, l, k), c)| ((a + da, l + dl, k + dk), c * factor))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut sum = self.clone();
        for (&key, c) in &other.coefficients {
            sum.add_term(key, c.clone());
        }
        sum
    }

    pub fn coefficient(&self, a: u32, l: u32, k: u32) -> Rational {
        self.coefficients.get(&(a, l, k)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32, u32), &Rational)> + '_ {
        self.coefficients.iter().map(|(key, c)| (*key, c))
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Divides by `C(m1 + m2, m1)` and drops the `u1` exponent, giving the
    /// law of `(W, T)` read off as `(k, l)`.
    pub fn to_joint_wt(&self, deck: &DeckComposition) -> JointPmf {
        let denom = Rational::from_integer(binomial(deck.total().into(), deck.m1().into()));
        let mut mass: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
        for (&(_, l, k), c) in &self.coefficients {
            *mass.entry((k, l)).or_insert_with(Rational::zero) += c / &denom;
        }
        JointPmf::from_map(mass)
    }
}

/// All `Phi_{a,b}` with `b <= a`, `a <= max_m1`, `b <= max_m2`.
#[derive(Debug, Clone)]
pub struct PhiTable {
    max_m1: u32,
    max_m2: u32,
    cells: BTreeMap<(u32, u32), TrivariatePolynomial>,
}

impl PhiTable {
    /// Fills the table in increasing `a + b` from
    /// `Phi_{m,0} = u2^m`, `Phi_{m,m} = 2 w Phi_{m,m-1}` and
    /// `Phi_{a,b} = u1 Phi_{a-1,b} + Phi_{a,b-1}` for `a > b > 0`.
    pub fn build(max_m1: u32, max_m2: u32) -> Self {
        let max_m2 = max_m2.min(max_m1);
        let one = Rational::one();
        let two = Rational::from_integer(2.into());
        let mut cells: BTreeMap<(u32, u32), TrivariatePolynomial> = BTreeMap::new();
        for total in 0..=(max_m1 + max_m2) {
            for b in 0..=max_m2.min(total / 2) {
                let a = total - b;
                if a > max_m1 {
                    continue;
                }
                let poly = if b == 0 {
                    TrivariatePolynomial::monomial(0, a, 0, one.clone())
                } else if a == b {
                    cells[&(a, a - 1)].shifted(0, 0, 1, &two)
                } else {
                    cells[&(a - 1, b)]
                        .shifted(1, 0, 0, &one)
                        .add(&cells[&(a, b - 1)])
                };
                cells.insert((a, b), poly);
            }
        }
        Self { max_m1, max_m2, cells }
    }

    pub fn get(&self, deck: &DeckComposition) -> Option<&TrivariatePolynomial> {
        if deck.m1() > self.max_m1 || deck.m2() > self.max_m2 {
            return None;
        }
        self.cells.get(&(deck.m1(), deck.m2()))
    }
}

/// `Phi_{m1,m2}` for a single deck.
pub fn phi_recurrence(deck: &DeckComposition) -> TrivariatePolynomial {
    PhiTable::build(deck.m1(), deck.m2())
        .get(deck)
        .cloned()
        .expect("table covers its own corner")
}
