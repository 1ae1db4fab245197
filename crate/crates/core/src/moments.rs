//! Exact factorial and raw moments of `W` and of the shifted total
//! `Ĉ = C - m1`, plus their growth on balanced decks.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::deck::DeckComposition;
use crate::error::{Error, Result};
use crate::exact::binomial;
use crate::pmf::{to_f64, Rational};

/// `x (x - 1) ... (x - s + 1)`.
pub fn falling_factorial(x: i64, s: u32) -> BigInt {
    (0..i64::from(s)).fold(BigInt::one(), |acc, i| acc * (x - i))
}

/// Stirling numbers of the second kind `S(n, j)` for `0 <= j <= n`.
pub fn stirling2_row(n: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for i in 1..=n as usize {
        let mut next = vec![BigInt::zero(); i + 1];
        for j in 1..=i {
            let carry = if j < i { &row[j] * j } else { BigInt::zero() };
            next[j] = carry + &row[j - 1];
        }
        row = next;
    }
    row
}

fn check_order(s: u32) -> Result<()> {
    if s == 0 {
        return Err(Error::parameter("s", s, "moment order must be at least 1"));
    }
    Ok(())
}

/// `E[W (W-1) ... (W-s+1)]` from the single sum
/// `E C(W, s) = sum_{k=s-1}^{m2-1} C(k, s-1) 2^(k+1) C(M-k-1, m1) / C(M, m1)`.
///
/// Needs only `O(m2)` big-integer updates, so balanced decks with tens of
/// thousands of cards are cheap.
pub fn factorial_moment_w(deck: &DeckComposition, s: u32) -> Result<Rational> {
    check_order(s)?;
    let (m1, m2) = (i64::from(deck.m1()), i64::from(deck.m2()));
    let total = m1 + m2;
    let s = i64::from(s);
    let mut sum = BigInt::zero();
    if s <= m2 {
        let mut k = s - 1;
        let mut lower = BigInt::one(); // C(k, s - 1)
        let mut upper = binomial(total - k - 1, m1); // C(M - k - 1, m1)
        loop {
            sum += (&lower * &upper) << (k + 1) as usize;
            if k == m2 - 1 {
                break;
            }
            let n = total - k - 1;
            upper = upper * (n - m1) / n;
            k += 1;
            lower = lower * k / (k - s + 1);
        }
    }
    let s_factorial = falling_factorial(s, s as u32);
    Ok(Rational::new(sum * s_factorial, binomial(total, m1)))
}

/// `E[Ĉ (Ĉ-1) ... (Ĉ-s+1)] = 2^-s E[W (W-1) ... (W-s+1)]`.
pub fn factorial_moment_chat(deck: &DeckComposition, s: u32) -> Result<Rational> {
    Ok(factorial_moment_w(deck, s)? / Rational::from_integer(BigInt::one() << s as usize))
}

/// `E[Ĉ^s] = sum_j S(s, j) E[Ĉ falling j]`.
pub fn raw_moment_chat(deck: &DeckComposition, s: u32) -> Result<Rational> {
    check_order(s)?;
    let stirling = stirling2_row(s);
    let mut acc = Rational::zero();
    for (j, coeff) in stirling.iter().enumerate().skip(1) {
        if coeff.is_zero() {
            continue;
        }
        acc += factorial_moment_chat(deck, j as u32)? * Rational::from_integer(coeff.clone());
    }
    Ok(acc)
}

/// `Gamma(s/2 + 1)` for integer `s >= 0`, from `Gamma(1) = 1`,
/// `Gamma(1/2) = sqrt(pi)` and `Gamma(x + 1) = x Gamma(x)`.
pub fn gamma_half_integer(s: u32) -> f64 {
    let (mut value, mut x) = if s & 1 == 0 {
        (1.0, 1.0)
    } else {
        (std::f64::consts::PI.sqrt(), 0.5)
    };
    let target = f64::from(s) / 2.0 + 1.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// Leading-order growth `Gamma(s/2 + 1) m^(s/2)` of `E[Ĉ^s]` on the deck `(m, m)`.
pub fn asym_raw_moment_chat_equal(m: u32, s: u32) -> Result<f64> {
    check_order(s)?;
    if m == 0 {
        return Err(Error::parameter("m", m, "must be at least 1"));
    }
    Ok(gamma_half_integer(s) * f64::from(m).powf(f64::from(s) / 2.0))
}

/// Exact moment next to its asymptotic approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub order: u32,
    pub exact: Rational,
    pub asymptotic: f64,
    /// `exact / asymptotic`; `None` when the approximation vanishes.
    pub ratio: Option<f64>,
}

/// Raw moment of `Ĉ` on `(m, m)` against `Gamma(s/2 + 1) m^(s/2)`.
pub fn balanced_raw_moment_report(m: u32, s: u32) -> Result<MomentReport> {
    let deck = DeckComposition::new(m, m)?;
    let exact = raw_moment_chat(&deck, s)?;
    let asymptotic = asym_raw_moment_chat_equal(m, s)?;
    let ratio = (asymptotic != 0.0).then(|| to_f64(&exact) / asymptotic);
    Ok(MomentReport {
        order: s,
        exact,
        asymptotic,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::rational;

    fn deck(m1: u32, m2: u32) -> DeckComposition {
        DeckComposition::new(m1, m2).unwrap()
    }

    #[test]
    fn factorial_moments_of_w() {
        assert_eq!(factorial_moment_w(&deck(1, 1), 1).unwrap(), rational(1, 1));
        assert_eq!(factorial_moment_w(&deck(2, 2), 1).unwrap(), rational(5, 3));
        assert_eq!(factorial_moment_w(&deck(2, 2), 3).unwrap(), rational(0, 1));
        assert_eq!(factorial_moment_w(&deck(5, 0), 1).unwrap(), rational(0, 1));
        assert!(factorial_moment_w(&deck(2, 2), 0).is_err());
    }

    #[test]
    fn factorial_moments_of_shifted_total() {
        assert_eq!(factorial_moment_chat(&deck(2, 2), 1).unwrap(), rational(5, 6));
        assert_eq!(factorial_moment_chat(&deck(2, 1), 1).unwrap(), rational(1, 3));
        for s in 1..4 {
            assert_eq!(factorial_moment_chat(&deck(6, 0), s).unwrap(), rational(0, 1));
        }
    }

    #[test]
    fn raw_moments_of_shifted_total() {
        assert_eq!(raw_moment_chat(&deck(2, 2), 2).unwrap(), rational(7, 6));
        assert_eq!(raw_moment_chat(&deck(2, 2), 1).unwrap(), rational(5, 6));
        for d in DeckComposition::all_up_to(8) {
            assert_eq!(raw_moment_chat(&d, 1).unwrap(), factorial_moment_chat(&d, 1).unwrap());
        }
    }

    #[test]
    fn stirling_rows() {
        let row: Vec<i64> = stirling2_row(5).iter().map(|v| i64::try_from(v).unwrap()).collect();
        assert_eq!(row, vec![0, 1, 15, 25, 10, 1]);
        assert_eq!(stirling2_row(0), vec![BigInt::one()]);
    }

    #[test]
    fn gamma_at_half_integers() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((gamma_half_integer(1) - sqrt_pi / 2.0).abs() < 1e-15);
        assert_eq!(gamma_half_integer(2), 1.0);
        assert!((gamma_half_integer(3) - 0.75 * sqrt_pi).abs() < 1e-15);
        assert_eq!(gamma_half_integer(4), 2.0);
        assert!((asym_raw_moment_chat_equal(10_000, 1).unwrap() - 88.622_692_545_275_8).abs() < 1e-9);
        assert_eq!(asym_raw_moment_chat_equal(37, 2).unwrap(), 37.0);
    }
}
