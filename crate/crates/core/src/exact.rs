//! Exact finite-deck laws of `W`, `T`, `L`, `P` and `C`.
//!
//! `W` counts visits to tie states `(j, j)` with `j >= 1`, `T` the certified
//! correct guesses (one color exhausted), `L` the correct guesses made at a
//! strict majority, `P` the correct guesses made at a tie and `C = T + L + P`
//! the total. Every value here is an exact rational.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::deck::DeckComposition;
use crate::error::{Error, Result};
use crate::pmf::{DiscretePmf, JointPmf, Rational};

/// `C(n, r)`, and zero whenever `r < 0`, `r > n` or `n < 0`.
///
/// The closed forms below lean on this convention at their boundary indices.
pub fn binomial(n: i64, r: i64) -> BigInt {
    if n < 0 || r < 0 || r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, r)` for a fixed lower index and every `n` in `0..=n_max`.
///
/// Built upward with exact divisions; lookups outside the table follow the
/// same zero convention as [`binomial`].
pub(crate) struct BinomialColumn {
    r: i64,
    values: Vec<BigInt>,
    zero: BigInt,
}

impl BinomialColumn {
    pub(crate) fn new(r: i64, n_max: i64) -> Self {
        let n_max = n_max.max(0);
        let mut values = Vec::with_capacity(n_max as usize + 1);
        if r < 0 {
            values.resize(n_max as usize + 1, BigInt::zero());
        } else {
            let mut current = BigInt::zero();
            for n in 0..=n_max {
                if n == r {
                    current = BigInt::one();
                } else if n > r {
                    current = current * n / (n - r);
                }
                values.push(current.clone());
            }
        }
        Self {
            r,
            values,
            zero: BigInt::zero(),
        }
    }

    pub(crate) fn get(&self, n: i64) -> &BigInt {
        if n < 0 || self.r < 0 || n < self.r {
            return &self.zero;
        }
        self.values
            .get(n as usize)
            .expect("binomial column queried beyond its table")
    }
}

fn total_ways(deck: &DeckComposition) -> BigInt {
    binomial(i64::from(deck.total()), i64::from(deck.m1()))
}

fn ratio(numer: BigInt, denom: &BigInt) -> Rational {
    Rational::new(numer, denom.clone())
}

/// Exact joint law of `(W, T)`.
///
/// Implements the five-branch closed form case by case. Decks with `m2 > m1`
/// cannot be constructed, so there is no error path.
pub fn joint_pmf_wt(deck: &DeckComposition) -> JointPmf {
    let (m1, m2) = (i64::from(deck.m1()), i64::from(deck.m2()));
    let total = m1 + m2;
    let denom = total_ways(deck);
    let minority_col = BinomialColumn::new(m2 - 1, total);
    let majority_col = BinomialColumn::new(m1 - 1, total);

    let mut mass = BTreeMap::new();
    for k in 0..=m2 {
        for l in 0..=m1 {
            let p = if k == 0 && m2 >= 1 && l >= 1 {
                let n = total - l - 1;
                ratio(minority_col.get(n) - majority_col.get(n), &denom)
            } else if k >= 1 && l >= 1 && (m1, m2) != (l, k) {
                let n = total - l - k;
                let numer = (majority_col.get(n) << k as usize)
                    - (majority_col.get(n - 1) << (k + 1) as usize);
                ratio(numer, &denom)
            } else if (k == 0 && m2 == 0 && l == m1) || (m1 == 1 && m2 == 1 && k == 1 && l == 1) {
                Rational::one()
            } else {
                continue;
            };
            mass.insert((k as u32, l as u32), p);
        }
    }
    JointPmf::from_map(mass)
}

/// Numerators of the law of `T` over the common denominator `C(M, m1)`,
/// indexed by `l = 1..=m1`; requires `m1, m2 >= 1`.
pub(crate) fn marginal_t_numerators(deck: &DeckComposition) -> Vec<(i64, BigInt)> {
    let (m1, m2) = (i64::from(deck.m1()), i64::from(deck.m2()));
    let total = m1 + m2;
    let minority_col = BinomialColumn::new(m2 - 1, total);
    let majority_col = BinomialColumn::new(m1 - 1, total);
    (1..=m1)
        .map(|l| {
            let n = total - l - 1;
            (l, minority_col.get(n) + majority_col.get(n))
        })
        .collect()
}

/// Numerators of the law of `W` over the common denominator `C(M, m1)`,
/// indexed by `k = 0..=m2`; requires `m1 >= 1`.
pub(crate) fn marginal_w_numerators(deck: &DeckComposition) -> Vec<(i64, BigInt)> {
    let (m1, m2) = (i64::from(deck.m1()), i64::from(deck.m2()));
    let total = m1 + m2;
    let col = BinomialColumn::new(m1, total);
    (0..=m2)
        .map(|k| (k, (col.get(total - k) << k as usize) - (col.get(total - k - 1) << (k + 1) as usize)))
        .collect()
}

/// `C(M, m1)`, the number of distinct card orders.
pub(crate) fn total_orders(deck: &DeckComposition) -> BigInt {
    total_ways(deck)
}

/// Exact law of `T`; requires `m1 >= 1`.
pub fn marginal_t(deck: &DeckComposition) -> Result<DiscretePmf> {
    if deck.m1() == 0 {
        return Err(Error::domain("marginal_t", "the deck must hold at least one card"));
    }
    if deck.m2() == 0 {
        return Ok(DiscretePmf::point_mass(deck.m1().into()));
    }
    let denom = total_ways(deck);
    DiscretePmf::from_masses(marginal_t_numerators(deck).into_iter().map(|(l, n)| (l, ratio(n, &denom))))
}

/// Exact law of `W`.
pub fn marginal_w(deck: &DeckComposition) -> DiscretePmf {
    if deck.m1() == 0 {
        return DiscretePmf::point_mass(0);
    }
    let denom = total_ways(deck);
    DiscretePmf::from_masses(marginal_w_numerators(deck).into_iter().map(|(k, n)| (k, ratio(n, &denom))))
        .expect("closed-form masses of W are nonnegative")
}

fn check_cdf_range(
    operation: &'static str,
    deck: &DeckComposition,
    k: i64,
    l: i64,
    allow_corner: bool,
) -> Result<()> {
    let (m1, m2) = (i64::from(deck.m1()), i64::from(deck.m2()));
    let corner = (m1, m2) == (l, k);
    if !(1..=m1).contains(&l) || !(0..=m2).contains(&k) || (corner && !allow_corner) {
        let corner_rule = if allow_corner { "" } else { " and (l, k) != (m1, m2)" };
        return Err(Error::domain(
            operation,
            format!("need 1 <= l <= m1, 0 <= k <= m2{corner_rule}; got k = {k}, l = {l} for deck {deck}"),
        ));
    }
    Ok(())
}

/// `P{W <= k and T <= l}` in closed form.
///
/// Defined for `1 <= l <= m1` and `0 <= k <= m2`; other arguments are
/// rejected. At the corner `(l, k) = (m1, m2)` the same expression evaluates
/// to one, the full-support value.
pub fn joint_cdf_wt(deck: &DeckComposition, k: i64, l: i64) -> Result<Rational> {
    check_cdf_range("joint_cdf_wt", deck, k, l, true)?;
    let (m1, m2) = (i64::from(deck.m1()), i64::from(deck.m2()));
    let total = m1 + m2;
    let pow = BigInt::one() << (k + 1) as usize;
    let numer = binomial(total - l - 1, m2) + binomial(total - l - 1, m1)
        + &pow * binomial(total - k - 1, m1)
        - pow * binomial(total - k - l - 1, m1);
    Ok(Rational::one() - ratio(numer, &total_ways(deck)))
}

/// `P{W <= k and T = l}` in closed form, for `1 <= l <= m1`, `0 <= k <= m2`
/// and `(l, k) != (m1, m2)`. The expression is wrong at that corner (e.g. on
/// the deck `(2, 2)`), so the corner is rejected.
pub fn one_sided_cdf_wt(deck: &DeckComposition, k: i64, l: i64) -> Result<Rational> {
    check_cdf_range("one_sided_cdf_wt", deck, k, l, false)?;
    let (m1, m2) = (i64::from(deck.m1()), i64::from(deck.m2()));
    let total = m1 + m2;
    let numer = binomial(total - l - 1, m2 - 1) + binomial(total - l - 1, m1 - 1)
        - (binomial(total - k - l - 1, m1 - 1) << (k + 1) as usize);
    Ok(ratio(numer, &total_ways(deck)))
}

/// Exact law of the total number of correct guesses `C`; requires at least one card.
pub fn pmf_c(deck: &DeckComposition) -> Result<DiscretePmf> {
    let (m1, total) = (i64::from(deck.m1()), i64::from(deck.total()));
    if total == 0 {
        return Err(Error::domain("pmf_c", "the deck must hold at least one card"));
    }
    let denom = total_ways(deck);
    let mut masses = Vec::with_capacity((total - m1 + 1) as usize);
    // C(M, k) for k = m1..=M+1, built downward from C(M, M+1) = 0.
    let mut upper = BigInt::zero();
    let mut current = BigInt::one();
    for k in (m1..=total).rev() {
        masses.push((k, ratio(&current - &upper, &denom)));
        upper = current.clone();
        if k > 0 {
            current = current * k / (total - k + 1);
        }
    }
    DiscretePmf::from_masses(masses)
}

/// Law of `Binomial(W, 1/2)` mixed over the given law of `W`.
pub fn binomial_thinning(w: &DiscretePmf) -> DiscretePmf {
    let mut masses = Vec::new();
    for (k, p) in w.iter() {
        let scale = Rational::new(BigInt::one(), BigInt::one() << k as usize);
        for j in 0..=k {
            masses.push((j, p * &scale * Rational::from_integer(binomial(k, j))));
        }
    }
    DiscretePmf::from_masses(masses).expect("mixture masses are nonnegative")
}

/// Exact law of the pure-luck correct guesses `P`, via `P ~ Binomial(W, 1/2)`.
pub fn pmf_p_from_w(deck: &DeckComposition) -> DiscretePmf {
    binomial_thinning(&marginal_w(deck))
}

/// Exact law of the more-likely correct guesses `L`, using `L + T = m1`.
pub fn pmf_l(deck: &DeckComposition) -> DiscretePmf {
    if deck.m1() == 0 {
        return DiscretePmf::point_mass(0);
    }
    marginal_t(deck)
        .expect("m1 >= 1 checked above")
        .reflected(i64::from(deck.m1()))
}

/// `P{W = k}` on a balanced deck `(m, m)` through the local form
/// `2^k C(2m-k-1, m-1) (k/m) / C(2m, m)`, valid for `1 <= k <= m`.
pub fn balanced_w_mass_local_form(m: u32, k: u32) -> Result<Rational> {
    balanced_local_form(m, k, 1)
}

/// The same local form with lower index `m-2`, as it is sometimes printed.
/// Kept only so the test suite can show it disagrees with the exact law.
pub fn balanced_w_mass_misprinted_form(m: u32, k: u32) -> Result<Rational> {
    balanced_local_form(m, k, 2)
}

fn balanced_local_form(m: u32, k: u32, lower_shift: i64) -> Result<Rational> {
    if m == 0 || k == 0 || k > m {
        return Err(Error::domain("balanced_w_mass_local_form", format!("need 1 <= k <= m, got m = {m}, k = {k}")));
    }
    let (m, k) = (i64::from(m), i64::from(k));
    let numer = (binomial(2 * m - k - 1, m - lower_shift) << k as usize) * k;
    Ok(Rational::new(numer, binomial(2 * m, m) * m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::rational;

    fn deck(m1: u32, m2: u32) -> DeckComposition {
        DeckComposition::new(m1, m2).unwrap()
    }

    fn pmf(entries: &[(i64, i64, i64)]) -> DiscretePmf {
        DiscretePmf::new(entries.iter().map(|&(k, n, d)| (k, rational(n, d)))).unwrap()
    }

    /// Pascal-triangle oracle for the binomial coefficient.
    fn pascal(n: usize, r: usize) -> BigInt {
        let mut row = vec![BigInt::one()];
        for _ in 0..n {
            let mut next = vec![BigInt::one(); row.len() + 1];
            for i in 1..row.len() {
                next[i] = &row[i - 1] + &row[i];
            }
            row = next;
        }
        row.get(r).cloned().unwrap_or_default()
    }

    #[test]
    fn binomial_values_and_out_of_range_convention() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(0, -1), BigInt::zero());
        assert_eq!(binomial(-3, 0), BigInt::zero());
        assert_eq!(binomial(3, 4), BigInt::zero());
        assert_eq!(binomial(52, 26), BigInt::from(495_918_532_948_104u64));
        assert_eq!(binomial(52, 26), pascal(52, 26));
    }

    #[test]
    fn binomial_column_agrees_with_direct_formula() {
        for r in -2..8 {
            let col = BinomialColumn::new(r, 20);
            for n in -3..=20 {
                assert_eq!(col.get(n), &binomial(n, r), "C({n}, {r})");
            }
        }
    }

    #[test]
    fn joint_special_cases() {
        let one = joint_pmf_wt(&deck(1, 1));
        assert_eq!(one.iter().collect::<Vec<_>>(), vec![((1, 1), &Rational::one())]);
        let all_red = joint_pmf_wt(&deck(3, 0));
        assert_eq!(all_red.iter().collect::<Vec<_>>(), vec![((0, 3), &Rational::one())]);
        let empty = joint_pmf_wt(&deck(0, 0));
        assert_eq!(empty.mass(0, 0), Rational::one());
    }

    #[test]
    fn joint_small_deck() {
        let joint = joint_pmf_wt(&deck(2, 1));
        assert_eq!(joint.len(), 2);
        assert_eq!(joint.mass(0, 2), rational(1, 3));
        assert_eq!(joint.mass(1, 1), rational(2, 3));
    }

    #[test]
    fn marginals_on_small_decks() {
        assert_eq!(marginal_t(&deck(2, 1)).unwrap(), pmf(&[(1, 2, 3), (2, 1, 3)]));
        assert_eq!(marginal_t(&deck(5, 0)).unwrap(), pmf(&[(5, 1, 1)]));
        assert_eq!(marginal_t(&deck(1, 1)).unwrap(), pmf(&[(1, 1, 1)]));
        assert!(marginal_t(&deck(0, 0)).is_err());

        assert_eq!(marginal_w(&deck(1, 1)), pmf(&[(1, 1, 1)]));
        assert_eq!(marginal_w(&deck(2, 2)), pmf(&[(1, 1, 3), (2, 2, 3)]));
        assert_eq!(marginal_w(&deck(2, 1)), pmf(&[(0, 1, 3), (1, 2, 3)]));
        assert_eq!(marginal_w(&deck(0, 0)), pmf(&[(0, 1, 1)]));
    }

    #[test]
    fn cdf_examples() {
        let d = deck(2, 1);
        assert_eq!(joint_cdf_wt(&d, 0, 2).unwrap(), rational(1, 3));
        assert_eq!(joint_cdf_wt(&d, 1, 2).unwrap(), Rational::one());
        assert_eq!(one_sided_cdf_wt(&d, 0, 1).unwrap(), Rational::zero());
        assert_eq!(one_sided_cdf_wt(&d, 1, 1).unwrap(), rational(2, 3));
    }

    #[test]
    fn cdf_rejects_arguments_outside_the_stated_range() {
        let d = deck(2, 1);
        assert!(joint_cdf_wt(&d, 0, 0).is_err());
        assert!(one_sided_cdf_wt(&d, 1, 2).is_err());
        assert!(joint_cdf_wt(&d, 2, 1).is_err());
        assert!(joint_cdf_wt(&d, 0, 3).is_err());
        assert!(one_sided_cdf_wt(&deck(1, 1), 1, 1).is_err());
        assert!(one_sided_cdf_wt(&d, -1, 1).is_err());
    }

    #[test]
    fn total_correct_guesses() {
        assert_eq!(pmf_c(&deck(2, 1)).unwrap(), pmf(&[(2, 2, 3), (3, 1, 3)]));
        assert_eq!(pmf_c(&deck(2, 2)).unwrap(), pmf(&[(2, 1, 3), (3, 1, 2), (4, 1, 6)]));
        assert_eq!(pmf_c(&deck(7, 0)).unwrap(), pmf(&[(7, 1, 1)]));
        assert_eq!(pmf_c(&deck(2, 2)).unwrap().mean(), rational(17, 6));
        assert!(pmf_c(&deck(0, 0)).is_err());
    }

    #[test]
    fn pure_luck_and_more_likely() {
        assert_eq!(pmf_p_from_w(&deck(2, 1)), pmf(&[(0, 2, 3), (1, 1, 3)]));
        assert_eq!(pmf_p_from_w(&deck(4, 0)), pmf(&[(0, 1, 1)]));
        assert_eq!(pmf_p_from_w(&deck(2, 2)), pmf(&[(0, 1, 3), (1, 1, 2), (2, 1, 6)]));

        assert_eq!(pmf_l(&deck(2, 1)), pmf(&[(0, 1, 3), (1, 2, 3)]));
        assert_eq!(pmf_l(&deck(4, 0)), pmf(&[(0, 1, 1)]));
        assert_eq!(pmf_l(&deck(1, 1)), pmf(&[(0, 1, 1)]));
    }

    #[test]
    fn balanced_local_form_needs_lower_index_m_minus_one() {
        let exact = marginal_w(&deck(2, 2));
        for k in 1..=2 {
            assert_eq!(balanced_w_mass_local_form(2, k).unwrap(), exact.mass(k.into()));
        }
        // With lower index m - 2 the k = 1 mass at m = 2 comes out as 1/6, not 1/3.
        assert_eq!(balanced_w_mass_misprinted_form(2, 1).unwrap(), rational(1, 6));
        assert!(balanced_w_mass_local_form(3, 0).is_err());
    }
}
