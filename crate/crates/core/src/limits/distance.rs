use num_bigint::BigInt;
use num_traits::Zero;

use crate::deck::DeckComposition;
use crate::error::{Error, Result};
use crate::exact::{binomial, marginal_t_numerators, marginal_w_numerators, total_orders, BinomialColumn};
use crate::limits::correlation::JointLimitLaw;
use crate::limits::law::{limit_law, LimitLaw};
use crate::limits::regime::{Counter, RegimeSpec};
use crate::pmf::{to_f64, Rational};

/// The joint law of `(W, T)` as doubles, for decks too large for exact tables.
///
/// Each distinct big-integer quantity of the closed form is converted to a
/// double exactly once, after scaling, so no cancellation happens in floating
/// point: the branch `k, l >= 1` is `2^k e_{k+l}` with
/// `e_j = (C(M-j, m1-1) - 2 C(M-j-1, m1-1)) / C(M, m1)`, stored as `2^j e_j`.
#[derive(Debug, Clone)]
pub struct FloatJointWt {
    deck: DeckComposition,
    /// `P{W = 0, T = l}` indexed by `l`.
    row_zero: Vec<f64>,
    /// `2^j e_j` indexed by `j`.
    scaled_tail: Vec<f64>,
}

impl FloatJointWt {
    pub fn new(deck: &DeckComposition) -> Self {
        let (m1, m2) = (i64::from(deck.m1()), i64::from(deck.m2()));
        let total = m1 + m2;
        let denom = binomial(total, m1);
        let to_double = |numer: BigInt| to_f64(&Rational::new_raw(numer, denom.clone()));
        let majority_col = BinomialColumn::new(m1 - 1, total);
        let minority_col = BinomialColumn::new(m2 - 1, total);

        let mut row_zero = vec![0.0; m1 as usize + 1];
        if m2 >= 1 {
            for l in 1..=m1 {
                let n = total - l - 1;
                row_zero[l as usize] = to_double(minority_col.get(n) - majority_col.get(n));
            }
        }
        let mut scaled_tail = vec![0.0; total as usize + 1];
        if m2 >= 1 {
            for j in 2..=total {
                let n = total - j;
                let numer: BigInt = majority_col.get(n) - (majority_col.get(n - 1) << 1usize);
                if !numer.is_zero() {
                    scaled_tail[j as usize] = to_double(numer << j as usize);
                }
            }
        }
        Self {
            deck: *deck,
            row_zero,
            scaled_tail,
        }
    }

    pub fn deck(&self) -> &DeckComposition {
        &self.deck
    }

    /// `P{W = k, T = l}`.
    pub fn mass(&self, k: u32, l: u32) -> f64 {
        let (m1, m2) = (self.deck.m1(), self.deck.m2());
        if k > m2 || l > m1 || l == 0 {
            return 0.0;
        }
        if m2 == 0 {
            return f64::from(u8::from(k == 0 && l == m1));
        }
        if (m1, m2) == (1, 1) {
            return f64::from(u8::from(k == 1 && l == 1));
        }
        if k == 0 {
            return self.row_zero[l as usize];
        }
        if (k, l) == (m2, m1) {
            return 0.0;
        }
        let j = (k + l) as usize;
        self.scaled_tail.get(j).copied().unwrap_or(0.0) * 2f64.powi(-(l as i32))
    }

    /// The whole table as rows `k = 0..=m2`, columns `l = 0..=m1`.
    pub fn table(&self) -> Vec<Vec<f64>> {
        (0..=self.deck.m2())
            .map(|k| (0..=self.deck.m1()).map(|l| self.mass(k, l)).collect())
            .collect()
    }
}

/// Exact law of a scaled counter, reduced to doubles at the final step.
#[derive(Debug, Clone)]
pub struct ScaledExactLaw {
    /// Atoms `(scaled position, mass)` in increasing position.
    pub atoms: Vec<(f64, f64)>,
    /// `cumulative[i] = P{scaled counter <= atoms[i].0}`, summed exactly.
    pub cumulative: Vec<f64>,
}

impl ScaledExactLaw {
    /// Integer atoms `(value, numerator)` over a common denominator; running
    /// sums stay exact and each is converted to a double once.
    fn from_numerators(numerators: &[(i64, BigInt)], denom: &BigInt, scale: f64) -> Self {
        let convert = |n: &BigInt| to_f64(&Rational::new_raw(n.clone(), denom.clone()));
        let mut running = BigInt::zero();
        let mut atoms = Vec::with_capacity(numerators.len());
        let mut cumulative = Vec::with_capacity(numerators.len());
        for (v, n) in numerators.iter().filter(|(_, n)| !n.is_zero()) {
            running += n;
            atoms.push((*v as f64 * scale, convert(n)));
            cumulative.push(convert(&running));
        }
        Self { atoms, cumulative }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let idx = self.atoms.partition_point(|&(pos, _)| pos <= x);
        if idx == 0 {
            0.0
        } else {
            self.cumulative[idx - 1]
        }
    }
}

/// `(value, numerator)` pairs of the regime's counter over `C(M, m1)`.
fn counter_numerators(deck: &DeckComposition, regime: &RegimeSpec) -> Result<Vec<(i64, BigInt)>> {
    match regime.counter() {
        Counter::T if deck.m2() == 0 => Ok(vec![(deck.m1().into(), BigInt::from(1))]),
        Counter::T => Ok(marginal_t_numerators(deck)),
        Counter::W => Ok(marginal_w_numerators(deck)),
        Counter::Both => Err(Error::domain("scaled_exact_law", "the joint central regime is bivariate")),
    }
}

/// Exact law of the regime's scaled counter on `deck`.
pub fn scaled_exact_law(deck: &DeckComposition, regime: &RegimeSpec) -> Result<ScaledExactLaw> {
    regime.check_deck(deck)?;
    let numerators = counter_numerators(deck, regime)?;
    let denom = total_orders(deck);
    Ok(ScaledExactLaw::from_numerators(&numerators, &denom, regime.scale(deck)))
}

/// `P{scaled counter <= x}` on `deck`.
pub fn scaled_exact_cdf(deck: &DeckComposition, regime: &RegimeSpec, x: f64) -> Result<f64> {
    Ok(scaled_exact_law(deck, regime)?.cdf(x))
}

/// Kolmogorov distance between a discrete law given by its atoms and a
/// continuous limit.
fn kolmogorov(law: &ScaledExactLaw, limit: &LimitLaw) -> f64 {
    let mut sup: f64 = 0.0;
    let mut before = 0.0;
    for (&(x, _), &after) in law.atoms.iter().zip(&law.cumulative) {
        let f = limit.cdf(x);
        sup = sup.max((f - before).abs()).max((f - after).abs());
        before = after;
    }
    sup
}

/// Total variation distance to a discrete limit on the integers.
fn total_variation(law: &ScaledExactLaw, limit: &LimitLaw) -> f64 {
    let mut gap = 0.0;
    let mut limit_on_support = 0.0;
    for &(v, p) in &law.atoms {
        let q = limit.pmf(v.round() as i64).unwrap_or(0.0);
        gap += (p - q).abs();
        limit_on_support += q;
    }
    0.5 * gap + 0.5 * (1.0 - limit_on_support).max(0.0)
}

/// Distance between the exact law on `deck` and the regime's limit.
///
/// Continuous limits use the Kolmogorov distance of the scaled counter;
/// discrete limits (and the joint central regime) use total variation.
pub fn convergence_distance(deck: &DeckComposition, regime: &RegimeSpec) -> Result<f64> {
    regime.check_deck(deck)?;
    if let RegimeSpec::JointCentral { rho } = *regime {
        return Ok(joint_central_distance(deck, &JointLimitLaw::new(rho)?));
    }
    let limit = limit_law(regime)?;
    let law = scaled_exact_law(deck, regime)?;
    if limit.is_discrete() {
        Ok(total_variation(&law, &limit))
    } else {
        Ok(kolmogorov(&law, &limit))
    }
}

fn joint_central_distance(deck: &DeckComposition, limit: &JointLimitLaw) -> f64 {
    let joint = FloatJointWt::new(deck);
    let mut gap = 0.0;
    let mut limit_on_grid = 0.0;
    for k in 0..=deck.m2() {
        for l in 1..=deck.m1() {
            let q = limit.pmf(k, l);
            gap += (joint.mass(k, l) - q).abs();
            limit_on_grid += q;
        }
    }
    0.5 * gap + 0.5 * (1.0 - limit_on_grid).max(0.0)
}

/// The regime for the other counter under which `(W, T)` is asymptotically
/// a product of independent limits.
pub fn product_partner(regime: &RegimeSpec) -> Result<RegimeSpec> {
    regime.validate()?;
    match regime {
        RegimeSpec::TFixedM2 { .. } | RegimeSpec::TSublinear => Ok(RegimeSpec::WSublinear),
        RegimeSpec::WNearDiagonalLargeD
        | RegimeSpec::WNearDiagonalAlpha { .. }
        | RegimeSpec::WNearDiagonalSmallD => Ok(RegimeSpec::TLinear { rho: 1.0 }),
        _ => Err(Error::domain(
            "product_partner",
            format!("{regime} has no independent product limit; linear regimes use the joint central law"),
        )),
    }
}

/// Joint Kolmogorov distance
/// `sup_{x, y} |P{a W <= x, b T <= y} - F_X(x) F_Y(y)|`
/// between the scaled pair and its independent product limit.
///
/// `regime` is checked against `deck`; the partner is [`product_partner`].
pub fn joint_product_distance(deck: &DeckComposition, regime: &RegimeSpec) -> Result<f64> {
    regime.check_deck(deck)?;
    let partner = product_partner(regime)?;
    let (w_regime, t_regime) = match regime.counter() {
        Counter::W => (*regime, partner),
        _ => (partner, *regime),
    };
    let (law_w, law_t) = (limit_law(&w_regime)?, limit_law(&t_regime)?);
    let (scale_w, scale_t) = (w_regime.scale(deck), t_regime.scale(deck));
    let (m1, m2) = (deck.m1() as usize, deck.m2() as usize);

    // Marginal limit CDFs at the lower corner (index i) and just below the
    // next atom (index i + 1) of every cell; the last cell reaches infinity.
    let corners = |law: &LimitLaw, scale: f64, n: usize| -> (Vec<f64>, Vec<f64>) {
        let lower = (0..=n).map(|i| law.cdf(i as f64 * scale)).collect();
        let upper = (0..=n)
            .map(|i| if i == n { 1.0 } else { law.cdf_left((i + 1) as f64 * scale) })
            .collect();
        (lower, upper)
    };
    let (w_low, w_up) = corners(&law_w, scale_w, m2);
    let (t_low, t_up) = corners(&law_t, scale_t, m1);
    // Cells left of (or below) the first atom have exact CDF zero.
    let w_first = law_w.cdf_left(0.0);
    let t_first = law_t.cdf_left(0.0);
    let mut sup = w_first.max(t_first);

    let joint = FloatJointWt::new(deck);
    let mut column_sums = vec![0.0; m1 + 1];
    for k in 0..=m2 {
        let mut row_running = 0.0;
        for l in 0..=m1 {
            row_running += joint.mass(k as u32, l as u32);
            column_sums[l] += row_running;
            let g = column_sums[l];
            let low = w_low[k] * t_low[l];
            let up = w_up[k] * t_up[l];
            sup = sup.max((g - low).abs()).max((g - up).abs());
        }
    }
    Ok(sup)
}

/// Total variation between the exact joint law of `(W, T)` and the product of
/// its own marginals; small values certify asymptotic independence.
pub fn independence_gap(deck: &DeckComposition) -> f64 {
    let table = FloatJointWt::new(deck).table();
    let w: Vec<f64> = table.iter().map(|row| row.iter().sum()).collect();
    let mut t = vec![0.0; deck.m1() as usize + 1];
    for row in &table {
        for (l, p) in row.iter().enumerate() {
            t[l] += p;
        }
    }
    let mut gap = 0.0;
    for (k, row) in table.iter().enumerate() {
        for (l, p) in row.iter().enumerate() {
            gap += (p - w[k] * t[l]).abs();
        }
    }
    0.5 * gap
}
