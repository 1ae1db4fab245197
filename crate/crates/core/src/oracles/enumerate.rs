//! Brute-force oracle: play the majority guesser on every deck order.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::deck::DeckComposition;
use crate::error::{Error, Result};
use crate::exact::binomial;
use crate::pmf::{DiscretePmf, JointPmf, Rational};

/// Default refusal threshold for [`enumerate_decks`], in cards.
pub const DEFAULT_ENUMERATION_CAP: u32 = 20;

/// Counters of a single play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GuessCounts {
    /// Certified correct guesses (one color exhausted).
    pub t: u32,
    /// Correct guesses at a strict majority.
    pub l: u32,
    /// Correct guesses at a tie.
    pub p: u32,
    /// Visits to tie states `(j, j)`, `j >= 1`.
    pub w: u32,
    /// All correct guesses.
    pub c: u32,
}

impl GuessCounts {
    /// Checks `c = t + l + p`, `t + l = m1`, `p <= w <= m2` and `m1 <= c <= m1 + m2`.
    pub fn satisfies_invariants(&self, deck: &DeckComposition) -> bool {
        self.c == self.t + self.l + self.p
            && self.t + self.l == deck.m1()
            && self.p <= self.w
            && self.w <= deck.m2()
            && (deck.m1()..=deck.total()).contains(&self.c)
    }
}

/// Exact joint law of all five counters.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedLaw {
    pub deck: DeckComposition,
    pub law: BTreeMap<GuessCounts, Rational>,
}

impl EnumeratedLaw {
    fn project(&self, key: impl Fn(&GuessCounts) -> u32) -> DiscretePmf {
        DiscretePmf::from_masses(self.law.iter().map(|(g, p)| (i64::from(key(g)), p.clone())))
            .expect("enumerated masses are nonnegative")
    }

    pub fn marginal_t(&self) -> DiscretePmf {
        self.project(|g| g.t)
    }

    pub fn marginal_l(&self) -> DiscretePmf {
        self.project(|g| g.l)
    }

    pub fn marginal_p(&self) -> DiscretePmf {
        self.project(|g| g.p)
    }

    pub fn marginal_w(&self) -> DiscretePmf {
        self.project(|g| g.w)
    }

    pub fn marginal_c(&self) -> DiscretePmf {
        self.project(|g| g.c)
    }

    /// The `(W, T)` marginal.
    pub fn joint_wt(&self) -> JointPmf {
        let mut mass: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
        for (g, p) in &self.law {
            *mass.entry((g.w, g.t)).or_insert_with(Rational::zero) += p;
        }
        JointPmf::from_map(mass)
    }
}

type Tally = BTreeMap<GuessCounts, u64>;

/// Prefix depth below which branches are explored on separate rayon tasks.
const PARALLEL_DEPTH: u32 = 6;

/// Runs the majority guesser on all `C(m1 + m2, m1)` card orders.
///
/// Each order carries weight `1 / C(m1 + m2, m1)`. At a tie the guess is a
/// fair coin, so the play branches into both coin outcomes with weight one
/// half each. Decks with more than `cap` cards are refused.
pub fn enumerate_decks(deck: &DeckComposition, cap: u32) -> Result<EnumeratedLaw> {
    if deck.total() > cap {
        return Err(Error::CapExceeded {
            what: "enumeration deck size",
            requested: deck.total().into(),
            cap: cap.into(),
        });
    }
    // Leaves are weighted 2^(m2 - ties) over the common denominator C(M, m1) * 2^m2.
    let tally = explore(deck.m1(), deck.m2(), GuessCounts::default(), deck.m2(), 0);
    let denom = binomial(deck.total().into(), deck.m1().into()) << deck.m2() as usize;
    let law = tally
        .into_iter()
        .map(|(g, count)| (g, Rational::new(BigInt::from(count), denom.clone())))
        .collect();
    Ok(EnumeratedLaw { deck: *deck, law })
}

fn merge(mut left: Tally, right: Tally) -> Tally {
    for (g, n) in right {
        *left.entry(g).or_insert(0) += n;
    }
    left
}

/// `red` and `black` are the remaining cards of the majority and minority color.
fn explore(red: u32, black: u32, counts: GuessCounts, weight_exp: u32, depth: u32) -> Tally {
    if red == 0 && black == 0 {
        return Tally::from([(counts, 1u64 << weight_exp)]);
    }

    // (guess, weight exponent) pairs; `true` means the guess is red.
    let guesses: &[(bool, u32)] = if red > black {
        &[(true, 0)]
    } else if black > red {
        &[(false, 0)]
    } else {
        &[(true, 1), (false, 1)]
    };

    let mut branches = Vec::with_capacity(4);
    for &(guess_red, halvings) in guesses {
        for draw_red in [true, false] {
            if (draw_red && red == 0) || (!draw_red && black == 0) {
                continue;
            }
            let mut next = counts;
            let correct = guess_red == draw_red;
            if red == 0 || black == 0 {
                next.t += 1;
            } else if red == black {
                next.w += 1;
                if correct {
                    next.p += 1;
                }
            } else if correct {
                next.l += 1;
            }
            if correct {
                next.c += 1;
            }
            let (r, b) = if draw_red { (red - 1, black) } else { (red, black - 1) };
            branches.push((r, b, next, weight_exp - halvings));
        }
    }

    if depth < PARALLEL_DEPTH && branches.len() > 1 {
        use rayon::prelude::*;
        branches
            .into_par_iter()
            .map(|(r, b, next, e)| explore(r, b, next, e, depth + 1))
            .reduce(Tally::new, merge)
    } else {
        branches
            .into_iter()
            .map(|(r, b, next, e)| explore(r, b, next, e, depth + 1))
            .fold(Tally::new(), merge)
    }
}
