//! Models equivalent in law to the tie-visit counter `W`: equality counts of
//! the sampling-without-replacement urn, returns to zero of Dyck walks, and
//! the mirror surjection from urn paths onto card-process paths.
//!
//! A deck order is a bitstring read from the top, `1` for a card of the
//! majority color. The urn path starts at `(m1, m2)` and takes a *left* step
//! `(-1, 0)` for each majority card and a *down* step `(0, -1)` for each
//! minority card. The Dyck walk reads the same deck **bottom-up**, stepping
//! `+1` on a minority card and `-1` on a majority card, so its final altitude
//! is `m2 - m1` and it returns to zero exactly when the cards below the
//! current position are balanced, i.e. when the urn sits at a tie state.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::deck::DeckComposition;
use crate::error::{Error, Result};
use crate::exact::binomial;
use crate::pmf::{DiscretePmf, Rational};

/// Default refusal threshold for urn enumeration, in cards.
pub const DEFAULT_URN_CAP: u32 = 20;

/// Default refusal threshold for Dyck walk enumeration, in steps.
pub const DEFAULT_DYCK_CAP: u32 = 22;

/// Hard limit for any enumeration cap accepted here.
pub const MAX_ENUMERATION_CAP: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    /// `(-1, 0)`: a card of the first coordinate's color.
    Left,
    /// `(0, -1)`: a card of the second coordinate's color.
    Down,
}

/// A monotone lattice path from `start` to the origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanePath {
    start: (u32, u32),
    steps: Vec<Step>,
}

impl PlanePath {
    /// Validates that the steps contain exactly `start.0` lefts and `start.1` downs.
    pub fn new(start: (u32, u32), steps: Vec<Step>) -> Result<Self> {
        let lefts = steps.iter().filter(|s| **s == Step::Left).count();
        let downs = steps.len() - lefts;
        if lefts != start.0 as usize || downs != start.1 as usize {
            return Err(Error::domain(
                "PlanePath",
                format!("from {start:?} the path needs {} left and {} down steps, got {lefts} and {downs}", start.0, start.1),
            ));
        }
        Ok(Self { start, steps })
    }

    /// Builds the path from a top-first bitstring, `true` for a left step.
    pub fn from_bits(start: (u32, u32), bits: &[bool]) -> Result<Self> {
        Self::new(start, bits.iter().map(|&b| if b { Step::Left } else { Step::Down }).collect())
    }

    pub fn start(&self) -> (u32, u32) {
        self.start
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Every visited state, from `start` to `(0, 0)` inclusive.
    pub fn states(&self) -> Vec<(u32, u32)> {
        let mut state = self.start;
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push(state);
        for step in &self.steps {
            match step {
                Step::Left => state.0 -= 1,
                Step::Down => state.1 -= 1,
            }
            out.push(state);
        }
        out
    }

    /// Number of visited states `(j, j)` with `j >= 1`, the start included.
    pub fn equality_visits(&self) -> u32 {
        self.states().iter().filter(|(x, y)| x == y && *x >= 1).count() as u32
    }

    /// Whether every state satisfies `x >= y`.
    pub fn in_wedge(&self) -> bool {
        self.states().iter().all(|(x, y)| x >= y)
    }

    /// Probability of the path when balls are drawn uniformly without
    /// replacement: the product of `x / (x + y)` or `y / (x + y)` per step.
    pub fn urn_weight(&self) -> Rational {
        let mut weight = Rational::one();
        for (window, step) in self.states().windows(2).zip(&self.steps) {
            let (x, y) = window[0];
            let favorable = match step {
                Step::Left => x,
                Step::Down => y,
            };
            weight *= Rational::new(BigInt::from(favorable), BigInt::from(x + y));
        }
        weight
    }

    /// Probability of a wedge path under the card process, whose state is
    /// (majority remaining, minority remaining): from `(a, b)` with `a > b`
    /// it moves left with probability `a / (a + b)` and down otherwise; from a
    /// tie `(a, a)` it moves to `(a, a - 1)` with probability one.
    pub fn card_weight(&self) -> Result<Rational> {
        if !self.in_wedge() {
            return Err(Error::domain("card_weight", "the path leaves the wedge x >= y"));
        }
        let mut weight = Rational::one();
        for (window, step) in self.states().windows(2).zip(&self.steps) {
            let (x, y) = window[0];
            if x == y {
                continue; // forced move onto (x, x - 1)
            }
            let favorable = match step {
                Step::Left => x,
                Step::Down => y,
            };
            weight *= Rational::new(BigInt::from(favorable), BigInt::from(x + y));
        }
        Ok(weight)
    }
}

/// Folds a path into the wedge `x >= y >= 0` by reflecting every excursion
/// above the diagonal: each state `(x, y)` becomes `(max, min)`.
///
/// Wedge paths are fixed points, the map is idempotent, and the diagonal
/// visits (hence [`PlanePath::equality_visits`]) are unchanged.
pub fn mirror_map(path: &PlanePath) -> PlanePath {
    let states: Vec<(u32, u32)> = path.states().into_iter().map(|(x, y)| (x.max(y), x.min(y))).collect();
    let steps = states
        .windows(2)
        .map(|w| if w[1].0 < w[0].0 { Step::Left } else { Step::Down })
        .collect();
    PlanePath {
        start: states[0],
        steps,
    }
}

fn check_cap(what: &'static str, requested: u32, cap: u32) -> Result<()> {
    if cap > MAX_ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "enumeration cap setting",
            requested: cap.into(),
            cap: MAX_ENUMERATION_CAP.into(),
        });
    }
    if requested > cap {
        return Err(Error::CapExceeded {
            what,
            requested: requested.into(),
            cap: cap.into(),
        });
    }
    Ok(())
}

/// Calls `visit` on every bitstring with `ones` ones and `zeros` zeros, in
/// lexicographic order with `true` first.
fn for_each_arrangement(ones: u32, zeros: u32, visit: &mut impl FnMut(&[bool])) {
    fn go(ones: u32, zeros: u32, prefix: &mut Vec<bool>, visit: &mut impl FnMut(&[bool])) {
        if ones == 0 && zeros == 0 {
            visit(prefix);
            return;
        }
        if ones > 0 {
            prefix.push(true);
            go(ones - 1, zeros, prefix, visit);
            prefix.pop();
        }
        if zeros > 0 {
            prefix.push(false);
            go(ones, zeros - 1, prefix, visit);
            prefix.pop();
        }
    }
    go(ones, zeros, &mut Vec::with_capacity((ones + zeros) as usize), visit);
}

/// All urn paths from `(m1, m2)`: the full quadrant, with no mirroring.
pub fn urn_paths(deck: &DeckComposition, cap: u32) -> Result<Vec<PlanePath>> {
    check_cap("urn path enumeration deck size", deck.total(), cap)?;
    let start = (deck.m1(), deck.m2());
    let mut paths = Vec::new();
    for_each_arrangement(deck.m1(), deck.m2(), &mut |bits| {
        paths.push(PlanePath::from_bits(start, bits).expect("arrangement has the right step counts"));
    });
    Ok(paths)
}

/// Exact law of the number of tie states `(j, j)`, `j >= 1`, visited by the
/// urn while drawing without replacement from `m1` and `m2` balls.
///
/// Every path weight is built as a product of draw probabilities; each must
/// telescope to `1 / C(m1 + m2, m1)`, which is checked.
pub fn urn_equality_dist(deck: &DeckComposition, cap: u32) -> Result<DiscretePmf> {
    let expected = Rational::new(BigInt::one(), binomial(deck.total().into(), deck.m1().into()));
    let mut law: BTreeMap<i64, Rational> = BTreeMap::new();
    for path in urn_paths(deck, cap)? {
        let weight = path.urn_weight();
        if weight != expected {
            return Err(Error::Verification(format!("urn path weight {weight} differs from {expected}")));
        }
        *law.entry(path.equality_visits().into()).or_insert_with(Rational::zero) += weight;
    }
    DiscretePmf::new(law)
}

/// A walk of `+1` / `-1` steps starting at altitude zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyckWalk {
    steps: Vec<i8>,
}

impl DyckWalk {
    pub fn new(steps: Vec<i8>) -> Result<Self> {
        if steps.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::domain("DyckWalk", "steps must be +1 or -1"));
        }
        Ok(Self { steps })
    }

    /// The walk of a deck order, read bottom-up: `+1` for a minority card
    /// (a down step of the urn path), `-1` for a majority card.
    pub fn from_path(path: &PlanePath) -> Self {
        let steps = path
            .steps()
            .iter()
            .rev()
            .map(|s| if *s == Step::Down { 1 } else { -1 })
            .collect();
        Self { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_altitude(&self) -> i64 {
        self.steps.iter().map(|s| i64::from(*s)).sum()
    }

    /// `#{i >= 1 : partial sum after i steps = 0}`.
    pub fn returns_to_zero(&self) -> u32 {
        let mut altitude = 0i64;
        let mut returns = 0;
        for s in &self.steps {
            altitude += i64::from(*s);
            if altitude == 0 {
                returns += 1;
            }
        }
        returns
    }
}

/// Exact law of the returns to zero of a uniform walk with `n` steps and
/// final altitude `final_altitude`, over all `C(n, (n + h) / 2)` such walks.
pub fn dyck_return_dist(n: u32, final_altitude: i64, cap: u32) -> Result<DiscretePmf> {
    check_cap("Dyck walk length", n, cap)?;
    if final_altitude.unsigned_abs() > u64::from(n) || (i64::from(n) + final_altitude) % 2 != 0 {
        return Err(Error::domain(
            "dyck_return_dist",
            format!("need |h| <= n and n = h (mod 2); got n = {n}, h = {final_altitude}"),
        ));
    }
    let ups = ((i64::from(n) + final_altitude) / 2) as u32;
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    let mut total = 0u64;
    for_each_arrangement(ups, n - ups, &mut |bits| {
        let walk = DyckWalk {
            steps: bits.iter().map(|&up| if up { 1 } else { -1 }).collect(),
        };
        *counts.entry(walk.returns_to_zero().into()).or_insert(0) += 1;
        total += 1;
    });
    let total = BigInt::from(total);
    DiscretePmf::new(counts.into_iter().map(|(r, c)| (r, Rational::new(BigInt::from(c), total.clone()))))
}

/// Outcome of checking the mirror map on every urn path of one deck.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MirrorReport {
    pub deck: DeckComposition,
    /// Number of distinct wedge paths (all of them are hit).
    pub wedge_paths: usize,
    /// Number of urn paths enumerated.
    pub urn_paths: usize,
    /// Largest `G` over the wedge paths.
    pub max_equality_visits: u32,
}

/// Checks, for every wedge path `w` with `G(w) = k`: the fiber of
/// [`mirror_map`] over `w` has `2^k` urn paths, each of urn weight
/// `2^-k` times the card-process weight of `w`; the map fixes wedge paths,
/// is idempotent, preserves `G`, and reaches every wedge path.
pub fn verify_mirror_fibers(deck: &DeckComposition, cap: u32) -> Result<MirrorReport> {
    let fail = |msg: String| Err(Error::Verification(format!("mirror map on deck {deck}: {msg}")));
    let paths = urn_paths(deck, cap)?;
    let mut fibers: BTreeMap<PlanePath, Vec<&PlanePath>> = BTreeMap::new();
    for path in &paths {
        let image = mirror_map(path);
        if !image.in_wedge() {
            return fail(format!("image of {path:?} leaves the wedge"));
        }
        if mirror_map(&image) != image {
            return fail(format!("not idempotent at {path:?}"));
        }
        if image.equality_visits() != path.equality_visits() {
            return fail(format!("equality count changed at {path:?}"));
        }
        if path.in_wedge() && image != *path {
            return fail(format!("wedge path {path:?} is not fixed"));
        }
        fibers.entry(image).or_default().push(path);
    }
    let wedge_paths = paths.iter().filter(|p| p.in_wedge()).count();
    if fibers.len() != wedge_paths {
        return fail(format!("{} images for {wedge_paths} wedge paths", fibers.len()));
    }
    let mut max_equality_visits = 0;
    for (wedge, fiber) in &fibers {
        let k = wedge.equality_visits();
        max_equality_visits = max_equality_visits.max(k);
        if fiber.len() != 1usize << k {
            return fail(format!("fiber over {wedge:?} has {} paths, expected 2^{k}", fiber.len()));
        }
        let card = wedge.card_weight()?;
        let share = &card / Rational::from_integer(BigInt::one() << k as usize);
        if fiber.iter().any(|p| p.urn_weight() != share) {
            return fail(format!("fiber over {wedge:?} has a weight other than 2^-{k} P_C"));
        }
    }
    Ok(MirrorReport {
        deck: *deck,
        wedge_paths,
        urn_paths: paths.len(),
        max_equality_visits,
    })
}
