//! Seeded Monte Carlo play of the majority guesser, and goodness-of-fit
//! checks of empirical laws against exact ones.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`): stream `i` of seed
//! `s` is `ChaCha8Rng::seed_from_u64(s)` followed by `set_stream(i)`. Uniform
//! integers in `[0, n)` use Lemire's multiply-and-reject method on
//! `next_u64`, so draws carry no rounding bias; the tie coin is the top bit
//! of one `next_u64`.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::deck::DeckComposition;
use crate::error::{Error, Result};
use crate::oracles::GuessCounts;
use crate::pmf::{to_f64, DiscretePmf};

/// Largest accepted number of trials in one call.
pub const MAX_TRIALS: u64 = 1 << 40;

/// Default number of independent substreams.
pub const DEFAULT_STREAMS: u32 = 64;

/// Generator for substream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform integer in `[0, n)`, `n >= 1`, by Lemire's unbiased rejection.
pub fn uniform_below(rng: &mut impl RngCore, n: u64) -> u64 {
    assert!(n > 0, "uniform_below needs a positive bound");
    let mut product = u128::from(rng.next_u64()) * u128::from(n);
    if (product as u64) < n {
        let threshold = n.wrapping_neg() % n;
        while (product as u64) < threshold {
            product = u128::from(rng.next_u64()) * u128::from(n);
        }
    }
    (product >> 64) as u64
}

fn fair_coin(rng: &mut impl RngCore) -> bool {
    rng.next_u64() >> 63 == 1
}

/// One play of the majority guesser through a uniformly shuffled deck.
///
/// The state is kept as (majority remaining, minority remaining). The next
/// card is the majority color with probability `a / (a + b)`, drawn as a
/// uniform integer below `a + b` compared with `a`.
pub fn simulate_deck(deck: &DeckComposition, rng: &mut impl RngCore) -> GuessCounts {
    let (mut a, mut b) = (deck.m1(), deck.m2());
    let mut counts = GuessCounts::default();
    while a > 0 {
        if b == 0 {
            counts.t += a;
            break;
        }
        if a == b {
            counts.w += 1;
            if fair_coin(rng) {
                counts.p += 1;
            }
            // Whatever is drawn, the state becomes (a, a - 1) after relabeling.
            b -= 1;
            continue;
        }
        if uniform_below(rng, u64::from(a + b)) < u64::from(a) {
            counts.l += 1;
            a -= 1;
        } else {
            b -= 1;
        }
    }
    counts.c = counts.t + counts.l + counts.p;
    counts
}

/// Parameters of a batch of plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub deck: DeckComposition,
    pub trials: u64,
    pub seed: u64,
    pub streams: u32,
}

impl SimulationConfig {
    pub fn new(deck: DeckComposition, trials: u64, seed: u64) -> Self {
        Self {
            deck,
            trials,
            seed,
            streams: DEFAULT_STREAMS,
        }
    }

    pub fn with_streams(mut self, streams: u32) -> Self {
        self.streams = streams;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::parameter("trials", self.trials, "must be at least 1"));
        }
        if self.streams == 0 {
            return Err(Error::parameter("streams", self.streams, "must be at least 1"));
        }
        if self.trials > MAX_TRIALS {
            return Err(Error::CapExceeded {
                what: "simulation trials",
                requested: self.trials,
                cap: MAX_TRIALS,
            });
        }
        Ok(())
    }

    /// Trials assigned to `stream`: an even split with the remainder going
    /// to the lowest-numbered streams.
    fn trials_in_stream(&self, stream: u32) -> u64 {
        let streams = u64::from(self.streams);
        self.trials / streams + u64::from(u64::from(stream) < self.trials % streams)
    }
}

/// Empirical joint law of all counters, plus the number of plays that broke
/// a counter identity (always zero for a correct simulator).
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSummary {
    pub config: SimulationConfig,
    pub table: BTreeMap<GuessCounts, u64>,
    pub invariant_violations: u64,
}

/// Runs `config.trials` plays split over `config.streams` substreams.
///
/// Streams run in parallel, but the table is a sum of integer counts, so the
/// result depends only on `(deck, trials, seed, streams)`.
pub fn simulate_many(config: &SimulationConfig) -> Result<SimulationSummary> {
    config.validate()?;
    let deck = config.deck;
    let partials: Vec<(BTreeMap<GuessCounts, u64>, u64)> = (0..config.streams)
        .into_par_iter()
        .map(|stream| {
            let mut rng = stream_rng(config.seed, u64::from(stream));
            let mut table = BTreeMap::new();
            let mut violations = 0;
            for _ in 0..config.trials_in_stream(stream) {
                let counts = simulate_deck(&deck, &mut rng);
                if !counts.satisfies_invariants(&deck) {
                    violations += 1;
                }
                *table.entry(counts).or_insert(0u64) += 1;
            }
            (table, violations)
        })
        .collect();
    let mut table = BTreeMap::new();
    let mut invariant_violations = 0;
    for (partial, violations) in partials {
        invariant_violations += violations;
        for (counts, n) in partial {
            *table.entry(counts).or_insert(0) += n;
        }
    }
    Ok(SimulationSummary {
        config: *config,
        table,
        invariant_violations,
    })
}

/// Which counter to project an empirical table onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CounterName {
    T,
    L,
    P,
    W,
    C,
}

impl CounterName {
    pub const ALL: [CounterName; 5] = [CounterName::T, CounterName::L, CounterName::P, CounterName::W, CounterName::C];

    pub fn of(&self, counts: &GuessCounts) -> u32 {
        match self {
            CounterName::T => counts.t,
            CounterName::L => counts.l,
            CounterName::P => counts.p,
            CounterName::W => counts.w,
            CounterName::C => counts.c,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CounterName::T => "T",
            CounterName::L => "L",
            CounterName::P => "P",
            CounterName::W => "W",
            CounterName::C => "C",
        }
    }
}

impl SimulationSummary {
    pub fn histogram(&self, counter: CounterName) -> BTreeMap<i64, u64> {
        let mut hist = BTreeMap::new();
        for (counts, n) in &self.table {
            *hist.entry(i64::from(counter.of(counts))).or_insert(0) += n;
        }
        hist
    }

    /// Empirical `(W, T)` table keyed by `(k, l)`.
    pub fn joint_wt_histogram(&self) -> BTreeMap<(u32, u32), u64> {
        let mut hist = BTreeMap::new();
        for (counts, n) in &self.table {
            *hist.entry((counts.w, counts.t)).or_insert(0) += n;
        }
        hist
    }

    pub fn mean(&self, counter: CounterName) -> f64 {
        let total: f64 = self
            .table
            .iter()
            .map(|(counts, &n)| f64::from(counter.of(counts)) * n as f64)
            .sum();
        total / self.config.trials as f64
    }

    /// Empirical masses of one counter.
    pub fn frequencies(&self, counter: CounterName) -> BTreeMap<i64, f64> {
        let trials = self.config.trials as f64;
        self.histogram(counter)
            .into_iter()
            .map(|(v, n)| (v, n as f64 / trials))
            .collect()
    }
}

/// Minimum expected count per bin before adjacent bins are pooled.
pub const MIN_EXPECTED_PER_BIN: f64 = 5.0;

/// Pearson chi-square goodness-of-fit result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub degrees_of_freedom: u32,
    pub p_value: f64,
    /// Observations at values the exact law gives probability zero.
    pub impossible_observations: u64,
}

impl ChiSquareResult {
    /// Not rejected at level `alpha`, and no impossible value was observed.
    pub fn accepts(&self, alpha: f64) -> bool {
        self.impossible_observations == 0 && self.p_value >= alpha
    }
}

/// Pearson test of observed counts against exact probabilities.
///
/// Cells are taken in key order and pooled left to right until each pooled
/// cell expects at least [`MIN_EXPECTED_PER_BIN`] observations; a short final
/// run is merged into the previous cell.
pub fn chi_square_gof<K: Ord + Copy>(observed: &BTreeMap<K, u64>, expected: &BTreeMap<K, f64>) -> Result<ChiSquareResult> {
    let trials: u64 = observed.values().sum();
    if trials == 0 {
        return Err(Error::parameter("observed", 0, "needs at least one observation"));
    }
    let impossible_observations = observed
        .iter()
        .filter(|(key, _)| expected.get(key).is_none_or(|&p| p <= 0.0))
        .map(|(_, &n)| n)
        .sum();

    let n = trials as f64;
    let mut pooled: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let mut current = (0.0, 0.0);
    for (key, &p) in expected.iter().filter(|(_, &p)| p > 0.0) {
        current.0 += observed.get(key).copied().unwrap_or(0) as f64;
        current.1 += p * n;
        if current.1 >= MIN_EXPECTED_PER_BIN {
            pooled.push(current);
            current = (0.0, 0.0);
        }
    }
    if current.1 > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += current.0;
                last.1 += current.1;
            }
            None => pooled.push(current),
        }
    }
    let statistic: f64 = pooled.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let degrees_of_freedom = pooled.len().saturating_sub(1) as u32;
    let p_value = if degrees_of_freedom == 0 {
        1.0
    } else {
        ChiSquared::new(f64::from(degrees_of_freedom))
            .map_err(|e| Error::Verification(format!("chi-square law: {e}")))?
            .sf(statistic)
    };
    Ok(ChiSquareResult {
        statistic,
        degrees_of_freedom,
        p_value,
        impossible_observations,
    })
}

/// Goodness of fit of one simulated counter against its exact law.
pub fn chi_square_against(summary: &SimulationSummary, counter: CounterName, exact: &DiscretePmf) -> Result<ChiSquareResult> {
    let expected: BTreeMap<i64, f64> = exact.iter().map(|(v, p)| (v, to_f64(p))).collect();
    chi_square_gof(&summary.histogram(counter), &expected)
}
