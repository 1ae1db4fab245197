//! Exact distributions, moments, limit laws and cross-model bijections for
//! two-color card guessing with complete information.
//!
//! A deck holds `m1 >= m2` cards of two colors. The guesser always names the
//! majority color (a fair coin at ties). The counters of interest are
//! `T` (certified guesses), `L` (more-likely guesses), `P` (pure-luck guesses),
//! `W` (tie visits) and `C = T + L + P`.
//!
//! * [`exact`]: closed-form laws of `(W, T)`, their marginals, CDFs, `L`, `P` and `C`.
//! * [`oracles`]: exhaustive enumeration, the `Phi` recurrence and generating-function
//!   coefficient extraction, used to check the closed forms.
//! * [`moments`]: factorial and raw moments, with their growth on balanced decks.
//! * [`limits`]: limit laws per regime, distances to them and the joint central correlation.
//! * [`simulate`]: seeded, reproducible parallel Monte Carlo with goodness-of-fit tests.
//! * [`combinatorial`]: urn paths, Dyck walks and the mirror map.
//!
//! Probabilities are exact rationals ([`Rational`]); limit-law quantities are `f64`.

pub mod combinatorial;
pub mod deck;
pub mod error;
pub mod exact;
pub mod limits;
pub mod moments;
pub mod oracles;
pub mod pmf;
pub mod simulate;

pub use deck::DeckComposition;
pub use error::{Error, Result};
pub use exact::{
    binomial, joint_cdf_wt, joint_pmf_wt, marginal_t, marginal_w, one_sided_cdf_wt, pmf_c, pmf_l,
    pmf_p_from_w,
};
pub use combinatorial::PlanePath;
pub use limits::{LimitLaw, RegimeSpec};
pub use oracles::GuessCounts;
pub use pmf::{DiscretePmf, JointPmf, Rational};
pub use simulate::SimulationConfig;
