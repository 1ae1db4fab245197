//! Independent ground truth for the closed forms in [`crate::exact`]:
//! exhaustive play over all deck orders, the `Phi` recurrence, and
//! coefficient extraction from the generating function.

pub mod enumerate;
pub mod phi;
pub mod series;

pub use enumerate::{enumerate_decks, EnumeratedLaw, GuessCounts, DEFAULT_ENUMERATION_CAP};
pub use phi::{phi_recurrence, PhiTable, TrivariatePolynomial};
pub use series::{series_fhat, FhatSeries, FormalSeries, DEFAULT_COEFFICIENT_BUDGET};
