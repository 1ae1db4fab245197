use std::fmt;

use crate::error::{Error, Result};

/// A two-color deck with `m1` majority cards and `m2` minority cards.
///
/// The library always works in the canonical orientation `m1 >= m2`; use
/// [`DeckComposition::canonical`] to accept the colors in either order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeckComposition {
    m1: u32,
    m2: u32,
}

impl DeckComposition {
    /// Rejects `m2 > m1`.
    pub fn new(m1: u32, m2: u32) -> Result<Self> {
        if m2 > m1 {
            return Err(Error::InvalidDeck {
                m1: m1.into(),
                m2: m2.into(),
            });
        }
        Ok(Self { m1, m2 })
    }

    /// Builds the canonical deck from two color counts given in any order.
    /// The flag is `true` when the colors were swapped.
    pub fn canonical(first: u32, second: u32) -> (Self, bool) {
        if second > first {
            (Self { m1: second, m2: first }, true)
        } else {
            (Self { m1: first, m2: second }, false)
        }
    }

    pub fn m1(&self) -> u32 {
        self.m1
    }

    pub fn m2(&self) -> u32 {
        self.m2
    }

    /// Total number of cards `M = m1 + m2`.
    pub fn total(&self) -> u32 {
        self.m1 + self.m2
    }

    /// Imbalance `d = m1 - m2`.
    pub fn difference(&self) -> u32 {
        self.m1 - self.m2
    }

    /// Every canonical deck with `1 <= m1 + m2 <= max_total`, ordered by total then `m1`.
    pub fn all_up_to(max_total: u32) -> impl Iterator<Item = DeckComposition> {
        (1..=max_total).flat_map(|total| {
            (total.div_ceil(2)..=total).map(move |m1| DeckComposition { m1, m2: total - m1 })
        })
    }
}

impl fmt::Display for DeckComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m1, self.m2)
    }
}
