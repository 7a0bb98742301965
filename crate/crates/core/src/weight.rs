//! Extended integer weights in `Z ∪ {-inf, +inf}`.

use std::fmt;
use std::ops::Add;

/// Weight of a monotonicity graph edge. An edge `x -k-> y` encodes `x - y >= k`.
///
/// The derived order is the natural one: `NegInf < Finite(_) < PosInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    /// No constraint between the two endpoints.
    NegInf,
    Finite(i64),
    /// Contradiction: no valuation satisfies the edge.
    PosInf,
}

impl Weight {
    pub const ZERO: Weight = Weight::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Weight::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Weight::Finite(k) => Some(k),
            _ => None,
        }
    }
}

impl From<i64> for Weight {
    fn from(k: i64) -> Self {
        Weight::Finite(k)
    }
}

/// Path concatenation. `-inf` absorbs everything, including `+inf`: a path
/// through a missing edge constrains nothing.
impl Add for Weight {
    type Output = Weight;

    #[inline]
    fn add(self, rhs: Weight) -> Weight {
        match (self, rhs) {
            (Weight::NegInf, _) | (_, Weight::NegInf) => Weight::NegInf,
            (Weight::PosInf, _) | (_, Weight::PosInf) => Weight::PosInf,
            (Weight::Finite(a), Weight::Finite(b)) => Weight::Finite(a.saturating_add(b)),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::NegInf => f.write_str("-inf"),
            Weight::Finite(k) => write!(f, "{k}"),
            Weight::PosInf => f.write_str("+inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_extended_integer_order() {
        assert!(Weight::NegInf < Weight::Finite(i64::MIN));
        assert!(Weight::Finite(-3) < Weight::Finite(2));
        assert!(Weight::Finite(i64::MAX) < Weight::PosInf);
    }

    #[test]
    fn addition_absorption() {
        assert_eq!(Weight::NegInf + Weight::Finite(5), Weight::NegInf);
        assert_eq!(Weight::NegInf + Weight::PosInf, Weight::NegInf);
        assert_eq!(Weight::PosInf + Weight::NegInf, Weight::NegInf);
        assert_eq!(Weight::PosInf + Weight::Finite(-7), Weight::PosInf);
        assert_eq!(Weight::Finite(2) + Weight::Finite(-7), Weight::Finite(-5));
    }
}
