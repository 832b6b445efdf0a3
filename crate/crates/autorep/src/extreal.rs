//! Extended real values in `]-inf, +inf]`.
//!
//! Proper convex functions never take the value `-inf`, so a single
//! distinguished `+inf` element is enough. Indicator arithmetic has to be
//! exact, which rules out large floating-point sentinels.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

/// A finite real number or `+inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// The finite value; panics on `+inf`.
    pub fn unwrap_finite(self) -> f64 {
        self.finite().expect("expected a finite extended real")
    }

    /// Maps the finite case, leaving `+inf` fixed.
    pub fn map<F: FnOnce(f64) -> f64>(self, f: F) -> ExtReal {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(f(v)),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        debug_assert!(!v.is_nan(), "NaN is not an extended real");
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(v)
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: f64) -> ExtReal {
        self + ExtReal::Finite(rhs)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &ExtReal) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

/// Absolute gap between two extended reals: zero when both are `+inf`,
/// `None` when exactly one side is `+inf`.
pub fn finite_gap(a: ExtReal, b: ExtReal) -> Option<f64> {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => Some((x - y).abs()),
        (ExtReal::PosInf, ExtReal::PosInf) => Some(0.0),
        _ => None,
    }
}
