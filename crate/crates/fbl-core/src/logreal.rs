// SPDX-License-Identifier: Apache-2.0
//! Nonnegative reals stored as their natural logarithm.
//!
//! Used for block lengths like `k^4 a^{eta k / 2}` and error bounds like
//! `exp(-l E)` that leave the f64 range long before the arithmetic stops
//! being meaningful. `-inf` encodes zero.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

/// Serializes as the natural log; zero and infinity, which JSON numbers
/// cannot carry, become the strings `"-inf"` and `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogReal {
    ln: f64,
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl LogReal {
    pub const ZERO: LogReal = LogReal { ln: f64::NEG_INFINITY };
    pub const ONE: LogReal = LogReal { ln: 0.0 };

    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "LogReal from NaN");
        LogReal { ln }
    }

    /// Panics on negative or NaN input.
    pub fn new(x: f64) -> Self {
        assert!(x >= 0.0, "LogReal requires a nonnegative value, got {x}");
        LogReal { ln: x.ln() }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    /// Lossy for magnitudes outside the f64 range (saturates to 0 or inf).
    pub fn to_f64(self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    pub fn powf(self, e: f64) -> Self {
        if self.is_zero() {
            return if e == 0.0 { Self::ONE } else { Self::ZERO };
        }
        LogReal::from_ln(self.ln * e)
    }

    /// `max(self - rhs, 0)`.
    pub fn saturating_sub(self, rhs: Self) -> Self {
        if rhs.ln >= self.ln {
            return Self::ZERO;
        }
        if rhs.is_zero() {
            return self;
        }
        LogReal::from_ln(self.ln + (-(rhs.ln - self.ln).exp()).ln_1p())
    }

    pub fn max(self, rhs: Self) -> Self {
        if self.ln >= rhs.ln {
            self
        } else {
            rhs
        }
    }

    pub fn min(self, rhs: Self) -> Self {
        if self.ln <= rhs.ln {
            self
        } else {
            rhs
        }
    }
}

impl Serialize for LogReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.ln.is_finite() {
            s.serialize_f64(self.ln)
        } else if self.ln > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for LogReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(LogReal { ln: x }),
            Repr::Str(s) if s == "-inf" => Ok(LogReal::ZERO),
            Repr::Str(s) if s == "inf" => Ok(LogReal { ln: f64::INFINITY }),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad log value {s}"))),
        }
    }
}

impl From<u64> for LogReal {
    fn from(v: u64) -> Self {
        LogReal::new(v as f64)
    }
}

impl Add for LogReal {
    type Output = LogReal;
    fn add(self, rhs: Self) -> Self {
        LogReal { ln: log_add_exp(self.ln, rhs.ln) }
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogReal { ln: self.ln + rhs.ln }
    }
}

impl Div for LogReal {
    type Output = LogReal;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "LogReal division by zero");
        if self.is_zero() {
            return Self::ZERO;
        }
        LogReal { ln: self.ln - rhs.ln }
    }
}

impl std::iter::Sum for LogReal {
    fn sum<I: Iterator<Item = LogReal>>(iter: I) -> Self {
        // Max-shifted accumulation keeps long sums accurate.
        let v: Vec<f64> = iter.map(|x| x.ln).collect();
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        if hi == f64::INFINITY {
            return LogReal { ln: f64::INFINITY };
        }
        let s: f64 = v.iter().map(|x| (x - hi).exp()).sum();
        LogReal { ln: hi + s.ln() }
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ln.abs() < 700.0 {
            write!(f, "{}", self.to_f64())
        } else {
            write!(f, "exp({})", self.ln)
        }
    }
}
