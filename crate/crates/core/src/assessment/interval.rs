use std::ops::Add;

use serde::{Deserialize, Serialize};

/// Bounds on a utility value. A point interval means complete data; missing
/// measurements widen it up to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityInterval {
    pub lo: f64,
    pub hi: f64,
}

impl UtilityInterval {
    pub const UNKNOWN: UtilityInterval = UtilityInterval { lo: 0.0, hi: 1.0 };
    pub const ZERO: UtilityInterval = UtilityInterval { lo: 0.0, hi: 0.0 };

    pub fn point(u: f64) -> Self {
        UtilityInterval { lo: u, hi: u }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        (self.lo + self.hi) / 2.0
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, u: f64) -> bool {
        self.lo <= u && u <= self.hi
    }

    /// `[1 - hi, 1 - lo]`: the interval seen through a negative impact.
    pub fn complement(&self) -> Self {
        UtilityInterval { lo: 1.0 - self.hi, hi: 1.0 - self.lo }
    }

    pub fn scale(&self, w: f64) -> Self {
        UtilityInterval { lo: w * self.lo, hi: w * self.hi }
    }

    /// Clips rounding overshoot of a weighted sum back into `[0, 1]`.
    pub(crate) fn clamp_unit(self) -> Self {
        let lo = self.lo.clamp(0.0, 1.0);
        UtilityInterval { lo, hi: self.hi.clamp(lo, 1.0) }
    }
}

impl Add for UtilityInterval {
    type Output = UtilityInterval;

    fn add(self, rhs: Self) -> Self {
        UtilityInterval { lo: self.lo + rhs.lo, hi: self.hi + rhs.hi }
    }
}
