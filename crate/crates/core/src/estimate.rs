//! A value paired with an absolute error bound, propagated to first order.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

impl Estimate {
    pub fn new(value: f64, err: f64) -> Self {
        Self { value, err: err.abs() }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, err: 0.0 }
    }

    pub fn rel_err(&self) -> f64 {
        if self.value == 0.0 {
            if self.err == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.err / self.value.abs()
        }
    }

    /// `self^e` for a nonnegative value.
    pub fn powf(self, e: f64) -> Self {
        let v = self.value.max(0.0).powf(e);
        Self::new(v, v * e.abs() * self.rel_err())
    }

    pub fn mul(self, o: Estimate) -> Self {
        let v = self.value * o.value;
        Self::new(v, (self.err * o.value).abs() + (o.err * self.value).abs())
    }

    pub fn div(self, o: Estimate) -> Self {
        let v = self.value / o.value;
        Self::new(v, v.abs() * (self.rel_err() + o.rel_err()))
    }

    pub fn scale(self, c: f64) -> Self {
        Self::new(self.value * c, self.err * c.abs())
    }
}

/// Quotient with the convention `0/0 = 1`, used when both sides of a check vanish.
pub fn safe_ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 && rhs == 0.0 {
        1.0
    } else if rhs == 0.0 {
        f64::INFINITY.copysign(lhs)
    } else {
        lhs / rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_propagates_relative_error() {
        let e = Estimate::new(4.0, 0.04).powf(0.5);
        assert!((e.value - 2.0).abs() < 1e-15);
        assert!((e.rel_err() - 0.005).abs() < 1e-15);
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(safe_ratio(0.0, 0.0), 1.0);
        assert!(safe_ratio(1.0, 0.0).is_infinite());
        assert_eq!(safe_ratio(1.0, 4.0), 0.25);
    }
}
