use super::{Family1D, Interval};
use crate::error::{Error, Result};

/// Uniform density on `[lo, hi]`.
///
/// Its density does not vanish at the boundary, so it fails the decay
/// conditions the fluctuation theorems rely on; the chart construction still
/// applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    pub lo: f64,
    pub hi: f64,
}

impl Uniform {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidSpec(format!("uniform needs finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl Family1D for Uniform {
    fn name(&self) -> String {
        format!("uniform[{}, {}]", self.lo, self.hi)
    }

    fn support(&self) -> Interval {
        Interval::new(self.lo, self.hi)
    }

    fn params(&self) -> Vec<f64> {
        vec![self.lo, self.hi]
    }

    fn log_density(&self, x: f64) -> f64 {
        if x >= self.lo && x <= self.hi {
            -self.width().ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn eta(&self, _x: f64) -> f64 {
        0.0
    }

    fn chi(&self, _x: f64) -> f64 {
        0.0
    }

    fn cdf(&self, x: f64) -> Option<f64> {
        Some(((x - self.lo) / self.width()).clamp(0.0, 1.0))
    }

    fn sf(&self, x: f64) -> Option<f64> {
        Some(((self.hi - x) / self.width()).clamp(0.0, 1.0))
    }

    fn quantile(&self, p: f64) -> Option<f64> {
        Some(self.lo + p * self.width())
    }

    fn quantile_upper(&self, q: f64) -> Option<f64> {
        Some(self.hi - q * self.width())
    }
}
