use super::{Family1D, Interval};
use crate::error::{Error, Result};

/// Symmetric triangular density `ρ = (a − |I|)/a²` on `[−a, a]`.
///
/// The apex is a kink: η and χ are taken from the right there, and the apex
/// is reported as a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub a: f64,
}

impl Triangle {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidSpec(format!("triangle needs a > 0, got {a}")));
        }
        Ok(Self { a })
    }
}

impl Family1D for Triangle {
    fn name(&self) -> String {
        format!("triangle({})", self.a)
    }

    fn support(&self) -> Interval {
        Interval::new(-self.a, self.a)
    }

    fn params(&self) -> Vec<f64> {
        vec![self.a]
    }

    fn log_density(&self, x: f64) -> f64 {
        let r = self.a - x.abs();
        if r >= 0.0 {
            r.ln() - 2.0 * self.a.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn density(&self, x: f64) -> f64 {
        ((self.a - x.abs()) / (self.a * self.a)).max(0.0)
    }

    fn eta(&self, x: f64) -> f64 {
        let sign = if x < 0.0 { -1.0 } else { 1.0 };
        sign / (self.a - x.abs())
    }

    fn chi(&self, x: f64) -> f64 {
        (self.a - x.abs()).powi(-2)
    }

    fn cdf(&self, x: f64) -> Option<f64> {
        let a2 = 2.0 * self.a * self.a;
        Some(if x <= -self.a {
            0.0
        } else if x < 0.0 {
            (self.a + x).powi(2) / a2
        } else if x < self.a {
            1.0 - (self.a - x).powi(2) / a2
        } else {
            1.0
        })
    }

    fn sf(&self, x: f64) -> Option<f64> {
        self.cdf(-x)
    }

    fn quantile(&self, p: f64) -> Option<f64> {
        Some(if p <= 0.5 {
            -self.a + self.a * (2.0 * p).sqrt()
        } else {
            self.a - self.a * (2.0 * (1.0 - p)).sqrt()
        })
    }

    fn quantile_upper(&self, q: f64) -> Option<f64> {
        self.quantile(q).map(|x| -x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0]
    }
}
