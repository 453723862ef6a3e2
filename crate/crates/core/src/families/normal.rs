use super::{Family1D, Interval};
use crate::error::{Error, Result};
use crate::numerics::special::{
    normal_cdf, normal_quantile, normal_quantile_approx, normal_quantile_upper, normal_sf, HALF_LN_2PI,
};

/// Gaussian `N(μ, σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    pub mu: f64,
    pub sigma: f64,
}

impl Normal {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
            return Err(Error::InvalidSpec(format!("normal needs finite mu and sigma > 0, got ({mu}, {sigma})")));
        }
        Ok(Self { mu, sigma })
    }

    pub fn standard() -> Self {
        Self { mu: 0.0, sigma: 1.0 }
    }

    fn z(&self, x: f64) -> f64 {
        (x - self.mu) / self.sigma
    }
}

impl Family1D for Normal {
    fn name(&self) -> String {
        format!("normal({}, {})", self.mu, self.sigma)
    }

    fn support(&self) -> Interval {
        Interval::REAL_LINE
    }

    fn params(&self) -> Vec<f64> {
        vec![self.mu, self.sigma]
    }

    fn log_density(&self, x: f64) -> f64 {
        let z = self.z(x);
        -0.5 * z * z - HALF_LN_2PI - self.sigma.ln()
    }

    fn eta(&self, x: f64) -> f64 {
        (x - self.mu) / (self.sigma * self.sigma)
    }

    fn chi(&self, _x: f64) -> f64 {
        1.0 / (self.sigma * self.sigma)
    }

    fn cdf(&self, x: f64) -> Option<f64> {
        Some(normal_cdf(self.z(x)))
    }

    fn sf(&self, x: f64) -> Option<f64> {
        Some(normal_sf(self.z(x)))
    }

    fn quantile(&self, p: f64) -> Option<f64> {
        Some(self.mu + self.sigma * normal_quantile(p))
    }

    fn quantile_upper(&self, q: f64) -> Option<f64> {
        Some(self.mu + self.sigma * normal_quantile_upper(q))
    }

    // relative error ~1e-9, far below Monte Carlo noise
    fn sample_quantile(&self, p: f64) -> Option<f64> {
        Some(self.mu + self.sigma * normal_quantile_approx(p))
    }

    fn location_scale(&self) -> (f64, f64) {
        (self.mu, self.sigma)
    }
}
