use super::{Family1D, Interval};
use crate::error::{Error, Result};
use crate::numerics::special::{normal_cdf, normal_sf, HALF_LN_2PI};

/// Finite mixture of gaussians `Σ w_k N(μ_k, σ_k²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    pub weights: Vec<f64>,
    pub mus: Vec<f64>,
    pub sigmas: Vec<f64>,
}

impl Mixture {
    pub fn new(weights: Vec<f64>, mus: Vec<f64>, sigmas: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        if n == 0 || mus.len() != n || sigmas.len() != n {
            return Err(Error::InvalidSpec("mixture needs equally many weights, means and sigmas".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0)) || sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidSpec("mixture weights and sigmas must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(Self { weights, mus, sigmas })
    }

    /// Component log-densities plus log-weights, and their log-sum-exp.
    fn log_terms(&self, x: f64) -> (Vec<f64>, f64) {
        let terms: Vec<f64> = (0..self.weights.len())
            .map(|k| {
                let z = (x - self.mus[k]) / self.sigmas[k];
                self.weights[k].ln() - 0.5 * z * z - HALF_LN_2PI - self.sigmas[k].ln()
            })
            .collect();
        let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln();
        (terms, lse)
    }

    /// Posterior component probabilities at `x`.
    pub fn responsibilities(&self, x: f64) -> Vec<f64> {
        let (terms, lse) = self.log_terms(x);
        terms.iter().map(|t| (t - lse).exp()).collect()
    }

    fn mean_sd(&self) -> (f64, f64) {
        let mean: f64 = self.weights.iter().zip(&self.mus).map(|(w, m)| w * m).sum();
        let second: f64 = (0..self.weights.len())
            .map(|k| self.weights[k] * (self.sigmas[k].powi(2) + self.mus[k].powi(2)))
            .sum();
        (mean, (second - mean * mean).sqrt())
    }
}

impl Family1D for Mixture {
    fn name(&self) -> String {
        let parts: Vec<String> = (0..self.weights.len())
            .map(|k| format!("{}*N({}, {})", self.weights[k], self.mus[k], self.sigmas[k]))
            .collect();
        format!("mixture[{}]", parts.join(" + "))
    }

    fn support(&self) -> Interval {
        Interval::REAL_LINE
    }

    fn params(&self) -> Vec<f64> {
        self.mus.clone()
    }

    fn log_density(&self, x: f64) -> f64 {
        self.log_terms(x).1
    }

    fn eta(&self, x: f64) -> f64 {
        let r = self.responsibilities(x);
        (0..r.len()).map(|k| r[k] * (x - self.mus[k]) / self.sigmas[k].powi(2)).sum()
    }

    fn chi(&self, x: f64) -> f64 {
        // χ = Σ r_k/σ_k² − Σ r_k a_k² + η², with a_k = (x − μ_k)/σ_k²
        let r = self.responsibilities(x);
        let mut eta = 0.0;
        let mut acc = 0.0;
        for k in 0..r.len() {
            let s2 = self.sigmas[k].powi(2);
            let a = (x - self.mus[k]) / s2;
            eta += r[k] * a;
            acc += r[k] / s2 - r[k] * a * a;
        }
        acc + eta * eta
    }

    fn cdf(&self, x: f64) -> Option<f64> {
        Some((0..self.weights.len()).map(|k| self.weights[k] * normal_cdf((x - self.mus[k]) / self.sigmas[k])).sum())
    }

    fn sf(&self, x: f64) -> Option<f64> {
        Some((0..self.weights.len()).map(|k| self.weights[k] * normal_sf((x - self.mus[k]) / self.sigmas[k])).sum())
    }

    fn location_scale(&self) -> (f64, f64) {
        self.mean_sd()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_matches_fd_of_eta() {
        let m = Mixture::new(vec![0.45, 0.55], vec![-2.0, 1.5], vec![0.6, 0.8]).unwrap();
        for x in [-4.0, -2.0, -0.3, 0.0, 1.1, 3.5] {
            let h = 1e-5;
            let fd = (m.eta(x + h) - m.eta(x - h)) / (2.0 * h);
            assert!((m.chi(x) - fd).abs() < 1e-6 * (1.0 + fd.abs()), "{x}");
        }
    }

    #[test]
    fn far_tail_is_finite() {
        let m = Mixture::new(vec![0.5, 0.5], vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert!(m.log_density(100.0).is_finite());
        // the wider component dominates the far tail
        assert!((m.eta(100.0) - 99.0 / 4.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(Mixture::new(vec![0.5, 0.6], vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
    }
}
