//! Parametric families used on the inference side.

use super::{ParametricFamily, ScoreFn};
use crate::error::{Error, Result};
use crate::families::{ExponentialFamily, Family1D, Mixture, Normal, Uniform};
use crate::numerics::QuadratureSpec;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// `N(θ, σ²)` with known σ.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalLocation {
    pub sigma: f64,
    pub mu0: f64,
}

impl NormalLocation {
    pub fn new(mu0: f64, sigma: f64) -> Self {
        Self { sigma, mu0 }
    }
}

impl ParametricFamily for NormalLocation {
    fn name(&self) -> String {
        format!("normal-location(σ={})", self.sigma)
    }

    fn dim(&self) -> usize {
        1
    }

    fn nominal(&self) -> Vec<f64> {
        vec![self.mu0]
    }

    fn valid(&self, theta: &[f64]) -> bool {
        theta[0].is_finite()
    }

    fn member(&self, theta: &[f64]) -> Result<Arc<dyn Family1D>> {
        Ok(Arc::new(Normal::new(theta[0], self.sigma)?))
    }

    fn score_fn(&self, theta: &[f64]) -> Result<ScoreFn> {
        let (mu, s2) = (theta[0], self.sigma * self.sigma);
        Ok(Arc::new(move |x| vec![-(x - mu) / s2]))
    }

    fn mle_solver(&self, outcomes: &[f64]) -> Option<Result<Vec<f64>>> {
        Some(Ok(vec![mean(outcomes)]))
    }
}

/// `N(μ, σ²)` with θ = (μ, σ).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalLocationScale {
    pub mu0: f64,
    pub sigma0: f64,
}

impl NormalLocationScale {
    pub fn new(mu0: f64, sigma0: f64) -> Self {
        Self { mu0, sigma0 }
    }
}

impl ParametricFamily for NormalLocationScale {
    fn name(&self) -> String {
        "normal-location-scale".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn nominal(&self) -> Vec<f64> {
        vec![self.mu0, self.sigma0]
    }

    fn valid(&self, theta: &[f64]) -> bool {
        theta[0].is_finite() && theta[1] > 0.0 && theta[1].is_finite()
    }

    fn member(&self, theta: &[f64]) -> Result<Arc<dyn Family1D>> {
        Ok(Arc::new(Normal::new(theta[0], theta[1])?))
    }

    fn score_fn(&self, theta: &[f64]) -> Result<ScoreFn> {
        let (mu, s) = (theta[0], theta[1]);
        Ok(Arc::new(move |x| {
            let d = x - mu;
            vec![-d / (s * s), 1.0 / s - d * d / (s * s * s)]
        }))
    }

    fn mle_solver(&self, outcomes: &[f64]) -> Option<Result<Vec<f64>>> {
        let mu = mean(outcomes);
        let var = outcomes.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / outcomes.len() as f64;
        Some(if var > 0.0 {
            Ok(vec![mu, var.sqrt()])
        } else {
            Err(Error::Domain("σ̂ = 0: outcomes have no spread".into()))
        })
    }
}

/// Gaussian mixture with fixed weights and widths; θ are the component means.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureMeans {
    pub weights: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub mus0: Vec<f64>,
}

impl MixtureMeans {
    pub fn new(mixture: &Mixture) -> Self {
        Self { weights: mixture.weights.clone(), sigmas: mixture.sigmas.clone(), mus0: mixture.mus.clone() }
    }

    fn mixture(&self, theta: &[f64]) -> Result<Mixture> {
        Mixture::new(self.weights.clone(), theta.to_vec(), self.sigmas.clone())
    }
}

impl ParametricFamily for MixtureMeans {
    fn name(&self) -> String {
        format!("mixture-means(w={:?}, σ={:?})", self.weights, self.sigmas)
    }

    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn nominal(&self) -> Vec<f64> {
        self.mus0.clone()
    }

    fn valid(&self, theta: &[f64]) -> bool {
        theta.iter().all(|t| t.is_finite())
    }

    fn member(&self, theta: &[f64]) -> Result<Arc<dyn Family1D>> {
        Ok(Arc::new(self.mixture(theta)?))
    }

    fn score_fn(&self, theta: &[f64]) -> Result<ScoreFn> {
        let mix = self.mixture(theta)?;
        Ok(Arc::new(move |x| {
            let r = mix.responsibilities(x);
            (0..r.len()).map(|k| -r[k] * (x - mix.mus[k]) / (mix.sigmas[k] * mix.sigmas[k])).collect()
        }))
    }

    /// Sample quantiles at the midpoints of the cumulative weights, then the
    /// nominal means.
    fn mle_starts(&self, outcomes: &[f64]) -> Vec<Vec<f64>> {
        let mut sorted = outcomes.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut acc = 0.0;
        let quantiles = self
            .weights
            .iter()
            .map(|w| {
                let p = acc + 0.5 * w;
                acc += w;
                sorted[((p * sorted.len() as f64) as usize).min(sorted.len() - 1)]
            })
            .collect();
        vec![quantiles, self.nominal()]
    }
}

/// Polynomial exponential family in its natural parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpFamilyNatural {
    pub theta0: Vec<f64>,
    pub spec: QuadratureSpec,
}

impl ExpFamilyNatural {
    pub fn new(theta0: Vec<f64>) -> Self {
        Self { theta0, spec: QuadratureSpec::default() }
    }
}

fn statistics_mean(values: &[f64], k: usize) -> Vec<f64> {
    let mut acc = vec![0.0; k];
    for &x in values {
        let mut p = x;
        for a in acc.iter_mut() {
            *a += p;
            p *= x;
        }
    }
    acc.iter().map(|a| a / values.len() as f64).collect()
}

impl ParametricFamily for ExpFamilyNatural {
    fn name(&self) -> String {
        format!("expfam-natural(dim={})", self.theta0.len())
    }

    fn dim(&self) -> usize {
        self.theta0.len()
    }

    fn nominal(&self) -> Vec<f64> {
        self.theta0.clone()
    }

    fn valid(&self, theta: &[f64]) -> bool {
        theta.iter().all(|t| t.is_finite()) && theta[theta.len() - 1] > 0.0
    }

    fn member(&self, theta: &[f64]) -> Result<Arc<dyn Family1D>> {
        Ok(Arc::new(ExponentialFamily::new(theta.to_vec())?))
    }

    /// `υ_α = A_α − ⟨A_α⟩`, since `∂_α P = ⟨A_α⟩`.
    fn score_fn(&self, theta: &[f64]) -> Result<ScoreFn> {
        let ef = ExponentialFamily::new(theta.to_vec())?;
        let (mean, _) = ef.moments(&self.spec);
        Ok(Arc::new(move |x| ef.statistics(x).iter().zip(&mean).map(|(a, m)| a - m).collect()))
    }

    /// Newton iteration on the concave log-likelihood
    /// `m·P(θ) − θ·ΣA`, i.e. moment matching `⟨A⟩_θ̂ = (1/m)ΣA`.
    fn mle_solver(&self, outcomes: &[f64]) -> Option<Result<Vec<f64>>> {
        let k = self.dim();
        let target = statistics_mean(outcomes, k);
        let loglik = |ef: &ExponentialFamily| {
            ef.log_normalizer() - ef.theta().iter().zip(&target).map(|(t, a)| t * a).sum::<f64>()
        };
        let mut ef = match ExponentialFamily::new(self.theta0.clone()) {
            Ok(e) => e,
            Err(e) => return Some(Err(e)),
        };
        let mut gap = f64::INFINITY;
        for _ in 0..100 {
            let (mean, cov) = ef.moments(&self.spec);
            let resid: Vec<f64> = mean.iter().zip(&target).map(|(m, a)| m - a).collect();
            gap = resid.iter().map(|r| r * r).sum::<f64>().sqrt();
            if gap < 1e-10 * (1.0 + target.iter().map(|a| a.abs()).fold(0.0, f64::max)) {
                return Some(Ok(ef.theta().to_vec()));
            }
            let c = DMatrix::from_fn(k, k, |i, j| cov[i][j]);
            let Some(step) = c.cholesky().map(|ch| ch.solve(&DVector::from_vec(resid))) else {
                return Some(Err(Error::Singular("sufficient-statistic covariance".into())));
            };
            let l0 = loglik(&ef);
            let mut t = 1.0;
            let mut next = None;
            for _ in 0..50 {
                let cand: Vec<f64> = ef.theta().iter().zip(step.iter()).map(|(a, b)| a + t * b).collect();
                if self.valid(&cand) {
                    if let Ok(e) = ExponentialFamily::new(cand) {
                        if loglik(&e) >= l0 - 1e-14 * l0.abs() {
                            next = Some(e);
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
            match next {
                Some(e) => ef = e,
                None => break,
            }
        }
        Some(Err(Error::NonConvergence { what: "exponential-family moment matching".into(), estimate: loglik(&ef), error: gap }))
    }
}

/// Uniform on `[θ − w/2, θ + w/2]`. The support moves with θ, so the
/// regular inference theory does not apply.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformLocation {
    pub width: f64,
    pub center0: f64,
}

impl UniformLocation {
    pub fn new(center0: f64, width: f64) -> Self {
        Self { width, center0 }
    }
}

impl ParametricFamily for UniformLocation {
    fn name(&self) -> String {
        format!("uniform-location(w={})", self.width)
    }

    fn dim(&self) -> usize {
        1
    }

    fn nominal(&self) -> Vec<f64> {
        vec![self.center0]
    }

    fn valid(&self, theta: &[f64]) -> bool {
        theta[0].is_finite()
    }

    fn support_depends_on_theta(&self) -> bool {
        true
    }

    fn member(&self, theta: &[f64]) -> Result<Arc<dyn Family1D>> {
        Ok(Arc::new(Uniform::new(theta[0] - 0.5 * self.width, theta[0] + 0.5 * self.width)?))
    }

    // zero in the interior, undefined on the boundary
    fn score_fn(&self, _theta: &[f64]) -> Result<ScoreFn> {
        Ok(Arc::new(|_| vec![0.0]))
    }

    fn mle_solver(&self, outcomes: &[f64]) -> Option<Result<Vec<f64>>> {
        let lo = outcomes.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = outcomes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Ok(vec![0.5 * (lo + hi)]))
    }
}
