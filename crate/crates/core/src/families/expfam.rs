use super::{Family1D, Interval};
use crate::error::{Error, Result};
use crate::numerics::{integrate_vec, linspace, QuadratureSpec};

/// Exponential family with polynomial sufficient statistics
/// `A_α(I) = I^(α+1)` and zero carrier:
///
/// `ρ(I|θ) = exp[P(θ) − Σ_α θ_α I^(α+1)]`.
///
/// The highest-degree statistic must be even with a positive natural
/// parameter so the density is normalizable on ℝ.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialFamily {
    theta: Vec<f64>,
    log_normalizer: f64,
    range: (f64, f64),
    // interior cuts spread over the bulk of the mass
    breaks: Vec<f64>,
    mean: f64,
    sd: f64,
}

fn exponent(theta: &[f64], x: f64) -> f64 {
    // −Σ θ_α x^(α+1) by Horner
    let mut acc = 0.0;
    for &t in theta.iter().rev() {
        acc = acc * x + t;
    }
    -acc * x
}

/// Interval outside which the unnormalized density is below e^-800 of its
/// peak, the peak exponent, and cuts covering the region within e^-40 of the
/// peak so quadrature cannot step over a narrow bulk.
fn effective_range(theta: &[f64]) -> (f64, f64, f64, Vec<f64>) {
    let mut r = 1.0;
    loop {
        let grid = linspace(-r, r, 4001);
        let e: Vec<f64> = grid.iter().map(|&x| exponent(theta, x)).collect();
        let emax = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let edge = e[0].max(e[4000]);
        if edge < emax - 800.0 || r > 1e6 {
            let inside: Vec<f64> = grid.iter().zip(&e).filter(|(_, &v)| v > emax - 40.0).map(|(&x, _)| x).collect();
            let (a, b) = (inside[0], inside[inside.len() - 1]);
            let mut breaks = linspace(a, b, 33);
            breaks.retain(|x| *x > -r && *x < r);
            return (-r, r, emax, breaks);
        }
        r *= 2.0;
    }
}

impl ExponentialFamily {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        let k = theta.len();
        if k < 2 || k % 2 != 0 || !(theta[k - 1] > 0.0) || theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "exponential family needs an even number of natural parameters with a positive last one, got {theta:?}"
            )));
        }
        let (lo, hi, emax, breaks) = effective_range(&theta);
        let spec = QuadratureSpec::with_tolerances(1e-13, 0.0);
        let r = integrate_vec(
            |x, o: &mut [f64]| {
                let w = (exponent(&theta, x) - emax).exp();
                o[0] = w;
                o[1] = x * w;
                o[2] = x * x * w;
            },
            3,
            lo,
            hi,
            &breaks,
            &spec,
        );
        let z = r.values[0];
        let mean = r.values[1] / z;
        let var = r.values[2] / z - mean * mean;
        Ok(Self { log_normalizer: -(emax + z.ln()), theta, range: (lo, hi), breaks, mean, sd: var.sqrt() })
    }

    /// Natural parameters θ.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Gaussian-style log-normalizer `P(θ)`.
    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    /// Sufficient statistics `A_α(I)`.
    pub fn statistics(&self, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.theta.len());
        let mut p = x;
        for _ in 0..self.theta.len() {
            out.push(p);
            p *= x;
        }
        out
    }

    /// Interval carrying all but e^-800 of the mass.
    pub fn effective_support(&self) -> (f64, f64) {
        self.range
    }

    /// `⟨A_α⟩` and `Cov(A_α, A_β)`; these equal `∂_α P` and `−∂_α∂_β P`.
    pub fn moments(&self, spec: &QuadratureSpec) -> (Vec<f64>, Vec<Vec<f64>>) {
        let k = self.theta.len();
        let n = k + k * (k + 1) / 2;
        let r = integrate_vec(
            |x, o: &mut [f64]| {
                let w = self.density(x);
                let a = self.statistics(x);
                o[..k].copy_from_slice(&a);
                let mut idx = k;
                for i in 0..k {
                    for j in i..k {
                        o[idx] = a[i] * a[j];
                        idx += 1;
                    }
                }
                o.iter_mut().for_each(|v| *v *= w);
            },
            n,
            self.range.0,
            self.range.1,
            &self.breaks,
            spec,
        );
        let mean = r.values[..k].to_vec();
        let mut cov = vec![vec![0.0; k]; k];
        let mut idx = k;
        for i in 0..k {
            for j in i..k {
                let c = r.values[idx] - mean[i] * mean[j];
                cov[i][j] = c;
                cov[j][i] = c;
                idx += 1;
            }
        }
        (mean, cov)
    }

    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        Self::new(theta)
    }
}

impl Family1D for ExponentialFamily {
    fn name(&self) -> String {
        format!("expfam{:?}", self.theta)
    }

    fn support(&self) -> Interval {
        Interval::REAL_LINE
    }

    fn params(&self) -> Vec<f64> {
        self.theta.clone()
    }

    fn log_density(&self, x: f64) -> f64 {
        self.log_normalizer + exponent(&self.theta, x)
    }

    fn eta(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (a, &t) in self.theta.iter().enumerate().rev() {
            acc = acc * x + (a + 1) as f64 * t;
        }
        acc
    }

    fn chi(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (a, &t) in self.theta.iter().enumerate().skip(1).rev() {
            acc = acc * x + ((a + 1) * a) as f64 * t;
        }
        acc
    }

    fn location_scale(&self) -> (f64, f64) {
        (self.mean, self.sd)
    }
}
