//! Parametric families of continuous distributions `dp = ρ(I|θ) dI`.
//!
//! A [`Family1D`] exposes its log-density and the differential force
//! `η = −∂ log ρ` with its derivative `χ = ∂η`. Closed-form cumulants and
//! quantiles are optional; when a family lacks them the geometry layer falls
//! back to quadrature and root finding.

mod boundary;
mod corpus;
mod expfam;
mod mixture;
mod normal;
mod product;
mod reparam;
mod sample;
mod spec;
mod triangle;
mod uniform;

pub use boundary::validate_boundary;
pub use corpus::{builtin, corpus, CorpusEntry};
pub use expfam::ExponentialFamily;
pub use mixture::Mixture;
pub use normal::Normal;
pub use product::ProductFamily;
pub use reparam::{reparametrize, Affine, Diffeo, Exp, NormalQuantileMap, Reparametrized, Sinh};
pub use sample::{sample, sample_product, OutcomeSet, Sampler};
pub use spec::{parse_family, parse_family_spec, AnyFamily, FamilySpec, MixtureComponent};
pub use triangle::Triangle;
pub use uniform::Uniform;
pub(crate) use reparam::probe_points as reparam_probe;

use crate::error::{Error, Result};
use std::fmt;

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.lo >= self.lo && other.hi <= self.hi
    }
}

/// Step used by the default finite-difference derivatives.
pub(crate) fn fd_step(x: f64) -> f64 {
    1e-5 * (1.0 + x.abs())
}

/// A one-dimensional parametric density.
pub trait Family1D: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn support(&self) -> Interval;

    /// Parameter vector θ.
    fn params(&self) -> Vec<f64>;

    /// `log ρ(I)`; `-∞` outside the support.
    fn log_density(&self, x: f64) -> f64;

    fn density(&self, x: f64) -> f64 {
        self.log_density(x).exp()
    }

    /// Differential force `η = −d log ρ / dI`.
    fn eta(&self, x: f64) -> f64 {
        let h = self.fd_step_at(x);
        -(self.log_density(x + h) - self.log_density(x - h)) / (2.0 * h)
    }

    /// Response `χ = dη/dI`.
    fn chi(&self, x: f64) -> f64 {
        let h = self.fd_step_at(x);
        (self.eta(x + h) - self.eta(x - h)) / (2.0 * h)
    }

    fn cdf(&self, _x: f64) -> Option<f64> {
        None
    }

    /// Survival function `1 − p(I)`, computed without cancellation.
    fn sf(&self, _x: f64) -> Option<f64> {
        None
    }

    fn quantile(&self, _p: f64) -> Option<f64> {
        None
    }

    /// The `I` with `sf(I) = q`.
    fn quantile_upper(&self, _q: f64) -> Option<f64> {
        None
    }

    /// Quantile used for sampling; may trade accuracy for speed.
    fn sample_quantile(&self, p: f64) -> Option<f64> {
        self.quantile(p)
    }

    /// Points where ρ is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Rough location and scale, used to seed brackets and scale integrals.
    fn location_scale(&self) -> (f64, f64) {
        let s = self.support();
        match (s.lo.is_finite(), s.hi.is_finite()) {
            (true, true) => (0.5 * (s.lo + s.hi), 0.5 * (s.hi - s.lo)),
            (true, false) => (s.lo + 1.0, 1.0),
            (false, true) => (s.hi - 1.0, 1.0),
            (false, false) => (0.0, 1.0),
        }
    }

    /// Finite-difference step at `x`, shrunk so the stencil stays inside the
    /// support.
    fn fd_step_at(&self, x: f64) -> f64 {
        let s = self.support();
        let room = (x - s.lo).min(s.hi - x);
        fd_step(x).min(0.25 * room)
    }
}

/// Density, differential force and response at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub rho: f64,
    pub eta: f64,
    pub chi: f64,
}

/// Evaluate `ρ`, `η`, `χ` at an interior point.
pub fn evaluate(family: &dyn Family1D, x: f64) -> Result<Evaluation> {
    if !family.support().contains(x) {
        return Err(Error::Domain(format!(
            "I = {x} is outside the open support of {}",
            family.name()
        )));
    }
    let e = Evaluation { rho: family.density(x), eta: family.eta(x), chi: family.chi(x) };
    if !(e.rho.is_finite() && e.eta.is_finite() && e.chi.is_finite()) {
        return Err(Error::Domain(format!("non-finite evaluation of {} at I = {x}", family.name())));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_with_breaks, QuadratureSpec};

    #[test]
    fn evaluate_examples() {
        let e = evaluate(&Normal::standard(), 2.0).unwrap();
        assert_eq!((e.eta, e.chi), (2.0, 1.0));
        let e = evaluate(&Uniform::new(0.0, 1.0).unwrap(), 0.3).unwrap();
        assert_eq!((e.rho, e.eta, e.chi), (1.0, 0.0, 0.0));
        let e = evaluate(&Triangle::new(1.0).unwrap(), 0.5).unwrap();
        assert_eq!((e.rho, e.eta), (0.5, 2.0));
        assert!(evaluate(&Uniform::new(0.0, 1.0).unwrap(), 1.5).is_err());
    }

    #[test]
    fn analytic_eta_matches_finite_difference() {
        for entry in corpus() {
            for f in entry.family.factors() {
                let (c, w) = f.location_scale();
                for k in -4..=4 {
                    let x = c + 0.37 * w * k as f64 + 1e-3;
                    if !f.support().contains(x) || f.breakpoints().iter().any(|b| (b - x).abs() < 1e-3) {
                        continue;
                    }
                    let h = f.fd_step_at(x);
                    let fd = -(f.log_density(x + h) - f.log_density(x - h)) / (2.0 * h);
                    let tol = 1e-6 * (1.0 + fd.abs());
                    assert!((f.eta(x) - fd).abs() < tol, "{} at {x}: {} vs {fd}", f.name(), f.eta(x));
                }
            }
        }
    }

    #[test]
    fn corpus_normalized() {
        let spec = QuadratureSpec::default();
        for entry in corpus() {
            for f in entry.family.factors() {
                let s = f.support();
                let r = integrate_with_breaks(|x| f.density(x), s.lo, s.hi, &f.breakpoints(), &spec);
                assert!((r.value - 1.0).abs() < 1e-10, "{}: {}", f.name(), r.value);
            }
        }
    }
}
