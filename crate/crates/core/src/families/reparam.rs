use super::{Family1D, Interval};
use crate::error::{Error, Result};
use crate::numerics::special::{log_phi, normal_cdf, normal_quantile};
use std::fmt;
use std::sync::Arc;

/// A smooth strictly monotone change of variable `Θ(I)`.
pub trait Diffeo: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn forward(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
    fn second_derivative(&self, x: f64) -> f64;
    fn inverse(&self, y: f64) -> f64;

    /// Open interval on which the map is defined.
    fn domain(&self) -> Interval {
        Interval::REAL_LINE
    }
}

/// `Θ(I) = a·I + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
}

impl Affine {
    pub fn identity() -> Self {
        Self { a: 1.0, b: 0.0 }
    }
}

impl Diffeo for Affine {
    fn name(&self) -> String {
        format!("{}*I + {}", self.a, self.b)
    }
    fn forward(&self, x: f64) -> f64 {
        self.a * x + self.b
    }
    fn derivative(&self, _x: f64) -> f64 {
        self.a
    }
    fn second_derivative(&self, _x: f64) -> f64 {
        0.0
    }
    fn inverse(&self, y: f64) -> f64 {
        (y - self.b) / self.a
    }
}

/// `Θ(I) = e^I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exp;

impl Diffeo for Exp {
    fn name(&self) -> String {
        "exp(I)".into()
    }
    fn forward(&self, x: f64) -> f64 {
        x.exp()
    }
    fn derivative(&self, x: f64) -> f64 {
        x.exp()
    }
    fn second_derivative(&self, x: f64) -> f64 {
        x.exp()
    }
    fn inverse(&self, y: f64) -> f64 {
        y.ln()
    }
}

/// `Θ(I) = sinh(I)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinh;

impl Diffeo for Sinh {
    fn name(&self) -> String {
        "sinh(I)".into()
    }
    fn forward(&self, x: f64) -> f64 {
        x.sinh()
    }
    fn derivative(&self, x: f64) -> f64 {
        x.cosh()
    }
    fn second_derivative(&self, x: f64) -> f64 {
        x.sinh()
    }
    fn inverse(&self, y: f64) -> f64 {
        y.asinh()
    }
}

/// `Θ(I) = Φ⁻¹(I)` on `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalQuantileMap;

impl Diffeo for NormalQuantileMap {
    fn name(&self) -> String {
        "Phi^-1(I)".into()
    }
    fn forward(&self, x: f64) -> f64 {
        normal_quantile(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        (-log_phi(normal_quantile(x))).exp()
    }
    fn second_derivative(&self, x: f64) -> f64 {
        let y = normal_quantile(x);
        y * (-2.0 * log_phi(y)).exp()
    }
    fn inverse(&self, y: f64) -> f64 {
        normal_cdf(y)
    }
    fn domain(&self) -> Interval {
        Interval::new(0.0, 1.0)
    }
}

/// The density of `Θ(I)` when `I` follows `base`.
#[derive(Debug, Clone)]
pub struct Reparametrized {
    base: Arc<dyn Family1D>,
    map: Arc<dyn Diffeo>,
    increasing: bool,
    support: Interval,
}

/// Probe points spread over the bulk of a family's support.
pub(crate) fn probe_points(family: &dyn Family1D, n: usize) -> Vec<f64> {
    let s = family.support();
    let (c, w) = family.location_scale();
    (0..n)
        .filter_map(|k| {
            let u = (k as f64 + 0.5) / n as f64;
            let x = match family.quantile(1e-7 + (1.0 - 2e-7) * u) {
                Some(x) => x,
                None => c + w * 16.0 * (u - 0.5),
            };
            s.contains(x).then_some(x)
        })
        .collect()
}

/// Transport `base` through `map`: `ρ_new(Θ) = ρ(I)·|dΘ/dI|⁻¹`.
pub fn reparametrize(base: Arc<dyn Family1D>, map: Arc<dyn Diffeo>) -> Result<Reparametrized> {
    let s = base.support();
    if !map.domain().contains_interval(&s) {
        return Err(Error::Domain(format!(
            "{} is not defined on the support of {}",
            map.name(),
            base.name()
        )));
    }
    let signs: Vec<f64> = probe_points(base.as_ref(), 401).iter().map(|&x| map.derivative(x)).collect();
    let increasing = signs.iter().all(|&d| d > 0.0 && d.is_finite());
    let decreasing = signs.iter().all(|&d| d < 0.0 && d.is_finite());
    if !(increasing || decreasing) {
        return Err(Error::Domain(format!("{} is not strictly monotone on the support of {}", map.name(), base.name())));
    }
    let (a, b) = (map.forward(s.lo), map.forward(s.hi));
    let support = if increasing { Interval::new(a, b) } else { Interval::new(b, a) };
    Ok(Reparametrized { base, map, increasing, support })
}

impl Reparametrized {
    pub fn base(&self) -> &Arc<dyn Family1D> {
        &self.base
    }

    pub fn map(&self) -> &Arc<dyn Diffeo> {
        &self.map
    }
}

impl Family1D for Reparametrized {
    fn name(&self) -> String {
        format!("{} under {}", self.base.name(), self.map.name())
    }

    fn support(&self) -> Interval {
        self.support
    }

    fn params(&self) -> Vec<f64> {
        self.base.params()
    }

    fn log_density(&self, y: f64) -> f64 {
        if !(y >= self.support.lo && y <= self.support.hi) {
            return f64::NEG_INFINITY;
        }
        let x = self.map.inverse(y);
        self.base.log_density(x) - self.map.derivative(x).abs().ln()
    }

    fn eta(&self, y: f64) -> f64 {
        let x = self.map.inverse(y);
        let d = self.map.derivative(x);
        (self.base.eta(x) + self.map.second_derivative(x) / d) / d
    }

    fn cdf(&self, y: f64) -> Option<f64> {
        let x = self.map.inverse(y);
        if self.increasing {
            self.base.cdf(x)
        } else {
            self.base.sf(x)
        }
    }

    fn sf(&self, y: f64) -> Option<f64> {
        let x = self.map.inverse(y);
        if self.increasing {
            self.base.sf(x)
        } else {
            self.base.cdf(x)
        }
    }

    fn quantile(&self, p: f64) -> Option<f64> {
        let x = if self.increasing { self.base.quantile(p) } else { self.base.quantile_upper(p) };
        x.map(|x| self.map.forward(x))
    }

    fn quantile_upper(&self, q: f64) -> Option<f64> {
        let x = if self.increasing { self.base.quantile_upper(q) } else { self.base.quantile(q) };
        x.map(|x| self.map.forward(x))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.base.breakpoints().into_iter().map(|x| self.map.forward(x)).collect()
    }

    fn location_scale(&self) -> (f64, f64) {
        let (c, w) = self.base.location_scale();
        (self.map.forward(c), w * self.map.derivative(c).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{Normal, Uniform};
    use crate::numerics::{integrate_with_breaks, QuadratureSpec};

    #[derive(Debug)]
    struct Square;
    impl Diffeo for Square {
        fn name(&self) -> String {
            "I^2".into()
        }
        fn forward(&self, x: f64) -> f64 {
            x * x
        }
        fn derivative(&self, x: f64) -> f64 {
            2.0 * x
        }
        fn second_derivative(&self, _x: f64) -> f64 {
            2.0
        }
        fn inverse(&self, y: f64) -> f64 {
            y.sqrt()
        }
    }

    #[test]
    fn uniform_through_normal_quantile_is_standard_normal() {
        let r = reparametrize(Arc::new(Uniform::new(0.0, 1.0).unwrap()), Arc::new(NormalQuantileMap)).unwrap();
        let n = Normal::standard();
        for y in [-6.0, -2.5, -0.1, 0.0, 1.3, 5.0] {
            assert!((r.density(y) - n.density(y)).abs() < 1e-10, "{y}");
            assert!((r.eta(y) - y).abs() < 1e-8, "{y}: {}", r.eta(y));
        }
        assert_eq!(r.support(), Interval::REAL_LINE);
    }

    #[test]
    fn scaling_gives_wider_normal() {
        let r = reparametrize(Arc::new(Normal::standard()), Arc::new(Affine { a: 2.0, b: 0.0 })).unwrap();
        let n = Normal::new(0.0, 2.0).unwrap();
        for y in [-3.0, 0.0, 0.7, 4.0] {
            assert!((r.log_density(y) - n.log_density(y)).abs() < 1e-14);
            assert!((r.eta(y) - n.eta(y)).abs() < 1e-14);
            assert!((r.quantile(0.3).unwrap() - n.quantile(0.3).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn decreasing_map_swaps_tails() {
        let base: Arc<dyn Family1D> = Arc::new(Normal::new(1.0, 0.5).unwrap());
        let r = reparametrize(base.clone(), Arc::new(Affine { a: -1.0, b: 0.0 })).unwrap();
        assert!((r.cdf(-1.2).unwrap() - base.sf(1.2).unwrap()).abs() < 1e-16);
        assert!((r.quantile(0.1).unwrap() + base.quantile(0.9).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn non_monotone_rejected() {
        assert!(reparametrize(Arc::new(Normal::standard()), Arc::new(Square)).is_err());
    }

    #[test]
    fn total_probability_preserved() {
        let spec = QuadratureSpec::default();
        let base: Arc<dyn Family1D> = Arc::new(Normal::new(0.3, 0.7).unwrap());
        for map in [Arc::new(Sinh) as Arc<dyn Diffeo>, Arc::new(Exp), Arc::new(Affine { a: -3.0, b: 1.0 })] {
            let r = reparametrize(base.clone(), map).unwrap();
            let s = r.support();
            let total = integrate_with_breaks(|y| r.density(y), s.lo, s.hi, &[], &spec).value;
            assert!((total - 1.0).abs() < 1e-10, "{}: {total}", r.name());
        }
    }
}
