//! The one-dimensional chart `s(I) = Φ⁻¹[p(I)]` and everything built on it.
//!
//! In the chart every family becomes the standard normal, so the metric is
//! `g₁₁ = (ds/dI)² = 2πρ²e^{s²}`, the information potential is `𝒮 = −s²/2`,
//! the probability weight is `ω = e^𝒮`, and the geodesic distance between two
//! points is `|s₁ − s₂|`.
//!
//! Cumulants use the family's closed forms when available and adaptive
//! quadrature otherwise; the upper half of the support is always evaluated
//! through the survival function so tail charts keep full relative accuracy.

use crate::error::{Error, Result};
use crate::families::{Diffeo, Family1D, Interval};
use crate::numerics::special::{log_phi, normal_cdf, normal_quantile, normal_sf, HALF_LN_2PI};
use crate::numerics::{bisect, brent, integrate_with_breaks, HermiteTable, QuadratureSpec};
use crate::report::{Identity, VerificationReport};
use std::sync::Arc;

/// Chart, metric and potential of a one-dimensional family.
#[derive(Debug, Clone)]
pub struct Geometry1D {
    family: Arc<dyn Family1D>,
    support: Interval,
    mode: f64,
    loc: f64,
    scale: f64,
    closed_form: bool,
    spec: QuadratureSpec,
}

/// All geometric quantities at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryPoint {
    pub i: f64,
    pub rho: f64,
    pub eta: f64,
    /// Cumulant `p(I)`.
    pub p: f64,
    pub s: f64,
    pub g11: f64,
    /// `ln g₁₁`, finite even where `g₁₁` overflows.
    pub log_g11: f64,
    /// Information potential `𝒮 = −s²/2`.
    pub potential: f64,
    /// Probability weight `ω = e^𝒮`.
    pub weight: f64,
}

impl Geometry1D {
    pub fn build(family: Arc<dyn Family1D>) -> Result<Self> {
        Self::with_spec(family, QuadratureSpec::with_tolerances(1e-13, 0.0))
    }

    pub fn with_spec(family: Arc<dyn Family1D>, spec: QuadratureSpec) -> Result<Self> {
        let support = family.support();
        let (loc, scale) = family.location_scale();
        let probe = 0.5 * (support.lo.max(loc - scale) + support.hi.min(loc + scale));
        let closed_form = family.cdf(probe).is_some() && family.sf(probe).is_some();
        let mut g = Self { family, support, mode: f64::NAN, loc, scale, closed_form, spec };
        g.check_positive()?;
        g.mode = g.find_mode()?;
        Ok(g)
    }

    fn check_positive(&self) -> Result<()> {
        for x in crate::families::reparam_probe(self.family.as_ref(), 257) {
            if !self.family.log_density(x).is_finite() {
                return Err(Error::Domain(format!(
                    "{} has a zero of its density at I = {x}; the chart needs ρ > 0 on the open support",
                    self.family.name()
                )));
            }
        }
        Ok(())
    }

    fn find_mode(&self) -> Result<f64> {
        if let Some(m) = self.family.quantile(0.5) {
            if self.closed_form {
                // polish the closed-form median against the cumulant
                let d = self.lower_mass(m) - self.upper_mass(m);
                if d.abs() < 1e-15 {
                    return Ok(m);
                }
            } else {
                return Ok(m);
            }
        }
        let f = |x: f64| self.lower_mass(x) - self.upper_mass(x);
        let (a, b) = self.bracket(f, 0.0)?;
        bisect(f, a, b, 1e-13 * (1.0 + a.abs().max(b.abs())))
    }

    /// Find `[a, b]` inside the support with `f(a) < target < f(b)` for an
    /// increasing `f`, expanding outward from the location estimate.
    fn bracket<F: Fn(f64) -> f64>(&self, f: F, target: f64) -> Result<(f64, f64)> {
        let s = self.support;
        let start = if s.contains(self.loc) { self.loc } else { 0.5 * (s.lo + s.hi) };
        let step_toward = |from: f64, dir: f64, k: i32| -> f64 {
            let edge = if dir < 0.0 { s.lo } else { s.hi };
            let trial = from + dir * self.scale * 2f64.powi(k);
            if edge.is_finite() {
                // approach a finite edge geometrically
                let half = from + (edge - from) * (1.0 - 0.5f64.powi(k + 1));
                if dir < 0.0 { trial.max(half) } else { trial.min(half) }
            } else {
                trial
            }
        };
        let v0 = f(start) - target;
        if v0 == 0.0 {
            return Ok((start, start));
        }
        let dir = if v0 > 0.0 { -1.0 } else { 1.0 };
        let mut prev = start;
        for k in 0..1100 {
            let x = step_toward(start, dir, k);
            if !s.contains(x) || x == prev {
                break;
            }
            let v = f(x) - target;
            if (v > 0.0) != (v0 > 0.0) || v == 0.0 {
                return Ok(if dir < 0.0 { (x, prev) } else { (prev, x) });
            }
            prev = x;
        }
        Err(Error::NonConvergence { what: format!("bracketing for {}", self.family.name()), estimate: prev, error: f64::INFINITY })
    }

    pub fn family(&self) -> &Arc<dyn Family1D> {
        &self.family
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    /// The point `Ī` with `p(Ī) = 1/2`, where `s(Ī) = 0`.
    pub fn mode(&self) -> f64 {
        self.mode
    }

    /// Gaussian partition value `𝒵`; the construction fixes it to one.
    pub fn partition(&self) -> f64 {
        1.0
    }

    /// Gaussian potential `𝒫 = −ln 𝒵`.
    pub fn gaussian_potential(&self) -> f64 {
        0.0
    }

    /// Typical length scale of the family.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn mass(&self, a: f64, b: f64) -> f64 {
        let (c, w) = (self.loc, self.scale);
        let breaks: Vec<f64> = self.family.breakpoints().iter().map(|x| (x - c) / w).collect();
        let f = &self.family;
        integrate_with_breaks(|u| w * f.density(c + w * u), (a - c) / w, (b - c) / w, &breaks, &self.spec).value
    }

    /// `p(I) = ∫_{I_min}^{I} ρ`.
    pub fn lower_mass(&self, x: f64) -> f64 {
        if x <= self.support.lo {
            return 0.0;
        }
        if x >= self.support.hi {
            return 1.0;
        }
        match self.family.cdf(x) {
            Some(p) => p,
            None => self.mass(self.support.lo, x),
        }
    }

    /// `1 − p(I)`, computed directly.
    pub fn upper_mass(&self, x: f64) -> f64 {
        if x <= self.support.lo {
            return 1.0;
        }
        if x >= self.support.hi {
            return 0.0;
        }
        match self.family.sf(x) {
            Some(q) => q,
            None => self.mass(x, self.support.hi),
        }
    }

    /// The cumulant distribution function `p(I)`.
    pub fn cumulant(&self, x: f64) -> f64 {
        if x <= self.mode {
            self.lower_mass(x)
        } else {
            1.0 - self.upper_mass(x)
        }
    }

    /// Distance of the cumulant from one half, `|p − ½|`, without
    /// cancellation in the tails.
    pub fn half_offset(&self, x: f64) -> f64 {
        if x <= self.mode {
            0.5 - self.lower_mass(x)
        } else {
            0.5 - self.upper_mass(x)
        }
    }

    /// Chart `s(I) = Φ⁻¹[p(I)]`; `s < 0` below the mode.
    pub fn chart(&self, x: f64) -> f64 {
        if x <= self.support.lo {
            return f64::NEG_INFINITY;
        }
        if x >= self.support.hi {
            return f64::INFINITY;
        }
        if x <= self.mode {
            normal_quantile(self.lower_mass(x))
        } else {
            -normal_quantile(self.upper_mass(x))
        }
    }

    /// Inverse chart `I(s)`.
    pub fn inverse_chart(&self, s: f64) -> f64 {
        if s == f64::NEG_INFINITY {
            return self.support.lo;
        }
        if s == f64::INFINITY {
            return self.support.hi;
        }
        if s == 0.0 {
            return self.mode;
        }
        let closed = if s < 0.0 { self.family.quantile(normal_cdf(s)) } else { self.family.quantile_upper(normal_sf(s)) };
        if let Some(x) = closed {
            return x;
        }
        let f = |x: f64| self.chart(x);
        let (a, b) = match self.bracket_from_mode(&f, s) {
            Some(ab) => ab,
            None => return if s < 0.0 { self.support.lo } else { self.support.hi },
        };
        brent(|x| f(x) - s, a, b, 1e-15 * self.scale).unwrap_or(0.5 * (a + b))
    }

    fn bracket_from_mode<F: Fn(f64) -> f64>(&self, f: &F, s: f64) -> Option<(f64, f64)> {
        let dir = s.signum();
        let edge = if dir < 0.0 { self.support.lo } else { self.support.hi };
        let mut prev = self.mode;
        for k in 0..1100 {
            let mut x = self.mode + dir * self.scale * 0.25 * 2f64.powi(k);
            if edge.is_finite() {
                let half = self.mode + (edge - self.mode) * (1.0 - 0.5f64.powi(k + 1));
                x = if dir < 0.0 { x.max(half) } else { x.min(half) };
            }
            if x == prev || !self.support.contains(x) {
                return None;
            }
            let v = f(x);
            if (dir > 0.0 && v >= s) || (dir < 0.0 && v <= s) {
                return Some(if dir < 0.0 { (x, prev) } else { (prev, x) });
            }
            prev = x;
        }
        None
    }

    /// `ln(ds/dI) = ln ρ − ln φ(s)`.
    pub fn log_chart_derivative(&self, x: f64) -> f64 {
        self.family.log_density(x) - log_phi(self.chart(x))
    }

    /// `ds/dI = ρ/φ(s)`.
    pub fn chart_derivative(&self, x: f64) -> f64 {
        self.log_chart_derivative(x).exp()
    }

    /// `ln g₁₁`.
    pub fn log_metric(&self, x: f64) -> f64 {
        2.0 * self.log_chart_derivative(x)
    }

    /// The only metric component, `g₁₁ = 2πρ²e^{s²}`.
    pub fn metric(&self, x: f64) -> f64 {
        self.log_metric(x).exp()
    }

    /// Connection coefficient `Γ¹₁₁ = ½ d ln g₁₁/dI = −η + s·s'`.
    pub fn christoffel(&self, x: f64) -> f64 {
        let s = self.chart(x);
        -self.family.eta(x) + s * self.chart_derivative(x)
    }

    /// `dΓ¹₁₁/dI = −χ + s'² + s·s''`, with `s'' = s'Γ`.
    pub fn christoffel_derivative(&self, x: f64) -> f64 {
        let s = self.chart(x);
        let ds = self.chart_derivative(x);
        let gamma = -self.family.eta(x) + s * ds;
        -self.family.chi(x) + ds * ds + s * ds * gamma
    }

    /// Information potential `𝒮 = −s²/2`.
    pub fn potential(&self, x: f64) -> f64 {
        let s = self.chart(x);
        -0.5 * s * s
    }

    /// Probability weight `ω = ρ·√(2π/g₁₁) = e^𝒮`.
    pub fn weight(&self, x: f64) -> f64 {
        self.potential(x).exp()
    }

    /// All quantities at an interior point.
    pub fn eval(&self, x: f64) -> Result<GeometryPoint> {
        if !self.support.contains(x) {
            return Err(Error::Domain(format!("I = {x} is outside the open support of {}", self.family.name())));
        }
        let s = self.chart(x);
        let log_rho = self.family.log_density(x);
        let log_g11 = 2.0 * (log_rho - log_phi(s));
        let potential = -0.5 * s * s;
        Ok(GeometryPoint {
            i: x,
            rho: log_rho.exp(),
            eta: self.family.eta(x),
            p: self.cumulant(x),
            s,
            g11: log_g11.exp(),
            log_g11,
            potential,
            weight: potential.exp(),
        })
    }

    /// Geodesic distance `|s(I₁) − s(I₂)|`.
    pub fn distance(&self, a: f64, b: f64) -> f64 {
        (self.chart(a) - self.chart(b)).abs()
    }

    /// Finite-difference length scale at `x`: the smaller of `1 + |x|` and
    /// the local chart scale `1/s'`.
    pub fn fd_scale(&self, x: f64) -> f64 {
        let local = (-self.log_chart_derivative(x)).exp();
        let s = self.support;
        let room = 200.0 * (x - s.lo).min(s.hi - x);
        (1.0 + x.abs()).min(local).min(room)
    }

    /// Points `I(s_k)` for `n` chart-uniform values of `s` in `[lo, hi]`.
    pub fn chart_grid(&self, lo: f64, hi: f64, n: usize) -> Vec<f64> {
        crate::numerics::linspace(lo, hi, n).into_iter().map(|s| self.inverse_chart(s)).collect()
    }

    /// Monotone cubic table of `I(s)` on `s ∈ [−8.5, 8.5]`, for fast sampling.
    pub fn chart_table(&self) -> HermiteTable {
        let (lo, dx, n) = (-8.5, 0.02, 851);
        let mut ys = Vec::with_capacity(n);
        let mut ds = Vec::with_capacity(n);
        for k in 0..n {
            let s = lo + dx * k as f64;
            let x = self.inverse_chart(s);
            ys.push(x);
            // dI/ds = φ(s)/ρ(I)
            ds.push((log_phi(s) - self.family.log_density(x)).exp());
        }
        HermiteTable::new(lo, dx, ys, ds)
    }

    /// Grid check that `𝔇(I, Ī) < ε` exactly when `|p − ½| ≤ ½ erf(ε/√2)`.
    pub fn distance_probability_equivalence(&self, eps: f64, grid: &[f64]) -> VerificationReport {
        let band = normal_cdf(eps) - 0.5;
        let mut disagreements = 0usize;
        let mut lhs = Vec::with_capacity(grid.len());
        let mut rhs = Vec::with_capacity(grid.len());
        for &x in grid {
            let d = self.distance(x, self.mode);
            let a = d < eps;
            let b = self.half_offset(x) <= band;
            lhs.push(a as u8 as f64);
            rhs.push(b as u8 as f64);
            // points on the boundary itself are decided by rounding
            if a != b && (d - eps).abs() > 1e-9 {
                disagreements += 1;
            }
        }
        VerificationReport::with_residual(
            Identity::DistanceProbabilityEquivalence,
            self.family.name(),
            lhs,
            rhs,
            vec![grid.len()],
            disagreements as f64,
            0.0,
        )
        .note(format!("epsilon = {eps}"))
    }

    /// Grid check of `𝔇²(I, Ī) + 2 ln[ω(I)/ω(Ī)] = 0`, with ω evaluated as
    /// `ρ·√(2π/g₁₁)`.
    pub fn occurrence_ratio_check(&self, grid: &[f64]) -> VerificationReport {
        let log_omega = |x: f64| self.family.log_density(x) + HALF_LN_2PI - 0.5 * self.log_metric(x);
        let at_mode = log_omega(self.mode);
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for &x in grid {
            let d = self.distance(x, self.mode);
            lhs.push(d * d);
            rhs.push(-2.0 * (log_omega(x) - at_mode));
        }
        VerificationReport::compare(Identity::OccurrenceRatio, self.family.name(), lhs, rhs, vec![grid.len()], 1e-9)
    }

    /// Chart consistency checks: round trip, pushforward to the standard
    /// normal, the mode's cumulant, and the two grid equivalences above.
    pub fn chart_checks(&self, n: usize) -> Vec<VerificationReport> {
        let name = self.family.name();
        let grid = self.chart_grid(-6.0, 6.0, n);
        let interior: Vec<f64> = grid.iter().copied().filter(|&x| self.support.contains(x)).collect();

        let back: Vec<f64> = interior.iter().map(|&x| self.inverse_chart(self.chart(x))).collect();
        let round = VerificationReport::compare(Identity::ChartRoundTrip, &name, back, interior.clone(), vec![interior.len()], 1e-9);

        let us: Vec<f64> = (1..n).map(|k| k as f64 / n as f64).collect();
        let pushed: Vec<f64> = us
            .iter()
            .map(|&u| {
                let x = self.inverse_chart(normal_quantile(u));
                if u <= 0.5 { self.lower_mass(x) } else { 1.0 - self.upper_mass(x) }
            })
            .collect();
        let push = VerificationReport::compare(Identity::ChartPushforward, &name, pushed, us.clone(), vec![us.len()], 1e-9);

        let mode = VerificationReport::scalar(Identity::ModeCumulant, &name, self.lower_mass(self.mode), 0.5, 1e-10);

        vec![
            round,
            push,
            mode,
            self.distance_probability_equivalence(1.0, &interior),
            self.distance_probability_equivalence(0.674, &interior),
            self.occurrence_ratio_check(&interior),
            self.monomodality_check(2001),
        ]
    }

    /// Count local maxima of ω on an I-uniform grid through the bulk of the
    /// support (with Ī inserted); exactly one is expected, at Ī.
    pub fn monomodality_check(&self, n: usize) -> VerificationReport {
        let lo = self.inverse_chart(-5.0);
        let hi = self.inverse_chart(5.0);
        let mode = self.mode;
        let mut grid: Vec<f64> =
            crate::numerics::linspace(lo, hi, n).into_iter().filter(|x| (x - mode).abs() > 1e-6 * (hi - lo)).collect();
        grid.push(mode);
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid.dedup();
        let w: Vec<f64> = grid.iter().map(|&x| self.weight(x)).collect();
        let maxima: Vec<f64> = (1..grid.len() - 1).filter(|&k| w[k] > w[k - 1] && w[k] > w[k + 1]).map(|k| grid[k]).collect();
        let at_mode = maxima.len() == 1 && maxima[0] == self.mode;
        VerificationReport::with_residual(
            Identity::Monomodality,
            self.family.name(),
            vec![maxima.len() as f64],
            vec![1.0],
            vec![],
            if at_mode { 0.0 } else { 1.0 + maxima.len() as f64 },
            0.0,
        )
        .note(format!("local maxima of the weight at {maxima:?}; mode {}", self.mode))
    }
}

/// The chart `I ↦ s(I)` of a geometry, as a change of variable.
#[derive(Debug, Clone)]
pub struct ChartMap(pub Arc<Geometry1D>);

impl Diffeo for ChartMap {
    fn name(&self) -> String {
        format!("chart of {}", self.0.family().name())
    }
    fn forward(&self, x: f64) -> f64 {
        self.0.chart(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        self.0.chart_derivative(x)
    }
    fn second_derivative(&self, x: f64) -> f64 {
        self.0.chart_derivative(x) * self.0.christoffel(x)
    }
    fn inverse(&self, y: f64) -> f64 {
        self.0.inverse_chart(y)
    }
    fn domain(&self) -> Interval {
        self.0.support()
    }
}

/// The inverse chart `s ↦ I(s)`, carrying distributions on the standard
/// normal coordinate onto a geometry.
#[derive(Debug, Clone)]
pub struct InverseChartMap(pub Arc<Geometry1D>);

impl Diffeo for InverseChartMap {
    fn name(&self) -> String {
        format!("inverse chart of {}", self.0.family().name())
    }
    fn forward(&self, s: f64) -> f64 {
        self.0.inverse_chart(s)
    }
    /// `dI/ds = 1/s'`.
    fn derivative(&self, s: f64) -> f64 {
        (log_phi(s) - self.0.family().log_density(self.0.inverse_chart(s))).exp()
    }
    /// `d²I/ds² = −Γ/s'²`.
    fn second_derivative(&self, s: f64) -> f64 {
        let x = self.0.inverse_chart(s);
        let d = self.derivative(s);
        -self.0.christoffel(x) * d * d
    }
    fn inverse(&self, x: f64) -> f64 {
        self.0.chart(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin, ExponentialFamily, Mixture, Normal, Triangle, Uniform};
    use proptest::prelude::*;

    fn geom(f: impl Family1D + 'static) -> Geometry1D {
        Geometry1D::build(Arc::new(f)).unwrap()
    }

    #[test]
    fn normal_closed_forms() {
        let g = geom(Normal::new(1.5, 2.0).unwrap());
        assert_eq!(g.mode(), 1.5);
        for x in [-10.0, -1.0, 1.5, 2.0, 9.0] {
            let p = g.eval(x).unwrap();
            let z = (x - 1.5) / 2.0;
            assert!((p.s - z).abs() < 1e-12, "{x}");
            assert!((p.g11 - 0.25).abs() < 1e-12);
            assert!((p.potential + 0.5 * z * z).abs() < 1e-11);
            assert!(g.christoffel(x).abs() < 1e-11);
        }
    }

    #[test]
    fn uniform_examples() {
        let g = geom(Uniform::new(0.0, 1.0).unwrap());
        assert_eq!(g.mode(), 0.5);
        let p = g.eval(0.5).unwrap();
        assert_eq!(p.s, 0.0);
        assert!((p.g11 - 2.0 * std::f64::consts::PI).abs() < 1e-13);
        assert_eq!(p.weight, 1.0);
        assert!((g.chart(0.3) - normal_quantile(0.3)).abs() < 1e-15);
        assert!((g.distance(0.841_344_746_068_542_9, 0.5) - 1.0).abs() < 1e-12);
        assert_eq!(g.chart(0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn mixture_mode_is_median() {
        let g = geom(Mixture::new(vec![0.45, 0.55], vec![-2.0, 1.5], vec![0.6, 0.8]).unwrap());
        assert!((g.lower_mass(g.mode()) - 0.5).abs() < 1e-13);
        assert!(g.chart(g.mode()).abs() < 1e-12);
    }

    #[test]
    fn quadrature_cumulant_matches_closed_form() {
        // same density with and without closed-form cumulants
        let e = geom(ExponentialFamily::new(vec![0.0, 0.5]).unwrap());
        assert!(e.mode().abs() < 1e-12);
        for x in [-7.0, -2.0, -0.3, 0.4, 3.0, 8.0] {
            assert!((e.chart(x) - x).abs() < 1e-10, "{x}: {}", e.chart(x));
            let s = e.chart(x);
            assert!((e.inverse_chart(s) - x).abs() < 1e-10);
        }
    }

    #[test]
    fn christoffel_matches_fd_of_log_metric() {
        for name in ["mixture", "expfam", "triangle"] {
            let f = builtin(name).unwrap().as_one().unwrap().clone();
            let g = Geometry1D::build(f).unwrap();
            for s in [-3.0, -1.2, 0.4, 2.5] {
                let x = g.inverse_chart(s);
                let h = 1e-4 * g.fd_scale(x);
                let fd = 0.25 * (g.log_metric(x + h) - g.log_metric(x - h)) / h;
                assert!((g.christoffel(x) - fd).abs() < 1e-6 * (1.0 + fd.abs()), "{name} {s}");
                let fd2 = (g.christoffel(x + h) - g.christoffel(x - h)) / (2.0 * h);
                assert!((g.christoffel_derivative(x) - fd2).abs() < 1e-5 * (1.0 + fd2.abs()), "{name} {s}");
            }
        }
    }

    #[test]
    fn triangle_chart_reaches_edges() {
        let g = geom(Triangle::new(1.0).unwrap());
        assert_eq!(g.mode(), 0.0);
        let x = g.inverse_chart(-8.0);
        assert!(x > -1.0 && x < -0.99);
        assert!((g.chart(x) + 8.0).abs() < 1e-9);
    }

    #[test]
    fn chart_checks_pass_on_corpus() {
        for entry in crate::families::corpus() {
            if let Some(f) = entry.family.as_one() {
                let g = Geometry1D::build(f.clone()).unwrap();
                for r in g.chart_checks(201) {
                    assert!(r.pass, "{}", r.summary_line());
                }
            }
        }
    }

    #[test]
    fn equivalence_examples() {
        let g = geom(Normal::standard());
        let r = g.distance_probability_equivalence(1.0, &[0.5, 1.5]);
        assert_eq!(r.lhs, vec![1.0, 0.0]);
        assert_eq!(r.rhs, vec![1.0, 0.0]);
        // ε = 0.674 puts the boundary near the quartiles
        let band = normal_cdf(0.674) - 0.5;
        assert!((band - 0.25).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn potential_decreases_away_from_mode(s1 in 0.0f64..6.0, ds in 0.01f64..2.0) {
            let g = geom(Mixture::new(vec![0.45, 0.55], vec![-2.0, 1.5], vec![0.6, 0.8]).unwrap());
            let near = g.inverse_chart(s1);
            let far = g.inverse_chart(s1 + ds);
            prop_assert!(g.potential(far) < g.potential(near));
            let near = g.inverse_chart(-s1);
            let far = g.inverse_chart(-s1 - ds);
            prop_assert!(g.potential(far) < g.potential(near));
        }

        #[test]
        fn weight_reconstructs_density(s in -6.0f64..6.0) {
            let g = geom(Mixture::new(vec![0.45, 0.55], vec![-2.0, 1.5], vec![0.6, 0.8]).unwrap());
            let p = g.eval(g.inverse_chart(s)).unwrap();
            let rho = p.weight * (p.g11 / (2.0 * std::f64::consts::PI)).sqrt();
            prop_assert!((rho / p.rho - 1.0).abs() < 1e-12);
        }
    }
}
