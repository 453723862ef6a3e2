//! Statistical manifolds: the one-dimensional chart geometry and external
//! products of such geometries.

use super::MetricField;
use crate::error::{Error, Result};
use crate::families::AnyFamily;
use crate::geometry1d::Geometry1D;
use crate::numerics::linspace;
use crate::report::{Identity, VerificationReport};
use nalgebra::DMatrix;
use std::f64::consts::PI;
use std::sync::Arc;

/// A manifold carrying a distribution, its chart to the standard normal and
/// the information potential `𝒮 = 𝒫 − ½|s|²`.
pub trait Manifold: MetricField {
    fn name(&self) -> String;

    fn contains(&self, x: &[f64]) -> bool;

    /// The point `Ī` of maximal information potential.
    fn mode(&self) -> Vec<f64>;

    fn chart(&self, x: &[f64]) -> Vec<f64>;

    fn inverse_chart(&self, s: &[f64]) -> Vec<f64>;

    fn log_density(&self, x: &[f64]) -> f64;

    /// `ds_i/dI^i`; the chart of a product is diagonal.
    fn chart_derivatives(&self, x: &[f64]) -> Vec<f64>;

    fn gaussian_potential(&self) -> f64 {
        0.0
    }

    fn potential(&self, x: &[f64]) -> f64 {
        self.gaussian_potential() - 0.5 * self.chart(x).iter().map(|s| s * s).sum::<f64>()
    }

    /// `∂_i 𝒮 = −s_i s_i'`.
    fn potential_gradient(&self, x: &[f64]) -> Vec<f64> {
        let s = self.chart(x);
        let d = self.chart_derivatives(x);
        s.iter().zip(&d).map(|(a, b)| -a * b).collect()
    }

    /// Geodesic distance, Euclidean in the chart.
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let (sa, sb) = (self.chart(a), self.chart(b));
        sa.iter().zip(&sb).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    /// Per-coordinate length over which the geometry changes appreciably.
    fn fd_scales(&self, x: &[f64]) -> Vec<f64>;

    /// Per-coordinate points where the density is not smooth.
    fn breakpoints(&self) -> Vec<Vec<f64>>;
}

fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
}

impl MetricField for Geometry1D {
    fn dim(&self) -> usize {
        1
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, Geometry1D::metric(self, x[0]))
    }

    /// `g' = 2gΓ`.
    fn metric_derivatives(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let g = Geometry1D::metric(self, x[0]);
        vec![DMatrix::from_element(1, 1, 2.0 * g * self.christoffel(x[0]))]
    }

    /// `g'' = 2g(2Γ² + Γ')`.
    fn metric_second_derivatives(&self, x: &[f64]) -> Vec<Vec<DMatrix<f64>>> {
        let g = Geometry1D::metric(self, x[0]);
        let c = self.christoffel(x[0]);
        vec![vec![DMatrix::from_element(1, 1, 2.0 * g * (2.0 * c * c + self.christoffel_derivative(x[0])))]]
    }
}

impl Manifold for Geometry1D {
    fn name(&self) -> String {
        self.family().name()
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.support().contains(x[0])
    }

    fn mode(&self) -> Vec<f64> {
        vec![Geometry1D::mode(self)]
    }

    fn chart(&self, x: &[f64]) -> Vec<f64> {
        vec![Geometry1D::chart(self, x[0])]
    }

    fn inverse_chart(&self, s: &[f64]) -> Vec<f64> {
        vec![Geometry1D::inverse_chart(self, s[0])]
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        self.family().log_density(x[0])
    }

    fn chart_derivatives(&self, x: &[f64]) -> Vec<f64> {
        vec![self.chart_derivative(x[0])]
    }

    fn fd_scales(&self, x: &[f64]) -> Vec<f64> {
        vec![local_scale(self, x[0])]
    }

    fn breakpoints(&self) -> Vec<Vec<f64>> {
        vec![self.family().breakpoints()]
    }
}

/// The chart scale further limited by the curvature lengths of `log ρ` and
/// `log g`: `1/(√|χ| + √|Γ'|)`.
fn local_scale(g: &Geometry1D, x: f64) -> f64 {
    let rate = g.family().chi(x).abs().sqrt() + g.christoffel_derivative(x).abs().sqrt();
    g.fd_scale(x).min(1.0 / rate)
}

/// External product of one-dimensional geometries: diagonal metric
/// `ds² = Σ g_ii(I^i)(dI^i)²` and additive potential.
#[derive(Debug, Clone)]
pub struct GeometryN {
    factors: Vec<Arc<Geometry1D>>,
}

/// Assemble a product geometry from at least two factors.
pub fn product_geometry(factors: Vec<Arc<Geometry1D>>) -> Result<GeometryN> {
    if factors.len() < 2 {
        return Err(Error::Domain(format!("a product geometry needs at least 2 factors, got {}", factors.len())));
    }
    Ok(GeometryN { factors })
}

impl GeometryN {
    pub fn factors(&self) -> &[Arc<Geometry1D>] {
        &self.factors
    }

    /// Build the geometry of every factor of a product family.
    pub fn from_family(family: &AnyFamily) -> Result<Self> {
        let factors = family.factors().into_iter().map(|f| Geometry1D::build(f).map(Arc::new)).collect::<Result<_>>()?;
        product_geometry(factors)
    }
}

impl MetricField for GeometryN {
    fn dim(&self) -> usize {
        self.factors.len()
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        diag(&self.factors.iter().zip(x).map(|(f, &xi)| f.metric(xi)).collect::<Vec<_>>())
    }

    fn metric_derivatives(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let n = self.dim();
        (0..n)
            .map(|k| {
                let mut m = DMatrix::zeros(n, n);
                let f = &self.factors[k];
                m[(k, k)] = 2.0 * f.metric(x[k]) * f.christoffel(x[k]);
                m
            })
            .collect()
    }

    fn metric_second_derivatives(&self, x: &[f64]) -> Vec<Vec<DMatrix<f64>>> {
        let n = self.dim();
        let mut out = vec![vec![DMatrix::zeros(n, n); n]; n];
        for k in 0..n {
            let f = &self.factors[k];
            let c = f.christoffel(x[k]);
            out[k][k][(k, k)] = 2.0 * f.metric(x[k]) * (2.0 * c * c + f.christoffel_derivative(x[k]));
        }
        out
    }
}

impl Manifold for GeometryN {
    fn name(&self) -> String {
        let parts: Vec<String> = self.factors.iter().map(|f| f.family().name()).collect();
        parts.join(" ⊗ ")
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.factors.len() && self.factors.iter().zip(x).all(|(f, &xi)| f.support().contains(xi))
    }

    fn mode(&self) -> Vec<f64> {
        self.factors.iter().map(|f| f.mode()).collect()
    }

    fn chart(&self, x: &[f64]) -> Vec<f64> {
        self.factors.iter().zip(x).map(|(f, &xi)| f.chart(xi)).collect()
    }

    fn inverse_chart(&self, s: &[f64]) -> Vec<f64> {
        self.factors.iter().zip(s).map(|(f, &si)| f.inverse_chart(si)).collect()
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        self.factors.iter().zip(x).map(|(f, &xi)| f.family().log_density(xi)).sum()
    }

    fn chart_derivatives(&self, x: &[f64]) -> Vec<f64> {
        self.factors.iter().zip(x).map(|(f, &xi)| f.chart_derivative(xi)).collect()
    }

    fn fd_scales(&self, x: &[f64]) -> Vec<f64> {
        self.factors.iter().zip(x).map(|(f, &xi)| local_scale(f, xi)).collect()
    }

    fn breakpoints(&self) -> Vec<Vec<f64>> {
        self.factors.iter().map(|f| f.family().breakpoints()).collect()
    }
}

/// Exact and local-gaussian density reconstructions at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    pub rho: f64,
    /// `e^{−ℓ²/2}·√|g/2π| / 𝒵` with `ℓ = 𝔇(I, Ī)`.
    pub exact: f64,
    /// `exp[−½g_ij(Ī)ΔI^iΔI^j]·√|g(Ī)/2π|`, valid near `Ī`.
    pub local_gaussian: f64,
}

/// Rebuild the density from the metric and the mode alone.
pub fn reconstruct_density(m: &(impl Manifold + ?Sized), x: &[f64]) -> Result<Reconstruction> {
    if !m.contains(x) {
        return Err(Error::Domain(format!("{x:?} is outside the manifold of {}", m.name())));
    }
    let n = m.dim() as f64;
    let mode = m.mode();
    let l = m.distance(x, &mode);
    let z = (-m.gaussian_potential()).exp();
    let log_det = |g: &DMatrix<f64>| g.clone().cholesky().map(|c| 2.0 * c.l().diagonal().map(f64::ln).sum()).unwrap_or(f64::NAN);
    let g = m.metric(x);
    let exact = (-0.5 * l * l + 0.5 * (log_det(&g) - n * (2.0 * PI).ln())).exp() / z;
    let g0 = m.metric(&mode);
    let dx = nalgebra::DVector::from_iterator(x.len(), x.iter().zip(&mode).map(|(a, b)| a - b));
    let quad = (dx.transpose() * &g0 * &dx)[(0, 0)];
    let local_gaussian = (-0.5 * quad + 0.5 * (log_det(&g0) - n * (2.0 * PI).ln())).exp();
    Ok(Reconstruction { rho: m.log_density(x).exp(), exact, local_gaussian })
}

/// Chart-uniform grid on `[−4, 4]^n` with about `points` nodes in total.
pub(crate) fn chart_grid(m: &(impl Manifold + ?Sized), points: usize) -> Vec<Vec<f64>> {
    let d = m.dim();
    let per = if d == 1 { points } else { ((points as f64).powf(1.0 / d as f64).round() as usize).max(3) };
    let axis = linspace(-4.0, 4.0, per);
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out.into_iter().flat_map(|p| axis.iter().map(move |&s| [p.clone(), vec![s]].concat())).collect();
    }
    out.into_iter().map(|s| m.inverse_chart(&s)).filter(|x| m.contains(x)).collect()
}

/// Sup-norm of `ρ̂ − ρ` relative to `max ρ` on a chart-uniform grid.
pub fn reconstruction_check(m: &(impl Manifold + ?Sized), points: usize) -> VerificationReport {
    let grid = chart_grid(m, points);
    let mut rho = Vec::with_capacity(grid.len());
    let mut exact = Vec::with_capacity(grid.len());
    let mut local_dev: f64 = 0.0;
    for x in &grid {
        match reconstruct_density(m, x) {
            Ok(r) => {
                rho.push(r.rho);
                exact.push(r.exact);
                local_dev = local_dev.max((r.local_gaussian - r.rho).abs());
            }
            Err(_) => {
                rho.push(f64::NAN);
                exact.push(f64::NAN);
            }
        }
    }
    let peak = rho.iter().copied().fold(0.0, f64::max);
    let sup = rho.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, |m: f64, d| if d.is_nan() { f64::NAN } else { m.max(d) });
    VerificationReport::with_residual(
        Identity::DensityReconstruction,
        m.name(),
        exact,
        rho,
        vec![grid.len()],
        sup / peak,
        1e-9,
    )
    .note(format!("local gaussian approximation deviates by up to {:.3e} (relative)", local_dev / peak))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin, Mixture, Normal, Uniform};

    fn geom(f: impl crate::families::Family1D + 'static) -> Arc<Geometry1D> {
        Arc::new(Geometry1D::build(Arc::new(f)).unwrap())
    }

    #[test]
    fn product_distances_and_potential() {
        let g = product_geometry(vec![geom(Normal::standard()), geom(Normal::standard())]).unwrap();
        assert!((g.distance(&[0.0, 0.0], &[3.0, 4.0]) - 5.0).abs() < 1e-12);
        let g = product_geometry(vec![geom(Normal::standard()), geom(Uniform::new(0.0, 1.0).unwrap())]).unwrap();
        assert!(g.potential(&g.mode()).abs() < 1e-15);
        assert!(product_geometry(vec![geom(Normal::standard())]).is_err());
    }

    #[test]
    fn reconstruction_examples() {
        let n = geom(Normal::new(1.0, 2.0).unwrap());
        for x in [-3.0, 0.0, 1.0, 4.5] {
            let r = reconstruct_density(n.as_ref(), &[x]).unwrap();
            assert!((r.exact - r.rho).abs() < 1e-15 && (r.local_gaussian - r.rho).abs() < 1e-15);
        }
        let u = geom(Uniform::new(0.0, 1.0).unwrap());
        let r = reconstruct_density(u.as_ref(), &[0.5]).unwrap();
        assert!((r.exact - 1.0).abs() < 1e-14);
        let m = geom(Mixture::new(vec![0.45, 0.55], vec![-2.0, 1.5], vec![0.6, 0.8]).unwrap());
        let rep = reconstruction_check(m.as_ref(), 400);
        assert!(rep.pass, "{}", rep.summary_line());
    }

    #[test]
    fn reconstruction_over_products() {
        for name in ["product2", "product3", "product_normal"] {
            let g = GeometryN::from_family(&builtin(name).unwrap()).unwrap();
            let rep = reconstruction_check(&g, 400);
            assert!(rep.pass, "{}", rep.summary_line());
        }
    }

    #[test]
    fn analytic_metric_derivatives_match_differences() {
        let m = geom(Mixture::new(vec![0.45, 0.55], vec![-2.0, 1.5], vec![0.6, 0.8]).unwrap());
        for x in [-2.5, -0.3, 0.8, 2.0] {
            let a = m.metric_derivatives(&[x])[0][(0, 0)];
            let f = super::super::FiniteDifference(m.as_ref()).metric_derivatives(&[x])[0][(0, 0)];
            assert!((a - f).abs() < 1e-6 * (1.0 + a.abs()), "{x}: {a} vs {f}");
        }
    }
}
