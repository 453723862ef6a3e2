//! Riemannian structure: connection, curvature, covariant identities,
//! geodesics, the hydrodynamic flow and density reconstruction.

mod covariant;
mod geodesic;
mod manifold;

pub use covariant::{covariant_checks, gradiental_field, GradientalField};
pub use geodesic::{
    geodesic_checks, geodesic_integrate, hydrodynamic_checks, hydrodynamic_relax, unit_direction, GeodesicState,
    Trajectory,
};
pub use manifold::{
    product_geometry, reconstruct_density, reconstruction_check, GeometryN, Manifold, Reconstruction,
};

use crate::error::{Error, Result};
use crate::report::{Identity, VerificationReport};
use crate::tensor::{Tensor3, Tensor4};
use nalgebra::DMatrix;

/// Step for first derivatives of metric components.
pub fn first_step(x: f64) -> f64 {
    1e-5 * (1.0 + x.abs())
}

/// Step for second derivatives of metric components.
pub fn second_step(x: f64) -> f64 {
    1e-4 * (1.0 + x.abs())
}

/// A metric tensor field `g_ij(I)` with its first two derivatives. The
/// derivative defaults use central differences.
pub trait MetricField: Send + Sync {
    fn dim(&self) -> usize;

    fn metric(&self, x: &[f64]) -> DMatrix<f64>;

    /// `∂_k g_ij`, one matrix per `k`.
    fn metric_derivatives(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        fd_first(self, x)
    }

    /// `∂_k ∂_l g_ij`, indexed `[k][l]`.
    fn metric_second_derivatives(&self, x: &[f64]) -> Vec<Vec<DMatrix<f64>>> {
        fd_second(self, x)
    }
}

fn shifted(x: &[f64], k: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[k] += h;
    y
}

fn fd_first<M: MetricField + ?Sized>(m: &M, x: &[f64]) -> Vec<DMatrix<f64>> {
    (0..m.dim())
        .map(|k| {
            let h = first_step(x[k]);
            (m.metric(&shifted(x, k, h)) - m.metric(&shifted(x, k, -h))) / (2.0 * h)
        })
        .collect()
}

fn fd_second<M: MetricField + ?Sized>(m: &M, x: &[f64]) -> Vec<Vec<DMatrix<f64>>> {
    let n = m.dim();
    let g0 = m.metric(x);
    let mut out = vec![vec![DMatrix::zeros(n, n); n]; n];
    for k in 0..n {
        let hk = second_step(x[k]);
        out[k][k] = (m.metric(&shifted(x, k, hk)) - &g0 * 2.0 + m.metric(&shifted(x, k, -hk))) / (hk * hk);
        for l in k + 1..n {
            let hl = second_step(x[l]);
            let at = |a: f64, b: f64| m.metric(&shifted(&shifted(x, k, a * hk), l, b * hl));
            let d = (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * hk * hl);
            out[k][l] = d.clone();
            out[l][k] = d;
        }
    }
    out
}

/// Forces finite-difference derivatives of another metric field.
pub struct FiniteDifference<'a, M: MetricField + ?Sized>(pub &'a M);

impl<M: MetricField + ?Sized> MetricField for FiniteDifference<'_, M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        self.0.metric(x)
    }
}

/// A position-independent metric.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantMetric(pub DMatrix<f64>);

impl MetricField for ConstantMetric {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn metric(&self, _x: &[f64]) -> DMatrix<f64> {
        self.0.clone()
    }
}

/// Round 2-sphere of radius `r` in coordinates `(ϑ, φ)`:
/// `ds² = r²dϑ² + r²sin²ϑ dφ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereMetric {
    pub r: f64,
}

impl MetricField for SphereMetric {
    fn dim(&self) -> usize {
        2
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let r2 = self.r * self.r;
        DMatrix::from_row_slice(2, 2, &[r2, 0.0, 0.0, r2 * x[0].sin().powi(2)])
    }
}

fn inverse(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    g.clone().try_inverse().filter(|m| m.iter().all(|v| v.is_finite())).ok_or_else(|| Error::Singular("metric".into()))
}

fn christoffel_from(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Tensor3 {
    let n = ginv.nrows();
    let mut t = Tensor3::zeros(n);
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for m in 0..n {
                    acc += ginv[(k, m)] * (dg[j][(i, m)] + dg[i][(j, m)] - dg[m][(i, j)]);
                }
                t.set(k, i, j, 0.5 * acc);
                t.set(k, j, i, 0.5 * acc);
            }
        }
    }
    t
}

/// Levi-Civita connection `Γ^k_ij = ½g^{km}(∂_j g_im + ∂_i g_jm − ∂_m g_ij)`,
/// stored as `[k][i][j]`.
pub fn christoffel(metric: &(impl MetricField + ?Sized), x: &[f64]) -> Result<Tensor3> {
    let ginv = inverse(&metric.metric(x))?;
    Ok(christoffel_from(&ginv, &metric.metric_derivatives(x)))
}

/// Riemann tensor, Ricci tensor and scalar curvature at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature {
    /// `R^l_ijk = ∂_iΓ^l_jk − ∂_jΓ^l_ik + Γ^l_imΓ^m_jk − Γ^l_jmΓ^m_ik`,
    /// stored as `[l][i][j][k]`.
    pub riemann: Tensor4,
    /// `R_jk = R^l_ljk`.
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    /// `max |R^l_ijk + R^l_jik|`, zero up to rounding.
    pub antisymmetry: f64,
    /// Some finite-difference step vanished against its coordinate.
    pub step_underflow: bool,
}

/// Curvature from the metric and its first two derivatives.
pub fn curvature(metric: &(impl MetricField + ?Sized), x: &[f64]) -> Result<Curvature> {
    let n = metric.dim();
    let g = metric.metric(x);
    let ginv = inverse(&g)?;
    let dg = metric.metric_derivatives(x);
    let ddg = metric.metric_second_derivatives(x);
    let gamma = christoffel_from(&ginv, &dg);
    // ∂_i g^{lm} = −g^{la} ∂_i g_ab g^{bm}
    let dginv: Vec<DMatrix<f64>> = dg.iter().map(|d| -(&ginv * d * &ginv)).collect();
    // dgamma[i] holds ∂_i Γ^l_jk
    let mut dgamma = Vec::with_capacity(n);
    for i in 0..n {
        let mut t = Tensor3::zeros(n);
        for l in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = 0.0;
                    for m in 0..n {
                        let bracket = dg[k][(j, m)] + dg[j][(k, m)] - dg[m][(j, k)];
                        let dbracket = ddg[i][k][(j, m)] + ddg[i][j][(k, m)] - ddg[i][m][(j, k)];
                        acc += dginv[i][(l, m)] * bracket + ginv[(l, m)] * dbracket;
                    }
                    t.set(l, j, k, 0.5 * acc);
                }
            }
        }
        dgamma.push(t);
    }
    let mut riemann = Tensor4::zeros(n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = dgamma[i].get(l, j, k) - dgamma[j].get(l, i, k);
                    for m in 0..n {
                        v += gamma.get(l, i, m) * gamma.get(m, j, k) - gamma.get(l, j, m) * gamma.get(m, i, k);
                    }
                    riemann.set(l, i, j, k, v);
                }
            }
        }
    }
    let mut antisymmetry: f64 = 0.0;
    let mut ricci = DMatrix::zeros(n, n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    antisymmetry = antisymmetry.max((riemann.get(l, i, j, k) + riemann.get(l, j, i, k)).abs());
                }
            }
        }
    }
    for j in 0..n {
        for k in 0..n {
            ricci[(j, k)] = (0..n).map(|l| riemann.get(l, l, j, k)).sum();
        }
    }
    let scalar = (0..n).flat_map(|j| (0..n).map(move |k| (j, k))).map(|(j, k)| ginv[(j, k)] * ricci[(j, k)]).sum();
    let step_underflow = x.iter().any(|&v| v + second_step(v) == v || v + first_step(v) == v);
    Ok(Curvature { riemann, ricci, scalar, antisymmetry, step_underflow })
}

/// Largest Riemann component over a chart-uniform grid, with metric
/// derivatives forced through finite differences.
pub fn flatness_check(m: &(impl Manifold + ?Sized), points: usize) -> VerificationReport {
    // the difference stencils must stay inside the support
    let inside = |x: &Vec<f64>| {
        (0..x.len()).all(|k| [-1.0, 1.0].iter().all(|d| m.contains(&shifted(x, k, d * second_step(x[k]).max(first_step(x[k]))))))
    };
    let all = manifold::chart_grid(m, points);
    let grid: Vec<Vec<f64>> = all.iter().filter(|x| inside(x)).cloned().collect();
    let mut worst: f64 = 0.0;
    let mut asym: f64 = 0.0;
    let mut failures = 0;
    for x in &grid {
        match curvature(&FiniteDifference(m), x) {
            Ok(c) => {
                let v = c.riemann.max_abs();
                worst = if v.is_nan() { f64::NAN } else { worst.max(v) };
                asym = asym.max(c.antisymmetry);
            }
            Err(_) => failures += 1,
        }
    }
    let residual = if failures > 0 { f64::INFINITY } else { worst };
    VerificationReport::with_residual(Identity::RiemannTensor, m.name(), vec![worst], vec![0.0], vec![], residual, 1e-4)
        .note(format!(
            "{} grid points, {} too close to the edge, {failures} singular, antisymmetry defect {asym:.1e}",
            grid.len(),
            all.len() - grid.len()
        ))
}

/// Scalar curvature of the round sphere of radius `r` at colatitude
/// `theta`, against `2/r²`.
pub fn sphere_curvature_check(r: f64, theta: f64) -> Result<VerificationReport> {
    let c = curvature(&SphereMetric { r }, &[theta, 0.0])?;
    Ok(VerificationReport::scalar(Identity::ScalarCurvature, format!("sphere(r = {r})"), c.scalar, 2.0 / (r * r), 1e-4)
        .note(format!("antisymmetry defect {:.1e}", c.antisymmetry)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_metric_has_no_connection() {
        let m = ConstantMetric(DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]));
        assert_eq!(christoffel(&m, &[0.4, -1.0]).unwrap().max_abs(), 0.0);
        assert_eq!(curvature(&m, &[0.4, -1.0]).unwrap().riemann.max_abs(), 0.0);
    }

    #[test]
    fn one_dimensional_christoffel_is_half_log_derivative() {
        struct G;
        impl MetricField for G {
            fn dim(&self) -> usize {
                1
            }
            fn metric(&self, x: &[f64]) -> DMatrix<f64> {
                DMatrix::from_element(1, 1, (x[0] * x[0]).exp())
            }
        }
        // ½ d/dx log e^{x²} = x
        let t = christoffel(&G, &[0.7]).unwrap();
        assert!((t.get(0, 0, 0) - 0.7).abs() < 1e-9);
        assert!(curvature(&G, &[0.7]).unwrap().riemann.max_abs() == 0.0);
    }

    #[test]
    fn sphere_scalar_curvature() {
        for r in [0.5, 1.0, 3.0] {
            let c = curvature(&SphereMetric { r }, &[1.1, 0.3]).unwrap();
            assert!((c.scalar - 2.0 / (r * r)).abs() < 1e-4, "r = {r}: {}", c.scalar);
            assert!(c.antisymmetry < 1e-12 && !c.step_underflow);
            // R^ϑ_{ϑφφ}... the only independent component is sin²ϑ
            assert!((c.riemann.get(0, 0, 1, 1) - 1.1f64.sin().powi(2)).abs() < 1e-4);
        }
    }

    #[test]
    fn products_are_flat() {
        for name in ["product2", "product3", "product_normal"] {
            let g = GeometryN::from_family(&crate::families::builtin(name).unwrap()).unwrap();
            let r = flatness_check(&g, 200);
            assert!(r.pass, "{}", r.summary_line());
        }
        assert!(sphere_curvature_check(2.0, 0.8).unwrap().pass);
    }

    #[test]
    fn singular_metric_is_an_error() {
        let m = ConstantMetric(DMatrix::zeros(2, 2));
        assert!(matches!(christoffel(&m, &[0.0, 0.0]), Err(Error::Singular(_))));
    }
}
