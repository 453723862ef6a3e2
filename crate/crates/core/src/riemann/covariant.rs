//! Covariant identities of the information potential on a chart-uniform
//! interior grid.
//!
//! Derivatives of `𝒮`, `log ρ`, the metric and the connection are taken by
//! Richardson-extrapolated central differences with steps proportional to the
//! local chart scale, so each stencil spans the same fraction of arc length
//! whatever the family. Residuals are expressed in the orthonormal frame.

use super::manifold::chart_grid;
use super::{christoffel, Manifold};
use crate::error::{Error, Result};
use crate::report::{Identity, VerificationReport};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// Relative step for first derivatives, in units of the local chart scale.
const FIRST: f64 = 2e-3;
/// Relative step for second derivatives.
const SECOND: f64 = 1e-2;

/// Gradiental vector field of the information potential at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientalField {
    /// `ψ_i = −∂_i 𝒮`.
    pub covariant: Vec<f64>,
    /// `ψ^i = g^{ij}ψ_j`.
    pub contravariant: Vec<f64>,
    /// `ψ² = ψ_iψ^i`.
    pub norm_sq: f64,
    /// `υ^i = ψ^i/ψ`; `None` at the mode.
    pub unit: Option<Vec<f64>>,
    /// Restituting force `ζ_i = −ψ_i`.
    pub force: Vec<f64>,
}

fn field_from(psi: Vec<f64>, g: &DMatrix<f64>) -> Result<GradientalField> {
    let n = psi.len();
    let ginv = g.clone().try_inverse().ok_or_else(|| Error::Singular("metric is singular".into()))?;
    let up = &ginv * DVector::from_column_slice(&psi);
    let norm_sq = psi.iter().zip(up.iter()).map(|(a, b)| a * b).sum::<f64>().max(0.0);
    let norm = norm_sq.sqrt();
    let unit = (norm > 0.0).then(|| up.iter().map(|u| u / norm).collect());
    Ok(GradientalField {
        force: psi.iter().map(|p| -p).collect(),
        contravariant: up.iter().copied().take(n).collect(),
        covariant: psi,
        norm_sq,
        unit,
    })
}

/// The gradiental field from the analytic potential gradient.
pub fn gradiental_field(m: &(impl Manifold + ?Sized), x: &[f64]) -> Result<GradientalField> {
    if !m.contains(x) {
        return Err(Error::Domain(format!("{x:?} is outside the manifold of {}", m.name())));
    }
    let psi = m.potential_gradient(x).into_iter().map(|d| -d).collect();
    field_from(psi, &m.metric(x))
}

fn shift(x: &[f64], k: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[k] += h;
    y
}

/// Steps actually realized in floating point on either side of `x`.
fn realized(x: f64, h: f64) -> (f64, f64) {
    ((x + h) - x, x - (x - h))
}

/// `∂_k f` by Richardson extrapolation of two central differences.
fn d1<F: Fn(&[f64]) -> T, T: Diff>(f: &F, x: &[f64], k: usize, h: f64) -> T {
    let c = |h: f64| {
        let (hp, hm) = realized(x[k], h);
        f(&shift(x, k, hp)).sub(&f(&shift(x, k, -hm))).scale(1.0 / (hp + hm))
    };
    c(0.5 * h).scale(4.0 / 3.0).sub(&c(h).scale(1.0 / 3.0))
}

/// `∂_k∂_l f` by Richardson extrapolation.
fn d2<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], k: usize, l: usize, hk: f64, hl: f64) -> f64 {
    let c = |t: f64| {
        if k == l {
            let (hp, hm) = realized(x[k], t * hk);
            let f0 = f(x);
            2.0 * ((f(&shift(x, k, hp)) - f0) / hp - (f0 - f(&shift(x, k, -hm))) / hm) / (hp + hm)
        } else {
            let (ap, am) = realized(x[k], t * hk);
            let (bp, bm) = realized(x[l], t * hl);
            let at = |p: f64, q: f64| f(&shift(&shift(x, k, p), l, q));
            (at(ap, bp) - at(ap, -bm) - at(-am, bp) + at(-am, -bm)) / ((ap + am) * (bp + bm))
        }
    };
    (4.0 * c(0.5) - c(1.0)) / 3.0
}

/// Minimal arithmetic for quantities differentiated by [`d1`].
trait Diff: Sized {
    fn sub(&self, o: &Self) -> Self;
    fn scale(&self, a: f64) -> Self;
}

impl Diff for f64 {
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn scale(&self, a: f64) -> Self {
        self * a
    }
}

impl Diff for Vec<f64> {
    fn sub(&self, o: &Self) -> Self {
        self.iter().zip(o).map(|(a, b)| a - b).collect()
    }
    fn scale(&self, a: f64) -> Self {
        self.iter().map(|v| v * a).collect()
    }
}

impl Diff for DMatrix<f64> {
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn scale(&self, a: f64) -> Self {
        self * a
    }
}

/// Whether a stencil of half-width `reach[k]` around `x` stays in the open
/// support and away from every breakpoint.
fn stencil_ok(m: &(impl Manifold + ?Sized), x: &[f64], reach: &[f64], breaks: &[Vec<f64>]) -> bool {
    for k in 0..x.len() {
        if breaks[k].iter().any(|b| (x[k] - b).abs() <= reach[k]) {
            return false;
        }
        if !m.contains(&shift(x, k, reach[k])) || !m.contains(&shift(x, k, -reach[k])) {
            return false;
        }
    }
    true
}

/// Per-point quantities entering the covariant reports, frame-normalized.
#[derive(Default)]
struct PointResiduals {
    hessian: (Vec<f64>, Vec<f64>),
    pde: (Vec<f64>, Vec<f64>),
    decomposition: (f64, f64),
    distance: (f64, f64),
    sphere: (f64, f64),
    compatibility: (Vec<f64>, Vec<f64>),
    unit_geodesic: Option<Vec<f64>>,
}

fn point_residuals(m: &(impl Manifold + ?Sized), x: &[f64]) -> Result<PointResiduals> {
    let n = m.dim();
    let scales = m.fd_scales(x);
    let h1: Vec<f64> = scales.iter().map(|s| FIRST * s).collect();
    let h2: Vec<f64> = scales.iter().map(|s| SECOND * s).collect();
    let pot = |y: &[f64]| m.potential(y);
    let logr = |y: &[f64]| m.log_density(y);

    let g = m.metric(x);
    let gamma = christoffel(m, x)?;
    let frame: Vec<f64> = (0..n).map(|i| g[(i, i)].sqrt()).collect();

    let ds: Vec<f64> = (0..n).map(|k| d1(&pot, x, k, h1[k])).collect();
    let dlr: Vec<f64> = (0..n).map(|k| d1(&logr, x, k, h1[k])).collect();
    let contraction = |y: &[f64]| -> Vec<f64> {
        match christoffel(m, y) {
            Ok(c) => (0..n).map(|j| (0..n).map(|k| c.get(k, j, k)).sum()).collect(),
            Err(_) => vec![f64::NAN; n],
        }
    };
    let trace = contraction(x);
    let dtrace: Vec<Vec<f64>> = (0..n).map(|i| d1(&contraction, x, i, h2[i])).collect();

    let mut r = PointResiduals::default();
    for i in 0..n {
        for j in 0..n {
            let norm = frame[i] * frame[j];
            let gs: f64 = (0..n).map(|k| gamma.get(k, i, j) * ds[k]).sum();
            let hess = d2(&pot, x, i, j, h2[i], h2[j]) - gs;
            r.hessian.0.push(g[(i, j)] / norm);
            r.hessian.1.push(-hess / norm);

            let glr: f64 = (0..n).map(|k| gamma.get(k, i, j) * dlr[k]).sum();
            let gg: f64 = (0..n).map(|k| gamma.get(k, i, j) * trace[k]).sum();
            let rhs = -d2(&logr, x, i, j, h2[i], h2[j]) + glr + dtrace[i][j] - gg;
            r.pde.0.push(g[(i, j)] / norm);
            r.pde.1.push(rhs / norm);
        }
    }

    let psi: Vec<f64> = ds.iter().map(|d| -d).collect();
    let field = field_from(psi, &g)?;
    let s = m.potential(x);
    let p = m.gaussian_potential();
    let ell = m.distance(x, &m.mode());
    r.decomposition = (s - p, -0.5 * field.norm_sq);
    r.distance = (field.norm_sq.sqrt(), ell);
    r.sphere = (s, p - 0.5 * ell * ell);

    let metric = |y: &[f64]| m.metric(y);
    let dg: Vec<DMatrix<f64>> = (0..n).map(|k| d1(&metric, x, k, h2[k])).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let norm = frame[i] * frame[j] * frame[k];
                let conn: f64 = (0..n).map(|l| gamma.get(l, k, i) * g[(l, j)] + gamma.get(l, k, j) * g[(i, l)]).sum();
                r.compatibility.0.push(dg[k][(i, j)] / norm);
                r.compatibility.1.push(conn / norm);
            }
        }
    }

    // away from the mode the unit field must be geodesic
    if ell > 0.05 {
        let unit = |y: &[f64]| -> Vec<f64> {
            let psi: Vec<f64> = (0..n).map(|k| -d1(&pot, y, k, h1[k])).collect();
            field_from(psi, &m.metric(y)).ok().and_then(|f| f.unit).unwrap_or_else(|| vec![f64::NAN; n])
        };
        let u = unit(x);
        let du: Vec<Vec<f64>> = (0..n).map(|k| d1(&unit, x, k, h2[k])).collect();
        let acc = (0..n)
            .map(|i| {
                let a: f64 = (0..n)
                    .map(|k| u[k] * (du[k][i] + (0..n).map(|l| gamma.get(i, k, l) * u[l]).sum::<f64>()))
                    .sum();
                a * frame[i]
            })
            .collect();
        r.unit_geodesic = Some(acc);
    }
    Ok(r)
}

/// Theorem-level covariant identities on a chart-uniform grid of about
/// `points` nodes: the covariant Hessian of `𝒮` equals `−g`, the metric
/// solves the covariant PDE built from `log ρ`, the gaussian decomposition
/// `𝒮 − 𝒫 + ½ψ² = 0`, `|ψ| = 𝔇(I, Ī)`, level sets of `𝒮` are geodesic
/// spheres, `D_k g_ij = 0` and the unit gradiental field is geodesic.
pub fn covariant_checks(m: &(impl Manifold + ?Sized), points: usize) -> Vec<VerificationReport> {
    let n = m.dim();
    let breaks = m.breakpoints();
    let grid: Vec<Vec<f64>> = chart_grid(m, points)
        .into_iter()
        .filter(|x| {
            let reach: Vec<f64> = m.fd_scales(x).iter().map(|s| SECOND * s).collect();
            stencil_ok(m, x, &reach, &breaks)
        })
        .collect();
    let total = chart_grid(m, points).len();
    let skipped = total - grid.len();
    let results: Vec<Result<PointResiduals>> = grid.par_iter().map(|x| point_residuals(m, x)).collect();

    let name = m.name();
    let failures = results.iter().filter(|r| r.is_err()).count();
    let ok: Vec<PointResiduals> = results.into_iter().filter_map(|r| r.ok()).collect();
    let np = ok.len();
    let cat = |f: &dyn Fn(&PointResiduals) -> (Vec<f64>, Vec<f64>)| -> (Vec<f64>, Vec<f64>) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for p in &ok {
            let (x, y) = f(p);
            a.extend(x);
            b.extend(y);
        }
        (a, b)
    };
    let note = format!("{np} grid points, {skipped} skipped at breakpoints or edges, {failures} singular");
    let mut reports = Vec::new();
    let mut push = |id: Identity, (a, b): (Vec<f64>, Vec<f64>), shape: Vec<usize>, tol: f64| {
        let mut r = VerificationReport::compare(id, name.clone(), a, b, shape, tol).note(note.clone());
        if failures > 0 {
            r.pass = false;
        }
        reports.push(r);
    };
    push(Identity::CovariantHessian, cat(&|p| p.hessian.clone()), vec![np, n, n], 1e-6);
    push(Identity::CovariantPde, cat(&|p| p.pde.clone()), vec![np, n, n], 1e-6);
    push(
        Identity::GaussianDecomposition,
        cat(&|p| (vec![p.decomposition.0], vec![p.decomposition.1])),
        vec![np],
        1e-6,
    );
    push(Identity::GradientDistance, cat(&|p| (vec![p.distance.0], vec![p.distance.1])), vec![np], 1e-9);
    push(Identity::PotentialSphere, cat(&|p| (vec![p.sphere.0], vec![p.sphere.1])), vec![np], 1e-9);
    push(Identity::MetricCompatibility, cat(&|p| p.compatibility.clone()), vec![np, n, n, n], 1e-6);
    let geo = cat(&|p| match &p.unit_geodesic {
        Some(v) => (v.clone(), vec![0.0; v.len()]),
        None => (vec![], vec![]),
    });
    let ng = geo.0.len() / n.max(1);
    push(Identity::UnitFieldGeodesic, geo, vec![ng, n], 1e-6);
    reports
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin, corpus, Normal};
    use crate::geometry1d::Geometry1D;
    use crate::riemann::GeometryN;
    use std::sync::Arc;

    #[test]
    fn gradiental_field_at_and_off_the_mode() {
        let g = Geometry1D::build(Arc::new(Normal::new(0.0, 2.0).unwrap())).unwrap();
        let f = gradiental_field(&g, &[0.0]).unwrap();
        assert_eq!(f.norm_sq, 0.0);
        assert!(f.unit.is_none());
        let f = gradiental_field(&g, &[3.0]).unwrap();
        assert!((f.norm_sq.sqrt() - 1.5).abs() < 1e-14);
        assert!((f.unit.unwrap()[0] - 2.0).abs() < 1e-14);
        assert!(gradiental_field(&g, &[f64::INFINITY]).is_err());
    }

    #[test]
    fn normal_geometry_residuals() {
        let g = Geometry1D::build(Arc::new(Normal::new(1.0, 0.7).unwrap())).unwrap();
        for r in covariant_checks(&g, 41) {
            assert!(r.residual < 1e-8, "{}", r.summary_line());
        }
    }

    #[test]
    fn one_dimensional_corpus() {
        for e in corpus().into_iter().filter(|e| e.family.dim() == 1) {
            let g = Geometry1D::build(e.family.as_one().unwrap().clone()).unwrap();
            for r in covariant_checks(&g, 41) {
                assert!(r.pass, "{}", r.summary_line());
            }
        }
    }

    #[test]
    fn product_geometry_residuals() {
        let g = GeometryN::from_family(&builtin("product2").unwrap()).unwrap();
        for r in covariant_checks(&g, 49) {
            assert!(r.pass, "{}", r.summary_line());
        }
    }
}
