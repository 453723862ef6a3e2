//! Fluctuation theorems and uncertainty bounds.
//!
//! For a density that vanishes (with its slope) at the boundary, integration
//! by parts gives `⟨∂_i A⟩ = ⟨η_i A⟩` for any smooth observable `A`. The
//! special cases `A = 1`, `A = δI^j` and `A = η_j` are the equilibrium
//! condition `⟨η_i⟩ = 0`, the fundamental theorem `⟨η_i δI^j⟩ = δ_i^j` and the
//! associated theorem `⟨χ_ij⟩ = ⟨η_i η_j⟩`. Cauchy–Schwarz on the fundamental
//! theorem yields `ΔI·Δη ≥ 1` and, in matrix form, `C − M⁻¹ ⪰ 0`.

use crate::error::{Error, Result};
use crate::families::{validate_boundary, AnyFamily};
use crate::numerics::{expectation_any_vec, QuadratureSpec};
use crate::report::{Flag, Identity, VerificationReport};
use nalgebra::{DMatrix, DVector};

/// Tolerance for the integration-by-parts identities.
pub const IDENTITY_TOL: f64 = 1e-8;

/// A smooth observable `A(I⃗)` with its gradient.
pub struct Observable {
    pub name: String,
    value: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    gradient: Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
}

impl Observable {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), value: Box::new(value), gradient: Box::new(gradient) }
    }

    /// `A = (I^i)^k`.
    pub fn power(i: usize, k: i32, dim: usize) -> Self {
        Self::new(
            format!("I{i}^{k}"),
            move |x| x[i].powi(k),
            move |x| {
                let mut g = vec![0.0; dim];
                if k > 0 {
                    g[i] = k as f64 * x[i].powi(k - 1);
                }
                g
            },
        )
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
}

impl std::fmt::Debug for Observable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Observable({})", self.name)
    }
}

/// Second-order statistics of the fluctuations.
#[derive(Debug, Clone)]
pub struct MomentSet {
    pub total: f64,
    pub mean: DVector<f64>,
    pub mean_eta: DVector<f64>,
    /// `M_ij = ⟨η_i η_j⟩`.
    pub m: DMatrix<f64>,
    /// `C^ij = ⟨δI^i δI^j⟩`.
    pub c: DMatrix<f64>,
    /// `⟨χ_ij⟩`.
    pub chi: DMatrix<f64>,
    /// `⟨η_i δI^j⟩`.
    pub eta_di: DMatrix<f64>,
    pub converged: bool,
}

fn eta_of(family: &AnyFamily, x: &[f64]) -> Vec<f64> {
    match family {
        AnyFamily::One(f) => vec![f.eta(x[0])],
        AnyFamily::Product(p) => p.eta(x),
    }
}

fn chi_of(family: &AnyFamily, x: &[f64]) -> Vec<Vec<f64>> {
    match family {
        AnyFamily::One(f) => vec![vec![f.chi(x[0])]],
        AnyFamily::Product(p) => p.chi(x),
    }
}

/// Compute the moment set by quadrature (two passes: mean, then central
/// moments).
pub fn moments(family: &AnyFamily, spec: &QuadratureSpec) -> MomentSet {
    let n = family.dim();
    let first = expectation_any_vec(
        family,
        1 + 2 * n,
        |x, o| {
            o[0] = 1.0;
            o[1..=n].copy_from_slice(x);
            o[n + 1..].copy_from_slice(&eta_of(family, x));
        },
        spec,
    );
    let mean = DVector::from_row_slice(&first.values[1..=n]);
    let mean_eta = DVector::from_row_slice(&first.values[n + 1..]);
    let nn = n * n;
    let second = expectation_any_vec(
        family,
        4 * nn,
        |x, o| {
            let eta = eta_of(family, x);
            let chi = chi_of(family, x);
            for i in 0..n {
                for j in 0..n {
                    let k = i * n + j;
                    o[k] = eta[i] * eta[j];
                    o[nn + k] = (x[i] - mean[i]) * (x[j] - mean[j]);
                    o[2 * nn + k] = chi[i][j];
                    o[3 * nn + k] = eta[i] * (x[j] - mean[j]);
                }
            }
        },
        spec,
    );
    let block = |b: usize| DMatrix::from_row_slice(n, n, &second.values[b * nn..(b + 1) * nn]);
    MomentSet {
        total: first.values[0],
        mean,
        mean_eta,
        m: block(0),
        c: block(1),
        chi: block(2),
        eta_di: block(3),
        converged: first.converged && second.converged,
    }
}

fn flatten(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            v.push(m[(i, j)]);
        }
    }
    v
}

/// Smallest eigenvalue of the symmetrized matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let s = 0.5 * (m + m.transpose());
    s.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Whether every factor satisfies the boundary decay conditions.
pub fn is_conforming(family: &AnyFamily) -> bool {
    family.factors().into_iter().all(|f| validate_boundary(f).iter().all(|r| r.pass))
}

/// `|⟨∂_i A⟩ − ⟨η_i A⟩|` per component.
pub fn verify_identity(family: &AnyFamily, a: &Observable, spec: &QuadratureSpec) -> VerificationReport {
    let n = family.dim();
    let r = expectation_any_vec(
        family,
        2 * n,
        |x, o| {
            let g = a.gradient(x);
            let v = a.value(x);
            let eta = eta_of(family, x);
            for i in 0..n {
                o[i] = g[i];
                o[n + i] = eta[i] * v;
            }
        },
        spec,
    );
    VerificationReport::compare(
        Identity::ExpectationIdentity,
        family.name(),
        r.values[..n].to_vec(),
        r.values[n..].to_vec(),
        vec![n],
        IDENTITY_TOL,
    )
    .flag_if(!r.converged, Flag::QuadratureNonConvergence)
    .note(format!("A = {}", a.name))
}

fn not_applicable_set(family: &AnyFamily, ids: &[Identity]) -> Vec<VerificationReport> {
    ids.iter()
        .map(|&id| {
            VerificationReport::not_applicable(id, family.name(), "density or its slope does not vanish at the boundary")
                .flag(Flag::NonConforming)
        })
        .collect()
}

/// Normalization, equilibrium, fundamental and associated theorems, and
/// positivity of `⟨χ⟩`.
pub fn verify_fluctuation_theorems(family: &AnyFamily, spec: &QuadratureSpec) -> Vec<VerificationReport> {
    let ids = [
        Identity::Normalization,
        Identity::EquilibriumCondition,
        Identity::FundamentalTheorem,
        Identity::AssociatedTheorem,
        Identity::ResponsePositivity,
    ];
    if !is_conforming(family) {
        return not_applicable_set(family, &ids);
    }
    let n = family.dim();
    let ms = moments(family, spec);
    let name = family.name();
    let eye = flatten(&DMatrix::identity(n, n));
    let min_chi = min_eigenvalue(&ms.chi);
    let reports = vec![
        VerificationReport::scalar(Identity::Normalization, &name, ms.total, 1.0, 1e-10),
        VerificationReport::compare(Identity::EquilibriumCondition, &name, ms.mean_eta.as_slice().to_vec(), vec![0.0; n], vec![n], IDENTITY_TOL),
        VerificationReport::compare(Identity::FundamentalTheorem, &name, flatten(&ms.eta_di), eye, vec![n, n], IDENTITY_TOL),
        VerificationReport::compare(Identity::AssociatedTheorem, &name, flatten(&ms.chi), flatten(&ms.m), vec![n, n], IDENTITY_TOL),
        VerificationReport::with_residual(
            Identity::ResponsePositivity,
            &name,
            vec![min_chi],
            vec![0.0],
            vec![],
            if min_chi > 0.0 { 0.0 } else { f64::INFINITY },
            0.0,
        )
        .note("smallest eigenvalue of the mean response matrix"),
    ];
    reports.into_iter().map(|r| r.flag_if(!ms.converged, Flag::QuadratureNonConvergence)).collect()
}

/// Statistical uncertainties and the matrix bound.
#[derive(Debug, Clone)]
pub struct UncertaintyReport {
    /// `ΔI^i = √C^ii`.
    pub delta_i: Vec<f64>,
    /// `Δη_i = √M_ii`.
    pub delta_eta: Vec<f64>,
    pub product: Vec<f64>,
    /// `C − M⁻¹`.
    pub bound_matrix: DMatrix<f64>,
    pub min_eigenvalue: f64,
    pub converged: bool,
}

pub fn uncertainty_report(family: &AnyFamily, spec: &QuadratureSpec) -> Result<UncertaintyReport> {
    let ms = moments(family, spec);
    let n = family.dim();
    let m_inv = ms
        .m
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::Singular(format!("force correlation matrix of {} is not positive definite", family.name())))?;
    let delta_i: Vec<f64> = (0..n).map(|i| ms.c[(i, i)].sqrt()).collect();
    let delta_eta: Vec<f64> = (0..n).map(|i| ms.m[(i, i)].sqrt()).collect();
    let product = (0..n).map(|i| delta_i[i] * delta_eta[i]).collect();
    let bound_matrix = &ms.c - m_inv;
    let min_eigenvalue = min_eigenvalue(&bound_matrix);
    Ok(UncertaintyReport { delta_i, delta_eta, product, bound_matrix, min_eigenvalue, converged: ms.converged })
}

/// `ΔI·Δη ≥ 1` per coordinate and `C − M⁻¹ ⪰ 0`, each to within 1e-9.
pub fn verify_uncertainty(family: &AnyFamily, spec: &QuadratureSpec) -> Vec<VerificationReport> {
    if !is_conforming(family) {
        return not_applicable_set(family, &[Identity::UncertaintyProduct, Identity::UncertaintyMatrix]);
    }
    let name = family.name();
    match uncertainty_report(family, spec) {
        Ok(u) => {
            let n = u.product.len();
            let deficit = u.product.iter().map(|p| (1.0 - p).max(0.0)).fold(0.0, f64::max);
            vec![
                VerificationReport::with_residual(Identity::UncertaintyProduct, &name, u.product.clone(), vec![1.0; n], vec![n], deficit, 1e-9)
                    .note("inequality: product >= 1"),
                VerificationReport::with_residual(
                    Identity::UncertaintyMatrix,
                    &name,
                    vec![u.min_eigenvalue],
                    vec![0.0],
                    vec![],
                    (-u.min_eigenvalue).max(0.0),
                    1e-9,
                )
                .note("smallest eigenvalue of C - M^-1"),
            ]
            .into_iter()
            .map(|r| r.flag_if(!u.converged, Flag::QuadratureNonConvergence))
            .collect()
        }
        Err(e) => vec![VerificationReport::with_residual(
            Identity::UncertaintyMatrix,
            &name,
            vec![],
            vec![],
            vec![],
            f64::INFINITY,
            1e-9,
        )
        .note(e.to_string())],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin, corpus, Normal, ProductFamily};
    use std::sync::Arc;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn identity_examples() {
        let n = AnyFamily::One(Arc::new(Normal::standard()));
        let r = verify_identity(&n, &Observable::power(0, 0, 1), &spec());
        assert!(r.residual < 1e-10 && r.lhs[0] == 0.0);
        let r = verify_identity(&n, &Observable::power(0, 1, 1), &spec());
        assert!(r.residual < 1e-10 && (r.lhs[0] - 1.0).abs() < 1e-13);
        let m = builtin("mixture").unwrap();
        let r = verify_identity(&m, &Observable::power(0, 2, 1), &spec());
        assert!(r.residual < 1e-8, "{}", r.summary_line());
    }

    #[test]
    fn polynomial_observables_on_conforming_corpus() {
        for e in corpus().into_iter().filter(|e| e.conforming) {
            for i in 0..e.family.dim() {
                for k in 0..=3 {
                    let r = verify_identity(&e.family, &Observable::power(i, k, e.family.dim()), &spec());
                    assert!(r.pass, "{}: {}", e.name, r.summary_line());
                }
            }
        }
    }

    #[test]
    fn theorems_hold_on_conforming_corpus() {
        for e in corpus() {
            let reports = verify_fluctuation_theorems(&e.family, &spec());
            assert_eq!(e.conforming, !reports[0].has_flag(Flag::NotApplicable), "{}", e.name);
            for r in reports {
                assert!(r.pass, "{}: {}", e.name, r.summary_line());
            }
        }
    }

    #[test]
    fn shifted_normal_response() {
        let f = AnyFamily::One(Arc::new(Normal::new(3.0, 0.5).unwrap()));
        let ms = moments(&f, &spec());
        assert!((ms.chi[(0, 0)] - 4.0).abs() < 1e-9);
        assert!((ms.m[(0, 0)] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn gaussians_saturate_and_mixture_exceeds() {
        let n = AnyFamily::One(Arc::new(Normal::new(-1.0, 2.5).unwrap()));
        let u = uncertainty_report(&n, &spec()).unwrap();
        assert!((u.delta_i[0] - 2.5).abs() < 1e-10 && (u.delta_eta[0] - 0.4).abs() < 1e-10);
        assert!((u.product[0] - 1.0).abs() < 1e-10);
        let m = uncertainty_report(&builtin("mixture").unwrap(), &spec()).unwrap();
        assert!(m.product[0] > 1.0 + 1e-3, "{}", m.product[0]);
        assert!(m.min_eigenvalue > -1e-9);
        let p = AnyFamily::Product(
            ProductFamily::new(vec![Arc::new(Normal::new(0.0, 1.0).unwrap()), Arc::new(Normal::new(2.0, 0.3).unwrap())]).unwrap(),
        );
        let u = uncertainty_report(&p, &spec()).unwrap();
        assert!(u.bound_matrix.abs().max() < 1e-9);
    }

    #[test]
    fn uniform_force_matrix_is_singular() {
        let u = builtin("uniform").unwrap();
        assert!(matches!(uncertainty_report(&u, &spec()), Err(Error::Singular(_))));
        assert!(verify_uncertainty(&u, &spec())[0].has_flag(Flag::NotApplicable));
    }
}
