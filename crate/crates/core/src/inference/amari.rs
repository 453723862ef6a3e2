//! Amari σ-connections on the parameter manifold.
//!
//! With the score `υ_α = −∂_α log ρ` the connection reads
//!
//! `Γ^(σ)_αβγ = ⟨(∂_α υ_β − ((1−σ)/2) υ_α υ_β) υ_γ⟩`,
//!
//! which is Amari's α-connection at `α = σ`: `σ = 1` vanishes in natural
//! exponential-family coordinates and `σ = 0` is the Levi-Civita connection
//! of the Fisher metric.

use super::{fisher_matrix, score_jacobian, shifted_scores, theta_step, ParametricFamily};
use crate::error::{Error, Result};
use crate::numerics::{expectation_vec, QuadratureSpec};
use crate::report::{Flag, Identity, VerificationReport};
use crate::tensor::Tensor3;

/// `Γ^(σ)_αβγ` by quadrature, with `∂_α υ_β` from extrapolated central
/// differences in θ.
pub fn amari_connection(
    family: &dyn ParametricFamily,
    theta: &[f64],
    sigma: f64,
    spec: &QuadratureSpec,
) -> Result<(Tensor3, bool)> {
    if family.support_depends_on_theta() {
        return Err(Error::Domain(format!("{}: the support depends on θ", family.name())));
    }
    let d = family.dim();
    let member = family.member(theta)?;
    let score = family.score_fn(theta)?;
    let shifted = shifted_scores(family, theta)?;
    let c = 0.5 * (1.0 - sigma);
    let r = expectation_vec(
        member.as_ref(),
        d * d * d,
        |x, o: &mut [f64]| {
            let u = score(x);
            let j = score_jacobian(&shifted, x);
            for a in 0..d {
                for b in 0..d {
                    // j is indexed [row υ_β][column ∂_α]
                    let inner = j[b * d + a] - c * u[a] * u[b];
                    for g in 0..d {
                        o[(a * d + b) * d + g] = inner * u[g];
                    }
                }
            }
        },
        spec,
    );
    Ok((Tensor3 { dim: d, data: r.values }, r.converged))
}

/// Christoffel symbols of the first kind of the Fisher metric,
/// `Γ_αβγ = ½(∂_α g_βγ + ∂_β g_αγ − ∂_γ g_αβ)`, by extrapolated central
/// differences.
pub fn fisher_christoffel(family: &dyn ParametricFamily, theta: &[f64], spec: &QuadratureSpec) -> Result<Tensor3> {
    let d = family.dim();
    // dg[k] = ∂_k g, Richardson-extrapolated from steps h and h/2
    let mut dg = Vec::with_capacity(d);
    for k in 0..d {
        let h = theta_step(theta[k]);
        let g = |delta: f64| {
            let mut t = theta.to_vec();
            t[k] += delta;
            fisher_matrix(family, &t, spec).map(|f| f.g)
        };
        let wide = (g(h)? - g(-h)?) / (2.0 * h);
        let narrow = (g(0.5 * h)? - g(-0.5 * h)?) / h;
        dg.push((narrow * 4.0 - wide) / 3.0);
    }
    let mut t = Tensor3::zeros(d);
    for a in 0..d {
        for b in 0..d {
            for g in 0..d {
                t.set(a, b, g, 0.5 * (dg[a][(b, g)] + dg[b][(a, g)] - dg[g][(a, b)]));
            }
        }
    }
    Ok(t)
}

fn failed(id: Identity, name: &str, tol: f64, e: Error) -> VerificationReport {
    VerificationReport::with_residual(id, name, vec![], vec![], vec![], f64::INFINITY, tol).note(e.to_string())
}

/// `Γ^(1) ≡ 0`, which holds in natural exponential-family coordinates.
pub fn amari_flat_check(family: &dyn ParametricFamily, theta: &[f64], spec: &QuadratureSpec) -> VerificationReport {
    let name = family.name();
    match amari_connection(family, theta, 1.0, spec) {
        Ok((t, converged)) => {
            let n = t.data.len();
            VerificationReport::compare(Identity::AmariFlat, name, t.data, vec![0.0; n], vec![t.dim; 3], 1e-8)
                .flag_if(!converged, Flag::QuadratureNonConvergence)
        }
        Err(e) => failed(Identity::AmariFlat, &name, 1e-8, e),
    }
}

/// `Γ^(0)` against the Fisher-metric Christoffel symbols.
pub fn amari_levi_civita_check(family: &dyn ParametricFamily, theta: &[f64], spec: &QuadratureSpec) -> VerificationReport {
    let name = family.name();
    let r = amari_connection(family, theta, 0.0, spec)
        .and_then(|(a, c)| Ok((a, c, fisher_christoffel(family, theta, spec)?)));
    match r {
        Ok((a, converged, lc)) => {
            VerificationReport::compare(Identity::AmariLeviCivita, name, a.data, lc.data, vec![a.dim; 3], 1e-6)
                .flag_if(!converged, Flag::QuadratureNonConvergence)
        }
        Err(e) => failed(Identity::AmariLeviCivita, &name, 1e-6, e),
    }
}
