//! Entropies of continuous distributions on a statistical manifold.
//!
//! The naive differential entropy `−∫q log q dI` depends on the coordinate
//! representation. Jaynes' form `−∫q log(q/γ) dI` with the metric-derived
//! invariant measure `γ = √(g/2π)` does not, and coincides with the geometric
//! entropy `−∫q_g log q_g dμ` of the probability weight `q_g = q/γ`. Every
//! integral is taken in the chart `s` of the geometry, where the integrands
//! of the geometry's own distribution are gaussian in the tails.

use crate::error::{Error, Result};
use crate::families::{reparametrize, Diffeo, Family1D, Interval};
use crate::geometry1d::{Geometry1D, InverseChartMap};
use crate::numerics::special::{log_phi, normal_cdf, phi, HALF_LN_2PI};
use crate::numerics::{integrate_vec, IntegralVec, QuadratureSpec};
use crate::report::{Flag, Identity, VerificationReport};
use crate::riemann::GeometryN;
use serde::Serialize;
use std::sync::Arc;

/// Largest `|s|` integrated; `φ(30) ≈ 1e-196`.
const S_MAX: f64 = 30.0;

/// `−Σ p_k log p_k` with `0·log 0 = 0`.
pub fn discrete_entropy(p: &[f64]) -> Result<f64> {
    if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::Domain("probabilities must be finite and non-negative".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
    }
    Ok(-p.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>())
}

/// Entropies of one distribution on one geometry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub distribution: String,
    pub geometry: String,
    /// Coordinate representation of the naive value.
    pub chart: String,
    pub naive: f64,
    pub jaynes: f64,
    pub geometric: f64,
    /// `−⟨𝒮⟩`, present when the distribution is the geometry's own.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intrinsic: Option<f64>,
    pub converged: bool,
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// `∫ f(I) dI` over the support of `q`, taken in the chart of `geom`.
/// `f` receives `I`, `s(I)` and `dI/ds`.
fn chart_integral<F: FnMut(f64, f64, f64, &mut [f64])>(
    geom: &Geometry1D,
    q: &dyn Family1D,
    n: usize,
    mut f: F,
) -> IntegralVec {
    let (qs, gs) = (q.support(), geom.support());
    let edge = |x: f64, g: f64, inf: f64| if x == g || !x.is_finite() { inf } else { geom.chart(x) };
    let lo = edge(qs.lo, gs.lo, -S_MAX).max(-S_MAX);
    let hi = edge(qs.hi, gs.hi, S_MAX).min(S_MAX);
    let mut breaks: Vec<f64> = [-8.0, -4.0, 0.0, 4.0, 8.0].to_vec();
    breaks.extend(q.breakpoints().into_iter().chain(geom.family().breakpoints()).map(|x| geom.chart(x)));
    breaks.retain(|b| b.is_finite() && *b > lo && *b < hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let rho_g = geom.family().clone();
    integrate_vec(
        |s, out: &mut [f64]| {
            out.iter_mut().for_each(|v| *v = 0.0);
            let x = geom.inverse_chart(s);
            if !gs.contains(x) {
                return;
            }
            let jac = (log_phi(s) - rho_g.log_density(x)).exp();
            if jac.is_finite() && jac > 0.0 {
                f(x, s, jac, out);
                for v in out.iter_mut() {
                    if !v.is_finite() {
                        *v = 0.0;
                    }
                }
            }
        },
        n,
        lo,
        hi,
        &breaks,
        &spec(),
    )
}

fn require_containment(q: &dyn Family1D, geom: &Geometry1D) -> Result<()> {
    if !geom.support().contains_interval(&q.support()) {
        return Err(Error::Domain(format!(
            "{} is supported outside the manifold of {}; geometric entropy needs containment",
            q.name(),
            geom.family().name()
        )));
    }
    Ok(())
}

/// Naive, Jaynes and geometric differential entropies of `q` on `geom`.
pub fn differential_entropies(q: &Arc<dyn Family1D>, geom: &Geometry1D) -> Result<EntropyReport> {
    require_containment(q.as_ref(), geom)?;
    let rho_g = geom.family().clone();
    let r = chart_integral(geom, q.as_ref(), 3, |x, s, jac, out| {
        let lq = q.log_density(x);
        let qv = lq.exp();
        if qv == 0.0 {
            return;
        }
        // ln γ = ln ρ_g + s²/2
        let lgamma = rho_g.log_density(x) + 0.5 * s * s;
        let gamma = lgamma.exp();
        let qg = qv / gamma;
        out[0] = -qv * lq * jac;
        out[1] = -qv * (lq - lgamma) * jac;
        out[2] = -qg * qg.ln() * gamma * jac;
    });
    let own = Arc::ptr_eq(q, geom.family());
    Ok(EntropyReport {
        distribution: q.name(),
        geometry: geom.family().name(),
        chart: q.name(),
        naive: r.values[0],
        jaynes: r.values[1],
        geometric: r.values[2],
        intrinsic: if own { Some(intrinsic_entropy(geom)?) } else { None },
        converged: r.converged,
    })
}

/// Entropies of a product distribution on a product geometry, summed over
/// the factors.
pub fn product_entropies(q: &[Arc<dyn Family1D>], geom: &GeometryN) -> Result<EntropyReport> {
    let factors = geom.factors();
    if q.len() != factors.len() {
        return Err(Error::Domain(format!("{} factors against a {}-dimensional geometry", q.len(), factors.len())));
    }
    let parts = q.iter().zip(factors).map(|(f, g)| differential_entropies(f, g)).collect::<Result<Vec<_>>>()?;
    let join = |f: &dyn Fn(&EntropyReport) -> String| parts.iter().map(f).collect::<Vec<_>>().join(" ⊗ ");
    let sum = |f: &dyn Fn(&EntropyReport) -> f64| parts.iter().map(f).sum::<f64>();
    let intrinsic = parts.iter().map(|p| p.intrinsic).sum::<Option<f64>>();
    Ok(EntropyReport {
        distribution: join(&|p| p.distribution.clone()),
        geometry: join(&|p| p.geometry.clone()),
        chart: join(&|p| p.chart.clone()),
        naive: sum(&|p| p.naive),
        jaynes: sum(&|p| p.jaynes),
        geometric: sum(&|p| p.geometric),
        intrinsic,
        converged: parts.iter().all(|p| p.converged),
    })
}

/// Intrinsic differential entropy `−⟨𝒮⟩ = ½⟨𝔇²(I, Ī)⟩ − 𝒫` of a geometry
/// under its own distribution.
pub fn intrinsic_entropy(geom: &Geometry1D) -> Result<f64> {
    let rho = geom.family().clone();
    let r = chart_integral(geom, rho.as_ref(), 1, |x, _s, jac, out| {
        let d = geom.distance(x, geom.mode());
        out[0] = rho.density(x) * 0.5 * d * d * jac;
    });
    if !r.converged {
        return Err(Error::NonConvergence {
            what: format!("intrinsic entropy of {}", rho.name()),
            estimate: r.values[0],
            error: r.errors[0],
        });
    }
    Ok(r.values[0] - geom.gaussian_potential())
}

/// Intrinsic entropy of a product geometry. The expectation of the additive
/// potential under the product distribution is the sum of the factor
/// expectations.
pub fn intrinsic_entropy_n(geom: &GeometryN) -> Result<f64> {
    geom.factors().iter().map(|g| intrinsic_entropy(g)).sum()
}

/// A divergence value; `+∞` with `support_mismatch` when `q` puts mass where
/// `p` has none.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Divergence {
    pub value: f64,
    pub support_mismatch: bool,
    pub converged: bool,
}

/// Kullback-Leibler divergence `∫q log(q/p) dI`, integrated in the chart of
/// `q`.
pub fn kl_divergence(q: &Arc<dyn Family1D>, p: &Arc<dyn Family1D>) -> Result<Divergence> {
    if !p.support().contains_interval(&q.support()) {
        return Ok(Divergence { value: f64::INFINITY, support_mismatch: true, converged: true });
    }
    let gq = Geometry1D::build(q.clone())?;
    let mut mismatch = false;
    let r = chart_integral(&gq, q.as_ref(), 1, |x, _s, jac, out| {
        let lq = q.log_density(x);
        let lp = p.log_density(x);
        if lp == f64::NEG_INFINITY && lq > f64::NEG_INFINITY {
            mismatch = true;
        }
        out[0] = lq.exp() * (lq - lp) * jac;
    });
    if mismatch {
        return Ok(Divergence { value: f64::INFINITY, support_mismatch: true, converged: true });
    }
    Ok(Divergence { value: r.values[0], support_mismatch: false, converged: r.converged })
}

/// `⟨log|dΘ/dI|⟩_q`.
fn jacobian_expectation(q: &Arc<dyn Family1D>, geom: &Geometry1D, map: &dyn Diffeo) -> f64 {
    chart_integral(geom, q.as_ref(), 1, |x, _s, jac, out| {
        out[0] = q.density(x) * map.derivative(x).abs().ln() * jac;
    })
    .values[0]
}

/// Transport `q` and the geometry through `map` and compare entropies: the
/// geometric entropy must not change, and the naive entropy must shift by
/// `⟨log|dΘ/dI|⟩_q`.
pub fn invariance_check(q: &Arc<dyn Family1D>, geom: &Arc<Geometry1D>, map: Arc<dyn Diffeo>) -> Result<Vec<VerificationReport>> {
    let before = differential_entropies(q, geom)?;
    let own = Arc::ptr_eq(q, geom.family());
    let moved_geom_family: Arc<dyn Family1D> = Arc::new(reparametrize(geom.family().clone(), map.clone())?);
    let moved_geom = Geometry1D::build(moved_geom_family.clone())?;
    let moved_q: Arc<dyn Family1D> = if own { moved_geom_family } else { Arc::new(reparametrize(q.clone(), map.clone())?) };
    let after = differential_entropies(&moved_q, &moved_geom)?;
    let shift = jacobian_expectation(q, geom, map.as_ref());
    let subject = format!("{} under {}", q.name(), map.name());
    let converged = before.converged && after.converged;
    Ok(vec![
        VerificationReport::scalar(Identity::GeometricEntropyInvariance, subject.clone(), after.geometric, before.geometric, 1e-6)
            .note(format!("geometric {:.12} → {:.12}", before.geometric, after.geometric))
            .flag_if(!converged, Flag::QuadratureNonConvergence),
        VerificationReport::scalar(Identity::NaiveEntropyShift, subject, after.naive - before.naive, shift, 1e-6)
            .note(format!("naive {:.12} → {:.12}", before.naive, after.naive))
            .flag_if(!converged, Flag::QuadratureNonConvergence),
    ])
}

/// Standard normal truncated to `[−a, a]`, rescaled to unit variance.
#[derive(Debug, Clone, Copy)]
struct UnitTruncatedNormal {
    a: f64,
    /// Standard deviation before rescaling.
    sd: f64,
    mass: f64,
}

impl UnitTruncatedNormal {
    fn new(a: f64) -> Self {
        let mass = 2.0 * normal_cdf(a) - 1.0;
        let var = 1.0 - 2.0 * a * phi(a) / mass;
        Self { a, sd: var.sqrt(), mass }
    }

    /// Closed-form differential entropy.
    fn entropy(&self) -> f64 {
        0.5 + HALF_LN_2PI + self.mass.ln() - self.a * phi(self.a) / self.mass - self.sd.ln()
    }
}

impl Family1D for UnitTruncatedNormal {
    fn name(&self) -> String {
        format!("unit-variance normal truncated at ±{}", self.a)
    }
    fn support(&self) -> Interval {
        let b = self.a / self.sd;
        Interval::new(-b, b)
    }
    fn params(&self) -> Vec<f64> {
        vec![self.a]
    }
    fn log_density(&self, x: f64) -> f64 {
        if !self.support().contains(x) {
            return f64::NEG_INFINITY;
        }
        let z = x * self.sd;
        log_phi(z) - self.mass.ln() + self.sd.ln()
    }
}

/// Geometric entropies on `geom` of its own distribution and of a
/// unit-variance truncated gaussian in the chart, carried onto the geometry.
/// The own distribution must have the larger entropy, and the truncated
/// value must match its closed form.
pub fn max_entropy_comparison(geom: &Arc<Geometry1D>, a: f64) -> Result<VerificationReport> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("truncation point must be positive, got {a}")));
    }
    let t = UnitTruncatedNormal::new(a);
    // on the chart h(q_s) − ½ln 2π is the geometric entropy
    let oracle = t.entropy() - HALF_LN_2PI;
    let q: Arc<dyn Family1D> = Arc::new(reparametrize(Arc::new(t), Arc::new(InverseChartMap(geom.clone())))?);
    let truncated = differential_entropies(&q, geom)?;
    let own = differential_entropies(geom.family(), geom)?;
    let ordered = own.geometric > truncated.geometric;
    let mut r = VerificationReport::scalar(
        Identity::MaxEntropyComparison,
        format!("{} vs {}", geom.family().name(), t.name()),
        truncated.geometric,
        oracle,
        1e-9,
    )
    .note(format!("own distribution {:.12} vs truncated {:.12}", own.geometric, truncated.geometric));
    r.pass &= ordered;
    Ok(r)
}

/// Intrinsic entropy and the Jaynes/geometric identity for a geometry's own
/// distribution.
pub fn entropy_checks(geom: &Arc<Geometry1D>) -> Vec<VerificationReport> {
    let name = geom.family().name();
    let mut out = Vec::new();
    match intrinsic_entropy(geom) {
        Ok(v) => out.push(VerificationReport::scalar(Identity::IntrinsicEntropy, name.clone(), v, 0.5, 1e-6)),
        Err(e) => out.push(
            VerificationReport::with_residual(Identity::IntrinsicEntropy, name.clone(), vec![], vec![0.5], vec![], f64::INFINITY, 1e-6)
                .flag(Flag::QuadratureNonConvergence)
                .note(e.to_string()),
        ),
    }
    match differential_entropies(geom.family(), geom) {
        Ok(r) => out.push(
            VerificationReport::scalar(Identity::JaynesGeometric, name, r.jaynes, r.geometric, 1e-9)
                .note(format!("naive {:.12}", r.naive))
                .flag_if(!r.converged, Flag::QuadratureNonConvergence),
        ),
        Err(e) => out.push(VerificationReport::not_applicable(Identity::JaynesGeometric, name, e.to_string())),
    }
    out
}

/// Intrinsic entropy of a product geometry against `n/2`.
pub fn product_entropy_check(geom: &GeometryN) -> VerificationReport {
    let n = geom.factors().len() as f64;
    let name = crate::riemann::Manifold::name(geom);
    match intrinsic_entropy_n(geom) {
        Ok(v) => VerificationReport::scalar(Identity::IntrinsicEntropy, name, v, 0.5 * n, 1e-6),
        Err(e) => VerificationReport::with_residual(Identity::IntrinsicEntropy, name, vec![], vec![0.5 * n], vec![], f64::INFINITY, 1e-6)
            .flag(Flag::QuadratureNonConvergence)
            .note(e.to_string()),
    }
}
