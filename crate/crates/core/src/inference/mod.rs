//! Likelihood, score, Fisher information and estimator bounds.
//!
//! Conventions follow the fluctuation side: the score is the *negative*
//! parameter gradient of the log-likelihood, `υ_α = −∂_α log ϱ`. Its mean
//! vanishes, an unbiased estimator satisfies `⟨δθ̂^α υ_β⟩ = −δ^α_β`, and
//! Cauchy–Schwarz gives the Cramér–Rao bound `Cov(θ̂) ⪰ (m·g)⁻¹` with
//! `g_αβ = ⟨υ_α υ_β⟩ = ⟨∂_β υ_α⟩`.

mod amari;
mod models;
mod montecarlo;

pub use amari::{amari_connection, amari_flat_check, amari_levi_civita_check, fisher_christoffel};
pub use models::{ExpFamilyNatural, MixtureMeans, NormalLocation, NormalLocationScale, UniformLocation};
pub use montecarlo::{asymptotic_check, verify_inference_theorems, EstimatorSpec, TrialData};

use crate::error::{Error, Result};
use crate::families::Family1D;
use crate::numerics::{expectation_vec, QuadratureSpec};
use crate::report::{Flag, Identity, VerificationReport};
use nalgebra::DMatrix;
use std::fmt;
use std::sync::Arc;

/// Single-outcome score `I ↦ υ(I|θ)`.
pub type ScoreFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Parameter step for finite differences in θ.
pub fn theta_step(t: f64) -> f64 {
    1e-4 * (1.0 + t.abs())
}

/// A family `ρ(I|θ)` indexed by a parameter vector θ.
pub trait ParametricFamily: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn dim(&self) -> usize;

    /// A representative parameter point.
    fn nominal(&self) -> Vec<f64>;

    fn valid(&self, theta: &[f64]) -> bool;

    /// Whether the support moves with θ, which makes the score undefined at
    /// the boundary.
    fn support_depends_on_theta(&self) -> bool {
        false
    }

    /// The member distribution at θ.
    fn member(&self, theta: &[f64]) -> Result<Arc<dyn Family1D>>;

    /// Single-outcome score at θ. The default differentiates `log ρ` in θ by
    /// central differences.
    fn score_fn(&self, theta: &[f64]) -> Result<ScoreFn> {
        let d = self.dim();
        let mut pairs = Vec::with_capacity(d);
        for a in 0..d {
            let h = theta_step(theta[a]);
            let mut up = theta.to_vec();
            let mut dn = theta.to_vec();
            up[a] += h;
            dn[a] -= h;
            pairs.push((self.member(&up)?, self.member(&dn)?, h));
        }
        Ok(Arc::new(move |x| {
            pairs.iter().map(|(u, l, h)| -(u.log_density(x) - l.log_density(x)) / (2.0 * h)).collect()
        }))
    }

    /// Closed-form or specialised maximum-likelihood solver, if any.
    fn mle_solver(&self, _outcomes: &[f64]) -> Option<Result<Vec<f64>>> {
        None
    }

    /// Starting points for the generic optimiser.
    fn mle_starts(&self, _outcomes: &[f64]) -> Vec<Vec<f64>> {
        vec![self.nominal()]
    }
}

/// Log-likelihood and total score of an outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct Likelihood {
    pub log_likelihood: f64,
    /// `υ_α(ℐ|θ) = Σ_k υ_α(I⁽ᵏ⁾|θ)`.
    pub score: Vec<f64>,
}

fn check_theta(family: &dyn ParametricFamily, theta: &[f64]) -> Result<()> {
    if theta.len() != family.dim() || !family.valid(theta) {
        return Err(Error::Domain(format!("θ = {theta:?} is outside the parameter domain of {}", family.name())));
    }
    Ok(())
}

/// `log ϱ(ℐ|θ) = Σ log ρ(I⁽ᵏ⁾|θ)` and `υ_α = −∂_α log ϱ`.
pub fn log_likelihood_and_score(family: &dyn ParametricFamily, outcomes: &[f64], theta: &[f64]) -> Result<Likelihood> {
    check_theta(family, theta)?;
    let member = family.member(theta)?;
    let score = family.score_fn(theta)?;
    let support = member.support();
    let mut log_likelihood = 0.0;
    let mut total = vec![0.0; family.dim()];
    for &x in outcomes {
        let l = member.log_density(x);
        if !support.contains(x) || !l.is_finite() {
            return Err(Error::Domain(format!("outcome {x} is outside the support of {}", member.name())));
        }
        log_likelihood += l;
        for (t, u) in total.iter_mut().zip(score(x)) {
            *t += u;
        }
    }
    Ok(Likelihood { log_likelihood, score: total })
}

/// Per-outcome Fisher information `g_αβ(θ) = ⟨υ_α υ_β⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherMatrix {
    pub g: DMatrix<f64>,
    pub converged: bool,
}

impl FisherMatrix {
    /// Information carried by `m` independent outcomes.
    pub fn for_outcomes(&self, m: usize) -> DMatrix<f64> {
        &self.g * m as f64
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        self.g.clone().cholesky().map(|c| c.inverse()).ok_or_else(|| Error::Singular("Fisher matrix".into()))
    }
}

fn outer_expectation(member: &dyn Family1D, d: usize, f: impl Fn(f64) -> Vec<f64>, spec: &QuadratureSpec) -> (DMatrix<f64>, bool) {
    let r = expectation_vec(
        member,
        d * d,
        |x, o: &mut [f64]| {
            let v = f(x);
            o.copy_from_slice(&v);
        },
        spec,
    );
    (DMatrix::from_row_slice(d, d, &r.values), r.converged)
}

/// Fisher matrix by quadrature of the score outer product.
pub fn fisher_matrix(family: &dyn ParametricFamily, theta: &[f64], spec: &QuadratureSpec) -> Result<FisherMatrix> {
    check_theta(family, theta)?;
    if family.support_depends_on_theta() {
        return Err(Error::Domain(format!(
            "{}: the support depends on θ, so the score is undefined at the boundary",
            family.name()
        )));
    }
    let d = family.dim();
    let member = family.member(theta)?;
    let score = family.score_fn(theta)?;
    let (g, converged) = outer_expectation(
        member.as_ref(),
        d,
        |x| {
            let u = score(x);
            let mut o = vec![0.0; d * d];
            for a in 0..d {
                for b in 0..d {
                    o[a * d + b] = u[a] * u[b];
                }
            }
            o
        },
        spec,
    );
    Ok(FisherMatrix { g, converged })
}

/// Score functions at `θ ± h e_β` and `θ ± (h/2) e_β`.
pub(crate) struct ShiftedScores {
    cols: Vec<[ScoreFn; 4]>,
    steps: Vec<f64>,
}

pub(crate) fn shifted_scores(family: &dyn ParametricFamily, theta: &[f64]) -> Result<ShiftedScores> {
    let mut cols = Vec::new();
    let mut steps = Vec::new();
    for b in 0..family.dim() {
        let h = theta_step(theta[b]);
        let at = |d: f64| {
            let mut t = theta.to_vec();
            t[b] += d;
            family.score_fn(&t)
        };
        cols.push([at(h)?, at(-h)?, at(0.5 * h)?, at(-0.5 * h)?]);
        steps.push(h);
    }
    Ok(ShiftedScores { cols, steps })
}

/// `∂_β υ_α` at one outcome, row α and column β: central differences at
/// steps `h` and `h/2` combined by Richardson extrapolation.
pub(crate) fn score_jacobian(shifted: &ShiftedScores, x: f64) -> Vec<f64> {
    let d = shifted.cols.len();
    let mut j = vec![0.0; d * d];
    for (b, (fs, h)) in shifted.cols.iter().zip(&shifted.steps).enumerate() {
        let (u, l, u2, l2) = (fs[0](x), fs[1](x), fs[2](x), fs[3](x));
        for a in 0..d {
            let wide = (u[a] - l[a]) / (2.0 * h);
            let narrow = (u2[a] - l2[a]) / h;
            j[a * d + b] = (4.0 * narrow - wide) / 3.0;
        }
    }
    j
}

/// Compare `⟨υ_α υ_β⟩` against `⟨∂_β υ_α⟩`, the latter by extrapolated
/// central differences of the score in θ.
pub fn fisher_self_consistency(family: &dyn ParametricFamily, theta: &[f64], spec: &QuadratureSpec) -> VerificationReport {
    let name = family.name();
    let fail = |e: Error| {
        VerificationReport::with_residual(Identity::FisherSelfConsistency, &name, vec![], vec![], vec![], f64::INFINITY, 1e-7)
            .note(e.to_string())
    };
    let fisher = match fisher_matrix(family, theta, spec) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let d = family.dim();
    let (member, shifted) = match family.member(theta).and_then(|m| Ok((m, shifted_scores(family, theta)?))) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    let (dg, converged) = outer_expectation(member.as_ref(), d, |x| score_jacobian(&shifted, x), spec);
    VerificationReport::compare(
        Identity::FisherSelfConsistency,
        name,
        fisher.g.transpose().as_slice().to_vec(),
        dg.transpose().as_slice().to_vec(),
        vec![d, d],
        1e-7,
    )
    .flag_if(!(fisher.converged && converged), Flag::QuadratureNonConvergence)
}

/// Result of a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq)]
pub struct MleFit {
    pub theta: Vec<f64>,
    pub log_likelihood: f64,
    /// `‖∂ log ϱ(θ̂)‖`.
    pub score_norm: f64,
    pub iterations: usize,
    /// Smallest eigenvalue of the finite-difference Hessian of `−log ϱ`.
    pub hessian_min_eigenvalue: f64,
}

const MLE_MAX_ITER: usize = 500;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Quasi-Newton (BFGS) descent on `−log ϱ` from one start.
fn bfgs(family: &dyn ParametricFamily, outcomes: &[f64], start: Vec<f64>, target: f64) -> Result<(Vec<f64>, usize)> {
    let d = family.dim();
    let eval = |t: &[f64]| -> Option<Likelihood> {
        if !family.valid(t) {
            return None;
        }
        log_likelihood_and_score(family, outcomes, t).ok().filter(|l| l.log_likelihood.is_finite())
    };
    let mut theta = start;
    let mut cur = eval(&theta).ok_or_else(|| Error::Domain("MLE start outside the likelihood domain".into()))?;
    // gradient of −log ϱ is the total score
    let mut h = DMatrix::<f64>::identity(d, d) / (outcomes.len() as f64);
    for it in 0..MLE_MAX_ITER {
        if norm(&cur.score) < target {
            return Ok((theta, it));
        }
        let g = nalgebra::DVector::from_vec(cur.score.clone());
        let mut p = -(&h * &g);
        if p.dot(&g) >= 0.0 {
            h = DMatrix::identity(d, d) / (outcomes.len() as f64);
            p = -(&h * &g);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let t: Vec<f64> = theta.iter().zip(p.iter()).map(|(a, b)| a + step * b).collect();
            if let Some(l) = eval(&t) {
                let armijo = -l.log_likelihood <= -cur.log_likelihood + 1e-4 * step * p.dot(&g);
                // below the rounding level of log ϱ, accept steps that shrink the score
                let flat = (l.log_likelihood - cur.log_likelihood).abs() <= 1e-13 * cur.log_likelihood.abs().max(1.0)
                    && norm(&l.score) < norm(&cur.score);
                if armijo || flat {
                    accepted = Some((t, l));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((t, l)) = accepted else {
            // no descent possible: already at rounding level
            return Ok((theta, it));
        };
        let s = nalgebra::DVector::from_iterator(d, t.iter().zip(&theta).map(|(a, b)| a - b));
        let y = nalgebra::DVector::from_iterator(d, l.score.iter().zip(&cur.score).map(|(a, b)| a - b));
        let sy = s.dot(&y);
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let i = DMatrix::<f64>::identity(d, d);
            let a = &i - rho * &s * y.transpose();
            let b = &i - rho * &y * s.transpose();
            h = &a * &h * &b + rho * &s * s.transpose();
        }
        theta = t;
        cur = l;
    }
    Err(Error::NonConvergence { what: "maximum likelihood".into(), estimate: cur.log_likelihood, error: norm(&cur.score) })
}

/// Hessian of `−log ϱ` by central differences of the total score.
fn hessian(family: &dyn ParametricFamily, outcomes: &[f64], theta: &[f64]) -> Result<DMatrix<f64>> {
    let d = family.dim();
    let mut hm = DMatrix::zeros(d, d);
    for b in 0..d {
        let h = theta_step(theta[b]);
        let mut up = theta.to_vec();
        let mut dn = theta.to_vec();
        up[b] += h;
        dn[b] -= h;
        let su = log_likelihood_and_score(family, outcomes, &up)?.score;
        let sd = log_likelihood_and_score(family, outcomes, &dn)?.score;
        for a in 0..d {
            hm[(a, b)] = (su[a] - sd[a]) / (2.0 * h);
        }
    }
    Ok(0.5 * (&hm + hm.transpose()))
}

/// Maximise the likelihood of `outcomes`.
///
/// Stationarity is required to `‖∂ log ϱ‖ < 1e-8·m` and the Hessian of
/// `−log ϱ` must be positive definite there.
pub fn mle_fit(family: &dyn ParametricFamily, outcomes: &[f64]) -> Result<MleFit> {
    let m = outcomes.len();
    let d = family.dim();
    if m < d {
        return Err(Error::Domain(format!("MLE needs at least {d} outcomes, got {m}")));
    }
    let target = 1e-8 * m as f64;
    let (theta, iterations) = match family.mle_solver(outcomes) {
        Some(r) => (r?, 0),
        None => {
            let mut best: Option<(Vec<f64>, usize, f64)> = None;
            let mut last_err = None;
            for start in family.mle_starts(outcomes) {
                match bfgs(family, outcomes, start, target) {
                    Ok((t, it)) => {
                        let l = log_likelihood_and_score(family, outcomes, &t)?.log_likelihood;
                        if best.as_ref().is_none_or(|b| l > b.2) {
                            best = Some((t, it, l));
                        }
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            match best {
                Some((t, it, _)) => (t, it),
                None => return Err(last_err.unwrap_or_else(|| Error::Domain("no MLE start".into()))),
            }
        }
    };
    let lik = log_likelihood_and_score(family, outcomes, &theta)?;
    let score_norm = norm(&lik.score);
    if !(score_norm < target) {
        return Err(Error::NonConvergence { what: "maximum likelihood".into(), estimate: lik.log_likelihood, error: score_norm });
    }
    let hm = hessian(family, outcomes, &theta)?;
    let hessian_min_eigenvalue = hm.symmetric_eigenvalues().min();
    if !(hessian_min_eigenvalue > 0.0) {
        return Err(Error::NonConvergence {
            what: "maximum likelihood (Hessian not positive definite)".into(),
            estimate: lik.log_likelihood,
            error: hessian_min_eigenvalue,
        });
    }
    Ok(MleFit { theta, log_likelihood: lik.log_likelihood, score_norm, iterations, hessian_min_eigenvalue })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin, ExponentialFamily, Mixture};
    use crate::numerics::RngStream;

    const EXPFAM: [f64; 4] = [0.3, -1.0, 0.0, 0.5];

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn corpus_mixture() -> Mixture {
        Mixture::new(vec![0.45, 0.55], vec![-2.0, 1.5], vec![0.6, 0.8]).unwrap()
    }

    #[test]
    fn likelihood_examples() {
        let f = NormalLocation::new(0.7, 1.0);
        let l = log_likelihood_and_score(&f, &[0.7], &[0.7]).unwrap();
        assert_eq!(l.score, vec![0.0]);
        let f = NormalLocation::new(0.0, 1.0);
        let l = log_likelihood_and_score(&f, &[1.0, -1.0], &[0.0]).unwrap();
        assert!((l.log_likelihood - (-1.0 - (2.0 * std::f64::consts::PI).ln())).abs() < 1e-14);
    }

    #[test]
    fn score_is_additive() {
        let f = MixtureMeans::new(&corpus_mixture());
        let xs = [-2.5, 0.1, 1.9];
        let th = [-1.8, 1.4];
        let total = log_likelihood_and_score(&f, &xs, &th).unwrap();
        let mut sum = [0.0; 2];
        for x in xs {
            let one = log_likelihood_and_score(&f, &[x], &th).unwrap();
            sum[0] += one.score[0];
            sum[1] += one.score[1];
        }
        assert!((total.score[0] - sum[0]).abs() < 1e-14 && (total.score[1] - sum[1]).abs() < 1e-14);
    }

    #[test]
    fn expfam_score_matches_log_normalizer_gradient() {
        // υ_α = −m ∂_α P + Σ A_α, with ∂P from differences of P itself
        let f = ExpFamilyNatural::new(EXPFAM.to_vec());
        let xs = [-1.2, 0.3, 0.9, 1.7];
        let l = log_likelihood_and_score(&f, &xs, &EXPFAM).unwrap();
        for a in 0..4 {
            let h = 1e-3;
            let p = |d: f64| {
                let mut t = EXPFAM.to_vec();
                t[a] += d;
                ExponentialFamily::new(t).unwrap().log_normalizer()
            };
            let dp = (8.0 * (p(h) - p(-h)) - (p(2.0 * h) - p(-2.0 * h))) / (12.0 * h);
            let sum_a: f64 = xs.iter().map(|x| x.powi(a as i32 + 1)).sum();
            let want = -(xs.len() as f64) * dp + sum_a;
            assert!((l.score[a] - want).abs() < 1e-8, "α = {a}: {} vs {want}", l.score[a]);
        }
    }

    #[test]
    fn outcome_outside_support_is_domain_error() {
        let f = UniformLocation::new(0.0, 1.0);
        assert!(matches!(log_likelihood_and_score(&f, &[0.7], &[0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn fisher_normal_location_scale() {
        let f = NormalLocationScale::new(0.3, 1.7);
        let g = fisher_matrix(&f, &[0.3, 1.7], &spec()).unwrap();
        let s2 = 1.7f64 * 1.7;
        assert!((g.g[(0, 0)] - 1.0 / s2).abs() < 1e-8);
        assert!((g.g[(1, 1)] - 2.0 / s2).abs() < 1e-8);
        assert!(g.g[(0, 1)].abs() < 1e-8 && g.g[(1, 0)].abs() < 1e-8);
        assert!((g.for_outcomes(10)[(1, 1)] - 20.0 / s2).abs() < 1e-7);
    }

    #[test]
    fn fisher_rejects_moving_support() {
        let f = UniformLocation::new(0.0, 1.0);
        assert!(matches!(fisher_matrix(&f, &[0.0], &spec()), Err(Error::Domain(_))));
    }

    #[test]
    fn fisher_expfam_is_minus_hessian_of_log_normalizer() {
        // Gaussian case in closed form: A = (I, I²) at N(0, 1) has
        // Cov = diag(1, 2).
        let f = ExpFamilyNatural::new(vec![0.0, 0.5]);
        let g = fisher_matrix(&f, &[0.0, 0.5], &spec()).unwrap().g;
        assert!((g[(0, 0)] - 1.0).abs() < 1e-8 && (g[(1, 1)] - 2.0).abs() < 1e-8 && g[(0, 1)].abs() < 1e-8);

        let f = ExpFamilyNatural::new(EXPFAM.to_vec());
        let g = fisher_matrix(&f, &EXPFAM, &spec()).unwrap().g;
        let p = |da: (usize, f64), db: (usize, f64)| {
            let mut t = EXPFAM.to_vec();
            t[da.0] += da.1;
            t[db.0] += db.1;
            ExponentialFamily::new(t).unwrap().log_normalizer()
        };
        for a in 0..4 {
            for b in 0..4 {
                // Richardson-extrapolated mixed second difference
                let d2 = |h: f64| (p((a, h), (b, h)) - p((a, h), (b, -h)) - p((a, -h), (b, h)) + p((a, -h), (b, -h))) / (4.0 * h * h);
                let h = 2e-3;
                let hess = (4.0 * d2(h / 2.0) - d2(h)) / 3.0;
                let scale = 1.0 + g[(a, b)].abs();
                assert!((g[(a, b)] + hess).abs() < 1e-6 * scale, "({a},{b}): {} vs {}", g[(a, b)], -hess);
            }
        }
    }

    #[test]
    fn fisher_self_consistency_over_models() {
        let models: Vec<(Box<dyn ParametricFamily>, Vec<f64>)> = vec![
            (Box::new(NormalLocation::new(0.0, 1.0)), vec![0.0]),
            (Box::new(NormalLocationScale::new(3.0, 0.5)), vec![3.0, 0.5]),
            (Box::new(MixtureMeans::new(&corpus_mixture())), vec![-2.0, 1.5]),
            (Box::new(ExpFamilyNatural::new(EXPFAM.to_vec())), EXPFAM.to_vec()),
        ];
        for (f, th) in models {
            let r = fisher_self_consistency(f.as_ref(), &th, &spec());
            assert!(r.pass, "{}", r.summary_line());
        }
    }

    #[test]
    fn mle_closed_forms() {
        let f = NormalLocation::new(0.0, 1.0);
        let xs = [0.2, -0.4, 1.1];
        let fit = mle_fit(&f, &xs).unwrap();
        assert!((fit.theta[0] - 0.3).abs() < 1e-15);

        let f = NormalLocationScale::new(0.0, 1.0);
        let set = crate::families::sample(f.member(&[0.0, 1.0]).unwrap(), 1000, RngStream::new(7)).unwrap();
        let fit = mle_fit(&f, &set.outcomes).unwrap();
        assert!(fit.theta[0].abs() < 0.1 && (fit.theta[1] - 1.0).abs() < 0.1);
        assert!(fit.score_norm < 1e-8 * 1000.0 && fit.hessian_min_eigenvalue > 0.0);
    }

    #[test]
    fn mle_needs_enough_outcomes() {
        let f = NormalLocationScale::new(0.0, 1.0);
        assert!(matches!(mle_fit(&f, &[0.3]), Err(Error::Domain(_))));
    }

    #[test]
    fn mle_expfam_matches_moments() {
        let f = ExpFamilyNatural::new(EXPFAM.to_vec());
        let set = crate::families::sample(f.member(&EXPFAM).unwrap(), 500, RngStream::new(11)).unwrap();
        let fit = mle_fit(&f, &set.outcomes).unwrap();
        let (mean, _) = ExponentialFamily::new(fit.theta.clone()).unwrap().moments(&spec());
        for a in 0..4 {
            let bar: f64 = set.outcomes.iter().map(|x| x.powi(a as i32 + 1)).sum::<f64>() / 500.0;
            assert!((mean[a] - bar).abs() < 1e-8, "α = {a}: {} vs {bar}", mean[a]);
        }
    }

    #[test]
    fn mle_mixture_means_by_quasi_newton() {
        let f = MixtureMeans::new(&corpus_mixture());
        let set = crate::families::sample(f.member(&[-2.0, 1.5]).unwrap(), 2000, RngStream::new(3)).unwrap();
        let fit = mle_fit(&f, &set.outcomes).unwrap();
        assert!((fit.theta[0] + 2.0).abs() < 0.1 && (fit.theta[1] - 1.5).abs() < 0.1, "{:?}", fit.theta);
        assert!(fit.score_norm < 2000.0 * 1e-8);
    }

    #[test]
    fn mle_uniform_location_is_not_regular() {
        let f = UniformLocation::new(0.0, 1.0);
        assert!(mle_fit(&f, &[0.1, -0.2, 0.3]).is_err());
    }

    #[test]
    fn amari_connections() {
        let f = ExpFamilyNatural::new(EXPFAM.to_vec());
        let r = amari_flat_check(&f, &EXPFAM, &spec());
        assert!(r.pass, "{}", r.summary_line());
        let r = amari_levi_civita_check(&f, &EXPFAM, &spec());
        assert!(r.pass, "{}", r.summary_line());
        // odd moments of a gaussian location score vanish for every σ
        let f = NormalLocation::new(0.4, 1.3);
        for sigma in [-1.0, 0.0, 0.5, 1.0] {
            let (t, _) = amari_connection(&f, &[0.4], sigma, &spec()).unwrap();
            assert!(t.max_abs() < 1e-10, "σ = {sigma}: {}", t.max_abs());
        }
    }

    #[test]
    fn literal_sign_fails_levi_civita_for_skewed_family() {
        // Γ^(−1) differs from Γ^(0) by ½⟨υυυ⟩ = ½κ3, which is nonzero here
        let f = ExpFamilyNatural::new(EXPFAM.to_vec());
        let (a0, _) = amari_connection(&f, &EXPFAM, 0.0, &spec()).unwrap();
        let (am, _) = amari_connection(&f, &EXPFAM, -1.0, &spec()).unwrap();
        assert!(a0.max_abs_diff(&am) > 1e-3);
    }

    #[test]
    fn monte_carlo_mean_and_median() {
        let f = NormalLocation::new(0.0, 1.0);
        let mean = verify_inference_theorems(&f, &[0.0], &EstimatorSpec::sample_mean(), 50, 2000, RngStream::new(1)).unwrap();
        assert_eq!(mean.len(), 4);
        assert!(mean.iter().all(|r| r.pass), "{:#?}", mean);
        let med = verify_inference_theorems(&f, &[0.0], &EstimatorSpec::sample_median(), 51, 2000, RngStream::new(2)).unwrap();
        assert!(med.iter().all(|r| r.pass), "{:#?}", med);
        assert_eq!(med[3].identity, Identity::CramerRaoStrict);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let f = NormalLocation::new(0.0, 1.0);
        let est = EstimatorSpec::sample_mean();
        let a = TrialData::run(&f, &[0.0], &est, 10, 50, RngStream::new(9), true).unwrap();
        let b = TrialData::run(&f, &[0.0], &est, 10, 50, RngStream::new(9), true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn biased_estimator_skips_bound_checks() {
        let f: Arc<dyn ParametricFamily> = Arc::new(NormalLocationScale::new(0.0, 1.0));
        let est = EstimatorSpec::mle(f.clone());
        let r = verify_inference_theorems(f.as_ref(), &[0.0, 1.0], &est, 20, 200, RngStream::new(4)).unwrap();
        assert!(r[0].pass);
        assert!(r[1].has_flag(Flag::NotApplicable) && r[2].has_flag(Flag::NotApplicable));
    }

    #[test]
    fn asymptotic_guard_and_small_run() {
        let f: Arc<dyn ParametricFamily> = Arc::new(NormalLocation::new(0.0, 1.0));
        let r = asymptotic_check(f.clone(), &[0.0], 2, 100, RngStream::new(5)).unwrap();
        assert!(r.iter().all(|r| r.has_flag(Flag::NotApplicable)));
        let r = asymptotic_check(f, &[0.0], 1000, 2000, RngStream::new(5)).unwrap();
        assert!(r[0].pass, "{}", r[0].summary_line());
        assert!(r[1].residual < 0.1, "{}", r[1].summary_line());
    }

    #[test]
    fn named_estimators() {
        let f: Arc<dyn ParametricFamily> = Arc::new(NormalLocation::new(0.0, 1.0));
        assert_eq!(EstimatorSpec::named("median", f.clone()).unwrap().estimate(&[3.0, 1.0, 2.0, 10.0]).unwrap(), vec![2.5]);
        assert!(EstimatorSpec::named("mode", f).is_err());
        let _ = builtin("normal").unwrap();
    }
}
