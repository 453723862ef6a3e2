//! Monte Carlo checks of the score identities, the Cramér–Rao bound and the
//! asymptotic normality of efficient estimators.
//!
//! Every stochastic assertion is a 3σ band built from the trial-level sample
//! variance.

use super::{fisher_matrix, mle_fit, ParametricFamily};
use crate::error::{Error, Result};
use crate::families::Sampler;
use crate::numerics::RngStream;
use crate::report::{Flag, Identity, VerificationReport};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

/// Width of every Monte Carlo band, in standard errors.
pub const SIGMA_BAND: f64 = 3.0;

/// Fewer trials than this and band estimates are themselves unreliable.
const MIN_TRIALS: usize = 100;

/// Smallest outcome count treated as asymptotic.
const ASYMPTOTIC_M: usize = 1000;

type EstimatorFn = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;

/// An estimator `ℐ ↦ θ̂(ℐ)`.
#[derive(Clone)]
pub struct EstimatorSpec {
    pub name: String,
    pub unbiased: bool,
    /// `Some(true)`: expected to saturate the Cramér–Rao bound;
    /// `Some(false)`: expected to exceed it strictly.
    pub efficient: Option<bool>,
    estimate: EstimatorFn,
}

impl fmt::Debug for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EstimatorSpec")
            .field("name", &self.name)
            .field("unbiased", &self.unbiased)
            .field("efficient", &self.efficient)
            .finish()
    }
}

impl EstimatorSpec {
    pub fn new(
        name: impl Into<String>,
        unbiased: bool,
        efficient: Option<bool>,
        estimate: impl Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), unbiased, efficient, estimate: Arc::new(estimate) }
    }

    /// Sample mean; unbiased for a location parameter and efficient for the
    /// gaussian one.
    pub fn sample_mean() -> Self {
        Self::new("mean", true, Some(true), |xs| Ok(vec![xs.iter().sum::<f64>() / xs.len() as f64]))
    }

    /// Sample median; unbiased for symmetric location families, never
    /// efficient for the gaussian.
    pub fn sample_median() -> Self {
        Self::new("median", true, Some(false), |xs| {
            let mut v = xs.to_vec();
            let n = v.len();
            let (_, hi, _) = v.select_nth_unstable_by(n / 2, f64::total_cmp);
            let hi = *hi;
            if n % 2 == 1 {
                return Ok(vec![hi]);
            }
            let lo = v[..n / 2].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(vec![0.5 * (lo + hi)])
        })
    }

    /// Maximum likelihood. Declared neither unbiased nor efficient; adjust
    /// with [`EstimatorSpec::declare`] where that is known.
    pub fn mle(family: Arc<dyn ParametricFamily>) -> Self {
        Self::new("mle", false, None, move |xs| Ok(mle_fit(family.as_ref(), xs)?.theta))
    }

    /// Override the declared properties.
    pub fn declare(mut self, unbiased: bool, efficient: Option<bool>) -> Self {
        self.unbiased = unbiased;
        self.efficient = efficient;
        self
    }

    /// Look up `mean`, `median` or `mle`.
    pub fn named(name: &str, family: Arc<dyn ParametricFamily>) -> Result<Self> {
        match name {
            "mean" => Ok(Self::sample_mean()),
            "median" => Ok(Self::sample_median()),
            "mle" => Ok(Self::mle(family)),
            other => Err(Error::InvalidSpec(format!("unknown estimator {other:?} (expected mean, median or mle)"))),
        }
    }

    pub fn estimate(&self, outcomes: &[f64]) -> Result<Vec<f64>> {
        (self.estimate)(outcomes)
    }
}

/// Per-trial total scores and estimator deviations, in trial order.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialData {
    pub scores: Vec<Vec<f64>>,
    pub deviations: Vec<Vec<f64>>,
}

impl TrialData {
    /// Run `trials` independent outcome sets of size `m` drawn at θ. Trial
    /// `k` uses substream `k`, so results do not depend on scheduling.
    pub fn run(
        family: &dyn ParametricFamily,
        theta: &[f64],
        est: &EstimatorSpec,
        m: usize,
        trials: usize,
        stream: RngStream,
        with_scores: bool,
    ) -> Result<Self> {
        if m == 0 || trials < 2 {
            return Err(Error::Domain(format!("need m ≥ 1 and at least 2 trials, got m = {m}, trials = {trials}")));
        }
        let sampler = Sampler::new(family.member(theta)?)?;
        let score = if with_scores { Some(family.score_fn(theta)?) } else { None };
        let d = family.dim();
        let rows: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..trials)
            .into_par_iter()
            .map(|k| {
                let set = sampler.sample(m, stream.substream(k as u64))?;
                let mut total = vec![0.0; d];
                if let Some(score) = &score {
                    for &x in &set.outcomes {
                        for (t, u) in total.iter_mut().zip(score(x)) {
                            *t += u;
                        }
                    }
                }
                let th = est.estimate(&set.outcomes)?;
                if th.len() != d {
                    return Err(Error::InvalidSpec(format!(
                        "estimator {} returned {} components for a {d}-parameter family",
                        est.name,
                        th.len()
                    )));
                }
                Ok((total, th.iter().zip(theta).map(|(a, b)| a - b).collect()))
            })
            .collect();
        let mut scores = Vec::with_capacity(trials);
        let mut deviations = Vec::with_capacity(trials);
        for r in rows {
            let (s, dv) = r?;
            scores.push(s);
            deviations.push(dv);
        }
        Ok(Self { scores, deviations })
    }

    pub fn trials(&self) -> usize {
        self.deviations.len()
    }
}

/// Mean and standard error of each column.
fn column_stats(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let t = rows.len() as f64;
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / t).collect();
    let se = (0..d)
        .map(|j| {
            let var = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / (t - 1.0);
            (var / t).sqrt()
        })
        .collect();
    (mean, se)
}

/// Largest `|mean − expected| / se`; zero when both gap and error vanish.
fn max_z(mean: &[f64], se: &[f64], expected: &[f64]) -> f64 {
    mean.iter()
        .zip(se)
        .zip(expected)
        .map(|((m, s), e)| {
            let gap = (m - e).abs();
            if gap == 0.0 {
                0.0
            } else {
                gap / s
            }
        })
        .fold(0.0, |a: f64, z| if z.is_nan() { f64::NAN } else { a.max(z) })
}

fn sample_covariance(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let t = rows.len();
    let d = rows[0].len();
    let (mean, _) = column_stats(rows);
    let mut c = DMatrix::zeros(d, d);
    for r in rows {
        for a in 0..d {
            for b in 0..d {
                c[(a, b)] += (r[a] - mean[a]) * (r[b] - mean[b]);
            }
        }
    }
    c / (t as f64 - 1.0)
}

fn flat(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let s = 0.5 * (m + m.transpose());
    s.symmetric_eigenvalues().iter().copied().collect()
}

/// Monte Carlo verification of `⟨υ⟩ = 0`, `⟨δθ̂ υ⟩ = −1` and
/// `Cov(θ̂) ⪰ (m·g)⁻¹` (with saturation or strictness when the estimator
/// declares it).
pub fn verify_inference_theorems(
    family: &dyn ParametricFamily,
    theta: &[f64],
    est: &EstimatorSpec,
    m: usize,
    trials: usize,
    stream: RngStream,
) -> Result<Vec<VerificationReport>> {
    if family.support_depends_on_theta() {
        return Err(Error::Domain(format!("{}: the support depends on θ", family.name())));
    }
    let name = format!("{} / {} (m = {m}, trials = {trials})", family.name(), est.name);
    let d = family.dim();
    let data = TrialData::run(family, theta, est, m, trials, stream, true)?;
    let t = data.trials();
    let few = t < MIN_TRIALS;
    let mut out = Vec::new();

    let (mean_u, se_u) = column_stats(&data.scores);
    out.push(
        VerificationReport::with_residual(
            Identity::ScoreMean,
            &name,
            mean_u.clone(),
            vec![0.0; d],
            vec![d],
            max_z(&mean_u, &se_u, &vec![0.0; d]),
            SIGMA_BAND,
        )
        .flag_if(few, Flag::InsufficientTrials)
        .note("residual in standard errors"),
    );

    if !est.unbiased {
        for id in [Identity::EstimatorScoreCorrelation, Identity::CramerRao] {
            out.push(VerificationReport::not_applicable(id, &name, "estimator not declared unbiased"));
        }
        return Ok(out);
    }

    let products: Vec<Vec<f64>> = data
        .deviations
        .iter()
        .zip(&data.scores)
        .map(|(dv, u)| (0..d * d).map(|i| dv[i / d] * u[i % d]).collect())
        .collect();
    let (mean_p, se_p) = column_stats(&products);
    let minus_identity: Vec<f64> = (0..d * d).map(|i| if i / d == i % d { -1.0 } else { 0.0 }).collect();
    out.push(
        VerificationReport::with_residual(
            Identity::EstimatorScoreCorrelation,
            &name,
            mean_p.clone(),
            minus_identity.clone(),
            vec![d, d],
            max_z(&mean_p, &se_p, &minus_identity),
            SIGMA_BAND,
        )
        .flag_if(few, Flag::InsufficientTrials)
        .note("residual in standard errors"),
    );

    let g = fisher_matrix(family, theta, &Default::default())?;
    let bound = (g.g.clone() * m as f64)
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::Singular("Fisher matrix".into()))?;
    let cov = sample_covariance(&data.deviations);
    let gap = &cov - &bound;
    let eig = eigenvalues(&gap);
    let lmin = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max_diag = (0..d).map(|i| cov[(i, i)]).fold(0.0, f64::max);
    // standard error of a sample variance of a roughly gaussian estimator
    let se = (2.0 / (t as f64 - 1.0)).sqrt() * max_diag;
    let bound_min = eigenvalues(&bound).into_iter().fold(f64::INFINITY, f64::min);
    let unresolved = few || SIGMA_BAND * se > 0.5 * bound_min;
    out.push(
        VerificationReport::with_residual(
            Identity::CramerRao,
            &name,
            flat(&cov),
            flat(&bound),
            vec![d, d],
            (-lmin).max(0.0) / se,
            SIGMA_BAND,
        )
        .flag_if(unresolved, Flag::InsufficientTrials)
        .note("residual: −λmin(Cov − (m·g)⁻¹) in standard errors"),
    );
    match est.efficient {
        Some(true) => {
            let worst = eig.iter().map(|e| e.abs()).fold(0.0, f64::max);
            out.push(
                VerificationReport::with_residual(
                    Identity::CramerRaoSaturation,
                    &name,
                    flat(&cov),
                    flat(&bound),
                    vec![d, d],
                    worst / se,
                    SIGMA_BAND,
                )
                .flag_if(unresolved, Flag::InsufficientTrials)
                .note("residual: max |λ(Cov − (m·g)⁻¹)| in standard errors"),
            );
        }
        Some(false) => {
            let ratio = if lmin > 0.0 { SIGMA_BAND * se / lmin } else { f64::INFINITY };
            out.push(
                VerificationReport::with_residual(
                    Identity::CramerRaoStrict,
                    &name,
                    flat(&cov),
                    flat(&bound),
                    vec![d, d],
                    ratio,
                    1.0,
                )
                .flag_if(unresolved, Flag::InsufficientTrials)
                .note("residual: 3σ band over λmin(Cov − (m·g)⁻¹); below 1 means strictly above the bound"),
            );
        }
        None => {}
    }
    Ok(out)
}

/// Symmetric square root of a positive definite matrix.
fn sqrtm(g: &DMatrix<f64>) -> DMatrix<f64> {
    let e = (0.5 * (g + g.transpose())).symmetric_eigen();
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(|l| l.max(0.0).sqrt()));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

/// Standardized deviations `z = √m·g^{1/2}(θ̂ − θ)` of the maximum-likelihood
/// estimator should be standard normal for large `m`: mean within 3σ of zero
/// and covariance within 0.05 of the identity. Returns the mean and
/// covariance reports; both are not-applicable below `m = 1000`.
pub fn asymptotic_check(
    family: Arc<dyn ParametricFamily>,
    theta: &[f64],
    m: usize,
    trials: usize,
    stream: RngStream,
) -> Result<Vec<VerificationReport>> {
    let name = format!("{} / mle (m = {m}, trials = {trials})", family.name());
    if m < ASYMPTOTIC_M {
        let why = format!("m = {m} is below the asymptotic regime (m ≥ {ASYMPTOTIC_M})");
        return Ok(vec![
            VerificationReport::not_applicable(Identity::AsymptoticMean, &name, why.clone()),
            VerificationReport::not_applicable(Identity::AsymptoticCovariance, &name, why),
        ]);
    }
    let g = fisher_matrix(family.as_ref(), theta, &Default::default())?;
    let root = sqrtm(&g.g) * (m as f64).sqrt();
    let est = EstimatorSpec::mle(family.clone());
    let data = TrialData::run(family.as_ref(), theta, &est, m, trials, stream, false)?;
    let d = family.dim();
    let z: Vec<Vec<f64>> = data
        .deviations
        .iter()
        .map(|dv| (&root * nalgebra::DVector::from_column_slice(dv)).iter().copied().collect())
        .collect();
    let few = data.trials() < MIN_TRIALS;
    let (mean, se) = column_stats(&z);
    let cov = sample_covariance(&z);
    let identity = DMatrix::<f64>::identity(d, d);
    Ok(vec![
        VerificationReport::with_residual(
            Identity::AsymptoticMean,
            &name,
            mean.clone(),
            vec![0.0; d],
            vec![d],
            max_z(&mean, &se, &vec![0.0; d]),
            SIGMA_BAND,
        )
        .flag_if(few, Flag::InsufficientTrials)
        .note("residual in standard errors"),
        VerificationReport::compare(Identity::AsymptoticCovariance, &name, flat(&cov), flat(&identity), vec![d, d], 0.05)
            .flag_if(few, Flag::InsufficientTrials),
    ])
}
