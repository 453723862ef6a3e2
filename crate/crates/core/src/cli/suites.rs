//! Verification suites run by `verify` and `inference`.

use crate::entropy::{entropy_checks, invariance_check, max_entropy_comparison, product_entropy_check};
use crate::error::{Error, Result};
use crate::families::{validate_boundary, Affine, AnyFamily, Diffeo, FamilySpec, Mixture, Sinh};
use crate::fluctuation::{verify_fluctuation_theorems, verify_uncertainty};
use crate::geometry1d::Geometry1D;
use crate::inference::{
    amari_flat_check, amari_levi_civita_check, asymptotic_check, fisher_self_consistency, verify_inference_theorems,
    EstimatorSpec, ExpFamilyNatural, MixtureMeans, NormalLocation, NormalLocationScale, ParametricFamily,
    UniformLocation,
};
use crate::numerics::{QuadratureSpec, RngStream};
use crate::report::{Identity, VerificationReport};
use crate::riemann::{
    covariant_checks, flatness_check, geodesic_checks, hydrodynamic_checks, reconstruction_check,
    sphere_curvature_check, GeometryN, Manifold,
};
use rayon::prelude::*;
use std::sync::Arc;

/// A group of checks selectable with `--suite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    Fluctuation,
    Boundary,
    Geometry,
    Covariant,
    Reconstruction,
    Curvature,
    Geodesic,
    Entropy,
    Inference,
    /// Every suite except `inference`.
    All,
}

impl Suite {
    pub const DETERMINISTIC: [Suite; 8] = [
        Suite::Fluctuation,
        Suite::Boundary,
        Suite::Geometry,
        Suite::Covariant,
        Suite::Reconstruction,
        Suite::Curvature,
        Suite::Geodesic,
        Suite::Entropy,
    ];

    /// `all` expanded, duplicates removed, in canonical order.
    pub fn expand(selected: &[Suite]) -> Vec<Suite> {
        let mut out: Vec<Suite> = selected
            .iter()
            .flat_map(|&s| if s == Suite::All { Suite::DETERMINISTIC.to_vec() } else { vec![s] })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Settings shared by the suites.
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub quadrature: QuadratureSpec,
    /// Grid size for chart, covariant, reconstruction and flatness checks.
    pub points: usize,
    /// Geodesic start in `I` coordinates; defaults to `s = −1` on every axis.
    pub from: Option<Vec<f64>>,
    /// Geodesic direction in `I` coordinates, normalized by the metric.
    pub direction: Option<Vec<f64>>,
    pub length: f64,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    /// Restrict the inference suite to one estimator.
    pub estimator: Option<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureSpec::default(),
            points: 201,
            from: None,
            direction: None,
            length: 2.0,
            m: 100,
            trials: 10_000,
            seed: 1,
            estimator: None,
        }
    }
}

/// The geometry of a family: one factor or a product.
#[derive(Debug, Clone)]
pub enum Geometry {
    One(Arc<Geometry1D>),
    Product(GeometryN),
}

impl Geometry {
    pub fn build(family: &AnyFamily, spec: &QuadratureSpec) -> Result<Self> {
        let factors = family
            .factors()
            .into_iter()
            .map(|f| Geometry1D::with_spec(f, spec.clone()).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        Ok(match family {
            AnyFamily::One(_) => Geometry::One(factors.into_iter().next().expect("one factor")),
            AnyFamily::Product(_) => Geometry::Product(crate::riemann::product_geometry(factors)?),
        })
    }

    pub fn manifold(&self) -> &dyn Manifold {
        match self {
            Geometry::One(g) => g.as_ref(),
            Geometry::Product(g) => g,
        }
    }

    pub fn factors(&self) -> Vec<Arc<Geometry1D>> {
        match self {
            Geometry::One(g) => vec![g.clone()],
            Geometry::Product(g) => g.factors().to_vec(),
        }
    }
}

/// Run the selected suites on one family. Suites run in parallel and the
/// reports come back in canonical suite order.
pub fn run_suites(spec: &FamilySpec, suites: &[Suite], opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let family = spec.build()?;
    let family = &family;
    let suites = Suite::expand(suites);
    let needs_geometry = suites.iter().any(|s| !matches!(s, Suite::Fluctuation | Suite::Boundary | Suite::Inference));
    let geometry = if needs_geometry { Some(Geometry::build(family, &opts.quadrature)?) } else { None };
    let parts = suites
        .par_iter()
        .map(|&s| run_suite(s, spec, family, geometry.as_ref(), opts))
        .collect::<Vec<Result<Vec<VerificationReport>>>>();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn run_suite(suite: Suite, spec: &FamilySpec, family: &AnyFamily, geometry: Option<&Geometry>, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let geom = || geometry.expect("geometry built for this suite");
    Ok(match suite {
        Suite::Fluctuation => {
            let mut r = verify_fluctuation_theorems(family, &opts.quadrature);
            r.extend(verify_uncertainty(family, &opts.quadrature));
            r
        }
        Suite::Boundary => family.factors().into_iter().flat_map(validate_boundary).collect(),
        Suite::Geometry => geom().factors().iter().flat_map(|g| g.chart_checks(opts.points.max(3))).collect(),
        Suite::Covariant => covariant_checks(geom().manifold(), opts.points),
        Suite::Reconstruction => vec![reconstruction_check(geom().manifold(), opts.points)],
        Suite::Curvature => {
            let mut r = Vec::new();
            if let Geometry::Product(g) = geom() {
                r.push(flatness_check(g, opts.points));
            }
            r.push(sphere_curvature_check(2.0, 1.0)?);
            r
        }
        Suite::Geodesic => geodesic_suite(geom().manifold(), opts)?,
        Suite::Entropy => entropy_suite(geom())?,
        Suite::Inference => inference_suite(spec, opts)?,
        Suite::All => unreachable!("expanded before dispatch"),
    })
}

/// Default geodesic start: `s = −1` on every axis.
pub fn default_start(m: &dyn Manifold) -> Vec<f64> {
    m.inverse_chart(&vec![-1.0; m.dim()])
}

/// Default geodesic direction: the first coordinate axis.
pub fn default_direction(m: &dyn Manifold) -> Vec<f64> {
    let mut d = vec![0.0; m.dim()];
    d[0] = 1.0;
    d
}

fn geodesic_suite(m: &dyn Manifold, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let start = opts.from.clone().unwrap_or_else(|| default_start(m));
    check_point(m, &start)?;
    let raw = opts.direction.clone().unwrap_or_else(|| default_direction(m));
    let dir = crate::riemann::unit_direction(m, &start, &raw)?;
    let mut r = geodesic_checks(m, &start, &dir, opts.length)?;
    r.extend(hydrodynamic_checks(m, &start)?);
    Ok(r)
}

/// Reject points of the wrong dimension or outside the support.
pub fn check_point(m: &dyn Manifold, x: &[f64]) -> Result<()> {
    if x.len() != m.dim() {
        return Err(Error::InvalidSpec(format!("point has {} coordinates, the geometry has {}", x.len(), m.dim())));
    }
    if !m.contains(x) {
        return Err(Error::Domain(format!("{x:?} lies outside the support of {}", m.name())));
    }
    Ok(())
}

fn entropy_suite(geometry: &Geometry) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for g in geometry.factors() {
        out.extend(entropy_checks(&g));
        let maps: [Arc<dyn Diffeo>; 2] = [Arc::new(Affine { a: 2.0, b: 1.0 }), Arc::new(Sinh)];
        for map in maps {
            out.extend(invariance_check(g.family(), &g, map)?);
        }
        out.push(max_entropy_comparison(&g, 1.5)?);
    }
    if let Geometry::Product(g) = geometry {
        out.push(product_entropy_check(g));
    }
    Ok(out)
}

/// Parametric model matching a one-dimensional family description, with
/// its default estimators.
pub fn inference_model(spec: &FamilySpec) -> Result<(Arc<dyn ParametricFamily>, Vec<EstimatorSpec>)> {
    Ok(match spec {
        FamilySpec::Normal { mu, sigma } => {
            (Arc::new(NormalLocation::new(*mu, *sigma)), vec![EstimatorSpec::sample_mean(), EstimatorSpec::sample_median()])
        }
        FamilySpec::Mixture { components } => {
            let mix = Mixture::new(
                components.iter().map(|c| c.weight).collect(),
                components.iter().map(|c| c.mu).collect(),
                components.iter().map(|c| c.sigma).collect(),
            )?;
            let f: Arc<dyn ParametricFamily> = Arc::new(MixtureMeans::new(&mix));
            (f.clone(), vec![EstimatorSpec::mle(f)])
        }
        FamilySpec::Expfam { theta } => {
            let f: Arc<dyn ParametricFamily> = Arc::new(ExpFamilyNatural::new(theta.clone()));
            (f.clone(), vec![EstimatorSpec::mle(f)])
        }
        FamilySpec::Uniform { lo, hi } => {
            let f: Arc<dyn ParametricFamily> = Arc::new(UniformLocation::new(0.5 * (lo + hi), hi - lo));
            (f.clone(), vec![EstimatorSpec::sample_mean()])
        }
        FamilySpec::Triangle { .. } | FamilySpec::Product { .. } => {
            return Err(Error::InvalidSpec(
                "inference needs a normal, mixture, expfam or uniform family".into(),
            ))
        }
    })
}

/// Monte Carlo score/estimator identities, Fisher self-consistency, Amari
/// connections and the asymptotic check for one family at its nominal
/// parameters.
pub fn inference_suite(spec: &FamilySpec, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let (model, mut estimators) = inference_model(spec)?;
    if let Some(name) = &opts.estimator {
        estimators = vec![EstimatorSpec::named(name, model.clone())?];
    }
    let theta = model.nominal();
    let stream = RngStream::new(opts.seed);
    let mut out = Vec::new();
    for (k, est) in estimators.iter().enumerate() {
        match verify_inference_theorems(model.as_ref(), &theta, est, opts.m, opts.trials, stream.substream(k as u64)) {
            Ok(r) => out.extend(r),
            Err(Error::Domain(why)) => {
                out.push(VerificationReport::not_applicable(Identity::ScoreMean, model.name(), why));
                return Ok(out);
            }
            Err(e) => return Err(e),
        }
    }
    out.push(fisher_self_consistency(model.as_ref(), &theta, &opts.quadrature));
    match spec {
        FamilySpec::Expfam { .. } => {
            out.push(amari_flat_check(model.as_ref(), &theta, &opts.quadrature));
            out.push(amari_levi_civita_check(model.as_ref(), &theta, &opts.quadrature));
        }
        FamilySpec::Normal { mu, sigma } => {
            let ls = NormalLocationScale::new(*mu, *sigma);
            out.push(amari_levi_civita_check(&ls, &ls.nominal(), &opts.quadrature));
        }
        _ => out.push(amari_levi_civita_check(model.as_ref(), &theta, &opts.quadrature)),
    }
    out.extend(asymptotic_check(model.clone(), &theta, opts.m, opts.trials, stream.substream(1000))?);
    Ok(out)
}
