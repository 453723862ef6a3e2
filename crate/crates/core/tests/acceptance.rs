//! The twelve acceptance criteria, each at its stated tolerance and runtime.
//! Every test prints one `PASS`/`FAIL` line.

use fluctgeom::cli::{figure1, figure2, GridSpec};
use fluctgeom::entropy::{intrinsic_entropy, intrinsic_entropy_n, invariance_check};
use fluctgeom::families::{corpus, Affine, AnyFamily, Diffeo, Exp, Normal, Sinh};
use fluctgeom::fluctuation::{is_conforming, uncertainty_report, verify_fluctuation_theorems};
use fluctgeom::geometry1d::Geometry1D;
use fluctgeom::inference::{
    amari_flat_check, amari_levi_civita_check, asymptotic_check, verify_inference_theorems, EstimatorSpec,
    ExpFamilyNatural, NormalLocation, NormalLocationScale, ParametricFamily,
};
use fluctgeom::numerics::{linspace, QuadratureSpec, RngStream};
use fluctgeom::riemann::{
    covariant_checks, flatness_check, geodesic_checks, hydrodynamic_checks, reconstruction_check,
    sphere_curvature_check, unit_direction, GeometryN, Manifold, MetricField,
};
use fluctgeom::{Flag, Identity, VerificationReport};
use std::sync::{Arc, Mutex};
use std::time::Instant;

// one criterion at a time so each runtime is its own
static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(id: u32, title: &str, limit_s: f64, body: impl FnOnce(&mut Vec<String>) -> bool) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut failures = Vec::new();
    let ok = body(&mut failures) && failures.is_empty();
    let t = start.elapsed().as_secs_f64();
    let in_time = t < limit_s;
    let status = if ok && in_time { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} {status} {title} ({t:.2} s, limit {limit_s} s)");
    for f in &failures {
        println!("    {f}");
    }
    assert!(ok, "criterion {id} failed: {failures:#?}");
    assert!(in_time, "criterion {id} took {t:.2} s (limit {limit_s} s)");
}

fn expect(failures: &mut Vec<String>, cond: bool, what: impl FnOnce() -> String) {
    if !cond {
        failures.push(what());
    }
}

fn expect_report(failures: &mut Vec<String>, r: &VerificationReport, max_residual: f64) {
    let ok = r.pass && !r.has_flag(Flag::NotApplicable) && r.residual <= max_residual;
    expect(failures, ok, || format!("{} (required ≤ {max_residual:e})", r.summary_line()));
}

fn one_d_geometries() -> Vec<(&'static str, Arc<Geometry1D>)> {
    corpus()
        .into_iter()
        .filter_map(|e| match e.family {
            AnyFamily::One(f) => Some((e.name, Arc::new(Geometry1D::build(f).unwrap()))),
            AnyFamily::Product(_) => None,
        })
        .collect()
}

fn product_geometries() -> Vec<(&'static str, GeometryN)> {
    corpus()
        .into_iter()
        .filter(|e| matches!(e.family, AnyFamily::Product(_)))
        .map(|e| (e.name, GeometryN::from_family(&e.family).unwrap()))
        .collect()
}

#[test]
fn c01_fluctuation_theorems() {
    criterion(1, "fluctuation theorems by quadrature, residual < 1e-8", 10.0, |fails| {
        let spec = QuadratureSpec::default();
        let mut applicable = 0;
        for e in corpus() {
            for r in verify_fluctuation_theorems(&e.family, &spec) {
                if r.has_flag(Flag::NotApplicable) {
                    expect(fails, !e.conforming, || format!("{}: conforming family skipped", e.name));
                    continue;
                }
                applicable += 1;
                expect_report(fails, &r, 1e-8);
            }
        }
        applicable > 0
    });
}

#[test]
fn c02_uncertainty_bounds() {
    criterion(2, "uncertainty product and matrix bound", 10.0, |fails| {
        let spec = QuadratureSpec::default();
        for e in corpus() {
            if !is_conforming(&e.family) {
                continue;
            }
            let u = uncertainty_report(&e.family, &spec).unwrap();
            expect(fails, u.min_eigenvalue >= -1e-9, || format!("{}: λmin(C − M⁻¹) = {:e}", e.name, u.min_eigenvalue));
            let gaussian = e.name.starts_with("normal") || e.name == "product_normal";
            for p in &u.product {
                if gaussian {
                    expect(fails, (p - 1.0).abs() <= 1e-10, || format!("{}: ΔI·Δη = {p} is not saturated", e.name));
                } else if e.name == "mixture" {
                    expect(fails, *p > 1.0, || format!("mixture: ΔI·Δη = {p} does not exceed 1"));
                }
            }
        }
        true
    });
}

#[test]
fn c03_normal_chart_closed_forms() {
    criterion(3, "normal chart, metric and potential closed forms on 1000 points", 5.0, |fails| {
        for (mu, sigma) in [(0.0, 1.0), (3.0, 0.5), (-1.5, 2.5)] {
            let g = Geometry1D::build(Arc::new(Normal::new(mu, sigma).unwrap())).unwrap();
            let mut worst = [0.0f64; 3];
            for x in linspace(mu - 6.0 * sigma, mu + 6.0 * sigma, 1000) {
                let z = (x - mu) / sigma;
                worst[0] = worst[0].max((g.chart(x) - z).abs());
                worst[1] = worst[1].max((g.metric(x) - 1.0 / (sigma * sigma)).abs());
                worst[2] = worst[2].max((g.potential(x) + 0.5 * z * z).abs());
            }
            expect(fails, worst.iter().all(|w| *w <= 1e-9), || format!("normal({mu}, {sigma}): s, g, 𝒮 errors {worst:?}"));
        }
        true
    });
}

fn local_maxima(v: &[f64]) -> usize {
    (1..v.len() - 1).filter(|&k| v[k] > v[k - 1] && v[k] > v[k + 1]).count()
}

#[test]
fn c04_monomodality() {
    criterion(4, "bimodal mixture has a single weight maximum at p = 1/2", 5.0, |fails| {
        let (_, g) = one_d_geometries().into_iter().find(|(n, _)| *n == "mixture").unwrap();
        let r = g.monomodality_check(2001);
        expect_report(fails, &r, 0.0);
        let p = g.cumulant(g.mode());
        expect(fails, (p - 0.5).abs() <= 1e-10, || format!("p(Ī) = {p}"));
        let xs = linspace(g.inverse_chart(-5.0), g.inverse_chart(5.0), 2001);
        let rho: Vec<f64> = xs.iter().map(|&x| g.family().density(x)).collect();
        expect(fails, local_maxima(&rho) == 2, || format!("density has {} maxima, expected 2", local_maxima(&rho)));
        true
    });
}

#[test]
fn c05_covariant_residuals() {
    criterion(5, "covariant Hessian, PDE and gaussian decomposition < 1e-6", 30.0, |fails| {
        let wanted = [Identity::CovariantHessian, Identity::CovariantPde, Identity::GaussianDecomposition];
        for (name, g) in one_d_geometries() {
            let reports = covariant_checks(g.as_ref(), 201);
            for id in wanted {
                match reports.iter().find(|r| r.identity == id) {
                    Some(r) => expect_report(fails, r, 1e-6),
                    None => fails.push(format!("{name}: no {id:?} report")),
                }
            }
        }
        true
    });
}

#[test]
fn c06_density_reconstruction() {
    criterion(6, "Riemannian gaussian reconstruction, sup-norm < 1e-9", 10.0, |fails| {
        for (_, g) in one_d_geometries() {
            expect_report(fails, &reconstruction_check(g.as_ref(), 401), 1e-9);
        }
        for (_, g) in product_geometries() {
            expect_report(fails, &reconstruction_check(&g, 401), 1e-9);
        }
        true
    });
}

fn geodesic_case(fails: &mut Vec<String>, m: &dyn Manifold, raw_direction: &[f64], length: f64) {
    let start = m.inverse_chart(&vec![-1.0; m.dim()]);
    let dir = unit_direction(m, &start, raw_direction).unwrap();
    let reports = geodesic_checks(m, &start, &dir, length).unwrap();
    for r in &reports {
        let bound = match r.identity {
            Identity::GeodesicAffineNorm | Identity::GeodesicChartLength => 1e-8,
            Identity::DissipationRate => 1e-6,
            _ => r.tolerance,
        };
        expect_report(fails, r, bound);
    }
    for r in hydrodynamic_checks(m, &start).unwrap() {
        expect_report(fails, &r, 1e-6);
    }
}

#[test]
fn c07_geodesics() {
    criterion(7, "geodesic norm, length, dissipation and hydrodynamic relaxation", 10.0, |fails| {
        for (_, g) in one_d_geometries() {
            geodesic_case(fails, g.as_ref(), &[1.0], 2.0);
        }
        for (_, g) in product_geometries() {
            let d = g.dim();
            let mut axis = vec![0.0; d];
            axis[d - 1] = 1.0;
            geodesic_case(fails, &g, &axis, 2.0);
            geodesic_case(fails, &g, &vec![1.0; d], 1.5);
        }
        true
    });
}

#[test]
fn c08_flatness_and_sphere() {
    criterion(8, "product geometries are flat; the sphere has R = 2/r²", 20.0, |fails| {
        let mut dims = Vec::new();
        for (_, g) in product_geometries() {
            dims.push(g.dim());
            expect_report(fails, &flatness_check(&g, 200), 1e-4);
        }
        expect(fails, dims.contains(&2) && dims.contains(&3), || format!("product dimensions {dims:?}"));
        for (r, theta) in [(1.0, 0.7), (2.0, 1.0), (0.5, 2.0)] {
            let rep = sphere_curvature_check(r, theta).unwrap();
            expect_report(fails, &rep, 1e-4);
            expect(fails, rep.rhs[0] != 0.0, || "sphere oracle is zero".into());
        }
        true
    });
}

#[test]
fn c09_entropies() {
    criterion(9, "intrinsic entropy 1/2 per dimension; geometric entropy invariant", 20.0, |fails| {
        for e in corpus().into_iter().filter(|e| e.comparison_set) {
            let f = e.family.as_one().unwrap().clone();
            let g = Arc::new(Geometry1D::build(f.clone()).unwrap());
            let h = intrinsic_entropy(&g).unwrap();
            expect(fails, (h - 0.5).abs() <= 1e-6, || format!("{}: intrinsic entropy {h}", e.name));
            let maps: [Arc<dyn Diffeo>; 3] = [Arc::new(Affine { a: 3.0, b: -1.0 }), Arc::new(Sinh), Arc::new(Exp)];
            for map in maps {
                for r in invariance_check(&f, &g, map).unwrap() {
                    expect_report(fails, &r, 1e-6);
                }
            }
        }
        for (name, g) in product_geometries() {
            let n = g.dim() as f64;
            let h = intrinsic_entropy_n(&g).unwrap();
            expect(fails, (h - 0.5 * n).abs() <= 1e-6, || format!("{name}: intrinsic entropy {h}, expected {}", 0.5 * n));
        }
        true
    });
}

#[test]
fn c10_inference_monte_carlo() {
    criterion(10, "score, estimator and Cramér–Rao bands; asymptotic normality", 60.0, |fails| {
        let f = NormalLocation::new(0.0, 1.0);
        let stream = RngStream::new(20_240_601);
        let expected = [
            ("mean", EstimatorSpec::sample_mean(), Identity::CramerRaoSaturation),
            ("median", EstimatorSpec::sample_median(), Identity::CramerRaoStrict),
        ];
        for (k, (name, est, bound)) in expected.into_iter().enumerate() {
            let reports = verify_inference_theorems(&f, &[0.0], &est, 100, 10_000, stream.substream(k as u64)).unwrap();
            for id in [Identity::ScoreMean, Identity::EstimatorScoreCorrelation, Identity::CramerRao, bound] {
                match reports.iter().find(|r| r.identity == id) {
                    Some(r) => expect_report(fails, r, r.tolerance),
                    None => fails.push(format!("{name}: no {id:?} report")),
                }
            }
        }
        let ls: Arc<dyn ParametricFamily> = Arc::new(NormalLocationScale::new(0.0, 1.0));
        let r = asymptotic_check(ls, &[0.0, 1.0], 10_000, 10_000, stream.substream(99)).unwrap();
        let cov = r.iter().find(|r| r.identity == Identity::AsymptoticCovariance).unwrap();
        expect_report(fails, cov, 0.05);
        // σ̂ carries an O(1/m) bias of about one standard error at this trial
        // count, so the mean is reported but not part of the criterion
        let mean = r.iter().find(|r| r.identity == Identity::AsymptoticMean).unwrap();
        println!("    info: {}", mean.summary_line());
        true
    });
}

#[test]
fn c11_amari_connections() {
    criterion(11, "exponential connection flat in natural parameters; 0-connection is Levi-Civita", 10.0, |fails| {
        let spec = QuadratureSpec::default();
        let e = corpus().into_iter().find(|e| e.name == "expfam").unwrap();
        let theta = match e.spec {
            fluctgeom::families::FamilySpec::Expfam { theta } => theta,
            _ => unreachable!(),
        };
        let f = ExpFamilyNatural::new(theta.clone());
        expect_report(fails, &amari_flat_check(&f, &theta, &spec), 1e-8);
        expect_report(fails, &amari_levi_civita_check(&f, &theta, &spec), 1e-6);
        let ls = NormalLocationScale::new(0.5, 1.5);
        expect_report(fails, &amari_levi_civita_check(&ls, &[0.5, 1.5], &spec), 1e-6);
        true
    });
}

#[test]
fn c12_figure_reproduction() {
    criterion(12, "figure 1 monotone with s(1/2) = 0; figure 2 bimodal density, monomodal weight", 5.0, |fails| {
        let mixture = corpus().into_iter().find(|e| e.name == "mixture").unwrap();
        let g = Geometry1D::build(mixture.family.as_one().unwrap().clone()).unwrap();
        let t = figure1(&g, 199).unwrap();
        let (p, s) = (t.column("p").unwrap(), t.column("s").unwrap());
        expect(fails, t.header == ["p", "s", "I"], || format!("figure 1 header {:?}", t.header));
        expect(fails, p.windows(2).all(|w| w[1] > w[0]) && s.windows(2).all(|w| w[1] > w[0]), || "figure 1 not monotone".into());
        match p.iter().position(|&v| v == 0.5) {
            Some(k) => expect(fails, s[k] == 0.0, || format!("s = {} at p = 1/2", s[k])),
            None => fails.push("no row with p = 1/2".into()),
        }
        for e in corpus().into_iter().filter(|e| e.comparison_set) {
            let g = Geometry1D::build(e.family.as_one().unwrap().clone()).unwrap();
            let t = figure2(&g, &GridSpec::Chart(401)).unwrap();
            expect(fails, t.header == ["I", "rho", "omega"], || format!("figure 2 header {:?}", t.header));
            let omega = local_maxima(&t.column("omega").unwrap());
            expect(fails, omega == 1, || format!("{}: weight has {omega} maxima", e.name));
            if e.name == "mixture" {
                let rho = local_maxima(&t.column("rho").unwrap());
                expect(fails, rho == 2, || format!("mixture: density has {rho} maxima"));
            }
        }
        true
    });
}
