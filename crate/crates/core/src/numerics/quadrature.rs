//! Adaptive Gauss–Kronrod (10/21) quadrature with global bisection.
//!
//! The scalar and vector drivers share one partition: a vector integrand is
//! refined until every component meets its own tolerance, so related
//! integrals (moments, matrix entries) are computed from the same nodes.

use serde::{Deserialize, Serialize};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_167_915,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Tail probability at which unbounded expectations are truncated.
    pub tail_cutoff: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 1e-14, max_subdivisions: 2000, tail_cutoff: 1e-15 }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }
}

/// Result of a scalar integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
    pub converged: bool,
}

/// Result of a vector integration.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralVec {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub subdivisions: usize,
    pub converged: bool,
}

struct Piece {
    a: f64,
    b: f64,
    values: Vec<f64>,
    errors: Vec<f64>,
    // ∫|f| over the piece
    l1: Vec<f64>,
    // cannot be bisected further without hitting rounding
    frozen: bool,
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * resabs;
        if min_err > err {
            err = min_err;
        }
    }
    err
}

/// Apply the 21-point rule on [a, b] to an `n`-component integrand.
fn gk21<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    n: usize,
    a: f64,
    b: f64,
    fv: &mut [f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // fv holds 21 blocks of n values: node 0 is the center, then ± pairs
    f(center, &mut fv[..n]);
    for j in 0..10 {
        let dx = half * XGK[j];
        f(center - dx, &mut fv[n * (2 * j + 1)..n * (2 * j + 2)]);
        f(center + dx, &mut fv[n * (2 * j + 2)..n * (2 * j + 3)]);
    }
    let mut values = vec![0.0; n];
    let mut errors = vec![0.0; n];
    let mut l1 = vec![0.0; n];
    for k in 0..n {
        let fc = fv[k];
        let mut resk = WGK[10] * fc;
        let mut resg = 0.0;
        let mut resabs = (WGK[10] * fc).abs();
        for j in 0..10 {
            let f1 = fv[n * (2 * j + 1) + k];
            let f2 = fv[n * (2 * j + 2) + k];
            resk += WGK[j] * (f1 + f2);
            resabs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                resg += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * resk;
        let mut resasc = WGK[10] * (fc - mean).abs();
        for j in 0..10 {
            let f1 = fv[n * (2 * j + 1) + k];
            let f2 = fv[n * (2 * j + 2) + k];
            resasc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
        }
        let h = half.abs();
        values[k] = resk * half;
        l1[k] = resabs * h;
        errors[k] = rescale_error((resk - resg) * half, resabs * h, resasc * h);
    }
    (values, errors, l1)
}

/// Integrate a vector-valued function over a finite interval, splitting first
/// at the given interior breakpoints.
pub fn integrate_vec_finite<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    n: usize,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> IntegralVec {
    let mut fv = vec![0.0; 21 * n];
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > a.min(b) && x < a.max(b))
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    if b < a {
        cuts.reverse();
    }
    let mut nodes = vec![a];
    nodes.extend(cuts);
    nodes.push(b);
    nodes.dedup();

    let mut pieces: Vec<Piece> = nodes
        .windows(2)
        .map(|w| {
            let (values, errors, l1) = gk21(&mut f, n, w[0], w[1], &mut fv);
            Piece { a: w[0], b: w[1], values, errors, l1, frozen: false }
        })
        .collect();

    let mut totals = vec![0.0; n];
    let mut errs = vec![0.0; n];
    let mut l1 = vec![0.0; n];
    let mut converged = false;
    loop {
        totals.iter_mut().for_each(|t| *t = 0.0);
        errs.iter_mut().for_each(|t| *t = 0.0);
        l1.iter_mut().for_each(|t| *t = 0.0);
        for p in &pieces {
            for k in 0..n {
                totals[k] += p.values[k];
                errs[k] += p.errors[k];
                l1[k] += p.l1[k];
            }
        }
        // relative accuracy is measured against ∫|f| so that integrals
        // cancelling to zero still have a reachable target
        let scales: Vec<f64> = l1.iter().map(|t| spec.abs_tol.max(spec.rel_tol * t)).collect();
        if (0..n).all(|k| errs[k] <= scales[k]) {
            converged = true;
            break;
        }
        if pieces.len() >= spec.max_subdivisions {
            break;
        }
        // worst remaining piece, in units of each component's tolerance
        let worst = pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.frozen)
            .map(|(i, p)| {
                let w = (0..n).map(|k| p.errors[k] / scales[k]).fold(0.0, f64::max);
                (i, w)
            })
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal));
        let Some((i, _)) = worst else { break };
        let p = &pieces[i];
        let mid = 0.5 * (p.a + p.b);
        let width = (p.b - p.a).abs();
        if width <= 1e3 * f64::EPSILON * (p.a.abs() + p.b.abs()).max(f64::MIN_POSITIVE) {
            pieces[i].frozen = true;
            continue;
        }
        let (a0, b0) = (p.a, p.b);
        let (v1, e1, l1a) = gk21(&mut f, n, a0, mid, &mut fv);
        let (v2, e2, l1b) = gk21(&mut f, n, mid, b0, &mut fv);
        pieces[i] = Piece { a: a0, b: mid, values: v1, errors: e1, l1: l1a, frozen: false };
        pieces.push(Piece { a: mid, b: b0, values: v2, errors: e2, l1: l1b, frozen: false });
    }
    // accuracy already at rounding level counts as converged
    if !converged {
        converged = (0..n).all(|k| errs[k] <= 1e3 * f64::EPSILON * l1[k].max(spec.abs_tol));
    }
    IntegralVec { values: totals, errors: errs, subdivisions: pieces.len(), converged }
}

enum Map {
    Finite,
    Upper(f64),
    Lower(f64),
    Whole,
}

impl Map {
    fn x(&self, t: f64) -> (f64, f64) {
        match *self {
            Map::Finite => (t, 1.0),
            Map::Upper(a) => {
                let u = 1.0 - t;
                (a + t / u, 1.0 / (u * u))
            }
            Map::Lower(b) => (b - (1.0 - t) / t, 1.0 / (t * t)),
            Map::Whole => {
                let u = 1.0 - t * t;
                (t / u, (1.0 + t * t) / (u * u))
            }
        }
    }
    fn t(&self, x: f64) -> f64 {
        match *self {
            Map::Finite => x,
            Map::Upper(a) => (x - a) / (1.0 + x - a),
            Map::Lower(b) => 1.0 / (1.0 + b - x),
            Map::Whole => 2.0 * x / (1.0 + (1.0 + 4.0 * x * x).sqrt()),
        }
    }
}

/// Integrate a vector-valued function over `[a, b]`, which may have infinite
/// endpoints. Interior breakpoints are honoured.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    n: usize,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> IntegralVec {
    if a == b {
        return IntegralVec { values: vec![0.0; n], errors: vec![0.0; n], subdivisions: 0, converged: true };
    }
    if a > b {
        let mut r = integrate_vec(f, n, b, a, breaks, spec);
        r.values.iter_mut().for_each(|v| *v = -*v);
        return r;
    }
    let (map, ta, tb) = match (a.is_finite(), b.is_finite()) {
        (true, true) => (Map::Finite, a, b),
        (true, false) => (Map::Upper(a), 0.0, 1.0),
        (false, true) => (Map::Lower(b), 0.0, 1.0),
        (false, false) => (Map::Whole, -1.0, 1.0),
    };
    if let Map::Finite = map {
        return integrate_vec_finite(f, n, a, b, breaks, spec);
    }
    let tbreaks: Vec<f64> = breaks.iter().filter(|x| x.is_finite()).map(|&x| map.t(x)).collect();
    integrate_vec_finite(
        |t, out: &mut [f64]| {
            let (x, jac) = map.x(t);
            if !x.is_finite() {
                out.iter_mut().for_each(|v| *v = 0.0);
                return;
            }
            f(x, out);
            for v in out.iter_mut() {
                *v *= jac;
                if !v.is_finite() {
                    *v = 0.0;
                }
            }
        },
        n,
        ta,
        tb,
        &tbreaks,
        spec,
    )
}

/// Integrate a scalar function over `[a, b]` (endpoints may be infinite).
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Integral {
    integrate_with_breaks(f, a, b, &[], spec)
}

pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Integral {
    let r = integrate_vec(|x, out: &mut [f64]| out[0] = f(x), 1, a, b, breaks, spec);
    Integral { value: r.values[0], error: r.errors[0], subdivisions: r.subdivisions, converged: r.converged }
}
