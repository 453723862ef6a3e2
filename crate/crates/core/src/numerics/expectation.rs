//! Expectations `⟨f⟩ = ∫ f ρ dI` over families.

use super::quadrature::{integrate_vec, IntegralVec, QuadratureSpec};
use crate::families::{AnyFamily, Family1D, ProductFamily};

/// Integration limits for a family: unbounded sides are cut at the
/// `tail_cutoff` quantiles when a closed-form quantile exists.
fn limits(family: &dyn Family1D, spec: &QuadratureSpec) -> (f64, f64) {
    let s = family.support();
    let lo = if s.lo.is_finite() { s.lo } else { family.quantile(spec.tail_cutoff).unwrap_or(s.lo) };
    let hi = if s.hi.is_finite() { s.hi } else { family.quantile_upper(spec.tail_cutoff).unwrap_or(s.hi) };
    (lo, hi)
}

/// Vector expectation of `f` under a one-dimensional family.
pub fn expectation_vec<F: FnMut(f64, &mut [f64])>(
    family: &dyn Family1D,
    n: usize,
    mut f: F,
    spec: &QuadratureSpec,
) -> IntegralVec {
    let (lo, hi) = limits(family, spec);
    let breaks = family.breakpoints();
    if lo.is_finite() && hi.is_finite() {
        return integrate_vec(
            |x, o: &mut [f64]| {
                let w = family.density(x);
                f(x, o);
                o.iter_mut().for_each(|v| *v *= w);
            },
            n,
            lo,
            hi,
            &breaks,
            spec,
        );
    }
    // integrate in the standardized variable u = (I − c)/w
    let (c, w) = family.location_scale();
    let ubreaks: Vec<f64> = breaks.iter().map(|b| (b - c) / w).collect();
    integrate_vec(
        |u, o: &mut [f64]| {
            let x = c + w * u;
            let d = w * family.density(x);
            if d == 0.0 {
                o.iter_mut().for_each(|v| *v = 0.0);
                return;
            }
            f(x, o);
            o.iter_mut().for_each(|v| *v *= d);
        },
        n,
        (lo - c) / w,
        (hi - c) / w,
        &ubreaks,
        spec,
    )
}

/// Scalar expectation under a one-dimensional family.
pub fn expectation<F: FnMut(f64) -> f64>(family: &dyn Family1D, mut f: F, spec: &QuadratureSpec) -> super::Integral {
    let r = expectation_vec(family, 1, |x, o| o[0] = f(x), spec);
    super::Integral { value: r.values[0], error: r.errors[0], subdivisions: r.subdivisions, converged: r.converged }
}

fn nested(
    factors: &[std::sync::Arc<dyn Family1D>],
    prefix: &mut Vec<f64>,
    n: usize,
    f: &mut dyn FnMut(&[f64], &mut [f64]),
    spec: &QuadratureSpec,
    converged: &mut bool,
    subdivisions: &mut usize,
) -> IntegralVec {
    let (first, rest) = factors.split_first().expect("at least one factor");
    let r = expectation_vec(
        first.as_ref(),
        n,
        |x, o: &mut [f64]| {
            prefix.push(x);
            if rest.is_empty() {
                f(prefix, o);
            } else {
                let inner = nested(rest, prefix, n, f, spec, converged, subdivisions);
                o.copy_from_slice(&inner.values);
            }
            prefix.pop();
        },
        spec,
    );
    *converged &= r.converged;
    *subdivisions += r.subdivisions;
    r
}

/// Vector expectation under a product family by iterated quadrature.
pub fn expectation_product_vec<F: FnMut(&[f64], &mut [f64])>(
    family: &ProductFamily,
    n: usize,
    mut f: F,
    spec: &QuadratureSpec,
) -> IntegralVec {
    let mut converged = true;
    let mut subdivisions = 0;
    let mut prefix = Vec::with_capacity(family.dim());
    let mut r = nested(&family.factors, &mut prefix, n, &mut f, spec, &mut converged, &mut subdivisions);
    r.converged = converged;
    r.subdivisions = subdivisions;
    r
}

/// Vector expectation under any family, with the integrand taking the
/// outcome as a slice.
pub fn expectation_any_vec<F: FnMut(&[f64], &mut [f64])>(
    family: &AnyFamily,
    n: usize,
    mut f: F,
    spec: &QuadratureSpec,
) -> IntegralVec {
    match family {
        AnyFamily::One(g) => expectation_vec(g.as_ref(), n, |x, o| f(&[x], o), spec),
        AnyFamily::Product(p) => expectation_product_vec(p, n, f, spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin, corpus, Normal, Uniform};

    #[test]
    fn examples() {
        let spec = QuadratureSpec::default();
        let n = Normal::standard();
        assert!(expectation(&n, |x| x, &spec).value.abs() < 1e-14);
        assert!((expectation(&n, |x| x * x, &spec).value - 1.0).abs() < 1e-10);
        let u = Uniform::new(0.0, 1.0).unwrap();
        assert!((expectation(&u, |x| x, &spec).value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn normalization_over_corpus() {
        let spec = QuadratureSpec::default();
        for e in corpus() {
            let r = expectation_any_vec(&e.family, 1, |_, o| o[0] = 1.0, &spec);
            assert!((r.values[0] - 1.0).abs() < 1e-10, "{}: {}", e.name, r.values[0]);
        }
    }

    #[test]
    fn product_moments_factorize() {
        let spec = QuadratureSpec::default();
        let f = builtin("product2").unwrap();
        let r = expectation_any_vec(&f, 2, |x, o| { o[0] = x[0] * x[1]; o[1] = x[1] * x[1]; }, &spec);
        let mean0 = 0.45 * -2.0 + 0.55 * 1.5;
        assert!((r.values[0] - 0.5 * mean0).abs() < 1e-10);
        assert!((r.values[1] - 1.0 / 3.0).abs() < 1e-12);
    }
}
