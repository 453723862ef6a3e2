//! Numerical building blocks: normal distribution functions, adaptive
//! quadrature, root finding, ODE integration, interpolation and random
//! streams.

pub mod expectation;
pub mod interp;
pub mod ode;
pub mod quadrature;
pub mod rng;
pub mod roots;
pub mod special;

pub use expectation::{expectation, expectation_any_vec, expectation_product_vec, expectation_vec};
pub use interp::HermiteTable;
pub use ode::{dopri5, OdeSolution, OdeSpec, OdeSystem, Stop};
pub use quadrature::{integrate, integrate_vec, integrate_with_breaks, Integral, IntegralVec, QuadratureSpec};
pub use rng::RngStream;
pub use roots::{bisect, brent};
pub use special::{log_phi, normal_cdf, normal_quantile, normal_quantile_upper, normal_sf, phi};

/// Central finite-difference derivative with step `h`.
pub fn central_diff<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Fourth-order five-point first and second derivatives with step `h`.
pub fn five_point<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> (f64, f64) {
    let (m2, m1, z, p1, p2) = (f(x - 2.0 * h), f(x - h), f(x), f(x + h), f(x + 2.0 * h));
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h);
    (d1, d2)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_differences() {
        let (d1, d2) = five_point(f64::sin, 0.4, 1e-3);
        assert!((d1 - 0.4f64.cos()).abs() < 1e-12);
        assert!((d2 + 0.4f64.sin()).abs() < 1e-7);
        assert!((central_diff(f64::exp, 0.0, 1e-5) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-1.0, 1.0, 5);
        assert_eq!(v, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
