use super::Family1D;
use crate::geometry1d::Geometry1D;
use crate::numerics::special::{normal_quantile, HALF_LN_2PI};
use crate::report::{Flag, Identity, VerificationReport};
use std::sync::Arc;

const PROBES: [f64; 3] = [1e-6, 1e-9, 1e-12];
const DECAY_TOL: f64 = 1e-4;

/// Check that ρ and dρ/dI decay toward every boundary point.
///
/// Values are sampled at the 1e-6, 1e-9 and 1e-12 quantiles from each end
/// and normalized by the density (resp. density² · √2π) at the median. A
/// side conforms when the sequence is non-increasing and its last value is
/// below 1e-4. Violations are recorded as failing reports flagged
/// non-conforming rather than as errors.
pub fn validate_boundary(family: Arc<dyn Family1D>) -> Vec<VerificationReport> {
    let name = family.name();
    let geom = match Geometry1D::build(family.clone()) {
        Ok(g) => g,
        Err(e) => {
            return vec![VerificationReport::not_applicable(Identity::BoundaryDensity, &name, e.to_string())];
        }
    };
    let points: Vec<Vec<f64>> = [-1.0, 1.0]
        .iter()
        .map(|side| PROBES.iter().map(|&q| geom.inverse_chart(side * -normal_quantile(q))).collect())
        .collect();
    let rho_ref = family.density(geom.mode());
    let slope_ref = (HALF_LN_2PI.exp() * rho_ref) * rho_ref;

    let mut out = Vec::new();
    for (identity, f, reference) in [
        (Identity::BoundaryDensity, Box::new(|x: f64| family.density(x)) as Box<dyn Fn(f64) -> f64>, rho_ref),
        (Identity::BoundarySlope, Box::new(|x: f64| family.density(x) * family.eta(x).abs()), slope_ref),
    ] {
        let mut values = Vec::new();
        let mut residual: f64 = 0.0;
        for side in &points {
            let v: Vec<f64> = side.iter().map(|&x| f(x) / reference).collect();
            let monotone = v.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
            let worst = if monotone { v[v.len() - 1] } else { v.iter().copied().fold(0.0, f64::max) };
            residual = residual.max(worst);
            values.extend(v);
        }
        let zeros = vec![0.0; values.len()];
        let r = VerificationReport::with_residual(identity, &name, values, zeros, vec![2, PROBES.len()], residual, DECAY_TOL);
        let conforming = r.pass;
        out.push(r.flag_if(!conforming, Flag::NonConforming).note("normalized values at the 1e-6, 1e-9, 1e-12 quantiles of each end"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{Normal, Triangle, Uniform};

    #[test]
    fn examples() {
        let n = validate_boundary(Arc::new(Normal::standard()));
        assert!(n.iter().all(|r| r.pass));
        let u = validate_boundary(Arc::new(Uniform::new(0.0, 1.0).unwrap()));
        assert!(!u[0].pass && u[0].has_flag(Flag::NonConforming));
        assert!(u[1].pass);
        let t = validate_boundary(Arc::new(Triangle::new(1.0).unwrap()));
        assert!(t[0].pass, "{}", t[0].summary_line());
        assert!(!t[1].pass);
    }
}
