//! Geodesics with unit affine parametrization and the hydrodynamic
//! relaxation toward the mode.

use super::{christoffel, Manifold};
use crate::error::{Error, Result};
use crate::numerics::{dopri5, OdeSpec, OdeSystem, Stop};
use crate::report::{Flag, Identity, VerificationReport};
use nalgebra::{DMatrix, DVector};

/// A point on a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicState {
    /// Arc parameter.
    pub t: f64,
    pub position: Vec<f64>,
    /// `ξ^i = dI^i/dt`.
    pub velocity: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<GeodesicState>,
    /// Initial unit direction.
    pub direction: Vec<f64>,
    pub stop: Stop,
    /// Largest per-step correction of `g_ij ξ^i ξ^j` back to 1.
    pub max_renormalization: f64,
    /// The trajectory stopped before its requested length.
    pub truncated: bool,
}

impl Trajectory {
    pub fn end(&self) -> &GeodesicState {
        self.states.last().expect("a trajectory has at least its start")
    }

    pub fn length(&self) -> f64 {
        self.end().t - self.states[0].t
    }
}

fn norm_sq(g: &DMatrix<f64>, v: &[f64]) -> f64 {
    let v = DVector::from_column_slice(v);
    (v.transpose() * g * &v)[(0, 0)]
}

/// Scale `v` to unit length under the metric at `x`.
pub fn unit_direction(m: &(impl Manifold + ?Sized), x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    if !m.contains(x) {
        return Err(Error::Domain(format!("{x:?} is outside the manifold of {}", m.name())));
    }
    if v.len() != m.dim() {
        return Err(Error::Domain(format!("direction has {} components, manifold has {}", v.len(), m.dim())));
    }
    let n = norm_sq(&m.metric(x), v).sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Domain(format!("direction {v:?} has no finite nonzero length")));
    }
    Ok(v.iter().map(|c| c / n).collect())
}

struct Geodesic<'a, M: Manifold + ?Sized> {
    m: &'a M,
    renormalize: bool,
}

impl<M: Manifold + ?Sized> OdeSystem for Geodesic<'_, M> {
    fn dim(&self) -> usize {
        2 * self.m.dim()
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> bool {
        let n = self.m.dim();
        let (x, v) = y.split_at(n);
        if !self.m.contains(x) {
            return false;
        }
        let Ok(gamma) = christoffel(self.m, x) else { return false };
        for i in 0..n {
            dy[i] = v[i];
            let mut acc = 0.0;
            for a in 0..n {
                for b in 0..n {
                    acc += gamma.get(i, a, b) * v[a] * v[b];
                }
            }
            dy[n + i] = -acc;
        }
        true
    }

    fn project(&self, y: &mut [f64]) -> f64 {
        if !self.renormalize {
            return 0.0;
        }
        let n = self.m.dim();
        let q = norm_sq(&self.m.metric(&y[..n]), &y[n..]);
        let f = q.sqrt();
        for v in &mut y[n..] {
            *v /= f;
        }
        (q - 1.0).abs()
    }
}

fn ode_spec(length: f64) -> OdeSpec {
    OdeSpec { h_max: length / 64.0, h_init: (length / 256.0).min(1e-3), ..OdeSpec::default() }
}

fn integrate(m: &(impl Manifold + ?Sized), start: &[f64], direction: &[f64], length: f64, renormalize: bool) -> Result<Trajectory> {
    if !m.contains(start) {
        return Err(Error::Domain(format!("start {start:?} is outside the manifold of {}", m.name())));
    }
    if direction.len() != m.dim() {
        return Err(Error::Domain(format!("direction has {} components, manifold has {}", direction.len(), m.dim())));
    }
    let q = norm_sq(&m.metric(start), direction);
    if (q - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("direction is not unit under the metric: g(e, e) = {q}")));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::Domain(format!("geodesic length must be positive, got {length}")));
    }
    let n = m.dim();
    let y0 = [start, direction].concat();
    let sol = dopri5(&Geodesic { m, renormalize }, 0.0, &y0, length, &ode_spec(length));
    let states = sol
        .t
        .iter()
        .zip(&sol.y)
        .map(|(&t, y)| GeodesicState { t, position: y[..n].to_vec(), velocity: y[n..].to_vec() })
        .collect();
    Ok(Trajectory {
        states,
        direction: direction.to_vec(),
        stop: sol.stop,
        max_renormalization: sol.max_projection,
        truncated: sol.stop != Stop::Reached,
    })
}

/// Integrate `Ï^i + Γ^i_mn İ^m İ^n = 0` over arc length `length` from `start`
/// along the unit vector `direction`, renormalizing the velocity after each
/// step. A trajectory that reaches the edge of the support is returned
/// truncated.
pub fn geodesic_integrate(m: &(impl Manifold + ?Sized), start: &[f64], direction: &[f64], length: f64) -> Result<Trajectory> {
    integrate(m, start, direction, length, true)
}

/// Information dissipation `Φ = d𝒮/dt = İ^i ∂_i𝒮`.
fn dissipation(m: &(impl Manifold + ?Sized), s: &GeodesicState) -> f64 {
    m.potential_gradient(&s.position).iter().zip(&s.velocity).map(|(a, b)| a * b).sum()
}

/// Geodesic identities along one trajectory: affine norm conservation
/// without renormalization, arc length, straightness in the chart, the
/// dissipation law `Φ(t) = Φ(0) − t` and its rate `d²𝒮/dt² = −1`, and
/// reversibility.
pub fn geodesic_checks(m: &(impl Manifold + ?Sized), start: &[f64], direction: &[f64], length: f64) -> Result<Vec<VerificationReport>> {
    let name = m.name();
    let traj = geodesic_integrate(m, start, direction, length)?;
    let free = integrate(m, start, direction, length, false)?;
    let mut out = Vec::new();
    let trunc = traj.truncated;
    let note = format!("L = {length}, reached t = {:.6}, {} steps", traj.length(), traj.states.len() - 1);

    let drift: Vec<f64> = free.states.iter().map(|s| norm_sq(&m.metric(&s.position), &s.velocity)).collect();
    let ones = vec![1.0; drift.len()];
    out.push(
        VerificationReport::compare(Identity::GeodesicAffineNorm, name.clone(), drift, ones, vec![free.states.len()], 1e-8)
            .note(format!("without renormalization; with it the largest per-step correction is {:.3e}", traj.max_renormalization))
            .flag_if(free.truncated, Flag::Truncated),
    );
    out.push(
        VerificationReport::scalar(Identity::GeodesicArcLength, name.clone(), traj.length(), length, 1e-8)
            .note(note.clone())
            .flag_if(trunc, Flag::Truncated),
    );

    let s0 = m.chart(start);
    let chart_len: Vec<f64> = traj
        .states
        .iter()
        .map(|s| m.chart(&s.position).iter().zip(&s0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .collect();
    let ts: Vec<f64> = traj.states.iter().map(|s| s.t).collect();
    out.push(
        VerificationReport::compare(Identity::GeodesicChartLength, name.clone(), chart_len, ts.clone(), vec![ts.len()], 1e-8)
            .flag_if(trunc, Flag::Truncated),
    );

    let phi: Vec<f64> = traj.states.iter().map(|s| dissipation(m, s)).collect();
    let expected: Vec<f64> = ts.iter().map(|t| phi[0] - t).collect();
    out.push(
        VerificationReport::compare(Identity::DissipationLaw, name.clone(), phi, expected, vec![ts.len()], 1e-6)
            .flag_if(trunc, Flag::Truncated),
    );

    // second differences over states at least L/256 apart; very short
    // steps (near kinks of the density) would only amplify rounding
    let min_gap = traj.length() / 256.0;
    let mut kept: Vec<&GeodesicState> = Vec::new();
    for st in &traj.states {
        if kept.last().is_none_or(|k| st.t - k.t >= min_gap) {
            kept.push(st);
        }
    }
    let tk: Vec<f64> = kept.iter().map(|s| s.t).collect();
    let pot: Vec<f64> = kept.iter().map(|s| m.potential(&s.position)).collect();
    let mut rate = Vec::new();
    for k in 1..tk.len().saturating_sub(1) {
        let (h0, h1) = (tk[k] - tk[k - 1], tk[k + 1] - tk[k]);
        rate.push(2.0 * (h0 * pot[k + 1] - (h0 + h1) * pot[k] + h1 * pot[k - 1]) / (h0 * h1 * (h0 + h1)));
    }
    let minus = vec![-1.0; rate.len()];
    let n_rate = rate.len();
    out.push(
        VerificationReport::compare(Identity::DissipationRate, name.clone(), rate, minus, vec![n_rate], 1e-6)
            .flag_if(trunc, Flag::Truncated),
    );

    let end = traj.end();
    let back_dir: Vec<f64> = end.velocity.iter().map(|v| -v).collect();
    let back_dir = unit_direction(m, &end.position, &back_dir)?;
    let back = geodesic_integrate(m, &end.position, &back_dir, traj.length())?;
    let miss = m.distance(&back.end().position, start);
    out.push(
        VerificationReport::with_residual(
            Identity::GeodesicReversibility,
            name,
            back.end().position.clone(),
            start.to_vec(),
            vec![start.len()],
            miss,
            1e-7,
        )
        .flag_if(trunc || back.truncated, Flag::Truncated),
    );
    Ok(out)
}

struct Hydrodynamic<'a, M: Manifold + ?Sized> {
    m: &'a M,
    s0: Vec<f64>,
}

impl<M: Manifold + ?Sized> OdeSystem for Hydrodynamic<'_, M> {
    fn dim(&self) -> usize {
        self.m.dim()
    }

    fn rhs(&self, _t: f64, x: &[f64], dx: &mut [f64]) -> bool {
        if !self.m.contains(x) {
            return false;
        }
        let s = self.m.chart(x);
        // past the mode the flow reverses; the mode is where it ends
        if s.iter().zip(&self.s0).map(|(a, b)| a * b).sum::<f64>() <= 0.0 {
            return false;
        }
        let Ok(f) = super::gradiental_field(self.m, x) else { return false };
        let Some(u) = f.unit else { return false };
        for (d, v) in dx.iter_mut().zip(u) {
            *d = -v;
        }
        true
    }
}

/// Relax from `start` along `dI^i/dt = −υ^i` until the mode is reached. A
/// start at the mode gives a zero-length trajectory.
pub fn hydrodynamic_relax(m: &(impl Manifold + ?Sized), start: &[f64]) -> Result<Trajectory> {
    if !m.contains(start) {
        return Err(Error::Domain(format!("start {start:?} is outside the manifold of {}", m.name())));
    }
    let ell = m.distance(start, &m.mode());
    let field = super::gradiental_field(m, start)?;
    let Some(unit) = field.unit.filter(|_| ell > 0.0) else {
        return Ok(Trajectory {
            states: vec![GeodesicState { t: 0.0, position: start.to_vec(), velocity: vec![0.0; m.dim()] }],
            direction: vec![0.0; m.dim()],
            stop: Stop::Reached,
            max_renormalization: 0.0,
            truncated: false,
        });
    };
    let sys = Hydrodynamic { m, s0: m.chart(start) };
    let spec = OdeSpec { h_max: ell / 32.0, h_init: (ell / 256.0).min(1e-3), ..OdeSpec::default() };
    // the mode is reached at t = ℓ; integrate a little beyond and let the
    // domain test stop the flow there
    let sol = dopri5(&sys, 0.0, start, 1.5 * ell + 1.0, &spec);
    let states: Vec<GeodesicState> = sol
        .t
        .iter()
        .zip(&sol.y)
        .map(|(&t, x)| {
            let mut v = vec![0.0; m.dim()];
            sys.rhs(t, x, &mut v);
            GeodesicState { t, position: x.clone(), velocity: v }
        })
        .collect();
    Ok(Trajectory {
        states,
        direction: unit.iter().map(|u| -u).collect(),
        stop: sol.stop,
        max_renormalization: 0.0,
        truncated: sol.stop == Stop::Reached || sol.stop == Stop::MaxSteps,
    })
}

/// Terminal distance to the mode and traversed length against the initial
/// distance `𝔇(start, Ī)`.
pub fn hydrodynamic_checks(m: &(impl Manifold + ?Sized), start: &[f64]) -> Result<Vec<VerificationReport>> {
    let name = m.name();
    let traj = hydrodynamic_relax(m, start)?;
    let mode = m.mode();
    let ell = m.distance(start, &mode);
    let end = &traj.end().position;
    let note = format!("initial distance {ell:.6}, {} steps", traj.states.len() - 1);
    Ok(vec![
        VerificationReport::with_residual(
            Identity::HydrodynamicTerminal,
            name.clone(),
            end.clone(),
            mode.clone(),
            vec![mode.len()],
            m.distance(end, &mode),
            1e-6,
        )
        .note(note.clone())
        .flag_if(traj.truncated, Flag::Truncated),
        VerificationReport::scalar(Identity::HydrodynamicLength, name, traj.length(), ell, 1e-6).note(note),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{builtin, corpus, Mixture, Normal};
    use crate::geometry1d::Geometry1D;
    use crate::riemann::GeometryN;
    use std::sync::Arc;

    fn geom(f: impl crate::families::Family1D + 'static) -> Geometry1D {
        Geometry1D::build(Arc::new(f)).unwrap()
    }

    #[test]
    fn normal_geodesic_endpoint() {
        let g = geom(Normal::new(0.0, 2.0).unwrap());
        let e = unit_direction(&g, &[0.0], &[1.0]).unwrap();
        assert!((e[0] - 2.0).abs() < 1e-15);
        let t = geodesic_integrate(&g, &[0.0], &e, 1.0).unwrap();
        assert!((t.end().position[0] - 2.0).abs() < 1e-10);
        assert!(!t.truncated);
        assert!(geodesic_integrate(&g, &[0.0], &[1.0], 1.0).is_err());
    }

    #[test]
    fn geodesic_identities_on_corpus() {
        for e in corpus().into_iter().filter(|e| e.family.dim() == 1) {
            let g = Geometry1D::build(e.family.as_one().unwrap().clone()).unwrap();
            let start = g.inverse_chart(-1.3);
            let dir = unit_direction(&g, &[start], &[1.0]).unwrap();
            for r in geodesic_checks(&g, &[start], &dir, 2.5).unwrap() {
                assert!(r.pass, "{}", r.summary_line());
            }
        }
    }

    #[test]
    fn uniform_geodesic_stays_inside() {
        let g = Geometry1D::build(builtin("uniform").unwrap().as_one().unwrap().clone()).unwrap();
        let dir = unit_direction(&g, &[0.5], &[1.0]).unwrap();
        // at s = 4.5 the point is 3.4e-6 from the edge; beyond s ≈ 5 the
        // spacing of doubles near 1 limits the chart to ~1e-8
        let t = geodesic_integrate(&g, &[0.5], &dir, 4.5).unwrap();
        assert!(t.end().position[0] < 1.0 && !t.truncated);
        assert!((g.chart(t.end().position[0]) - t.length()).abs() < 1e-8);
    }

    #[test]
    fn relaxation_reaches_the_median_not_the_peak() {
        let g = geom(Mixture::new(vec![0.45, 0.55], vec![-2.0, 1.5], vec![0.6, 0.8]).unwrap());
        for r in hydrodynamic_checks(&g, &[-2.0]).unwrap() {
            assert!(r.pass, "{}", r.summary_line());
        }
        let t = hydrodynamic_relax(&g, &[-2.0]).unwrap();
        assert!((t.end().position[0] - g.mode()).abs() < 1e-5);
        let n = geom(Normal::standard());
        let t = hydrodynamic_relax(&n, &[3.0]).unwrap();
        assert!((t.length() - 3.0).abs() < 1e-6);
        assert!(t.states.windows(2).all(|w| w[1].position[0] <= w[0].position[0]));
        let t = hydrodynamic_relax(&n, &[0.0]).unwrap();
        assert_eq!(t.states.len(), 1);
    }

    #[test]
    fn product_relaxation_and_geodesics() {
        let g = GeometryN::from_family(&builtin("product2").unwrap()).unwrap();
        let start = g.inverse_chart(&[1.2, -0.9]);
        for r in hydrodynamic_checks(&g, &start).unwrap() {
            assert!(r.pass, "{}", r.summary_line());
        }
        // each coordinate stays on its factor's radial line in the chart
        let t = hydrodynamic_relax(&g, &start).unwrap();
        for s in &t.states {
            let c = g.chart(&s.position);
            assert!((c[0] * -0.9 - c[1] * 1.2).abs() < 1e-7);
        }
        let dir = unit_direction(&g, &start, &[1.0, 0.5]).unwrap();
        for r in geodesic_checks(&g, &start, &dir, 1.5).unwrap() {
            assert!(r.pass, "{}", r.summary_line());
        }
    }
}
