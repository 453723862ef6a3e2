//! Dormand–Prince 5(4) integrator with projection and terminal events.

/// A first-order system `y' = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    /// Evaluate the right-hand side. Returns `false` if `y` lies outside the
    /// domain where the system is defined; the integrator then shrinks the
    /// step.
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> bool;

    /// Restore an invariant after each accepted step, returning the size of
    /// the correction that was applied.
    fn project(&self, _y: &mut [f64]) -> f64 {
        0.0
    }

    /// Terminal event: integration stops where this changes sign from
    /// positive to non-positive.
    fn event(&self, _t: f64, _y: &[f64]) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSpec {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeSpec {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, h_init: 1e-3, h_max: f64::INFINITY, h_min: 1e-13, max_steps: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    Reached,
    Event,
    /// The next step could not be taken without leaving the domain.
    LeftDomain,
    MaxSteps,
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub stop: Stop,
    /// Largest correction applied by [`OdeSystem::project`].
    pub max_projection: f64,
    pub rejected: usize,
}

impl OdeSolution {
    pub fn last(&self) -> (f64, &[f64]) {
        (*self.t.last().unwrap(), self.y.last().unwrap())
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One trial step. Returns the new state and the scaled error norm, or
/// `None` if a stage left the domain.
fn try_step<S: OdeSystem + ?Sized>(
    sys: &S,
    t: f64,
    y: &[f64],
    k0: &[f64],
    h: f64,
    spec: &OdeSpec,
    k: &mut [Vec<f64>; 7],
) -> Option<(Vec<f64>, f64)> {
    let n = y.len();
    k[0].copy_from_slice(k0);
    let mut tmp = vec![0.0; n];
    for s in 1..7 {
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += A[s][j] * kj[i];
            }
            tmp[i] = y[i] + h * acc;
        }
        let (ks, _) = k.split_at_mut(s + 1);
        if !sys.rhs(t + C[s] * h, &tmp, &mut ks[s]) {
            return None;
        }
        if ks[s].iter().any(|v| !v.is_finite()) {
            return None;
        }
    }
    // stage 7 is evaluated at the 5th-order solution, which is tmp
    let y_new = tmp;
    let mut err2 = 0.0;
    for i in 0..n {
        let mut e = 0.0;
        for (j, kj) in k.iter().enumerate() {
            e += E[j] * kj[i];
        }
        let sc = spec.atol + spec.rtol * y[i].abs().max(y_new[i].abs());
        err2 += (h * e / sc).powi(2);
    }
    Some((y_new, (err2 / n as f64).sqrt()))
}

/// Integrate from `t0` to `t_end` (`t_end > t0`), recording every accepted
/// step.
pub fn dopri5<S: OdeSystem + ?Sized>(sys: &S, t0: f64, y0: &[f64], t_end: f64, spec: &OdeSpec) -> OdeSolution {
    let n = sys.dim();
    assert_eq!(y0.len(), n);
    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut sol = OdeSolution { t: vec![t0], y: vec![y.clone()], stop: Stop::Reached, max_projection: 0.0, rejected: 0 };
    let mut f0 = vec![0.0; n];
    if !sys.rhs(t, &y, &mut f0) {
        sol.stop = Stop::LeftDomain;
        return sol;
    }
    let mut h = spec.h_init.min(spec.h_max).min(t_end - t0);
    let mut g_prev = sys.event(t, &y);
    for _ in 0..spec.max_steps {
        if t >= t_end {
            sol.stop = Stop::Reached;
            return sol;
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        match try_step(sys, t, &y, &f0, h, spec, &mut k) {
            None => {
                sol.rejected += 1;
                h *= 0.25;
                if h < spec.h_min {
                    sol.stop = Stop::LeftDomain;
                    return sol;
                }
            }
            Some((y_new, err)) if err <= 1.0 => {
                let t_new = if last { t_end } else { t + h };
                let mut y_new = y_new;
                // terminal event: shrink the step onto the sign change
                if let (Some(gp), Some(gn)) = (g_prev, sys.event(t_new, &y_new)) {
                    if gp > 0.0 && gn <= 0.0 {
                        let (mut lo, mut hi) = (0.0, h);
                        let mut best = (t_new, y_new.clone());
                        while hi - lo > spec.h_min.max(1e-15 * t.abs()) {
                            let mid = 0.5 * (lo + hi);
                            match try_step(sys, t, &y, &f0, mid, spec, &mut k) {
                                Some((ym, _)) => match sys.event(t + mid, &ym) {
                                    Some(g) if g > 0.0 => lo = mid,
                                    _ => {
                                        hi = mid;
                                        best = (t + mid, ym);
                                    }
                                },
                                None => hi = mid,
                            }
                        }
                        let (te, mut ye) = best;
                        let c = sys.project(&mut ye);
                        sol.max_projection = sol.max_projection.max(c);
                        sol.t.push(te);
                        sol.y.push(ye);
                        sol.stop = Stop::Event;
                        return sol;
                    }
                }
                let c = sys.project(&mut y_new);
                sol.max_projection = sol.max_projection.max(c);
                t = t_new;
                y = y_new;
                if !sys.rhs(t, &y, &mut f0) {
                    sol.t.push(t);
                    sol.y.push(y);
                    sol.stop = Stop::LeftDomain;
                    return sol;
                }
                g_prev = sys.event(t, &y);
                sol.t.push(t);
                sol.y.push(y.clone());
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = (h * fac).min(spec.h_max);
            }
            Some((_, err)) => {
                sol.rejected += 1;
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                if h < spec.h_min {
                    sol.stop = Stop::LeftDomain;
                    return sol;
                }
            }
        }
    }
    sol.stop = if t >= t_end { Stop::Reached } else { Stop::MaxSteps };
    sol
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Oscillator;
    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> bool {
            dy[0] = y[1];
            dy[1] = -y[0];
            true
        }
    }

    #[test]
    fn harmonic_oscillator_period() {
        let tp = 2.0 * std::f64::consts::PI;
        let sol = dopri5(&Oscillator, 0.0, &[1.0, 0.0], tp, &OdeSpec::default());
        let (t, y) = sol.last();
        assert_eq!(sol.stop, Stop::Reached);
        assert_eq!(t, tp);
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10, "{y:?}");
    }

    struct Falling;
    impl OdeSystem for Falling {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, _y: &[f64], dy: &mut [f64]) -> bool {
            dy[0] = -1.0;
            true
        }
        fn event(&self, _t: f64, y: &[f64]) -> Option<f64> {
            Some(y[0])
        }
    }

    #[test]
    fn event_located() {
        let sol = dopri5(&Falling, 0.0, &[0.7], 10.0, &OdeSpec::default());
        assert_eq!(sol.stop, Stop::Event);
        let (t, y) = sol.last();
        assert!((t - 0.7).abs() < 1e-12 && y[0].abs() < 1e-12);
    }

    struct Wall;
    impl OdeSystem for Wall {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> bool {
            dy[0] = 1.0;
            y[0] < 1.0
        }
    }

    #[test]
    fn domain_exit_stops_close_to_wall() {
        let sol = dopri5(&Wall, 0.0, &[0.0], 5.0, &OdeSpec::default());
        assert_eq!(sol.stop, Stop::LeftDomain);
        let (_, y) = sol.last();
        assert!(y[0] < 1.0 && y[0] > 1.0 - 1e-9, "{y:?}");
    }
}
