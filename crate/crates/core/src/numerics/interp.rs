//! Monotone cubic Hermite interpolation on a uniform grid.

/// Piecewise cubic Hermite table on `x0 + k*dx`, built from exact values and
/// slopes. Slopes are limited (Fritsch–Carlson) where they would break
/// monotonicity of increasing data.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    x0: f64,
    dx: f64,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl HermiteTable {
    pub fn new(x0: f64, dx: f64, y: Vec<f64>, mut d: Vec<f64>) -> Self {
        assert!(y.len() >= 2 && y.len() == d.len() && dx > 0.0);
        for k in 0..y.len() - 1 {
            let delta = (y[k + 1] - y[k]) / dx;
            if delta <= 0.0 {
                d[k] = 0.0;
                d[k + 1] = 0.0;
                continue;
            }
            let a = d[k] / delta;
            let b = d[k + 1] / delta;
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                d[k] = tau * a * delta;
                d[k + 1] = tau * b * delta;
            }
        }
        Self { x0, dx, y, d }
    }

    pub fn lo(&self) -> f64 {
        self.x0
    }

    pub fn hi(&self) -> f64 {
        self.x0 + self.dx * (self.y.len() - 1) as f64
    }

    /// Interpolated value; clamps to the table range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.y.len();
        let u = ((x - self.x0) / self.dx).clamp(0.0, (n - 1) as f64);
        let k = (u.floor() as usize).min(n - 2);
        let t = u - k as f64;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * self.dx * self.d[k] + h01 * self.y[k + 1] + h11 * self.dx * self.d[k + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_cubics() {
        let f = |x: f64| x * x * x - 2.0 * x;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let xs: Vec<f64> = (0..11).map(|k| -1.0 + 0.2 * k as f64).collect();
        // non-monotone data: just check the nodes
        let t = HermiteTable::new(-1.0, 0.2, xs.iter().map(|&x| f(x)).collect(), xs.iter().map(|&x| df(x)).collect());
        for &x in &xs {
            assert!((t.eval(x) - f(x)).abs() < 1e-14);
        }
        let g = |x: f64| x * x * x + x;
        let t = HermiteTable::new(-1.0, 0.2, xs.iter().map(|&x| g(x)).collect(), xs.iter().map(|&x| 3.0 * x * x + 1.0).collect());
        assert!((t.eval(0.13) - g(0.13)).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn monotone_on_increasing_data(x in -3.0f64..3.0, dx in 1e-4f64..0.1) {
            let grid: Vec<f64> = (0..61).map(|k| -3.0 + 0.1 * k as f64).collect();
            let t = HermiteTable::new(-3.0, 0.1, grid.iter().map(|x| x.tanh().powi(3)).collect(),
                grid.iter().map(|x| 3.0 * x.tanh().powi(2) / x.cosh().powi(2)).collect());
            prop_assert!(t.eval(x + dx) >= t.eval(x));
        }
    }
}
