//! A change of variable leaves the geometry unchanged: the log-normal is the
//! normal seen through `exp`, and its chart distances agree.

use fluctgeom::families::{reparametrize, Exp, Family1D, Normal};
use fluctgeom::geometry1d::Geometry1D;
use std::sync::Arc;

fn main() -> fluctgeom::Result<()> {
    let base: Arc<dyn Family1D> = Arc::new(Normal::new(0.2, 0.6)?);
    let lognormal: Arc<dyn Family1D> = Arc::new(reparametrize(base.clone(), Arc::new(Exp))?);
    let g0 = Geometry1D::build(base)?;
    let g1 = Geometry1D::build(lognormal.clone())?;
    println!("{} has mode {:.9} = exp({:.9})", lognormal.name(), g1.mode(), g0.mode());
    for (a, b) in [(-0.5, 0.4), (0.1, 1.3), (-1.0, 2.0)] {
        let (d0, d1) = (g0.distance(a, b), g1.distance(a.exp(), b.exp()));
        println!("D({a}, {b}) = {d0:.12}; after exp: {d1:.12}; difference {:.1e}", (d0 - d1).abs());
    }
    for x in [-0.5f64, 0.7] {
        // the metric transforms as a (0,2)-tensor: g1(e^x)·e^{2x} = g0(x)
        println!("g0({x}) = {:.12}, g1(e^x)·e^(2x) = {:.12}", g0.metric(x), g1.metric(x.exp()) * (2.0 * x).exp());
    }
    Ok(())
}
