//! Rebuild densities from the metric and potential alone.

use fluctgeom::cli::Geometry;
use fluctgeom::families::corpus;
use fluctgeom::numerics::QuadratureSpec;
use fluctgeom::riemann::{reconstruct_density, reconstruction_check};

fn main() -> fluctgeom::Result<()> {
    for e in corpus() {
        let geom = Geometry::build(&e.family, &QuadratureSpec::default())?;
        let m = geom.manifold();
        let x = m.inverse_chart(&vec![0.7; m.dim()]);
        let r = reconstruct_density(m, &x)?;
        println!("{:<15} at s = 0.7: rebuilt {:.15e}, exact {:.15e}", e.name, r.rho, r.exact);
        println!("{:<15} {}", "", reconstruction_check(m, 401).summary_line());
    }
    Ok(())
}
