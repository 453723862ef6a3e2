//! Geodesics and hydrodynamic relaxation on a three-factor product geometry.

use fluctgeom::families::builtin;
use fluctgeom::riemann::{
    geodesic_checks, geodesic_integrate, hydrodynamic_checks, hydrodynamic_relax, unit_direction, GeometryN, Manifold,
};

fn main() -> fluctgeom::Result<()> {
    let m = GeometryN::from_family(&builtin("product3").unwrap())?;
    let start = m.inverse_chart(&[-1.0, 0.5, -0.8]);
    let dir = unit_direction(&m, &start, &[1.0, -0.3, 2.0])?;
    let traj = geodesic_integrate(&m, &start, &dir, 2.5)?;
    let end = traj.end();
    println!("{}", m.name());
    println!("geodesic of length {:.12}: {:?} -> {:?}", traj.length(), start, end.position);
    println!("chart distance covered {:.12}", m.distance(&start, &end.position));
    for r in geodesic_checks(&m, &start, &dir, 2.5)? {
        println!("  {}", r.summary_line());
    }
    let flow = hydrodynamic_relax(&m, &start)?;
    println!("relaxation reaches {:?} (mode {:?}) after {:.12}", flow.end().position, m.mode(), flow.length());
    for r in hydrodynamic_checks(&m, &start)? {
        println!("  {}", r.summary_line());
    }
    Ok(())
}
