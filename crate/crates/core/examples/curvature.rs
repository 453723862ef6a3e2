use fluctgeom::families::builtin;
use fluctgeom::riemann::{curvature, flatness_check, sphere_curvature_check, GeometryN, Manifold, MetricField, SphereMetric};

fn main() -> fluctgeom::Result<()> {
    for name in ["product_normal", "product2", "product3"] {
        let m = GeometryN::from_family(&builtin(name).unwrap())?;
        println!("{name}: {}", flatness_check(&m, 200).summary_line());
        let c = curvature(&m, &m.inverse_chart(&vec![0.3; m.dim()]))?;
        println!("  scalar curvature at s = 0.3: {:.3e}", c.scalar);
    }
    // a curved control: the round sphere of radius r has R = 2/r²
    for r in [0.5, 1.0, 3.0] {
        let c = curvature(&SphereMetric { r }, &[1.1, 0.4])?;
        println!("sphere r = {r}: R = {:.8} (2/r² = {:.8})", c.scalar, 2.0 / (r * r));
        println!("  {}", sphere_curvature_check(r, 1.1)?.summary_line());
    }
    Ok(())
}
