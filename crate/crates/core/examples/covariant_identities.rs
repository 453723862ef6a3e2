use fluctgeom::families::corpus;
use fluctgeom::geometry1d::Geometry1D;
use fluctgeom::riemann::{covariant_checks, gradiental_field};

fn main() -> fluctgeom::Result<()> {
    for e in corpus() {
        let Some(f) = e.family.as_one() else { continue };
        let g = Geometry1D::build(f.clone())?;
        println!("{}", e.name);
        for r in covariant_checks(&g, 201) {
            println!("  {}", r.summary_line());
        }
        let x = g.inverse_chart(1.5);
        let psi = gradiental_field(&g, &[x])?;
        // |ψ| is the chart distance to the mode
        println!("  |ψ| at s = 1.5: {:.12}", psi.norm_sq.sqrt());
    }
    Ok(())
}
