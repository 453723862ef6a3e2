//! The chart s(I), metric, information potential and weight of a bimodal
//! mixture, sampled at a few points.

use fluctgeom::families::builtin;
use fluctgeom::geometry1d::Geometry1D;

fn main() -> fluctgeom::Result<()> {
    let family = builtin("mixture").expect("built-in").as_one().unwrap().clone();
    let g = Geometry1D::build(family)?;
    println!("{}: mode Ī = {:.10}, p(Ī) = {:.12}", g.family().name(), g.mode(), g.cumulant(g.mode()));
    println!("{:>8} {:>12} {:>12} {:>12} {:>12} {:>12}", "I", "rho", "s", "g11", "S", "omega");
    for x in [-3.5, -2.0, -1.0, 0.0, g.mode(), 1.5, 3.0] {
        let p = g.eval(x)?;
        println!("{:>8.4} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}", p.i, p.rho, p.s, p.g11, p.potential, p.weight);
    }
    let (a, b) = (g.inverse_chart(-1.0), g.inverse_chart(1.0));
    println!("one chart unit either side of the mode: [{a:.6}, {b:.6}], distance {:.12}", g.distance(a, b));
    for r in g.chart_checks(1001) {
        println!("{}", r.summary_line());
    }
    Ok(())
}
