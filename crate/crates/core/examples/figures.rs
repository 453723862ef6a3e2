//! Figure data: the chart against the cumulant, and density against weight
//! for the four comparison families. Writes CSVs into a temporary directory.

use fluctgeom::cli::{figure1, figure2, GridSpec};
use fluctgeom::families::corpus;
use fluctgeom::geometry1d::Geometry1D;

fn maxima(v: &[f64]) -> usize {
    (1..v.len() - 1).filter(|&k| v[k] > v[k - 1] && v[k] > v[k + 1]).count()
}

fn main() -> fluctgeom::Result<()> {
    let dir = std::env::temp_dir().join("fluctgeom-figures");
    std::fs::create_dir_all(&dir)?;
    for e in corpus().into_iter().filter(|e| e.comparison_set) {
        let g = Geometry1D::build(e.family.as_one().unwrap().clone())?;
        let t2 = figure2(&g, &GridSpec::Chart(401))?;
        let rho = maxima(&t2.column("rho").unwrap());
        let omega = maxima(&t2.column("omega").unwrap());
        println!("{:<9} density maxima {rho}, weight maxima {omega}", e.name);
        std::fs::write(dir.join(format!("figure2_{}.csv", e.name)), t2.to_csv())?;
        if e.name == "mixture" {
            std::fs::write(dir.join("figure1.csv"), figure1(&g, 199)?.to_csv())?;
        }
    }
    println!("CSV files in {}", dir.display());
    Ok(())
}
