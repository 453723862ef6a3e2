//! Fluctuation theorems and uncertainty bounds over the built-in families.

use fluctgeom::families::corpus;
use fluctgeom::fluctuation::{uncertainty_report, verify_fluctuation_theorems};
use fluctgeom::numerics::QuadratureSpec;
use fluctgeom::Flag;

fn main() -> fluctgeom::Result<()> {
    let spec = QuadratureSpec::default();
    for e in corpus() {
        let reports = verify_fluctuation_theorems(&e.family, &spec);
        if reports.iter().all(|r| r.has_flag(Flag::NotApplicable)) {
            println!("{:<15} non-conforming, theorems not applicable", e.name);
            continue;
        }
        let worst = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
        let u = uncertainty_report(&e.family, &spec)?;
        println!(
            "{:<15} {} checks, worst residual {worst:.2e}; ΔI·Δη = {:?}; λmin(C − M⁻¹) = {:.2e}",
            e.name,
            reports.len(),
            u.product.iter().map(|p| format!("{p:.6}")).collect::<Vec<_>>(),
            u.min_eigenvalue
        );
    }
    Ok(())
}
