//! Naive, Jaynes, geometric and intrinsic entropies, their behaviour under
//! a change of variable, and a divergence.

use fluctgeom::entropy::{differential_entropies, invariance_check, kl_divergence, max_entropy_comparison};
use fluctgeom::families::{corpus, Exp, Family1D, Normal};
use fluctgeom::geometry1d::Geometry1D;
use std::sync::Arc;

fn main() -> fluctgeom::Result<()> {
    for e in corpus().into_iter().filter(|e| e.comparison_set) {
        let f = e.family.as_one().unwrap().clone();
        let g = Arc::new(Geometry1D::build(f.clone())?);
        let r = differential_entropies(&f, &g)?;
        println!(
            "{:<9} naive {:+.9}  jaynes {:+.9}  geometric {:+.9}  intrinsic {:.9}",
            e.name,
            r.naive,
            r.jaynes,
            r.geometric,
            r.intrinsic.unwrap_or(f64::NAN)
        );
        for rep in invariance_check(&f, &g, Arc::new(Exp))? {
            println!("          {}", rep.summary_line());
        }
        println!("          {}", max_entropy_comparison(&g, 1.0)?.summary_line());
    }
    let q: Arc<dyn Family1D> = Arc::new(Normal::new(0.5, 1.2)?);
    let p: Arc<dyn Family1D> = Arc::new(Normal::standard());
    let d = kl_divergence(&q, &p)?;
    let exact = (1.0f64 / 1.2).ln() + (1.44 + 0.25) / 2.0 - 0.5;
    println!("KL(N(0.5, 1.2²) ‖ N(0, 1)) = {:.12} (closed form {exact:.12})", d.value);
    Ok(())
}
