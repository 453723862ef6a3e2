use fluctgeom::inference::{
    amari_connection, amari_flat_check, amari_levi_civita_check, fisher_christoffel, ExpFamilyNatural,
    MixtureMeans, NormalLocationScale,
};
use fluctgeom::families::Mixture;
use fluctgeom::numerics::QuadratureSpec;

fn main() -> fluctgeom::Result<()> {
    let spec = QuadratureSpec::default();
    let theta = vec![0.3, -1.0, 0.0, 0.5];
    let ef = ExpFamilyNatural::new(theta.clone());
    println!("{}", amari_flat_check(&ef, &theta, &spec).summary_line());
    println!("{}", amari_levi_civita_check(&ef, &theta, &spec).summary_line());

    let ls = NormalLocationScale::new(0.0, 2.0);
    let gamma = fisher_christoffel(&ls, &[0.0, 2.0], &spec)?;
    for s in [-1.0, 0.0, 1.0] {
        let (c, _) = amari_connection(&ls, &[0.0, 2.0], s, &spec)?;
        println!("normal location-scale, σ = {s:+}: Γ_μμσ = {:+.9}", c.get(0, 0, 1));
    }
    println!("Fisher-metric Christoffel Γ_μμσ = {:+.9}", gamma.get(0, 0, 1));

    let mix = Mixture::new(vec![0.45, 0.55], vec![-2.0, 1.5], vec![0.6, 0.8])?;
    let mm = MixtureMeans::new(&mix);
    println!("{}", amari_levi_civita_check(&mm, &[-2.0, 1.5], &spec).summary_line());
    Ok(())
}
