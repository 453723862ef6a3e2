//! Monte Carlo score identities and Cramér–Rao bounds for the gaussian
//! location model: the sample mean saturates the bound, the median does not.

use fluctgeom::inference::{fisher_matrix, verify_inference_theorems, EstimatorSpec, NormalLocation};
use fluctgeom::numerics::{QuadratureSpec, RngStream};

fn main() -> fluctgeom::Result<()> {
    let model = NormalLocation::new(0.0, 1.0);
    let g = fisher_matrix(&model, &[0.0], &QuadratureSpec::default())?;
    println!("Fisher information g = {:.12}", g.g[(0, 0)]);
    let stream = RngStream::new(2024);
    for (k, est) in [EstimatorSpec::sample_mean(), EstimatorSpec::sample_median()].into_iter().enumerate() {
        println!("{}:", est.name);
        for r in verify_inference_theorems(&model, &[0.0], &est, 100, 10_000, stream.substream(k as u64))? {
            println!("  {}", r.summary_line());
        }
    }
    Ok(())
}
