//! Describe a family in JSON and run verification suites on it, as the
//! command line does.

use fluctgeom::cli::{run_suites, Suite, SuiteOptions};
use fluctgeom::families::FamilySpec;
use fluctgeom::Summary;

fn main() -> fluctgeom::Result<()> {
    let json = r#"{"type": "product", "factors": [
        {"type": "mixture", "components": [
            {"weight": 0.3, "mu": -1.0, "sigma": 0.4},
            {"weight": 0.7, "mu": 1.0, "sigma": 0.9}]},
        {"type": "normal", "mu": 2.0, "sigma": 0.5}]}"#;
    let spec: FamilySpec = serde_json::from_str(json)?;
    let reports = run_suites(&spec, &[Suite::All], &SuiteOptions::default())?;
    for r in &reports {
        println!("{}", r.summary_line());
    }
    let s = Summary::of(&reports);
    println!("{} of {} passed, largest residual {:.2e}", s.passed, s.total, s.max_residual);
    Ok(())
}
