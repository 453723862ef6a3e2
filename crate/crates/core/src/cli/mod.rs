//! Command-line front end.
//!
//! Families are given with `--family` as `builtin:<name>`, inline JSON or a
//! path to a JSON file:
//!
//! ```text
//! {"type": "normal", "mu": 0, "sigma": 1}
//! {"type": "mixture", "components": [{"weight": 0.5, "mu": -1, "sigma": 1}, ...]}
//! {"type": "triangle", "a": 1}
//! {"type": "uniform", "lo": 0, "hi": 1}
//! {"type": "expfam", "theta": [0.3, -1, 0, 0.5]}
//! {"type": "product", "factors": [<spec>, <spec>, ...]}
//! ```
//!
//! Unknown fields are rejected. Exit status: 0 when every check passes,
//! 1 when a check fails (the report is still written), 2 for configuration
//! and parse errors, 3 for numerical non-convergence.

pub mod output;
pub mod suites;

use crate::entropy::{differential_entropies, product_entropies, EntropyReport};
use crate::error::{Error, Result};
use crate::families::{corpus, parse_family_spec, FamilySpec};
use crate::geometry1d::Geometry1D;
use crate::numerics::{linspace, normal_quantile, QuadratureSpec};
use crate::report::{Flag, VerificationReport};
use crate::riemann::{geodesic_integrate, hydrodynamic_relax, unit_direction, Manifold, Trajectory};
use clap::{Args, Parser, Subcommand};
use output::{emit, render_reports, Format, Table};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
pub use suites::{run_suites, Geometry, Suite, SuiteOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fluctgeom", version, about = "Fluctuation geometry of continuous distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites and write a report.
    Verify(VerifyArgs),
    /// Tabulate I, ρ, η, p, s, g₁₁, 𝒮 and ω on a grid.
    Geometry(GeometryArgs),
    /// Integrate a geodesic, or the hydrodynamic flow when --length is absent.
    Geodesic(GeodesicArgs),
    /// Naive, Jaynes, geometric and intrinsic entropies of a family.
    Entropy(EntropyArgs),
    /// Figure data: 1 = chart s(p), 2 = density against weight.
    Figure(FigureArgs),
    /// Monte Carlo inference suite.
    Inference(InferenceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// `builtin:<name>`, inline JSON, or a JSON file.
    #[arg(long)]
    pub family: String,
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct MonteCarlo {
    /// Outcomes per trial.
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// `mean`, `median` or `mle`; the family's defaults when absent.
    #[arg(long)]
    pub estimator: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated suites.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub suite: Vec<Suite>,
    /// Grid size `n`, or `lo:hi:n` (only `n` is used).
    #[arg(long, default_value = "201", allow_hyphen_values = true)]
    pub grid: GridSpec,
    #[command(flatten)]
    pub mc: MonteCarlo,
    /// Geodesic start in I coordinates, comma-separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub from: Option<Vec<f64>>,
    /// Geodesic direction in I coordinates, normalized by the metric.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub direction: Option<Vec<f64>>,
    #[arg(long, default_value_t = 2.0)]
    pub length: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    #[command(flatten)]
    pub common: Common,
    /// `n` chart-uniform points on s ∈ [−4, 4], or `lo:hi:n` uniform in I.
    #[arg(long, default_value = "201", allow_hyphen_values = true)]
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Args)]
pub struct GeodesicArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub from: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub direction: Option<Vec<f64>>,
    #[arg(long)]
    pub length: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub id: u8,
    /// Figure 1 defaults to the built-in mixture; figure 2 without a family
    /// writes one file per comparison family into the --out directory.
    #[arg(long)]
    pub family: Option<String>,
    /// Figure 1: odd point count in p. Figure 2: as for `geometry`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct InferenceArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub mc: MonteCarlo,
}

/// `n` or `lo:hi:n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    Chart(usize),
    Range(f64, f64, usize),
}

impl GridSpec {
    pub fn points(&self) -> usize {
        match *self {
            GridSpec::Chart(n) | GridSpec::Range(_, _, n) => n,
        }
    }

    /// Chart-uniform on s ∈ [−4, 4], or uniform in I restricted to the
    /// support.
    pub fn nodes(&self, g: &Geometry1D) -> Vec<f64> {
        match *self {
            GridSpec::Chart(n) => g.chart_grid(-4.0, 4.0, n),
            GridSpec::Range(lo, hi, n) => linspace(lo, hi, n).into_iter().filter(|&x| g.support().contains(x)).collect(),
        }
    }
}

impl std::str::FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let count = |t: &str| match t.trim().parse::<usize>() {
            Ok(n) if n >= 2 => Ok(n),
            _ => Err(format!("grid size must be an integer ≥ 2, got '{t}'")),
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad grid bound '{t}'"));
        match s.split(':').collect::<Vec<_>>()[..] {
            [n] => Ok(GridSpec::Chart(count(n)?)),
            [lo, hi, n] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if !(lo < hi) {
                    return Err(format!("grid needs lo < hi, got {lo}:{hi}"));
                }
                Ok(GridSpec::Range(lo, hi, count(n)?))
            }
            _ => Err(format!("grid must be 'n' or 'lo:hi:n', got '{s}'")),
        }
    }
}

fn quadrature(tol: f64) -> Result<QuadratureSpec> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidSpec(format!("--tol must lie in (0, 1), got {tol}")));
    }
    Ok(QuadratureSpec { rel_tol: tol, ..QuadratureSpec::default() })
}

fn exit_for_error(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } | Error::Singular(_) => EXIT_NONCONVERGENCE,
        _ => EXIT_CONFIG,
    }
}

/// Exit status implied by a set of reports.
pub fn exit_for_reports(reports: &[VerificationReport]) -> i32 {
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    if failed.is_empty() {
        EXIT_OK
    } else if failed.iter().any(|r| r.has_flag(Flag::QuadratureNonConvergence)) {
        EXIT_NONCONVERGENCE
    } else {
        EXIT_CHECK_FAILED
    }
}

/// Parse arguments, run, and return the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fluctgeom: {e}");
            exit_for_error(&e)
        }
    }
}

/// Execute one command, writing its artifacts; returns the exit status.
pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Geometry(a) => geometry_table(a),
        Command::Geodesic(a) => geodesic(a),
        Command::Entropy(a) => entropy(a),
        Command::Figure(a) => figure(a),
        Command::Inference(a) => inference(a),
    }
}

fn write_reports(reports: &[VerificationReport], common: &Common) -> Result<i32> {
    let text = render_reports(reports, common.format.unwrap_or(Format::Json))?;
    emit(common.out.as_deref(), &text)?;
    for r in reports.iter().filter(|r| !r.pass) {
        eprintln!("{}", r.summary_line());
    }
    Ok(exit_for_reports(reports))
}

fn verify(a: &VerifyArgs) -> Result<i32> {
    let spec = parse_family_spec(&a.common.family)?;
    let opts = SuiteOptions {
        quadrature: quadrature(a.common.tol)?,
        points: a.grid.points(),
        from: a.from.clone(),
        direction: a.direction.clone(),
        length: a.length,
        m: a.mc.m,
        trials: a.mc.trials,
        seed: a.mc.seed,
        estimator: a.mc.estimator.clone(),
    };
    let reports = run_suites(&spec, &a.suite, &opts)?;
    write_reports(&reports, &a.common)
}

fn inference(a: &InferenceArgs) -> Result<i32> {
    let spec = parse_family_spec(&a.common.family)?;
    let opts = SuiteOptions {
        quadrature: quadrature(a.common.tol)?,
        m: a.mc.m,
        trials: a.mc.trials,
        seed: a.mc.seed,
        estimator: a.mc.estimator.clone(),
        ..SuiteOptions::default()
    };
    let reports = run_suites(&spec, &[Suite::Inference], &opts)?;
    write_reports(&reports, &a.common)
}

fn one_dimensional(spec: &FamilySpec, tol: f64) -> Result<Geometry1D> {
    match spec.build()?.as_one() {
        Some(f) => Geometry1D::with_spec(f.clone(), quadrature(tol)?),
        None => Err(Error::InvalidSpec("this command needs a one-dimensional family".into())),
    }
}

/// `I, rho, eta, p, s, g11, S, omega` on the grid.
pub fn geometry_grid(g: &Geometry1D, grid: &GridSpec) -> Result<Table> {
    let mut t = Table::new(&["I", "rho", "eta", "p", "s", "g11", "S", "omega"]);
    for x in grid.nodes(g) {
        let p = g.eval(x)?;
        t.push(vec![p.i, p.rho, p.eta, p.p, p.s, p.g11, p.potential, p.weight]);
    }
    Ok(t)
}

fn geometry_table(a: &GeometryArgs) -> Result<i32> {
    let spec = parse_family_spec(&a.common.family)?;
    let g = one_dimensional(&spec, a.common.tol)?;
    let t = geometry_grid(&g, &a.grid)?;
    emit(a.common.out.as_deref(), &t.render(a.common.format.unwrap_or(Format::Csv))?)?;
    Ok(EXIT_OK)
}

/// `t, I…, s…, S, Phi` along a trajectory, with `Φ = ξ^i ∂_i 𝒮`.
pub fn trajectory_table(m: &dyn Manifold, traj: &Trajectory) -> Table {
    let d = m.dim();
    let label = |base: &str, k: usize| if d == 1 { base.to_string() } else { format!("{base}{}", k + 1) };
    let mut header = vec!["t".to_string()];
    header.extend((0..d).map(|k| label("I", k)));
    header.extend((0..d).map(|k| label("s", k)));
    header.push("S".into());
    header.push("Phi".into());
    let mut t = Table { header, rows: Vec::new() };
    for st in &traj.states {
        let mut row = vec![st.t];
        row.extend(&st.position);
        row.extend(m.chart(&st.position));
        row.push(m.potential(&st.position));
        let grad = m.potential_gradient(&st.position);
        row.push(st.velocity.iter().zip(&grad).map(|(v, g)| v * g).sum());
        t.push(row);
    }
    t
}

fn geodesic(a: &GeodesicArgs) -> Result<i32> {
    let spec = parse_family_spec(&a.common.family)?;
    let geom = Geometry::build(&spec.build()?, &quadrature(a.common.tol)?)?;
    let m = geom.manifold();
    let start = a.from.clone().unwrap_or_else(|| suites::default_start(m));
    suites::check_point(m, &start)?;
    let traj = match a.length {
        Some(length) => {
            let raw = a.direction.clone().unwrap_or_else(|| suites::default_direction(m));
            let dir = unit_direction(m, &start, &raw)?;
            geodesic_integrate(m, &start, &dir, length)?
        }
        None => hydrodynamic_relax(m, &start)?,
    };
    if traj.truncated {
        eprintln!("fluctgeom: trajectory stopped early ({:?}) at t = {}", traj.stop, traj.end().t);
    }
    let t = trajectory_table(m, &traj);
    emit(a.common.out.as_deref(), &t.render(a.common.format.unwrap_or(Format::Csv))?)?;
    Ok(EXIT_OK)
}

/// Entropies of a family on its own geometry.
pub fn entropy_report(spec: &FamilySpec, quad: &QuadratureSpec) -> Result<EntropyReport> {
    let family = spec.build()?;
    match Geometry::build(&family, quad)? {
        Geometry::One(g) => differential_entropies(g.family(), &g),
        Geometry::Product(g) => product_entropies(&family.factors(), &g),
    }
}

fn entropy(a: &EntropyArgs) -> Result<i32> {
    let spec = parse_family_spec(&a.common.family)?;
    let r = entropy_report(&spec, &quadrature(a.common.tol)?)?;
    let text = match a.common.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&r)? + "\n",
        Format::Csv => {
            let mut t = Table::new(&["naive", "jaynes", "geometric", "intrinsic"]);
            t.push(vec![r.naive, r.jaynes, r.geometric, r.intrinsic.unwrap_or(f64::NAN)]);
            t.to_csv()
        }
    };
    emit(a.common.out.as_deref(), &text)?;
    Ok(if r.converged { EXIT_OK } else { EXIT_NONCONVERGENCE })
}

/// Figure 1: `p, s, I` with `p = k/(n+1)`; `n` odd puts `p = ½`, `s = 0`
/// on the middle row.
pub fn figure1(g: &Geometry1D, n: usize) -> Result<Table> {
    if n % 2 == 0 {
        return Err(Error::InvalidSpec(format!("figure 1 needs an odd number of points, got {n}")));
    }
    let mut t = Table::new(&["p", "s", "I"]);
    for k in 1..=n {
        let p = k as f64 / (n + 1) as f64;
        let s = normal_quantile(p);
        t.push(vec![p, s, g.inverse_chart(s)]);
    }
    Ok(t)
}

/// Figure 2: `I, rho, omega` for one family.
pub fn figure2(g: &Geometry1D, grid: &GridSpec) -> Result<Table> {
    let mut t = Table::new(&["I", "rho", "omega"]);
    for x in grid.nodes(g) {
        t.push(vec![x, g.family().density(x), g.weight(x)]);
    }
    Ok(t)
}

fn figure(a: &FigureArgs) -> Result<i32> {
    match a.id {
        1 => {
            let spec = parse_family_spec(a.family.as_deref().unwrap_or("builtin:mixture"))?;
            let g = one_dimensional(&spec, a.tol)?;
            let n = a.grid.map(|s| s.points()).unwrap_or(199);
            emit(a.out.as_deref(), &figure1(&g, n)?.to_csv())?;
        }
        _ => {
            let grid = a.grid.unwrap_or(GridSpec::Chart(401));
            match &a.family {
                Some(f) => {
                    let g = one_dimensional(&parse_family_spec(f)?, a.tol)?;
                    emit(a.out.as_deref(), &figure2(&g, &grid)?.to_csv())?;
                }
                None => {
                    let dir = a
                        .out
                        .as_deref()
                        .ok_or_else(|| Error::InvalidSpec("figure 2 without --family needs an --out directory".into()))?;
                    std::fs::create_dir_all(dir)?;
                    for e in corpus().into_iter().filter(|e| e.comparison_set) {
                        let g = one_dimensional(&e.spec, a.tol)?;
                        emit(Some(&figure2_path(dir, e.name)), &figure2(&g, &grid)?.to_csv())?;
                    }
                }
            }
        }
    }
    Ok(EXIT_OK)
}

/// File written for one comparison family by `figure --id 2`.
pub fn figure2_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("figure2_{name}.csv"))
}
