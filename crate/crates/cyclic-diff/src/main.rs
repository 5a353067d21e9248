//! Command-line front end: seeded experiment runs with CSV/JSON/SVG export,
//! the invariant verification suite, and asymptotic-model inspection.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cyclic_diff::{
    harness, initial_cloud, run, verify, AsymptoticModel, Error, ExportTarget, Parity, PointCloud,
    Route, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "cyclic-diff",
    version,
    about = "Cyclic vector-difference evolution: seeded runs, diagnostics, exports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded experiment and export trajectories and diagnostics.
    Run(RunArgs),
    /// Run the cross-route equivalence and invariant suite.
    Verify {
        /// Seed for the randomized configurations.
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Print the asymptotic model (and the limiting ellipse for odd n, d = 2)
    /// for an initial cloud.
    Predict(PredictArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Number of points (>= 2).
    #[arg(long)]
    n: usize,
    /// Spatial dimension.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Evolution steps (>= 1).
    #[arg(long)]
    steps: u64,
    /// Snapshot stride; defaults to `steps` (snapshots at t = 0 and t = steps only).
    #[arg(long)]
    stride: Option<u64>,
    /// Seed for the initial cloud.
    #[arg(long)]
    seed: u64,
    /// Evolution routes to evaluate and cross-check.
    #[arg(long, value_delimiter = ',', default_value = "spectral")]
    routes: Vec<Route>,
    /// Write all snapshots as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the full run record as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write a scatter plot as SVG: PATH or PATH:t (defaults to t = steps).
    #[arg(long)]
    svg: Option<String>,
}

#[derive(Args)]
struct PredictArgs {
    /// Number of points; required with --seed.
    #[arg(long)]
    n: Option<usize>,
    /// Spatial dimension for seeded clouds.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Seed for a random initial cloud.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV file of initial coordinates, one comma-separated row per point.
    #[arg(long, conflicts_with_all = ["seed", "n"])]
    initial: Option<PathBuf>,
    /// Time step for the ellipse right-hand side.
    #[arg(long, default_value_t = 0)]
    t: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Verify { seed } => cmd_verify(seed),
        Command::Predict(args) => cmd_predict(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, Error> {
    let mut outputs = Vec::new();
    if let Some(path) = args.csv {
        outputs.push(ExportTarget::Csv { path });
    }
    if let Some(path) = args.json {
        outputs.push(ExportTarget::Json { path });
    }
    if let Some(arg) = &args.svg {
        outputs.push(parse_svg_target(arg, args.steps)?);
    }
    let config = RunConfig {
        n: args.n,
        d: args.dim,
        steps: args.steps,
        snapshot_stride: args.stride.unwrap_or(args.steps),
        seed: args.seed,
        distribution: harness::Distribution::UniformSymmetric,
        routes: args.routes,
        outputs,
    };
    let record = run(&config)?;
    record.write_outputs()?;
    let last = record.snapshots.last().expect("at least one snapshot");
    println!(
        "run complete: n={} d={} steps={} seed={} logmag={:.6} max route discrepancy {:.3e}",
        config.n, config.d, config.steps, config.seed, last.logmag, record.max_route_discrepancy
    );
    Ok(ExitCode::SUCCESS)
}

/// `PATH` or `PATH:t`. A trailing `:NUMBER` selects the snapshot time.
fn parse_svg_target(arg: &str, default_t: u64) -> Result<ExportTarget, Error> {
    if let Some((path, t)) = arg.rsplit_once(':') {
        if let Ok(t) = t.parse::<u64>() {
            return Ok(ExportTarget::Svg {
                path: PathBuf::from(path),
                t,
            });
        }
    }
    Ok(ExportTarget::Svg {
        path: PathBuf::from(arg),
        t: default_t,
    })
}

fn cmd_verify(seed: u64) -> Result<ExitCode, Error> {
    let checks = verify::run_suite(seed)?;
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut all_passed = true;
    println!(
        "{:<width$}  {:>12}  {:>10}  result",
        "invariant", "max error", "tolerance"
    );
    for check in &checks {
        let ok = check.passed();
        all_passed &= ok;
        println!(
            "{:<width$}  {:>12.3e}  {:>10.1e}  {}",
            check.name,
            check.max_error,
            check.tolerance,
            if ok { "pass" } else { "FAIL" }
        );
    }
    if all_passed {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: one or more invariants failed");
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_predict(args: PredictArgs) -> Result<ExitCode, Error> {
    let cloud = match (&args.initial, args.seed) {
        (Some(path), _) => read_initial_csv(path)?,
        (None, Some(seed)) => {
            let n = args.n.ok_or_else(|| {
                Error::InvalidConfig("--n is required together with --seed".into())
            })?;
            initial_cloud(n, args.dim, seed)?
        }
        (None, None) => {
            return Err(Error::InvalidConfig(
                "provide either --seed with --n, or --initial FILE".into(),
            ))
        }
    };
    let model = AsymptoticModel::for_cloud(&cloud);
    let ellipse = (model.parity == Parity::Odd && model.d == 2 && !model.degenerate)
        .then(|| model.ellipse_of(args.t))
        .transpose()?;

    #[derive(serde::Serialize)]
    struct PredictOutput {
        model: AsymptoticModel,
        ellipse: Option<cyclic_diff::EllipseQuadratic>,
    }
    let out = PredictOutput { model, ellipse };
    let body = serde_json::to_string_pretty(&out).map_err(|e| Error::JsonEncode(e.to_string()))?;
    println!("{body}");
    Ok(ExitCode::SUCCESS)
}

fn read_initial_csv(path: &PathBuf) -> Result<PointCloud, Error> {
    let body = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    let mut rows = Vec::new();
    for (i, line) in body.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|field| {
                field.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidConfig(format!("line {}: cannot parse '{field}'", i + 1))
                })
            })
            .collect::<Result<_, _>>()?;
        rows.push(row);
    }
    PointCloud::from_rows(&rows)
}
