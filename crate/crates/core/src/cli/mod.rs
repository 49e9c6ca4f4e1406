//! Command-line front end of the `jeft` binary.
//!
//! Settings come from built-in defaults, then an optional `key = value`
//! config file, then flags. Exit codes: 0 on success, 1 when a verification
//! check fails, 2 on usage, configuration or runtime errors.

mod config;
mod output;

pub use config::{FunctionSelector, Method, RunConfig, Settings};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Point, SpectralParam};
use crate::transforms::{
    inverse_helgason_many, poisson_transform, spherical_transform, HelgasonGrid, InteriorFunction, JeftGrid,
};
use crate::verify::{self, Check};
use output::{write_csv, Row};

#[derive(Debug, Parser)]
#[command(name = "jeft", version, about = "Helgason, Poisson, spherical and joint-eigenspace transforms on H² and H³")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Helgason transform on the spectral grid times the boundary rule.
    Helgason(CommonArgs),
    /// Joint-eigenspace transform at the origin and a polar point sample.
    Jeft(CommonArgs),
    /// Poisson transform of boundary data over the point sample.
    Poisson(CommonArgs),
    /// Spherical transform of a radial function.
    Spherical(CommonArgs),
    /// Plancherel inversion of the Helgason transform over the point sample.
    Inverse(CommonArgs),
    /// Run the verification harness and write a JSON manifest.
    Verify(CommonArgs),
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// h2 or h3.
    #[arg(long)]
    pub model: Option<String>,
    /// Radial Gauss–Legendre nodes.
    #[arg(long)]
    pub nr: Option<usize>,
    /// Boundary rule: N on the circle, PxA on the sphere.
    #[arg(long)]
    pub nb: Option<String>,
    /// Spectral nodes on [0, Λ].
    #[arg(long)]
    pub nlambda: Option<usize>,
    /// Truncation radius R.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Spectral cutoff Λ.
    #[arg(long = "lambda-max")]
    pub lambda_max: Option<f64>,
    /// Single spectral parameter instead of the spectral grid.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Suite member by name or index.
    #[arg(long)]
    pub function: Option<String>,
    /// Bump at geodesic distance center_r along the first axis: "center_r,support".
    #[arg(long)]
    pub bump: Option<String>,
    /// direct or composed (jeft only).
    #[arg(long)]
    pub method: Option<String>,
    /// Boundary data for poisson: one, exp or helgason.
    #[arg(long)]
    pub data: Option<String>,
    /// Named verification check; repeatable. Default: all.
    #[arg(long)]
    pub check: Vec<String>,
    /// Verification grid profile: default or reduced.
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `key = value` settings file, overridden by flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Parses `argv` (including the program name) and runs. Returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("jeft: {e}");
            2
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let (name, args) = match &cli.command {
        Command::Helgason(a) => ("helgason", a),
        Command::Jeft(a) => ("jeft", a),
        Command::Poisson(a) => ("poisson", a),
        Command::Spherical(a) => ("spherical", a),
        Command::Inverse(a) => ("inverse", a),
        Command::Verify(a) => ("verify", a),
    };
    let mut settings = match &args.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    settings.apply_flags(args)?;
    let config = RunConfig::resolve(name, &settings)?;
    if let Some(n) = settings.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        // A second call fails when a pool already exists; that pool is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = settings.out.clone();
    match name {
        "verify" => run_verify(&config, out),
        _ => {
            let rows = compute(&config)?;
            let mut buf = Vec::new();
            write_csv(&mut buf, config.model.dim(), &rows, name != "spherical", name != "inverse")?;
            emit(out, &buf)?;
            Ok(0)
        }
    }
}

fn emit(out: Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn lambdas(config: &RunConfig) -> Result<Vec<f64>> {
    match config.lambda {
        Some(l) => Ok(vec![l]),
        None => Ok(config.grid()?.spectral().nodes.clone()),
    }
}

/// The origin, then `POINT_RADII` along each probe direction.
fn point_sample(config: &RunConfig) -> Vec<Point> {
    const POINT_RADII: [f64; 4] = [0.25, 0.5, 1.0, 1.5];
    let model = config.model;
    let mut pts = vec![Point::origin(model.dim())];
    for b in verify::probe_directions(model, 8) {
        for r in POINT_RADII {
            pts.push(Point::at_distance(&b, r).expect("finite radius"));
        }
    }
    pts
}

fn compute(config: &RunConfig) -> Result<Vec<Row>> {
    let grid = config.grid()?;
    let f = config.function()?;
    let ls = lambdas(config)?;
    let params: Vec<SpectralParam> = ls.iter().map(|l| SpectralParam::real(*l)).collect();
    let mut rows = Vec::new();
    match config.command.as_str() {
        "helgason" => {
            let ft = HelgasonGrid::compute(f.as_ref(), &grid, &params)?;
            for (k, l) in ft.lambdas().iter().enumerate() {
                for (j, b) in ft.boundary().points.iter().enumerate() {
                    rows.push(Row { lambda: *l, coords: b.coords().to_vec(), value: ft.get(k, j) });
                }
            }
        }
        "jeft" => {
            let pts = point_sample(config);
            let jg = match config.method {
                Method::Direct => JeftGrid::direct(f.as_ref(), &grid, &params, &pts)?,
                Method::Composed => JeftGrid::composed(f.as_ref(), &grid, &params, &pts)?,
            };
            for (k, l) in jg.lambdas().iter().enumerate() {
                for (i, x) in pts.iter().enumerate() {
                    rows.push(Row { lambda: *l, coords: x.coords().to_vec(), value: jg.get(k, i) });
                }
            }
        }
        "poisson" => {
            let pts = point_sample(config);
            let ft = if config.data == "helgason" {
                Some(HelgasonGrid::compute(f.as_ref(), &grid, &params)?)
            } else {
                None
            };
            for (k, l) in params.iter().enumerate() {
                for x in &pts {
                    let value = match (&ft, config.data.as_str()) {
                        (Some(ft), _) => ft.poisson(k, x)?,
                        (None, "exp") => poisson_transform(
                            &|b: &crate::geometry::BoundaryPoint| Complex64::new(b.coords()[0].exp(), 0.0),
                            &grid,
                            *l,
                            x,
                        )?,
                        _ => poisson_transform(&|_: &crate::geometry::BoundaryPoint| Complex64::new(1.0, 0.0), &grid, *l, x)?,
                    };
                    rows.push(Row { lambda: l.value(), coords: x.coords().to_vec(), value });
                }
            }
        }
        "spherical" => {
            for l in &params {
                rows.push(Row { lambda: l.value(), coords: Vec::new(), value: spherical_transform(f.as_ref(), &grid, *l)? });
            }
        }
        "inverse" => {
            let ft = HelgasonGrid::compute_spectral(f.as_ref(), &grid)?;
            let pts = point_sample(config);
            let values = inverse_helgason_many(&ft, &pts)?;
            for (x, v) in pts.iter().zip(values) {
                rows.push(Row { lambda: Complex64::new(0.0, 0.0), coords: x.coords().to_vec(), value: v });
            }
        }
        other => return Err(Error::Config(format!("unknown command '{other}'"))),
    }
    Ok(rows)
}

fn run_verify(config: &RunConfig, out: Option<PathBuf>) -> Result<i32> {
    let vc = config.verify_config()?;
    let checks: Vec<Check> =
        Check::ALL.into_iter().filter(|c| config.checks.is_empty() || config.checks.contains(c)).collect();
    let reports = verify::run(&vc, &checks)?;
    for r in &reports {
        eprintln!("{r}\n    wall time {:.2} s", r.wall_time.as_secs_f64());
    }
    let all_passed = reports.iter().all(|r| r.succeeded());
    let manifest = serde_json::json!({
        "command": "verify",
        "profile": config.profile,
        "config": vc,
        "checks": checks.iter().map(|c| c.name()).collect::<Vec<_>>(),
        "reports": reports,
        "all_passed": all_passed,
    });
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    emit(out, &bytes)?;
    Ok(if all_passed { 0 } else { 1 })
}

/// Boxed selected function, for commands that take one.
pub(crate) type BoxedFunction = Box<dyn InteriorFunction>;
