//! `solvgeo`: curvature, nilsolitons and Einstein extensions of Lie algebras.

mod commands;
mod inputs;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use solvgeo_core::Error;

use commands::{Failure, Settings};
use inputs::{load_algebra, load_metric, CatalogSource};
use report::{digest, Outcome, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Nice,
    Flow,
}

#[derive(Debug, Parser)]
#[command(name = "solvgeo", version, about = "Ricci geometry of Lie algebras with left-invariant metrics")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Convergence tolerance for iterative methods.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Metric file (defaults to the identity in the given basis).
    #[arg(long, global = true)]
    metric: Option<PathBuf>,
    /// How to construct nilsolitons.
    #[arg(long, global = true, value_enum, default_value_t = Method::Nice)]
    method: Method,
    /// Write the primary artifact of the command to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add exact rational forms where they can be recognized.
    #[arg(long, global = true)]
    exact: bool,
    /// Directory of `.alg` files used to resolve algebra names.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structural checks: Jacobi identity, central series, nice basis.
    Validate { algebra: String },
    /// Ricci endomorphism, scalar curvature and mean curvature vector.
    Ricci { algebra: String },
    /// Stratum label of a nilpotent algebra.
    Beta { algebra: String },
    /// Construct a nilsoliton metric.
    Nilsoliton { algebra: String },
    /// Decide whether a nice nilpotent algebra is an Einstein nilradical.
    EinsteinNilradical { algebra: String },
    /// Rank-one Einstein extension of a nilsoliton.
    Extend { algebra: String },
    /// Modified Helmholtz decomposition of an edge field on a graph.
    Helmholtz { graph: PathBuf, field: PathBuf },
    /// Bundled or configured algebras.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    List,
    Show { name: String },
    /// Write every catalog entry to a directory.
    Export { dir: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Ricci { .. } => "ricci",
            Command::Beta { .. } => "beta",
            Command::Nilsoliton { .. } => "nilsoliton",
            Command::EinsteinNilradical { .. } => "einstein-nilradical",
            Command::Extend { .. } => "extend",
            Command::Helmholtz { .. } => "helmholtz",
            Command::Catalog { .. } => "catalog",
        }
    }
}

fn run(cli: &Cli) -> Result<(Outcome, Vec<(&'static str, String)>), Failure> {
    let source = CatalogSource::resolve(cli.catalog.clone());
    let settings = Settings {
        seed: cli.seed,
        tol: cli.tol,
        flow: cli.method == Method::Flow,
        exact: cli.exact,
    };
    let algebra_and_metric = |arg: &str| -> Result<_, Error> {
        let (l, text) = load_algebra(arg, &source)?;
        let (h, mtext) = load_metric(cli.metric.as_deref(), l.dim())?;
        Ok((l, h, vec![("algebra", text), ("metric", mtext)]))
    };
    let out = match &cli.command {
        Command::Validate { algebra } => {
            let (l, text) = load_algebra(algebra, &source)?;
            (commands::validate(&l), vec![("algebra", text)])
        }
        Command::Ricci { algebra } => {
            let (l, h, ins) = algebra_and_metric(algebra)?;
            (commands::ricci(&l, &h, &settings), ins)
        }
        Command::Beta { algebra } => {
            let (l, h, ins) = algebra_and_metric(algebra)?;
            (commands::beta(&l, &h, &settings)?, ins)
        }
        Command::Nilsoliton { algebra } => {
            let (l, h, ins) = algebra_and_metric(algebra)?;
            (commands::nilsoliton(&l, &h, &settings)?, ins)
        }
        Command::EinsteinNilradical { algebra } => {
            let (l, text) = load_algebra(algebra, &source)?;
            (commands::einstein_nilradical(&l)?, vec![("algebra", text)])
        }
        Command::Extend { algebra } => {
            let (l, h, ins) = algebra_and_metric(algebra)?;
            let given = cli.metric.as_ref().map(|_| &h);
            (commands::extend(&l, given, &settings)?, ins)
        }
        Command::Helmholtz { graph, field } => {
            let g = fs::read_to_string(graph).map_err(Error::from)?;
            let f = fs::read_to_string(field).map_err(Error::from)?;
            let o = commands::helmholtz(&g, &f)?;
            (o, vec![("graph", g), ("field", f)])
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => (commands::catalog_list(&source.entries()?)?, vec![]),
            CatalogAction::Show { name } => {
                let (l, text) = load_algebra(name, &source)?;
                (commands::catalog_show(&l)?, vec![("algebra", text)])
            }
            CatalogAction::Export { dir } => {
                fs::create_dir_all(dir).map_err(Error::from)?;
                let entries = source.entries()?;
                for (file, text) in &entries {
                    fs::write(dir.join(file), text).map_err(Error::from)?;
                }
                let files: Vec<&str> = entries.iter().map(|(f, _)| f.as_str()).collect();
                (Outcome::new(json!({ "exported": files, "dir": dir.display().to_string() })), vec![])
            }
        },
    };
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    faer::set_global_parallelism(faer::Par::Seq);
    let start = Instant::now();
    let command = cli.command.name();
    match run(&cli) {
        Ok((outcome, inputs)) => {
            if let (Some(path), Some(artifact)) = (&cli.out, &outcome.artifact) {
                if let Err(e) = fs::write(path, artifact) {
                    return fail(&cli, command, Failure::from(Error::from(e)));
                }
            }
            let named: Vec<(&str, &str)> = inputs.iter().map(|(n, t)| (*n, t.as_str())).collect();
            let options = json!({
                "seed": cli.seed,
                "tol": cli.tol,
                "method": format!("{:?}", cli.method).to_lowercase(),
                "exact": cli.exact,
            });
            let report = Report {
                command: command.to_string(),
                inputs_digest: digest(command, &named, &options),
                result: outcome.result,
                residuals: outcome.residuals,
                flags: outcome.flags,
                wall_time_s: cli.timing.then(|| start.elapsed().as_secs_f64()),
            }
            .rounded();
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_human());
            }
            ExitCode::from(outcome.exit as u8)
        }
        Err(f) => fail(&cli, command, f),
    }
}

fn fail(cli: &Cli, command: &str, f: Failure) -> ExitCode {
    eprintln!("solvgeo {command}: {}", f.error);
    if cli.json {
        let v = json!({ "command": command, "error": f.error.to_string(), "exit_code": f.code });
        println!("{}", serde_json::to_string_pretty(&v).expect("error serializes"));
    }
    ExitCode::from(f.code as u8)
}
