//! Command-line front end for the gamma-monodromy library.

mod config;
mod phi;
mod reflections;
mod report;
mod suite;
mod vanishing;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};

use config::{check_tol, PolarParam, SpaceSpec};
use report::{write_json, CliError, Exit};

#[derive(Debug, Parser)]
#[command(name = "gamma-monodromy", version, about = "Monodromy, reflection vectors and Mellin-Barnes periods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reflection vectors of the loops around the discriminant.
    Reflections(ReflectionsCmd),
    /// Residue series against the contour integral, vanishing scan and local exponent.
    Phi(PhiCmd),
    /// Run the invariant suite.
    Suite(SuiteCmd),
    /// Evaluate the vanishing predicate on descriptors, or scan a blowup calibration.
    Vanishing(VanishingCmd),
}

#[derive(Debug, Args)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReflectionsCmd {
    /// `proj:m` or `twisted:n`.
    #[arg(long)]
    space: String,
    /// Modulus of the Novikov parameter q (projective spaces).
    #[arg(long)]
    q: Option<f64>,
    /// Argument of q in units of pi; fixes the branch of log q.
    #[arg(long = "q-arg", default_value_t = 0.0, allow_negative_numbers = true)]
    q_arg: f64,
    /// Modulus of Q (twisted model).
    #[arg(long = "Q")]
    big_q: Option<f64>,
    /// Argument of Q in units of pi.
    #[arg(long = "Q-arg", default_value_t = 0.0, allow_negative_numbers = true)]
    big_q_arg: f64,
    /// A single loop index; all loops when omitted.
    #[arg(long)]
    k: Option<usize>,
    /// Level m (the periods have level -m); defaults to n.
    #[arg(long)]
    m: Option<i64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct PhiCmd {
    /// `proj:m`; the mirror family index is n = m + 2.
    #[arg(long)]
    space: String,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    /// Argument of q in units of pi; must be 0.
    #[arg(long = "q-arg", default_value_t = 0.0, allow_negative_numbers = true)]
    q_arg: f64,
    #[arg(long)]
    m: Option<i64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Number of comparison points.
    #[arg(long, default_value_t = 10)]
    points: usize,
    /// Comparison range in units of the critical value u(q).
    #[arg(long = "lambda-min", default_value_t = 1.5)]
    lambda_min: f64,
    #[arg(long = "lambda-max", default_value_t = 4.0)]
    lambda_max: f64,
    /// Points of the scan on (0, u(q)]; 0 skips it.
    #[arg(long = "zero-points", default_value_t = 20)]
    zero_points: usize,
    /// Samples of the local exponent fit; 0 skips it.
    #[arg(long = "fit-samples", default_value_t = 12)]
    fit_samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct SuiteCmd {
    /// Restrict to these items (repeatable or comma separated).
    #[arg(long)]
    only: Vec<String>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
struct VanishingSource {
    /// JSON file with descriptors (`-` for stdin).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Scan the calibration of Bl P^n for this n.
    #[arg(long)]
    scan: Option<usize>,
}

#[derive(Debug, Args)]
struct VanishingCmd {
    #[command(flatten)]
    source: VanishingSource,
    #[arg(long, default_value_t = 8)]
    order: usize,
    #[arg(long, default_value_t = 4)]
    dmax: usize,
    #[command(flatten)]
    out: Output,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("GM_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| usage(format!("GM_THREADS={v} is not a positive integer")))?;
    if n == 0 {
        return Err(usage("GM_THREADS must be positive"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Numeric(format!("thread pool: {e}")))
}

fn passed_exit(passed: bool) -> Exit {
    if passed {
        Exit::Pass
    } else {
        Exit::Breach
    }
}

fn run(cli: Cli) -> Result<Exit, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Reflections(c) => {
            let space: SpaceSpec = c.space.parse().map_err(usage)?;
            let tol = check_tol(c.tol).map_err(usage)?;
            let param = match space {
                SpaceSpec::Proj(_) => {
                    if c.big_q.is_some() {
                        return Err(usage("--Q applies to twisted spaces; use --q for proj"));
                    }
                    PolarParam::new(c.q.unwrap_or(1.0), c.q_arg)
                }
                SpaceSpec::Twisted(_) => {
                    if c.q.is_some() {
                        return Err(usage("--q applies to proj spaces; use --Q for twisted"));
                    }
                    PolarParam::new(c.big_q.unwrap_or(1.0), c.big_q_arg)
                }
                SpaceSpec::BlProj(_) => return Err(usage("reflections needs proj:m or twisted:n")),
            }
            .map_err(usage)?;
            let args = reflections::ReflectionArgs { space, param, k: c.k, m: c.m, tol };
            let doc = reflections::run(&args)?;
            write_json(c.out.output.as_deref(), &doc)?;
            Ok(passed_exit(doc.passed))
        }
        Command::Phi(c) => {
            let space: SpaceSpec = c.space.parse().map_err(usage)?;
            let args = phi::PhiArgs {
                space,
                param: PolarParam::new(c.q, c.q_arg).map_err(usage)?,
                m: c.m,
                tol: check_tol(c.tol).map_err(usage)?,
                points: c.points,
                lambda_min: c.lambda_min,
                lambda_max: c.lambda_max,
                zero_points: c.zero_points,
                fit_samples: c.fit_samples,
            };
            let doc = phi::run(&args)?;
            match c.format {
                Format::Json => write_json(c.out.output.as_deref(), &doc)?,
                Format::Csv => phi::write_csv(c.out.output.as_deref(), &doc)?,
            }
            Ok(passed_exit(doc.passed))
        }
        Command::Suite(c) => {
            let items = suite::select(&c.only).map_err(usage)?;
            let (doc, errored) = suite::run(&items);
            write_json(c.out.output.as_deref(), &doc)?;
            Ok(if errored { Exit::Numeric } else { passed_exit(doc.passed) })
        }
        Command::Vanishing(c) => {
            let args = match (c.source.input, c.source.scan) {
                (Some(p), None) => vanishing::VanishingArgs::Input(p),
                (None, Some(n)) => vanishing::VanishingArgs::Scan { n, order: c.order, dmax: c.dmax },
                _ => return Err(usage("give exactly one of --input and --scan")),
            };
            let doc = vanishing::run(&args)?;
            write_json(c.out.output.as_deref(), &doc)?;
            Ok(passed_exit(doc.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Exit::Pass,
                _ => Exit::Usage,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("usage error: {m}"),
                CliError::Numeric(m) => eprintln!("numeric failure: {m}"),
            }
            e.exit()
        }
    };
    ExitCode::from(code as u8)
}
