use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use toric_mori::classify::{build_weighted_projective, p112_weights};
use toric_mori::contraction::{build_bundle_fan, non_saturated_fibration, weighted_fiber_product};
use toric_mori::fan::{projective_space, validate_fan, Fan};
use toric_mori::fuzz::{run_campaign, FuzzConfig, FuzzMode};
use toric_mori::io::{read_fan, serialize_fan, write_fan};
use toric_mori::report::{analyze, contract};
use toric_mori::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_ASSERTION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "toric-mori",
    version,
    about = "Exact Mori theory for simplicial toric fans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a fan file for primitivity, simpliciality and the fan axioms.
    Validate { file: PathBuf },
    /// Mori cone, extremal rays, contractions and property checks.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        /// Exit with status 3 if any property check fails.
        #[arg(long)]
        assert: bool,
    },
    /// JSON report for the contraction of one fiber-type extremal ray.
    Contract {
        file: PathBuf,
        #[arg(long)]
        ray: usize,
    },
    /// Write a standard fan: ex32, ex35, pn, p112n, bundle or wp.
    Example {
        name: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        /// Weights for `wp`, comma separated, starting with 1.
        #[arg(long, value_delimiter = ',')]
        weights: Vec<u64>,
        /// Lift of the first base ray for `bundle` (along e_1).
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        twist: i64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Deterministic property campaign.
    Fuzz {
        #[arg(long)]
        mode: FuzzMode,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        /// Directory for minimized counterexamples.
        #[arg(long, default_value = "counterexamples")]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn configure_threads() {
    if let Some(n) = std::env::var("TORIC_MORI_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // a second initialization only happens in tests; ignoring it is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn load(path: &Path) -> Result<Fan, ExitCode> {
    read_fan(path).map_err(|e| {
        eprintln!("error: {e}");
        match e {
            Error::Io { .. } => ExitCode::from(EXIT_USAGE),
            _ => ExitCode::from(EXIT_INVALID),
        }
    })
}

fn usage(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_USAGE)
}

fn example_fan(
    name: &str,
    n: Option<usize>,
    d: Option<usize>,
    weights: &[u64],
    twist: i64,
) -> Result<Fan, Error> {
    match name {
        "ex32" => non_saturated_fibration(n.unwrap_or(2), d.unwrap_or(1)),
        "ex35" => weighted_fiber_product(&projective_space(1), d.unwrap_or(2)),
        "pn" => Ok(projective_space(n.unwrap_or(2))),
        "p112n" => build_weighted_projective(&p112_weights(n.unwrap_or(2))),
        "bundle" => {
            let n = n.unwrap_or(2);
            let d = d.unwrap_or(n.saturating_sub(1));
            if d == 0 || d >= n {
                return Err(Error::Argument(format!(
                    "need 1 <= d < n, got n = {n}, d = {d}"
                )));
            }
            let base = projective_space(n - d);
            let mut lifts = vec![vec![0; d]; base.num_rays()];
            lifts[0][0] = twist;
            build_bundle_fan(&base, d, &lifts)
        }
        "wp" => build_weighted_projective(weights),
        other => Err(Error::Argument(format!(
            "unknown example {other:?} (ex32, ex35, pn, p112n, bundle, wp)"
        ))),
    }
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Validate { file } => {
            let fan = match load(&file) {
                Ok(f) => f,
                Err(code) => return code,
            };
            let report = validate_fan(&fan);
            if report.is_valid() {
                println!(
                    "valid: dim {}, {} rays, {} maximal cones",
                    fan.dim(),
                    fan.num_rays(),
                    fan.max_cones().len()
                );
                println!("complete: {}", fan.is_complete());
                ExitCode::SUCCESS
            } else {
                for v in &report.violations {
                    println!("{v}");
                }
                ExitCode::from(EXIT_INVALID)
            }
        }
        Command::Analyze { file, json, assert } => {
            let fan = match load(&file) {
                Ok(f) => f,
                Err(code) => return code,
            };
            let report = match analyze(&fan) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_ASSERTION);
                }
            };
            print!(
                "{}",
                if json {
                    report.to_json()
                } else {
                    report.to_text()
                }
            );
            if report.validation_failed() {
                ExitCode::from(EXIT_INVALID)
            } else if assert && report.failed_checks() > 0 {
                ExitCode::from(EXIT_ASSERTION)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Contract { file, ray } => {
            let fan = match load(&file) {
                Ok(f) => f,
                Err(code) => return code,
            };
            match contract(&fan, ray) {
                Ok(r) => {
                    println!("{}", serde_json::to_string(&r).expect("report serializes"));
                    ExitCode::SUCCESS
                }
                Err(e @ (Error::NotProjective | Error::Incomplete { .. })) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_INVALID)
                }
                Err(e) => usage(e),
            }
        }
        Command::Example {
            name,
            n,
            d,
            weights,
            twist,
            output,
        } => {
            let fan = match example_fan(&name, n, d, &weights, twist) {
                Ok(f) => f,
                Err(e) => return usage(e),
            };
            match output {
                Some(path) => match write_fan(&fan, &path) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => usage(e),
                },
                None => {
                    print!("{}", serialize_fan(&fan));
                    ExitCode::SUCCESS
                }
            }
        }
        Command::Fuzz {
            mode,
            seed,
            count,
            dim,
            out,
            json,
        } => {
            let config = match FuzzConfig::new(seed, count, dim, mode) {
                Ok(c) => c,
                Err(e) => return usage(e),
            };
            let summary = match run_campaign(&config) {
                Ok(s) => s,
                Err(e) => return usage(e),
            };
            print!(
                "{}",
                if json {
                    summary.to_json()
                } else {
                    summary.to_text()
                }
            );
            if summary.passed() {
                return ExitCode::SUCCESS;
            }
            match summary.write_counterexamples(&out) {
                Ok(paths) => {
                    for p in paths {
                        eprintln!("wrote {}", p.display());
                    }
                }
                Err(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(EXIT_ASSERTION)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    run(cli)
}
