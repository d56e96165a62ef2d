use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use relcat_kit::relposet::parse_we;
use relcat_kit::verifier::{run_check, run_suite, Caps, CheckParams, Report, SuiteConfig, CHECK_TABLE};

#[derive(Parser)]
#[command(name = "relcat-kit", about = "Verification checks for subdivided horn posets and their homotopy limits", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one named check with explicit parameters.
    Verify(VerifyArgs),
    /// Run a suite described by a JSON config file.
    Suite(SuiteArgs),
    /// List the available checks.
    Checks,
}

#[derive(Args)]
struct VerifyArgs {
    /// Check name; see `relcat-kit checks`.
    check: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Relative structure generators, e.g. "0-1,1-2" or "we = 0-1".
    #[arg(long)]
    we: Option<String>,
    /// Seeds for randomized checks; repeatable.
    #[arg(long = "seed", default_values_t = [1u64])]
    seeds: Vec<u64>,
    /// Family selector for the contractible check: pi-preimage, x, xbar, y.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    i: Option<usize>,
    /// Interval for pi-preimage families, e.g. "0..2".
    #[arg(long)]
    range: Option<String>,
    #[command(flatten)]
    caps: CapsArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock timings (breaks byte-for-byte determinism).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct SuiteArgs {
    /// JSON file mirroring the suite configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CapsArgs {
    #[arg(long, default_value_t = Caps::default().max_n)]
    max_n: usize,
    #[arg(long, default_value_t = Caps::default().max_m)]
    max_m: usize,
    #[arg(long, default_value_t = Caps::default().max_nm_sum)]
    max_nm_sum: usize,
    #[arg(long, default_value_t = Caps::default().max_dim)]
    max_dim: usize,
    #[arg(long, default_value_t = Caps::default().max_index_elements)]
    max_index_elements: usize,
    #[arg(long, default_value_t = Caps::default().one_copy_pair_cap)]
    one_copy_pair_cap: usize,
}

impl From<CapsArgs> for Caps {
    fn from(a: CapsArgs) -> Caps {
        Caps {
            max_n: a.max_n,
            max_m: a.max_m,
            max_nm_sum: a.max_nm_sum,
            max_dim: a.max_dim,
            max_index_elements: a.max_index_elements,
            one_copy_pair_cap: a.one_copy_pair_cap,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    Ok((
        a.trim().parse().map_err(|e| format!("{e}"))?,
        b.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

fn emit(report: &Report, format: Format, out: Option<&PathBuf>) -> std::io::Result<()> {
    let body = match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match out {
        Some(path) => fs::write(path, body).map_err(|e| {
            eprintln!("cannot write report to {}: {e}", path.display());
            e
        }),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Checks => {
            for info in CHECK_TABLE {
                println!("{:<14} {}", info.name, info.summary);
            }
            ExitCode::SUCCESS
        }
        Command::Verify(args) => {
            let we = match &args.we {
                Some(s) => match parse_we(s) {
                    Ok(pairs) => Some(pairs),
                    Err(e) => {
                        eprintln!("bad --we: {e}");
                        return ExitCode::from(2);
                    }
                },
                None => None,
            };
            let range = match &args.range {
                Some(s) => match parse_range(s) {
                    Ok(r) => Some(r),
                    Err(e) => {
                        eprintln!("bad --range: {e}");
                        return ExitCode::from(2);
                    }
                },
                None => None,
            };
            let params = CheckParams {
                n: args.n,
                m: args.m,
                k: args.k,
                we,
                seeds: args.seeds,
                family: args.family,
                i: args.i,
                range,
                caps: args.caps.into(),
                timings: args.timings,
            };
            match run_check(&args.check, &params) {
                Ok(entries) => {
                    let report = Report::from_entries(entries);
                    if emit(&report, args.format, args.out.as_ref()).is_err() {
                        return ExitCode::from(2);
                    }
                    if report.fail_count == 0 {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Suite(args) => {
            let text = match fs::read_to_string(&args.config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", args.config.display());
                    return ExitCode::from(2);
                }
            };
            let config: SuiteConfig = match serde_json::from_str(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("bad config: {e}");
                    return ExitCode::from(2);
                }
            };
            match run_suite(&config) {
                Ok(report) => {
                    let out = args.out.clone().or_else(|| config.out.clone().map(PathBuf::from));
                    if emit(&report, args.format, out.as_ref()).is_err() {
                        return ExitCode::from(2);
                    }
                    if report.fail_count == 0 {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
