use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kgframes::harness::{
    evaluate_as, load_scenario, run_theorem_suite, save_scenario, DimRanges, Evaluation, Report,
    Scenario, TheoremKind, TrialConfig,
};
use kgframes::{AdjOp, Error, DEFAULT_TOL};

/// Exit status for usage, parse and validation errors.
const USAGE_ERROR: u8 = 2;
/// Exit status when a hard check fails.
const HARD_FAILURE: u8 = 1;

#[derive(Parser)]
#[command(
    name = "kgframes",
    version,
    about = "Check and fuzz K-g-frame constructions"
)]
struct Cli {
    /// Global numerical tolerance.
    #[arg(long, global = true, env = "KGFRAMES_TOL")]
    tol: Option<f64>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Frame bounds and consistency checks for the scenario's family and K.
    Check { scenario: PathBuf },
    /// Runs one construction or equivalence on a scenario.
    Construct {
        #[arg(long)]
        theorem: String,
        scenario: PathBuf,
    },
    /// Seeded random trials of one theorem kind.
    Fuzz {
        #[arg(long)]
        theorem: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `d,n,N,m`, each a value or an inclusive range `lo..hi`.
        #[arg(long)]
        dims: Option<String>,
        /// Writes the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Saves each failing trial as `trial-<index>.json` in this directory.
        #[arg(long)]
        save_failing: Option<PathBuf>,
    },
    /// Re-renders a structured report read from a file or stdin.
    Report { input: Option<PathBuf> },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Validation {
            field: "tol".into(),
            message: "must be finite and positive".into(),
        });
    }
    match cli.command {
        Command::Check { scenario } => {
            let mut s = load_scenario(&scenario)?;
            if !s.operators.contains_key("K") {
                let k = s
                    .operators
                    .get("K1")
                    .cloned()
                    .unwrap_or_else(|| AdjOp::identity(s.alg_dim, s.source_len));
                s.operators.insert("K".into(), k);
            }
            evaluation_exit(&evaluate_as(&s, TheoremKind::FrameCheck, tol)?, cli.format)
        }
        Command::Construct { theorem, scenario } => {
            let kind: TheoremKind = theorem.parse()?;
            let s: Scenario = load_scenario(&scenario)?;
            evaluation_exit(&evaluate_as(&s, kind, tol)?, cli.format)
        }
        Command::Fuzz {
            theorem,
            trials,
            seed,
            dims,
            output,
            save_failing,
        } => {
            let kind: TheoremKind = theorem.parse()?;
            let mut config = TrialConfig::new(seed, trials).with_tol(tol);
            if let Some(spec) = dims {
                config = config.with_dims(parse_dims(&spec)?);
            }
            let report = run_theorem_suite(kind, &config)?;
            eprintln!("elapsed {:.3}s", report.wall_clock.as_secs_f64());
            if let Some(dir) = save_failing {
                std::fs::create_dir_all(&dir)?;
                for v in &report.verdicts {
                    if let Some(s) = &v.scenario {
                        save_scenario(s, dir.join(format!("trial-{}.json", v.index)))?;
                    }
                }
            }
            let text = render_report(&report, cli.format);
            match output {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(exit_for(!report.has_hard_failures()))
        }
        Command::Report { input } => {
            let text = match input {
                Some(path) => std::fs::read_to_string(path)?,
                None => {
                    let mut buf = String::new();
                    std::io::stdin().read_to_string(&mut buf)?;
                    buf
                }
            };
            let report = Report::from_json(&text)?;
            print!("{}", render_report(&report, cli.format));
            Ok(exit_for(!report.has_hard_failures()))
        }
    }
}

fn render_report(report: &Report, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Structured => report.to_json(),
    }
}

fn evaluation_exit(e: &Evaluation, format: Format) -> Result<ExitCode, Error> {
    match format {
        Format::Text => print!("{}", e.to_text()),
        Format::Structured => print!("{}", e.to_json()),
    }
    Ok(exit_for(e.passed()))
}

fn exit_for(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(HARD_FAILURE)
    }
}

fn parse_dims(spec: &str) -> Result<DimRanges, Error> {
    let bad = |message: String| Error::Validation {
        field: "dims".into(),
        message,
    };
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(bad(format!("expected d,n,N,m, got `{spec}`")));
    }
    let mut ranges = [[0usize; 2]; 4];
    for (slot, part) in ranges.iter_mut().zip(&parts) {
        let (lo, hi) = part.split_once("..").unwrap_or((part, part));
        let parse = |x: &str| {
            x.parse::<usize>()
                .map_err(|_| bad(format!("`{part}` is not a value or range")))
        };
        *slot = [parse(lo)?, parse(hi)?];
    }
    let dims = DimRanges {
        alg_dim: ranges[0],
        source_len: ranges[1],
        atoms: ranges[2],
        dst_len: ranges[3],
    };
    dims.validate()?;
    Ok(dims)
}
