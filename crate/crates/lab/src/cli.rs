//! Command-line interface: `run`, `list` and `emit`.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use crate::config::{parse_formats, parse_selection, RunConfig, OUT_ENV};
use crate::report::{self, Format};
use crate::{runner, RunError, Verdict, SUITES};

#[derive(Parser)]
#[command(name = "cwikel-lab", version, about = "Reproducible experiment runner for the cwikel-core checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run suites and write reports.
    Run(RunArgs),
    /// List suite ids with the statement each one tests.
    List,
    /// Re-render a JSON report in other formats.
    Emit(EmitArgs),
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated suite ids, or `all`.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Points per axis for the one-dimensional classical suites.
    #[arg(long)]
    grid: Option<usize>,
    /// Random instances per randomized check.
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory (also settable with CWIKEL_LAB_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated formats: csv, json, plotdata.
    #[arg(long)]
    format: Option<String>,
    /// Record wall time per row (reports are then no longer byte-stable).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct EmitArgs {
    /// JSON report written by `run --format json`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv,plotdata")]
    format: String,
}

fn formats(v: &str) -> anyhow::Result<Vec<Format>> {
    parse_formats(v).map_err(anyhow::Error::msg)
}

/// Precedence: flags, then `env_out`, then the config file, then defaults.
fn build_config(args: &RunArgs, env_out: Option<PathBuf>) -> anyhow::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::read(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = env_out {
        cfg.out = dir;
    }
    if let Some(s) = &args.suite {
        cfg.selection = parse_selection(s);
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.grid.is_some() {
        cfg.grid = args.grid;
    }
    if args.trials.is_some() {
        cfg.trials = args.trials;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(f) = &args.format {
        cfg.formats = formats(f)?;
    }
    cfg.timing |= args.timing;
    Ok(cfg)
}

fn run(args: &RunArgs) -> anyhow::Result<ExitCode> {
    let cfg = build_config(args, std::env::var_os(OUT_ENV).map(PathBuf::from))?;
    let reports = match runner::run(&cfg) {
        Ok(r) => r,
        Err(e @ RunError::UnknownSuite { .. }) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(2));
        }
    };
    for path in report::emit(&reports, &cfg.formats, &cfg.out)? {
        eprintln!("wrote {}", path.display());
    }
    let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
    eprintln!(
        "{} rows: {} holds, {} fails, {} recorded-only",
        reports.len(),
        count(Verdict::Holds),
        count(Verdict::Fails),
        count(Verdict::RecordedOnly)
    );
    for r in reports.iter().filter(|r| r.verdict == Verdict::Fails) {
        eprintln!("fails: {} {}", r.experiment, r.param_json());
    }
    Ok(ExitCode::SUCCESS)
}

fn emit(args: &EmitArgs) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let reports = report::from_json(&text)?;
    let out = args.out.clone().or_else(|| args.input.parent().map(PathBuf::from)).unwrap_or_default();
    for path in report::emit(&reports, &formats(&args.format)?, &out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

/// Parses `args` (program name first) and executes the command.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::List => {
            for s in SUITES {
                println!("{:<20} {}", s.id, s.paper_ref);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Emit(args) => emit(args),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Selection;

    fn exec(args: &[&str]) -> ExitCode {
        main_with(std::iter::once("cwikel-lab").chain(args.iter().copied()))
    }

    fn run_into(dir: &std::path::Path, extra: &[&str]) -> ExitCode {
        let out = dir.to_str().unwrap();
        let mut args = vec!["run", "--out", out];
        args.extend_from_slice(extra);
        exec(&args)
    }

    fn read(path: PathBuf) -> String {
        std::fs::read_to_string(path).unwrap()
    }

    const SMALL: &[&str] = &["--suite", "counterexample,core-invariants", "--trials", "20", "--format", "csv,json,plotdata"];

    #[test]
    fn list_and_usage_errors() {
        assert_eq!(exec(&["list"]), ExitCode::SUCCESS);
        assert_eq!(exec(&["frobnicate"]), ExitCode::from(2));
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_into(dir.path(), &["--suite", "no-such-suite"]), ExitCode::from(2));
        assert!(!dir.path().join("report.csv").exists());
        let msg = runner::resolve(&parse_selection("no-such-suite")).unwrap_err().to_string();
        assert!(SUITES.iter().all(|s| msg.contains(s.id)), "{msg}");
    }

    #[test]
    fn empty_selection_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_into(dir.path(), &["--suite", ""]), ExitCode::SUCCESS);
        assert_eq!(read(dir.path().join("report.csv")), "experiment,paper_ref,param_json,claimed,observed,verdict,seconds\n");
    }

    #[test]
    fn same_seed_gives_identical_bytes_and_emit_round_trips() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert_eq!(run_into(a.path(), SMALL), ExitCode::SUCCESS);
        assert_eq!(run_into(b.path(), SMALL), ExitCode::SUCCESS);
        for file in ["report.csv", "report.json", "plotdata/counterexample.dat"] {
            assert_eq!(read(a.path().join(file)), read(b.path().join(file)), "{file}");
        }
        let csv = read(a.path().join("report.csv"));
        assert_eq!(csv.lines().count(), 1 + 3 + 5);

        let c = tempfile::tempdir().unwrap();
        let input = a.path().join("report.json");
        let out = c.path().to_str().unwrap();
        assert_eq!(exec(&["emit", "--input", input.to_str().unwrap(), "--out", out, "--format", "csv,json"]), ExitCode::SUCCESS);
        assert_eq!(read(c.path().join("report.csv")), csv);
        assert_eq!(read(c.path().join("report.json")), read(input));

        let other = tempfile::tempdir().unwrap();
        assert_eq!(run_into(other.path(), &["--suite", "core-invariants", "--trials", "20", "--seed", "7"]), ExitCode::SUCCESS);
        let first = |s: &str| s.lines().nth(1).map(str::to_string);
        assert_ne!(first(&read(other.path().join("report.csv"))), first(&csv));
    }

    #[test]
    fn counterexample_plotdata_is_monotone() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_into(dir.path(), &["--suite", "counterexample", "--format", "plotdata"]), ExitCode::SUCCESS);
        let text = read(dir.path().join("plotdata/counterexample.dat"));
        let blocks: Vec<&str> = text.split("\n\n").filter(|b| b.contains("truncated-integral") || b.contains("schatten4")).collect();
        assert_eq!(blocks.len(), 2);
        for block in blocks {
            let ys: Vec<f64> = block
                .lines()
                .filter(|l| !l.starts_with('#'))
                .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
                .collect();
            assert_eq!(ys.len(), 5);
            assert!(ys.windows(2).all(|w| w[1] > w[0]), "{ys:?}");
        }
    }

    #[test]
    fn unwritable_output_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("occupied");
        std::fs::write(&file, "x").unwrap();
        assert_eq!(run_into(&file, &["--suite", "counterexample"]), ExitCode::FAILURE);
        let missing = dir.path().join("missing.json");
        assert_eq!(exec(&["emit", "--input", missing.to_str().unwrap()]), ExitCode::FAILURE);
    }

    #[test]
    fn flags_override_environment_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lab.conf");
        std::fs::write(&path, "# lab\nsuite = clr\nseed = 11\nout = from-file\ntol.clr.x = 0.5\n").unwrap();
        let args = |extra: &[&str]| {
            let mut v = vec!["cwikel-lab", "run", "--config", path.to_str().unwrap()];
            v.extend_from_slice(extra);
            match Cli::try_parse_from(v).unwrap().command {
                Command::Run(a) => a,
                _ => unreachable!(),
            }
        };
        let cfg = build_config(&args(&[]), None).unwrap();
        assert_eq!((cfg.seed, cfg.out.clone()), (11, PathBuf::from("from-file")));
        assert_eq!(cfg.selection, parse_selection("clr"));
        assert_eq!(cfg.tolerance("clr.x", 1.0), 0.5);
        let cfg = build_config(&args(&[]), Some("from-env".into())).unwrap();
        assert_eq!(cfg.out, PathBuf::from("from-env"));
        let cfg = build_config(&args(&["--out", "from-flag", "--seed", "3", "--suite", "all"]), Some("from-env".into())).unwrap();
        assert_eq!((cfg.seed, cfg.out, cfg.selection), (3, PathBuf::from("from-flag"), Selection::All));
    }
}
