use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ergolab_cli::config::{self, parse_window, Overrides};
use ergolab_cli::runner::{Report, RunOptions};
use ergolab_cli::suite::{run_suite, SuiteTag};
use ergolab_cli::{exit, run_all, to_json, trajectory_csv, Failure};
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Runs ergodic-theory checks on convolution powers from scenario files.
///
/// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
/// 3 internal numerical error.
#[derive(Debug, Parser)]
#[command(name = "ergolab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override every scenario's horizon n_max.
    #[arg(long, global = true)]
    horizon: Option<u64>,
    /// Override every scenario's tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Observation window on ℤ, as A..B.
    #[arg(long, global = true, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<(i64, i64)>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Directory for per-scenario reports (and the suite summary).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Scenarios run concurrently.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for randomized property trials.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Include wall-clock timings in reports (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the scenarios in a config file.
    Check { file: PathBuf },
    /// Run a built-in suite: paper-checks or prop-3-3-exhaustive.
    Suite { tag: String },
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn report_failures(r: &Report) {
    for c in r.checks.iter().filter(|c| !c.pass) {
        let diagnostics = c.result.get("diagnostics").and_then(|d| d.as_array()).cloned().unwrap_or_default();
        let detail: Vec<String> = diagnostics.iter().filter_map(|d| d.as_str().map(String::from)).collect();
        let error = c.result.get("error").and_then(|e| e.as_str()).map(String::from);
        let msg = error.into_iter().chain(detail).collect::<Vec<_>>().join("; ");
        eprintln!("FAIL {}/{}: {msg}", r.scenario.name, c.check);
    }
}

fn write_report_files(r: &Report, cli: &Cli) -> Result<(), Failure> {
    if let Some(emit) = &r.scenario.emit {
        if let Some(path) = &emit.json {
            write(Path::new(path), &to_json(r))?;
        }
        if let (Some(path), Some(rows)) = (&emit.csv, &r.trajectory) {
            write(Path::new(path), &trajectory_csv(rows))?;
        }
    }
    if let Some(dir) = &cli.out {
        write(&dir.join(format!("{}.json", r.scenario.name)), &to_json(r))?;
        if let (Format::Csv, Some(rows)) = (cli.format, &r.trajectory) {
            write(&dir.join(format!("{}.csv", r.scenario.name)), &trajectory_csv(rows))?;
        }
    }
    Ok(())
}

fn overrides(cli: &Cli) -> Overrides {
    Overrides {
        horizon: cli.horizon,
        tol: cli.tol,
        window: cli.window,
    }
}

fn check(cli: &Cli, file: &Path) -> Result<bool, Failure> {
    let text = fs::read_to_string(file).map_err(|e| Failure::Io(format!("{}: {e}", file.display())))?;
    let mut scenarios = config::parse(&text).map_err(Failure::Config)?;
    let ov = overrides(cli);
    for s in &mut scenarios {
        ov.apply(s);
    }
    let prepared = scenarios
        .iter()
        .map(config::prepare)
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::Config)?;
    if cli.format == Format::Csv && prepared.len() > 1 && cli.out.is_none() {
        return Err(Failure::Usage("--format csv with several scenarios needs --out".into()));
    }
    let wants_csv = cli.format == Format::Csv
        || prepared.iter().any(|p| p.scenario.emit.as_ref().is_some_and(|e| e.csv.is_some()));
    let opts = RunOptions {
        timing: cli.timing,
        trajectory: wants_csv,
    };
    let reports = run_all(&prepared, opts, cli.jobs)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    for r in &reports {
        report_failures(r);
        write_report_files(r, cli)?;
    }
    let pass = reports.iter().all(|r| r.pass);
    match (cli.format, reports.as_slice()) {
        (Format::Csv, [r]) => print!("{}", trajectory_csv(r.trajectory.as_deref().unwrap_or_default())),
        (Format::Csv, _) => {}
        (Format::Json, [r]) => print!("{}", to_json(r)),
        (Format::Json, _) => print!("{}", to_json(&json!({ "pass": pass, "reports": reports }))),
    }
    Ok(pass)
}

fn suite(cli: &Cli, tag: &str) -> Result<bool, Failure> {
    let tag: SuiteTag = tag.parse().map_err(Failure::Usage)?;
    let opts = RunOptions {
        timing: cli.timing,
        trajectory: cli.format == Format::Csv && cli.out.is_some(),
    };
    let out = run_suite(tag, &overrides(cli), opts, cli.jobs, cli.seed)?;
    for r in &out.reports {
        report_failures(r);
        write_report_files(r, cli)?;
    }
    if let Some(dir) = &cli.out {
        write(&dir.join("summary.json"), &to_json(&out.summary))?;
    }
    print!("{}", to_json(&out.summary));
    Ok(out.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.jobs == 0 {
        eprintln!("usage error: --jobs must be at least 1");
        return ExitCode::from(exit::CONFIG);
    }
    let result = match &cli.command {
        Command::Check { file } => check(&cli, file),
        Command::Suite { tag } => suite(&cli, tag),
    };
    match result {
        Ok(true) => ExitCode::from(exit::PASS),
        Ok(false) => ExitCode::from(exit::CHECK_FAILED),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
