//! `dps`: simulate dominant Pólya sequences and verify their limit behavior
//! from a TOML experiment file.
//!
//! Exit codes: 0 success, 1 a verdict failed, 2 invalid configuration or
//! suite/model pairing, 3 I/O failure.

mod load;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use dps_core::montecarlo::{run_replicates, verify, ExperimentConfig, Suite};
use dps_core::presets::catalog;

pub use load::{load_config, locate};
pub use report::{render_csv, Manifest, Summary, CSV_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dps", version, about = "Dominant Pólya sequence simulator and verification harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// Experiment file (TOML with [model], [base], [run], [thresholds]).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "dps-out")]
    pub out: PathBuf,
    /// Overrides run.seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides run.replicates.
    #[arg(long)]
    pub replicates: Option<u32>,
    /// Worker threads, 0 for one per core; overrides run.threads.
    #[arg(long, env = "DPS_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate replicates and write per-checkpoint trajectories as CSV.
    Simulate(RunArgs),
    /// Run verification suites and report pass/fail verdicts.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// convergence, rates, clt, coverage, or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// List the built-in model presets.
    Presets,
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Io(m) => m,
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// Runs a parsed command line, writing human output to `out` and
/// diagnostics to `err`; returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Simulate(args) => simulate(&args, out, err),
        Command::Verify { run, suite } => verify_cmd(&run, &suite, out, err),
        Command::Presets => presets(out).map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn effective_config(args: &RunArgs) -> Result<(ExperimentConfig, dps_core::montecarlo::Experiment), Failure> {
    let mut cfg = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    if let Some(r) = args.replicates {
        cfg.run.replicates = r;
    }
    if let Some(t) = args.threads {
        cfg.run.threads = t;
    }
    let text = std::fs::read_to_string(&args.config).unwrap_or_default();
    let exp = cfg.build().map_err(|errs| {
        let lines: Vec<String> = errs
            .0
            .iter()
            .map(|issue| match locate(&text, issue.section, issue.key) {
                Some(line) => format!("{}:{line}: {issue}", args.config.display()),
                None => format!("{}: {issue}", args.config.display()),
            })
            .collect();
        Failure::Config(format!("invalid configuration\n{}", lines.join("\n")))
    })?;
    Ok((cfg, exp))
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn simulate(args: &RunArgs, out: &mut dyn Write, _err: &mut dyn Write) -> Result<i32, Failure> {
    let start = Instant::now();
    let (cfg, exp) = effective_config(args)?;
    create_dir(&args.out)?;
    let reps = run_replicates(&exp, false).map_err(|e| Failure::Config(e.to_string()))?;
    let csv_path = args.out.join("trajectories.csv");
    write_file(&csv_path, &render_csv(&reps))?;
    let manifest_path = args.out.join("manifest.json");
    let manifest = Manifest::new("simulate", &cfg, &exp, start.elapsed().as_secs_f64(), vec![], vec![
        csv_path.clone(),
        manifest_path.clone(),
    ])?;
    write_file(&manifest_path, &manifest.to_json())?;
    let _ = writeln!(
        out,
        "simulated {} replicates to n = {}; wrote {}",
        exp.replicates,
        exp.n,
        csv_path.display()
    );
    Ok(EXIT_OK)
}

fn parse_suites(name: &str) -> Result<(Vec<Suite>, bool), Failure> {
    if name == "all" {
        Ok((Suite::ALL.to_vec(), false))
    } else {
        name.parse::<Suite>()
            .map(|s| (vec![s], true))
            .map_err(|e| Failure::Config(e.to_string()))
    }
}

fn verify_cmd(args: &RunArgs, suite: &str, out: &mut dyn Write, _err: &mut dyn Write) -> Result<i32, Failure> {
    let start = Instant::now();
    let (suites, strict) = parse_suites(suite)?;
    let (cfg, exp) = effective_config(args)?;
    let report = verify(&exp, &suites, strict).map_err(|e| Failure::Config(format!("cannot run suite '{suite}': {e}")))?;

    create_dir(&args.out)?;
    let summary_path = args.out.join("summary.json");
    let manifest_path = args.out.join("manifest.json");
    write_file(&summary_path, &Summary::new(&cfg, &report)?.to_json())?;
    let manifest = Manifest::new(
        "verify",
        &cfg,
        &exp,
        start.elapsed().as_secs_f64(),
        report.verdicts.iter().map(|v| (v.id.clone(), v.pass, v.runtime_secs)).collect(),
        vec![summary_path.clone(), manifest_path.clone()],
    )?;
    write_file(&manifest_path, &manifest.to_json())?;

    let _ = out.write_all(report::render_table(&report).as_bytes());
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_VERDICT })
}

fn presets(out: &mut dyn Write) -> Result<(), Failure> {
    for p in catalog() {
        let info = p.info();
        let _ = writeln!(out, "{}", info.name);
        let _ = writeln!(out, "  {}", info.summary);
        let _ = writeln!(out, "  model      {}", info.model);
        let _ = writeln!(out, "  theta      {}", info.theta);
        let _ = writeln!(out, "  w_bar      {}", info.w_bar);
        let _ = writeln!(out, "  w_bar_c    {}", info.w_bar_c);
        let _ = writeln!(out, "  dominant   {}", info.dominant);
        let _ = writeln!(out, "  gamma      {}", info.gamma);
        let _ = writeln!(out, "  suites     {}", info.suites.join(", "));
        let _ = writeln!(out);
    }
    Ok(())
}
