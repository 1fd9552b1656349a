//! `lab`: run registered scenarios and write their reports.
//!
//! Exit codes: 0 when every verdict passes, 2 when any fails, 1 on error.

use anyhow::{Context, Result};
use bvlab::experiments::{emit_report, run_scenario, ReportFormat, ScenarioConfig, ScenarioReport, SCENARIOS};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lab", version, about = "Scenario runner for BV extension and trace experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered scenarios.
    List,
    /// Print the default configuration of a scenario as JSON.
    Config { scenario: String },
    /// Run a scenario.
    Run {
        scenario: String,
        /// JSON overlay on the scenario defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Regularity audit of a single shape.
    Audit {
        /// unit-square, disc, slit-disc, l-shape or thin-tubes(N).
        shape: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Replace the mesh sweep; repeat for several meshes.
    #[arg(long = "mesh")]
    meshes: Vec<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the report.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
}

impl Common {
    fn apply(&self, cfg: &mut ScenarioConfig) {
        if !self.meshes.is_empty() {
            cfg.meshes = self.meshes.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.out {
            cfg.out_dir = Some(o.clone());
        }
    }
}

fn execute(cfg: &ScenarioConfig, format: &str) -> Result<bool> {
    let format: ReportFormat = format.parse()?;
    let report = run_scenario(cfg).with_context(|| format!("running {}", cfg.scenario))?;
    print_summary(&report);
    if let Some(dir) = &cfg.out_dir {
        for p in emit_report(&report, format, dir)? {
            println!("wrote {}", p.display());
        }
    }
    Ok(report.passed)
}

fn print_summary(r: &ScenarioReport) {
    for c in &r.checks {
        println!(
            "{} {}: {} {} {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.lhs,
            c.op.symbol(),
            c.rhs
        );
    }
    for (k, v) in &r.constants {
        println!("const {k} = {v}");
    }
    let failed = r.failed_checks().count();
    println!(
        "{}: {} ({} checks, {failed} failed, {:.2}s)",
        r.scenario,
        if r.passed { "passed" } else { "FAILED" },
        r.checks.len(),
        r.wall_time
    );
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::List => {
            for (name, about) in SCENARIOS {
                println!("{name:<26} {about}");
            }
            Ok(true)
        }
        Command::Config { scenario } => {
            let cfg = ScenarioConfig::default_for(&scenario)?;
            println!("{}", serde_json::to_string_pretty(&cfg)?);
            Ok(true)
        }
        Command::Run { scenario, config, common } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    ScenarioConfig::from_json(Some(&scenario), &text)?
                }
                None => ScenarioConfig::default_for(&scenario)?,
            };
            common.apply(&mut cfg);
            execute(&cfg, &common.format)
        }
        Command::Audit { shape, common } => {
            let mut cfg = ScenarioConfig::default_for("regularity-audit")?;
            cfg.shapes = vec![shape];
            cfg.sweep.clear();
            common.apply(&mut cfg);
            execute(&cfg, &common.format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
