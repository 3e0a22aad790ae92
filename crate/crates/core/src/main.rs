use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use slfib::io::{
    cmd_analyze, cmd_export, cmd_fibrate, cmd_solve, run_validation, FibrationMode, IoError, Overrides, Report,
    RunConfig, VALIDATION_CHECKS,
};

/// Solver and analysis toolkit for U(1)-invariant special Lagrangian
/// 3-folds in C³.
#[derive(Parser)]
#[command(name = "slfib", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the built-in fixture checks.
    Validate {
        /// Print check names without running them.
        #[arg(long)]
        list: bool,
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Solve the Dirichlet problem and write f, u, v.
    Solve(RunArgs),
    /// Locate and classify singularities and check the counting bounds.
    Analyze(RunArgs),
    /// Build a fibration family, or sample the explicit fibration.
    Fibrate(RunArgs),
    /// Lift a solution to C³ and write OBJ and CSV meshes.
    Export(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    a_floor: Option<f64>,
    #[arg(long)]
    theta_count: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<FibrationMode>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, IoError> {
        let mut cfg = RunConfig::load(&self.config)?;
        cfg.apply(&Overrides {
            out: self.out.clone(),
            h: self.h,
            a: self.a,
            a_floor: self.a_floor,
            theta_count: self.theta_count,
            mode: self.mode,
        });
        Ok(cfg)
    }
}

fn finish<T: Serialize>(result: Result<Report<T>, IoError>) -> ExitCode {
    match result {
        Ok(report) => {
            println!("config {}", report.config_hash);
            for a in &report.artifacts {
                println!("wrote {a}");
            }
            if report.passed {
                println!("PASS {}", report.command);
                ExitCode::SUCCESS
            } else {
                println!("FAIL {}", report.command);
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn validate(list: bool, h: f64, fault: Option<String>) -> ExitCode {
    if list {
        for name in VALIDATION_CHECKS {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    let fault = match fault.map(|s| s.parse()).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let checks = match run_validation(h, fault) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    for c in &checks {
        println!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    match checks.iter().find(|c| !c.passed) {
        Some(c) => {
            eprintln!("first failing check: {}", c.name);
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { list, h, inject_fault } => validate(list, h, inject_fault),
        Command::Solve(args) => finish(args.config().and_then(|c| cmd_solve(&c))),
        Command::Analyze(args) => finish(args.config().and_then(|c| cmd_analyze(&c))),
        Command::Fibrate(args) => finish(args.config().and_then(|c| cmd_fibrate(&c))),
        Command::Export(args) => finish(args.config().and_then(|c| cmd_export(&c))),
    }
}
