//! `fermifold` command line: scenario runner, self-test and expression tools.

mod report;
mod scenario;
mod tasks;

use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser, Subcommand};
use fermifold::opalg::{normal_order, scalar_to_c64, GRAMMAR};
use fermifold::selftest::{self, SelftestOptions};
use log::{debug, info};
use rayon::prelude::*;

use report::{Report, Status, TaskReport};
use scenario::LoadError;
use tasks::Context;

const EXIT_USAGE: u8 = 1;
const EXIT_TASK: u8 = 2;

#[derive(Parser)]
#[command(
    name = "fermifold",
    version,
    about = "Fermionic Fock-space algebra and exterior calculus toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a JSON scenario and write the report.
    Run {
        scenario: PathBuf,
        /// Output path; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Maximum number of tasks executed concurrently.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
        /// Seed for sampled checks, overriding the scenario.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the invariant suite at desk scale.
    Selftest {
        /// Restrict to at most six Fock modes and four geometry dimensions.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Parse, normal-order and take the vacuum expectation of an expression.
    Expr { expression: String },
    /// Print the operator expression grammar.
    Grammar,
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("FERMIFOLD_LOG", "warn");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}

fn run_scenario(
    path: PathBuf,
    output: Option<PathBuf>,
    jobs: Option<u64>,
    seed: Option<u64>,
) -> ExitCode {
    let scenario = match scenario::load(&path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let ctx = Context {
        settings: scenario.settings,
        seed: seed.or(scenario.seed).unwrap_or(0),
        config: scenario.config,
    };
    info!(
        "running {} tasks from {}",
        scenario.tasks.len(),
        path.display()
    );
    let run_one = |(i, task): (usize, &scenario::Task)| {
        debug!("task {} ({})", task.id, task.spec.kind());
        let result = panic::catch_unwind(AssertUnwindSafe(|| ctx.execute(i, task)))
            .unwrap_or_else(|p| Err(panic_message(p.as_ref())));
        match result {
            Ok(o) => TaskReport {
                id: task.id.clone(),
                kind: task.spec.kind(),
                status: Status::Ok,
                value: Some(o.value),
                diagnostics: o.diagnostics,
                error: None,
            },
            Err(e) => TaskReport {
                id: task.id.clone(),
                kind: task.spec.kind(),
                status: Status::Error,
                value: None,
                diagnostics: Default::default(),
                error: Some(e),
            },
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.map_or(0, |j| j as usize))
        .build()
        .expect("thread pool");
    let reports: Vec<TaskReport> =
        pool.install(|| scenario.tasks.par_iter().enumerate().map(run_one).collect());
    let report = Report {
        seed: ctx.seed,
        settings: ctx.settings,
        tasks: reports,
    };
    for t in report.failures() {
        eprintln!("task {}: {}", t.id, t.error.as_deref().unwrap_or("failed"));
    }
    let text = report.to_json();
    let written = match &output {
        Some(p) => std::fs::write(p, &text)
            .map_err(|e| LoadError::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| LoadError::Io(e.to_string())),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    if report.failures().next().is_some() {
        ExitCode::from(EXIT_TASK)
    } else {
        ExitCode::SUCCESS
    }
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    let msg = p
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into());
    format!("internal error: {msg}")
}

fn run_selftest(quick: bool, seed: u64, json: bool) -> ExitCode {
    let report = selftest::run(&SelftestOptions { seed, quick });
    if json {
        let mut s = serde_json::to_string_pretty(&report).expect("report is serializable");
        s.push('\n');
        print!("{s}");
    } else {
        println!("{report}");
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_TASK)
    }
}

fn run_expr(src: &str) -> ExitCode {
    let e = match fermifold::parse(src) {
        Ok(e) => e,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match normal_order(&e) {
        Ok(nf) => {
            let v = scalar_to_c64(&nf.scalar_part());
            println!("input:     {e}");
            println!("canonical: {nf}");
            println!("terms:     {}", nf.term_count());
            println!("vev:       [{}, {}]", v.re, v.im);
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_TASK)
        }
    }
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    panic::set_hook(Box::new(|info| debug!("{info}")));
    match cli.command {
        Command::Run {
            scenario,
            output,
            jobs,
            seed,
        } => run_scenario(scenario, output, jobs, seed),
        Command::Selftest { quick, seed, json } => run_selftest(quick, seed, json),
        Command::Expr { expression } => run_expr(&expression),
        Command::Grammar => {
            print!("{GRAMMAR}");
            ExitCode::SUCCESS
        }
    }
}
