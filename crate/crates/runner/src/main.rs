use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use blowup_lab::output::{report_record, write_outputs};
use blowup_lab::{parse_scenario, run_scenario, with_param, Mode, RunReport, Scenario};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "blowup-lab", version, about = "Blow-up experiments for abstract wave equations")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build, simulate and monitor one scenario; writes CSV and report.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Evaluate the initial-data criteria only.
    Check { scenario: PathBuf },
    /// Run the positive-energy data builder only.
    BuildData { scenario: PathBuf },
    /// Repeat a run over values of one parameter.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
        values: Vec<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn load(path: &PathBuf) -> Result<Scenario, ExitCode> {
    parse_scenario(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_USAGE)
    })
}

fn run_and_write(s: &Scenario, out: &PathBuf) -> anyhow::Result<RunReport> {
    let report = run_scenario(s, Mode::Full);
    let paths = write_outputs(&report, out).with_context(|| format!("writing outputs under {}", out.display()))?;
    let verdict = report.verdict.as_ref().map_or("none", |v| v.status.name());
    println!(
        "{}: verdict = {verdict}, checks = {}, report = {}",
        s.name,
        if report.all_checks_passed() { "pass" } else { "fail" },
        paths.report.display()
    );
    Ok(report)
}

fn exit_for(passed: bool) -> ExitCode {
    if passed { ExitCode::SUCCESS } else { ExitCode::from(EXIT_CHECK_FAILED) }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::Run { scenario, out } => {
            let s = match load(&scenario) {
                Ok(s) => s,
                Err(code) => return code,
            };
            run_and_write(&s, &out).map(|r| r.all_checks_passed())
        }
        Command::Check { scenario } => {
            let s = match load(&scenario) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let report = run_scenario(&s, Mode::Static);
            print!("{}", report_record(&report));
            let passed = report.errors.is_empty()
                && report.checks.iter().filter(|c| c.check.is_static()).all(|c| c.passed);
            Ok(passed)
        }
        Command::BuildData { scenario } => {
            let s = match load(&scenario) {
                Ok(s) => s,
                Err(code) => return code,
            };
            if !matches!(s.data, blowup_lab::scenario::DataDesc::Builder { .. }) {
                eprintln!("error: {} has no builder data source", scenario.display());
                return ExitCode::from(EXIT_USAGE);
            }
            let report = run_scenario(&s, Mode::Static);
            print!("{}", report_record(&report));
            Ok(report.built.is_some())
        }
        Command::Sweep { scenario, param, values, out } => {
            let base = match load(&scenario) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let mut all = true;
            let mut failure = None;
            for v in values {
                match with_param(&base, &param, v) {
                    Ok(s) => match run_and_write(&s, &out) {
                        Ok(r) => all &= r.all_checks_passed(),
                        Err(e) => {
                            failure = Some(e);
                            break;
                        }
                    },
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(EXIT_USAGE);
                    }
                }
            }
            failure.map_or(Ok(all), Err)
        }
    };
    match result {
        Ok(passed) => exit_for(passed),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
