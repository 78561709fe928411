//! `rao`: verification campaigns, counterexample certificates and invariant suites.
//!
//! Exit codes: 0 when every trial passes, 1 when a trial or invariant fails,
//! 2 on configuration errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rao_core::campaign::counterexamples::{self, PoissonCertificate};
use rao_core::campaign::lemma_suite::{default_family, run_lemma_suite, Fault};
use rao_core::campaign::theorem1::{run_theorem1, Theorem1Config, Theorem1Form};
use rao_core::campaign::theorem2::{run_theorem2, Theorem2Config};
use rao_core::campaign::{parse_endos, parse_rationals, parse_u64_list, Report};
use rao_core::fixture::write_dist;
use rao_core::identify::{Counterexample, SHIFT_TOL};
use rao_core::solenoid::Rao4Form;
use rao_core::Group;

#[derive(Parser)]
#[command(
    name = "rao",
    version,
    about = "Identifiability checks for linear forms on finite groups and solenoid lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shift recovery on a finite group: seeded round trips plus shifted adversarial inputs.
    VerifyTheorem1(Theorem1Args),
    /// Gaussian-factor recovery on a solenoid lattice window.
    VerifyTheorem2(Theorem2Args),
    /// Build a counterexample and certify it.
    Counterexample(CounterexampleArgs),
    /// Exhaustive duality and functional-equation invariants over a family of groups.
    LemmaSuite(LemmaSuiteArgs),
}

#[derive(Args)]
struct Output {
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Theorem1Args {
    /// Group orders such as `7` or `4x3`.
    #[arg(long, default_value = "7")]
    group: String,
    /// `i`, `ii`, `kotlarski` or `two-variable`.
    #[arg(long, default_value = "i")]
    form: String,
    /// Fixed coefficients: scalars `0,1,2` or matrices `[1,0;0,3]`. Drawn per trial when absent.
    #[arg(long)]
    coeffs: Option<String>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bound on the reconstruction error in total variation.
    #[arg(long, default_value_t = SHIFT_TOL)]
    tol: f64,
    /// Pass when the kernel conditions fail and the verifier says so.
    #[arg(long)]
    expect_negative: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeForm {
    I,
    Ii,
}

#[derive(Args)]
struct Theorem2Args {
    #[arg(long, default_value = "2,3,5")]
    base: String,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, default_value_t = 60)]
    radius: i64,
    #[arg(long, value_enum, default_value = "i")]
    form: LatticeForm,
    /// Four admissible rationals such as `1,2,3,4` or `1/2,1,3/2,-1/3`.
    #[arg(long, default_value = "1,2,3,4")]
    coeffs: String,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Remark3,
    Remark3KernelB3,
    Remark6,
    Bernstein,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(value_enum)]
    construction: Construction,
    /// Defaults to `6`, or `6x6` for `bernstein`.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    coeffs: Option<String>,
    /// Poisson intensity `a`.
    #[arg(long, default_value_t = 0.7)]
    intensity: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving `mu1.dist`, `nu1.dist`, ... for the Poisson constructions.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct LemmaSuiteArgs {
    /// Comma-separated groups such as `2,3,2x4`; defaults to Z_2..Z_12, Z_2xZ_4, Z_6xZ_6.
    #[arg(long)]
    family: Option<String>,
    /// Self-test: corrupt the named operation and expect the suite to fail.
    #[arg(long)]
    inject_fault: Option<String>,
    #[command(flatten)]
    output: Output,
}

/// What a command produced: the serialized report, its pass flag and diagnostics for stderr.
struct Outcome {
    json: String,
    passed: bool,
    diagnostics: Vec<String>,
}

type CliResult<T> = Result<T, String>;

fn config<T>(r: rao_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| e.to_string())
}

fn parse_group(s: &str) -> CliResult<Group> {
    config(s.parse::<Group>())
}

fn render<B: Serialize>(command: &str, body: B, started: Instant) -> CliResult<String> {
    let report = Report::new(command, body, started.elapsed().as_secs_f64() * 1e3);
    serde_json::to_string_pretty(&report).map_err(|e| format!("cannot serialize report: {e}"))
}

fn theorem1(a: &Theorem1Args, started: Instant) -> CliResult<Outcome> {
    let group = parse_group(&a.group)?;
    let form: Theorem1Form = config(a.form.parse())?;
    let coeffs = a
        .coeffs
        .as_deref()
        .map(|s| config(parse_endos(&group, s)))
        .transpose()?;
    let cfg = Theorem1Config {
        group,
        form,
        coeffs,
        trials: a.trials,
        seed: a.seed,
        tol: a.tol,
        expect_negative: a.expect_negative,
    };
    let body = config(run_theorem1(&cfg))?;
    let passed = body.passed;
    let diagnostics = body.failures.clone();
    Ok(Outcome {
        json: render("verify-theorem1", body, started)?,
        passed,
        diagnostics,
    })
}

fn theorem2(a: &Theorem2Args, started: Instant) -> CliResult<Outcome> {
    let cfg = Theorem2Config {
        base: config(parse_u64_list(&a.base))?,
        depth: a.depth,
        radius: a.radius,
        form: match a.form {
            LatticeForm::I => Rao4Form::FormI,
            LatticeForm::Ii => Rao4Form::FormII,
        },
        coeffs: config(parse_rationals(&a.coeffs))?,
        trials: a.trials,
        seed: a.seed,
        tol: a.tol,
    };
    let body = config(run_theorem2(&cfg))?;
    let passed = body.passed;
    let diagnostics = body.failures.clone();
    Ok(Outcome {
        json: render("verify-theorem2", body, started)?,
        passed,
        diagnostics,
    })
}

fn write_fixtures(dir: &Path, ce: &Counterexample) -> CliResult<Vec<String>> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let mut names = Vec::new();
    for (side, dists) in [("mu", &ce.mus), ("nu", &ce.nus)] {
        for (j, d) in dists.iter().enumerate() {
            let name = format!("{side}{}.dist", j + 1);
            let path = dir.join(&name);
            fs::write(&path, write_dist(d))
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            names.push(name);
        }
    }
    Ok(names)
}

fn poisson_outcome(
    a: &CounterexampleArgs,
    made: rao_core::Result<(PoissonCertificate, Counterexample)>,
    started: Instant,
) -> CliResult<Outcome> {
    let (mut cert, ce) = config(made)?;
    if let Some(dir) = &a.fixtures {
        cert.fixtures = write_fixtures(dir, &ce)?;
    }
    let passed = cert.passed;
    Ok(Outcome {
        json: render("counterexample", cert, started)?,
        passed,
        diagnostics: Vec::new(),
    })
}

fn counterexample(a: &CounterexampleArgs, started: Instant) -> CliResult<Outcome> {
    let default_group = match a.construction {
        Construction::Bernstein => "6x6",
        _ => "6",
    };
    let group = parse_group(a.group.as_deref().unwrap_or(default_group))?;
    let coeffs = a
        .coeffs
        .as_deref()
        .map(|s| config(parse_endos(&group, s)))
        .transpose()?;
    match a.construction {
        Construction::Remark3 => poisson_outcome(
            a,
            counterexamples::remark3(&group, coeffs, a.intensity, a.seed),
            started,
        ),
        Construction::Remark3KernelB3 => poisson_outcome(
            a,
            counterexamples::remark3_kernel_b3(&group, coeffs, a.intensity, a.seed),
            started,
        ),
        Construction::Remark6 => {
            let body = counterexamples::remark6();
            let passed = body.passed;
            Ok(Outcome {
                json: render("counterexample", body, started)?,
                passed,
                diagnostics: Vec::new(),
            })
        }
        Construction::Bernstein => {
            let cert = config(counterexamples::bernstein(&group))?;
            let passed = cert.passed;
            Ok(Outcome {
                json: render("counterexample", cert, started)?,
                passed,
                diagnostics: Vec::new(),
            })
        }
    }
}

fn lemma_suite(a: &LemmaSuiteArgs, started: Instant) -> CliResult<Outcome> {
    let family = match &a.family {
        None => default_family(),
        Some(s) => s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(parse_group)
            .collect::<CliResult<Vec<_>>>()?,
    };
    let fault = a
        .inject_fault
        .as_deref()
        .map(|f| config(f.parse::<Fault>()))
        .transpose()?;
    let body = config(run_lemma_suite(&family, fault))?;
    let passed = body.passed;
    let diagnostics = body
        .violated
        .iter()
        .map(|v| format!("invariant violated: {v}"))
        .collect();
    Ok(Outcome {
        json: render("lemma-suite", body, started)?,
        passed,
        diagnostics,
    })
}

fn emit(json: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, format!("{json}\n"))
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => match writeln!(io::stdout().lock(), "{json}") {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                Err(format!("cannot write the report: {e}"))
            }
            _ => Ok(()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let (result, out) = match &cli.command {
        Command::VerifyTheorem1(a) => (theorem1(a, started), a.output.out.as_deref()),
        Command::VerifyTheorem2(a) => (theorem2(a, started), a.output.out.as_deref()),
        Command::Counterexample(a) => (counterexample(a, started), a.output.out.as_deref()),
        Command::LemmaSuite(a) => (lemma_suite(a, started), a.output.out.as_deref()),
    };
    let outcome = match result.and_then(|o| emit(&o.json, out).map(|()| o)) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("rao: configuration error: {msg}");
            return ExitCode::from(2);
        }
    };
    for d in &outcome.diagnostics {
        eprintln!("rao: {d}");
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
