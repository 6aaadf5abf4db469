mod instance;
mod report;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::builder::FalseyValueParser;
use clap::{Args, Parser, Subcommand};
use realz::stationary::{translation_group_for, FiniteGroup};
use realz::{
    check_realizability, check_realizability_stationary, minimal_third_moment, reduce_pair_correlation, run_battery,
    verify_certificate, Error, Rational, RealizationResult, Scalar, SolverOptions, TestFamily, ThirdMomentResult,
};
use serde_json::{json, Value};

use instance::{FamilySpec, InstanceFile};
use report::Report;

/// Decide whether first and second correlation functions are realizable by
/// a point process on a finite domain.
#[derive(Debug, Parser)]
#[command(name = "realz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Args)]
struct Flags {
    /// Solver tolerance, in (0, 1e-3].
    #[arg(long, global = true, env = "REALZ_TOL", default_value_t = 1e-9)]
    tol: f64,
    /// Solve in exact rational arithmetic.
    #[arg(long, global = true, env = "REALZ_RATIONAL", value_parser = FalseyValueParser::new())]
    rational: bool,
    /// Replace every site cap before solving.
    #[arg(long, global = true, env = "REALZ_CAP_OVERRIDE")]
    cap_override: Option<u32>,
    /// Torus side lengths of the translation group, e.g. `5` or `2,3`.
    #[arg(long, global = true, env = "REALZ_GROUP", value_delimiter = ',')]
    group: Option<Vec<usize>>,
    /// Test families: `singletons`, `pairs`, `balls:<radius>`.
    #[arg(long, global = true, env = "REALZ_FAMILY", value_delimiter = ',')]
    family: Option<Vec<String>>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, env = "REALZ_OUT")]
    out: Option<PathBuf>,
    /// Treat the instance path as a directory and process every `*.json` in it.
    #[arg(long, global = true, env = "REALZ_ALL", value_parser = FalseyValueParser::new())]
    all: bool,
}

#[derive(Debug, Clone, Subcommand)]
enum Command {
    /// Realizability with a witness or a certificate.
    Check { instance: PathBuf },
    /// Necessary-condition battery.
    Conditions { instance: PathBuf },
    /// Least third factorial moment over realizations.
    ThirdMoment { instance: PathBuf },
    /// Realizability by a group-invariant process.
    Stationary { instance: PathBuf },
    /// Replay a certificate against an instance.
    Certify { instance: PathBuf, certificate: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Check { .. } => "check",
            Self::Conditions { .. } => "conditions",
            Self::ThirdMoment { .. } => "third-moment",
            Self::Stationary { .. } => "stationary",
            Self::Certify { .. } => "certify",
        }
    }

    fn instance(&self) -> &Path {
        match self {
            Self::Check { instance }
            | Self::Conditions { instance }
            | Self::ThirdMoment { instance }
            | Self::Stationary { instance }
            | Self::Certify { instance, .. } => instance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Self::Pass => 0,
            Self::Error => 2,
            Self::Fail => 3,
        }
    }
}

enum Failure {
    Input(String),
    Solver(Error),
}

impl From<String> for Failure {
    fn from(message: String) -> Self {
        Self::Input(message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Solver(e)
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Dimension { .. } => "dimension",
        Error::InvalidDomain(_) => "invalid_domain",
        Error::UnboundedSite(_) => "unbounded_site",
        Error::InvalidCorrelations(_) => "invalid_correlations",
        Error::InvalidDistribution(_) => "invalid_distribution",
        Error::InvalidPolynomial(_) => "invalid_polynomial",
        Error::Capacity { .. } => "capacity",
        Error::IterationLimit(_) => "iteration_limit",
        Error::Precondition(_) => "precondition",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Ambiguous(_) => "ambiguous",
    }
}

fn solver_options(flags: &Flags) -> SolverOptions {
    let base = if flags.rational { SolverOptions::rational() } else { SolverOptions::default() };
    base.with_tolerance(flags.tol)
}

fn options_json(flags: &Flags) -> Value {
    let opts = solver_options(flags);
    json!({
        "tolerance": opts.tolerance,
        "arithmetic_mode": if flags.rational { "rational" } else { "float" },
        "pivot_rule": format!("{:?}", opts.pivot_rule).to_lowercase(),
        "max_iterations": opts.max_iterations,
        "cap_override": flags.cap_override,
        "group": flags.group,
        "family": flags.family,
    })
}

fn families<T: Scalar>(flags: &Flags, instance: &InstanceFile) -> Result<Vec<TestFamily<T>>, String> {
    let specs = match (&flags.family, &instance.test_families) {
        (Some(names), _) => names.iter().map(|n| FamilySpec::parse_flag(n)).collect::<Result<Vec<_>, _>>()?,
        (None, Some(specs)) => specs.clone(),
        (None, None) => vec![FamilySpec::Singletons, FamilySpec::Pairs],
    };
    specs.iter().map(FamilySpec::to_family).collect()
}

fn run<T: Scalar>(command: &Command, flags: &Flags, report: &mut Report) -> Result<Status, Failure> {
    let opts = solver_options(flags);
    opts.validate::<T>()?;
    let instance = instance::load(command.instance())?;
    let domain = instance.domain(flags.cap_override)?;
    let corr = instance.correlations::<T>()?;
    match command {
        Command::Check { .. } => match check_realizability(&domain, &corr, &opts)? {
            RealizationResult::Feasible { distribution } => {
                report.set("verdict", json!("feasible"));
                report.set("witness", report::distribution(&distribution));
                Ok(Status::Pass)
            }
            RealizationResult::Infeasible { certificate } => {
                report.set("verdict", json!("infeasible"));
                report.set("certificate", report::polynomial(&certificate));
                Ok(Status::Fail)
            }
        },
        Command::Conditions { .. } => {
            let families = families::<T>(flags, &instance)?;
            let result = run_battery(&domain, &corr, &families)?;
            report.set("verdict", json!(if result.overall { "pass" } else { "fail" }));
            report.set("conditions", report::conditions(&result));
            Ok(if result.overall { Status::Pass } else { Status::Fail })
        }
        Command::ThirdMoment { .. } => match minimal_third_moment(&domain, &corr, &opts)? {
            ThirdMomentResult::Finite { r_star, witness, bound } => {
                report.set("verdict", json!("feasible"));
                report.set("r_star", report::number(&r_star));
                report.set("witness", report::distribution(&witness));
                report.set("bound", report::cubic(&bound));
                Ok(Status::Pass)
            }
            ThirdMomentResult::Infeasible { certificate } => {
                report.set("verdict", json!("infeasible"));
                report.set("certificate", report::polynomial(&certificate));
                Ok(Status::Fail)
            }
        },
        Command::Stationary { .. } => {
            let dims = flags.group.clone().or_else(|| instance.group.clone());
            let group = match &dims {
                Some(dims) => translation_group_for(&domain, dims)?,
                None => FiniteGroup::trivial(domain.site_count()),
            };
            let result = check_realizability_stationary(&domain, &corr, &group, &opts)?;
            let g2 = match &dims {
                Some(dims) => reduce_pair_correlation(&corr, dims).ok().map(|r| report::reduced(&r)),
                None => None,
            };
            report
                .set("stationary", json!({ "group_dims": dims, "group_order": group.order(), "pair_correlation": g2 }));
            match result {
                RealizationResult::Feasible { distribution } => {
                    report.set("verdict", json!("feasible"));
                    report.set("witness", report::distribution(&distribution));
                    Ok(Status::Pass)
                }
                RealizationResult::Infeasible { certificate } => {
                    report.set("verdict", json!("infeasible"));
                    report.set("certificate", report::polynomial(&certificate));
                    Ok(Status::Fail)
                }
            }
        }
        Command::Certify { certificate, .. } => {
            let text = std::fs::read_to_string(certificate).map_err(|e| format!("{}: {e}", certificate.display()))?;
            let doc: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", certificate.display()))?;
            let poly = report::parse_polynomial::<T>(&doc)?;
            let valid = verify_certificate(&domain, &poly, &corr, flags.tol)?;
            report.set("verdict", json!(if valid { "valid" } else { "invalid" }));
            report.set("certificate", report::polynomial(&poly));
            Ok(if valid { Status::Pass } else { Status::Fail })
        }
    }
}

fn run_one(command: &Command, flags: &Flags) -> (Status, Value) {
    let start = Instant::now();
    let mut report = Report::new(command.name(), &command.instance().display().to_string());
    report.set("options", options_json(flags));
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        if flags.rational {
            run::<Rational>(command, flags, &mut report)
        } else {
            run::<f64>(command, flags, &mut report)
        }
    }));
    let status = match outcome {
        Ok(Ok(status)) => status,
        Ok(Err(Failure::Input(message))) => {
            eprintln!("realz: {message}");
            report.error("input", &message);
            Status::Error
        }
        Ok(Err(Failure::Solver(e))) => {
            eprintln!("realz: {}: {e}", command.instance().display());
            report.error(error_kind(&e), &e.to_string());
            Status::Error
        }
        Err(_) => {
            report.error("internal", "solver panicked");
            Status::Error
        }
    };
    report.set("timings", json!({ "total_ms": start.elapsed().as_secs_f64() * 1e3 }));
    (status, report.into_value())
}

fn with_instance(command: &Command, path: PathBuf) -> Command {
    match command.clone() {
        Command::Check { .. } => Command::Check { instance: path },
        Command::Conditions { .. } => Command::Conditions { instance: path },
        Command::ThirdMoment { .. } => Command::ThirdMoment { instance: path },
        Command::Stationary { .. } => Command::Stationary { instance: path },
        Command::Certify { certificate, .. } => Command::Certify { instance: path, certificate },
    }
}

/// Every `*.json` in the directory, processed on a small worker pool. A
/// failing or panicking file only affects its own report.
fn run_all(command: &Command, flags: &Flags) -> (Status, Value) {
    let dir = command.instance();
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(e) => {
            eprintln!("realz: {}: {e}", dir.display());
            let mut report = Report::new(command.name(), &dir.display().to_string());
            report.error("input", &e.to_string());
            return (Status::Error, report.into_value());
        }
    };
    files.sort();
    let results: Mutex<Vec<Option<(Status, Value)>>> = Mutex::new(vec![None; files.len()]);
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(files.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(k) else { break };
                let result = run_one(&with_instance(command, path.clone()), flags);
                results.lock().unwrap_or_else(|e| e.into_inner())[k] = Some(result);
            });
        }
    });
    let results: Vec<(Status, Value)> =
        results.into_inner().unwrap_or_else(|e| e.into_inner()).into_iter().flatten().collect();
    let status = results.iter().map(|(s, _)| *s).max().unwrap_or(Status::Pass);
    let summary = json!({
        "schema_version": instance::SCHEMA_VERSION,
        "command": command.name(),
        "directory": dir.display().to_string(),
        "reports": results.into_iter().map(|(_, r)| r).collect::<Vec<_>>(),
    });
    (status, summary)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (status, doc) =
        if cli.flags.all { run_all(&cli.command, &cli.flags) } else { run_one(&cli.command, &cli.flags) };
    let text = serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n";
    let written = match &cli.flags.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(message) = written {
        eprintln!("realz: {message}");
        return ExitCode::from(Status::Error.code());
    }
    ExitCode::from(status.code())
}
