//! `sws` command-line entry point.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use sws::config::{self, ConfigError, RunConfig};
use sws::emit::{self, CsvKind};
use sws::output;
use sws_core::prequant::{integrality_report, IntegralityReport};
use sws_core::suite::{run_matching, run_suite, SuiteContext, SuiteReport};
use sws_core::symplectic::{surface_integral, QuadratureSpec};
use sws_core::SpacetimeModel;

/// Exit status: every assertable check passed.
const EXIT_PASS: u8 = 0;
/// Exit status: at least one assertable check failed.
const EXIT_FAIL: u8 = 1;
/// Exit status: invalid configuration, usage or output path.
const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "sws", version)]
#[command(about = "Machine-checks the symplectic structure of the Schwarzschild exterior and its prequantization")]
struct Cli {
    /// Flat `key = value` configuration file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Mass parameter m.
    #[arg(long, global = true)]
    mass: Option<f64>,

    /// Sampling seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of random exterior sample points.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Threshold override `<check>=<value>`; `*=<value>` applies to every check.
    #[arg(long = "tolerance", global = true, value_name = "NAME=VALUE")]
    tolerances: Vec<String>,

    /// Connection normalization: `paper` or `weil`.
    #[arg(long, global = true)]
    scale_mode: Option<String>,

    /// Output directory; without it documents go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full verification suite.
    Verify,
    /// Run the checks whose names start with NAME (a check or a group).
    Check { name: String },
    /// Integrate ϖ over the sphere {r = r0, t = 0}.
    Integrate {
        #[arg(long)]
        r0: Option<f64>,
        #[arg(long)]
        nu: Option<usize>,
        #[arg(long)]
        nv: Option<usize>,
    },
    /// Prequantum reports; with no selector all three are produced.
    Prequant {
        #[arg(long)]
        commutators: bool,
        #[arg(long)]
        integrality: bool,
        #[arg(long)]
        operators: bool,
    },
    /// Write a CSV table.
    EmitCsv { what: CsvKind },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Run(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut entries = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            config::parse_entries(&text)?
        }
        None => Vec::new(),
    };
    let mut flag = |k: &str, v: String| entries.push((k.to_string(), v));
    if let Some(m) = cli.mass {
        flag("mass", m.to_string());
    }
    if let Some(s) = cli.seed {
        flag("seed", s.to_string());
    }
    if let Some(n) = cli.samples {
        flag("samples", n.to_string());
    }
    if let Some(mode) = &cli.scale_mode {
        flag("scale_mode", mode.clone());
    }
    if let Some(out) = &cli.out {
        flag("out", out.display().to_string());
    }
    for t in &cli.tolerances {
        entries.push(config::tolerance_entry(t)?);
    }
    Ok(config::build(&entries)?)
}

/// Writes `text` to `<dir>/<file>` or to stdout.
fn deliver(dir: Option<&Path>, file: &str, text: &str) -> Result<(), Failure> {
    match dir {
        Some(dir) => {
            let path = dir.join(file);
            fs::create_dir_all(dir)
                .and_then(|_| fs::write(&path, text))
                .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn publish<T: Serialize>(cfg: &RunConfig, file: &str, body: &T, started: Instant) -> Result<(), Failure> {
    let body = output::body_json(body).map_err(|e| Failure::Run(e.to_string()))?;
    let doc = output::document_json(&body, started.elapsed().as_secs_f64()).map_err(|e| Failure::Run(e.to_string()))?;
    deliver(cfg.output_dir.as_deref(), file, &doc)
}

/// One line per check on stderr.
fn summarize(report: &SuiteReport) {
    for entry in &report.checks {
        let r = &entry.report;
        let status = match (r.pass, r.assertable) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "NOTE",
        };
        eprintln!("{status} {:<48} worst={:.3e} threshold={:.1e}", r.check_name, r.worst_error, r.threshold);
    }
    let s = &report.summary;
    eprintln!(
        "{} checks: {} passed, {} assertable failures, {} report-only",
        s.total, s.passed, s.failed_assertable, s.report_only
    );
}

fn status_of(report: &SuiteReport) -> u8 {
    if report.summary.all_assertable_pass { EXIT_PASS } else { EXIT_FAIL }
}

#[derive(Serialize)]
struct IntegralOutput {
    mass: f64,
    quadrature: QuadratureSpec,
    value: f64,
    error_estimate: f64,
    abs_error: f64,
    threshold: f64,
    pass: bool,
}

#[derive(Serialize)]
struct PrequantOutput {
    #[serde(flatten)]
    suite: SuiteReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    integrality: Option<IntegralityReport>,
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let started = Instant::now();
    let cfg = load_config(cli)?;
    let suite = &cfg.suite;
    let core = |e: sws_core::Error| Failure::Run(e.to_string());
    match &cli.command {
        Command::Verify => {
            let report = run_suite(suite).map_err(core)?;
            summarize(&report);
            publish(&cfg, "report.json", &report, started)?;
            Ok(status_of(&report))
        }
        Command::Check { name } => {
            let report = run_matching(suite, name).map_err(|e| Failure::Config(format!("{name}: {e}")))?;
            summarize(&report);
            publish(&cfg, "report.json", &report, started)?;
            Ok(status_of(&report))
        }
        Command::Integrate { r0, nu, nv } => {
            let q = suite.quadrature;
            let spec = QuadratureSpec::new(nu.unwrap_or(q.n_u), nv.unwrap_or(q.n_v), r0.unwrap_or(q.r0), q.t0);
            spec.validate(suite.mass).map_err(|e| Failure::Config(e.to_string()))?;
            let model = SpacetimeModel::schwarzschild(suite.mass).map_err(core)?;
            let res = surface_integral(model.varpi(), &spec, &model).map_err(core)?;
            let threshold = suite.tolerances.get("integral", 1e-10);
            let abs_error = (res.value - suite.mass).abs();
            let out = IntegralOutput {
                mass: suite.mass,
                quadrature: spec,
                value: res.value,
                error_estimate: res.error_estimate,
                abs_error,
                threshold,
                pass: abs_error < threshold,
            };
            eprintln!("∫ϖ = {:.15} (m = {}, |∫ϖ - m| = {:.3e})", res.value, suite.mass, abs_error);
            publish(&cfg, "integral.json", &out, started)?;
            Ok(if out.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Prequant { commutators, integrality, operators } => {
            let all = !(*commutators || *integrality || *operators);
            let ctx = SuiteContext::new(suite).map_err(|e| Failure::Config(e.to_string()))?;
            let mut checks = Vec::new();
            for (wanted, group) in [(*commutators, "commutator"), (*operators, "operator"), (*integrality, "integrality")] {
                if wanted || all {
                    checks.extend(ctx.run_group(group).map_err(core)?);
                }
            }
            let detail = if *integrality || all {
                Some(integrality_report(&ctx.model, &suite.quadrature).map_err(core)?)
            } else {
                None
            };
            let report = SuiteReport::from_checks(suite, checks);
            summarize(&report);
            let code = status_of(&report);
            publish(&cfg, "prequant.json", &PrequantOutput { suite: report, integrality: detail }, started)?;
            Ok(code)
        }
        Command::EmitCsv { what } => {
            let text = emit::emit(*what, suite).map_err(|e| Failure::Run(e.to_string()))?;
            deliver(cfg.output_dir.as_deref(), &format!("{}.csv", what.name()), &text)?;
            Ok(EXIT_PASS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}
