//! `talenti`: reproduce the catalogued examples, check the comparison
//! theorems, sweep gaps, export curves and run the self-test.
//!
//! Exit status: 0 when every verdict is as expected (counterexamples must
//! show their violation), 1 for an unexpected verdict, 2 for usage,
//! configuration or input errors.

mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::Settings;
use talenti::geometry::{CaseId, ExampleCase};
use talenti::radial::NormalizationCondition;
use talenti::verify::{
    gap_sweep, run_counterexample, run_theorem_1_1, run_theorem_1_2, selftest, solve_for_case, u_curve,
    unit_load_balls, with_thread_limit, write_distribution_csv, write_profile_csv, write_rearrangement_csv,
    write_sweep_csv, CounterexampleOptions, Pipeline, SelftestOptions, SweepParam,
};

const DEFAULT_EPS: f64 = 1e-3;
const DEFAULT_A: f64 = 4.0;
const DEFAULT_RESOLUTION: usize = 512;

#[derive(Debug, Parser)]
#[command(name = "talenti", version, about = "Comparison checks for the Neumann Poisson problem")]
struct Cli {
    /// Flat `key = value` file (keys: case, eps, a, cond, resolution, out); flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Default)]
struct CaseArgs {
    /// Small parameter of the two-ball and shifted-rectangle cases.
    #[arg(long)]
    eps: Option<f64>,
    /// Aspect parameter of the rectangle cases.
    #[arg(long)]
    a: Option<f64>,
    /// Normalization condition: 1 (trace) or 2 (squared trace).
    #[arg(long)]
    cond: Option<String>,
    /// Grid resolution along the longer side for sampled and finite-volume runs.
    #[arg(long)]
    resolution: Option<usize>,
}

impl CaseArgs {
    fn settings(&self, case: Option<String>, out: Option<PathBuf>) -> Settings {
        Settings { case, eps: self.eps, a: self.a, cond: self.cond.clone(), resolution: self.resolution, out }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reproduce one catalogued example (1-5 or its name) and print its report.
    Example {
        id: String,
        #[command(flatten)]
        args: CaseArgs,
    },
    /// Check a comparison theorem (1.1 or 1.2) on one case.
    Theorem {
        which: String,
        /// Catalog id or name, or one of two-disks-f1, single-disk-f1, two-balls-f1.
        #[arg(long)]
        case: Option<String>,
        #[command(flatten)]
        args: CaseArgs,
        /// Comma-separated exponents p; defaults to the log-spaced theorem grid.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        /// Use the cell-sampled distribution of u instead of the closed form.
        #[arg(long)]
        sampled: bool,
    },
    /// Tabulate the norm gap over a parameter.
    Sweep {
        #[arg(long)]
        case: Option<String>,
        /// eps or a.
        #[arg(long)]
        param: String,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        args: CaseArgs,
        /// CSV destination; the table is printed either way.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write distribution, rearrangement and profile curves as CSV.
    Export {
        /// `t,mu,phi` destination; the other curves go next to it.
        #[arg(long)]
        curves: Option<PathBuf>,
        /// `s,u_star,v_star` destination (default `<curves>_rearrangement.csv`).
        #[arg(long)]
        rearrangement: Option<PathBuf>,
        /// `r,v,dv` destination (default `<curves>_profile.csv`).
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        case: Option<String>,
        #[command(flatten)]
        args: CaseArgs,
        /// Rows per curve.
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Run the full invariant suite.
    Selftest {
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Randomized positive variants for the first theorem.
        #[arg(long, default_value_t = 20)]
        variants: usize,
    },
}

/// A failure that maps to exit status 1 rather than 2.
#[derive(Debug)]
struct ComputationFailure(String);

impl std::fmt::Display for ComputationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ComputationFailure {}

/// Library errors become usage errors, except solver breakdowns.
fn lib<T>(r: talenti::Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        talenti::Error::NotConverged { .. } => anyhow!(ComputationFailure(e.to_string())),
        other => anyhow!(other),
    })
}

/// Prints to stdout; a closed pipe ends output quietly.
fn emit(text: impl std::fmt::Display) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{text}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
    }
}

fn parse_cond(s: &str) -> Result<NormalizationCondition> {
    match s {
        "1" | "cond_1" | "trace" => Ok(NormalizationCondition::Trace),
        "2" | "cond_2" | "squared-trace" => Ok(NormalizationCondition::SquaredTrace),
        _ => bail!("unknown condition '{s}' (expected 1 or 2)"),
    }
}

fn resolve_case(name: &str, eps: f64, a: f64) -> Result<ExampleCase> {
    match name {
        "two-disks-f1" => lib(unit_load_balls(2, &[0.0, 0.1])),
        "single-disk-f1" => lib(unit_load_balls(2, &[0.2])),
        "two-balls-f1" => lib(unit_load_balls(3, &[0.0, 0.1])),
        _ => {
            let id = lib(CaseId::from_str(name))?;
            lib(ExampleCase::from_id(id, eps, a))
        }
    }
}

struct Resolved {
    case: ExampleCase,
    cond: NormalizationCondition,
    resolution: usize,
}

fn resolve(s: &Settings) -> Result<Resolved> {
    let name = s.case.as_deref().ok_or_else(|| anyhow!("no case given (use --case or the config key 'case')"))?;
    let case = resolve_case(name, s.eps.unwrap_or(DEFAULT_EPS), s.a.unwrap_or(DEFAULT_A))?;
    let cond = match s.cond.as_deref() {
        Some(c) => parse_cond(c)?,
        None => case.default_condition(),
    };
    Ok(Resolved { case, cond, resolution: s.resolution.unwrap_or(DEFAULT_RESOLUTION) })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

/// `dir/stem_suffix.csv` next to `base`.
fn sibling(base: &Path, suffix: &str) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("curves");
    base.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn example(id: &str, s: &Settings) -> Result<bool> {
    let id = lib(CaseId::from_str(id))?;
    if id == CaseId::BallCluster {
        bail!("ball clusters are not a catalogued example");
    }
    let rect = matches!(id, CaseId::ShiftedRect | CaseId::ZeroMeanRect);
    let values = if rect { s.a.map(|a| vec![a]) } else { s.eps.map(|e| vec![e]) };
    let opts = CounterexampleOptions {
        values,
        eps: s.eps.unwrap_or(CounterexampleOptions::default().eps),
        resolution: s.resolution.unwrap_or(DEFAULT_RESOLUTION),
    };
    let mut ok = true;
    if !rect {
        let case = lib(ExampleCase::from_id(id, s.eps.unwrap_or(DEFAULT_EPS), DEFAULT_A))?;
        let cond = match s.cond.as_deref() {
            Some(c) => parse_cond(c)?,
            None => case.default_condition(),
        };
        let report = lib(run_theorem_1_1(&case, cond, None, Pipeline::Exact))?;
        emit(format_args!("{report}\n"));
        ok &= report.all_pass();
    }
    let report = lib(run_counterexample(id, &opts))?;
    emit(&report);
    Ok(ok && report.as_expected())
}

fn theorem(which: &str, s: &Settings, p: Option<&[f64]>, sampled: bool) -> Result<bool> {
    let r = resolve(s)?;
    let pipeline = if sampled { Pipeline::Sampled { resolution: r.resolution } } else { Pipeline::Exact };
    let report = match which {
        "1.1" => lib(run_theorem_1_1(&r.case, r.cond, p, pipeline))?,
        "1.2" => lib(run_theorem_1_2(&r.case, r.cond, p, pipeline))?,
        _ => bail!("unknown theorem '{which}' (expected 1.1 or 1.2)"),
    };
    emit(&report);
    Ok(report.all_pass())
}

fn sweep(param: &str, values: &[f64], s: &Settings) -> Result<bool> {
    let param = lib(SweepParam::from_str(param))?;
    let name = s.case.as_deref().ok_or_else(|| anyhow!("no case given (use --case or the config key 'case')"))?;
    let id = lib(CaseId::from_str(name))?;
    let points = lib(gap_sweep(
        id,
        param,
        values,
        s.eps.unwrap_or(DEFAULT_EPS),
        s.a.unwrap_or(DEFAULT_A),
        s.resolution.unwrap_or(DEFAULT_RESOLUTION),
    ))?;
    emit(format_args!("{:>12} {:>20} {:>20} {:>20}", param.name(), "u_norm", "v_norm", "gap"));
    for p in &points {
        emit(format_args!("{:>12.4e} {:>20.12} {:>20.12} {:>+20.12}", p.param, p.lhs, p.rhs, p.gap));
    }
    if let Some(out) = &s.out {
        let mut w = create(out)?;
        write_sweep_csv(&mut w, param, &points)?;
        w.flush()?;
        emit(format_args!("wrote {}", out.display()));
    }
    Ok(true)
}

fn export(curves: &Path, rearrangement: Option<PathBuf>, profile: Option<PathBuf>, s: &Settings, points: usize) -> Result<bool> {
    if points == 0 {
        bail!("--points must be positive");
    }
    let r = resolve(s)?;
    let u = lib(u_curve(&r.case, r.resolution))?;
    let sol = lib(solve_for_case(&r.case, r.cond))?;
    let phi = lib(sol.phi_curve())?;
    let rearrangement = rearrangement.unwrap_or_else(|| sibling(curves, "rearrangement"));
    let profile = profile.unwrap_or_else(|| sibling(curves, "profile"));

    let mut w = create(curves)?;
    write_distribution_csv(&mut w, &*u, &phi, points)?;
    w.flush()?;
    let mut w = create(&rearrangement)?;
    write_rearrangement_csv(&mut w, &*u, &phi, points)?;
    w.flush()?;
    let mut w = create(&profile)?;
    write_profile_csv(&mut w, &sol, points)?;
    w.flush()?;
    for p in [curves, &rearrangement, &profile] {
        emit(format_args!("wrote {}", p.display()));
    }
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    let file = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    match cli.command {
        Command::Example { id, args } => example(&id, &file.overridden_by(args.settings(None, None))),
        Command::Theorem { which, case, args, p, sampled } => {
            theorem(&which, &file.overridden_by(args.settings(case, None)), p.as_deref(), sampled)
        }
        Command::Sweep { case, param, values, args, out } => {
            sweep(&param, &values, &file.overridden_by(args.settings(case, out)))
        }
        Command::Export { curves, rearrangement, profile, case, args, points } => {
            let s = file.overridden_by(args.settings(case, curves));
            let curves = s.out.clone().ok_or_else(|| anyhow!("no output path (use --curves or the config key 'out')"))?;
            export(&curves, rearrangement, profile, &s, points)
        }
        Command::Selftest { resolution, seed, variants } => {
            let opts = SelftestOptions {
                resolution: resolution.or(file.resolution).unwrap_or(DEFAULT_RESOLUTION),
                seed,
                random_variants: variants,
                ..SelftestOptions::default()
            };
            let report = lib(lib(with_thread_limit(|| selftest(&opts)))?)?;
            emit(&report);
            Ok(report.all_pass())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("unexpected verdict");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<ComputationFailure>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
