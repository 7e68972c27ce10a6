//! Command-line front end: identity and structure verification suites, pair
//! searches and moduli scans, reported as versioned JSON or CSV.

pub mod report;
pub mod tau;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use torus_blowup::blowup::{
    scan_rhombus_threshold, solve_pair_system, PairReport, PairStatus, ScanPoint, SearchParams,
};
use torus_blowup::checks::{
    hexagonal_suite, hexagonal_tau, identity_suite, structure_suite, CheckRecord, CheckStatus,
    SuiteSizes,
};
use torus_blowup::elliptic::{EvalConfig, Weierstrass};

use report::{landscape_csv, to_json, Report, Timing, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Known bracket `(sqrt(3)/2, 6/5)` of the rhombus solvability threshold.
pub const RHOMBUS_BRACKET: (f64, f64) = (0.866_025_403_784_438_6, 1.2);

#[derive(Debug, Parser)]
#[command(
    name = "torus-blowup",
    version,
    about = "Verify identities and search for blow-up pairs on flat tori"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Search the cell for solutions of the blow-up system.
    FindPairs,
    /// Sweep a one-parameter family of moduli.
    Scan {
        #[arg(value_enum)]
        family: Family,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Elliptic-function and Green-function identities (any modulus).
    Identities,
    /// Identities plus the rectangular structure suite.
    Lemmas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `tau = i b`.
    Rect,
    /// `tau = 1/2 + i b`.
    Rhombus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Modulus such as `i`, `1.5i` or `0.5+1.3i`; repeatable.
    #[arg(long, global = true, value_parser = tau::parse_tau)]
    pub tau: Vec<Complex64>,
    /// Lower end of the scanned `Im tau`.
    #[arg(long, global = true)]
    pub bmin: Option<f64>,
    /// Upper end of the scanned `Im tau`.
    #[arg(long, global = true)]
    pub bmax: Option<f64>,
    /// Number of scan points.
    #[arg(long, global = true, default_value_t = 20)]
    pub nb: usize,
    /// Search grid points per axis.
    #[arg(long, global = true, default_value_t = 400)]
    pub grid: usize,
    /// Base sample count of the verification suites.
    #[arg(long, global = true, default_value_t = 1000)]
    pub samples: usize,
    /// Relative tolerance of the series evaluations.
    #[arg(long, global = true, default_value_t = 1e-14)]
    pub tol: f64,
    /// Residual bound for accepting a pair.
    #[arg(long = "accept-tol", global = true, default_value_t = 1e-10)]
    pub accept_tol: f64,
    /// Exclusion radius around `a = -a` and `a = ±b`.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub excl: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores. Does not affect the output.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Seed of the random sample points.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Report a non-monotone rhombus scan without failing.
    #[arg(long = "allow-nonmonotone", global = true)]
    pub allow_nonmonotone: bool,
    /// Include wall-clock timing (makes reports run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_FAILURE,
        }
    }
}

impl From<torus_blowup::Error> for CliError {
    fn from(e: torus_blowup::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

/// Bytes to emit and the process exit code.
#[derive(Debug)]
pub struct Output {
    pub bytes: Vec<u8>,
    pub exit_code: i32,
}

/// Echo of the parameters that determine the report (thread count and
/// output path are excluded: they do not change the content).
#[derive(Debug, Serialize)]
struct CommandEcho {
    name: String,
    taus: Vec<Complex64>,
    b_min: Option<f64>,
    b_max: Option<f64>,
    n_b: Option<usize>,
    grid_n: usize,
    n_samples: usize,
    rel_tol: f64,
    accept_tol: f64,
    excl_radius: f64,
    format: Format,
    seed: u64,
    allow_nonmonotone: bool,
}

impl Cli {
    fn name(&self) -> String {
        match &self.command {
            Command::Verify {
                suite: Suite::Identities,
            } => "verify identities".into(),
            Command::Verify {
                suite: Suite::Lemmas,
            } => "verify lemmas".into(),
            Command::FindPairs => "find-pairs".into(),
            Command::Scan {
                family: Family::Rect,
            } => "scan rect".into(),
            Command::Scan {
                family: Family::Rhombus,
            } => "scan rhombus".into(),
        }
    }

    fn echo(&self) -> CommandEcho {
        let o = &self.opts;
        let scan = matches!(self.command, Command::Scan { .. });
        CommandEcho {
            name: self.name(),
            taus: o.tau.clone(),
            b_min: if scan { o.bmin } else { None },
            b_max: if scan { o.bmax } else { None },
            n_b: scan.then_some(o.nb),
            grid_n: o.grid,
            n_samples: o.samples,
            rel_tol: o.tol,
            accept_tol: o.accept_tol,
            excl_radius: o.excl,
            format: o.format,
            seed: o.seed,
            allow_nonmonotone: o.allow_nonmonotone,
        }
    }

    fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            rel_tol: self.opts.tol,
            ..EvalConfig::default()
        }
    }

    fn search_params(&self) -> SearchParams {
        SearchParams {
            grid_n: self.opts.grid,
            excl_radius: self.opts.excl,
            accept_tol: self.opts.accept_tol,
            ..SearchParams::default()
        }
    }

    /// Usage checks beyond what the argument parser enforces.
    pub fn validate(&self) -> Result<(), CliError> {
        let o = &self.opts;
        let usage = |m: &str| Err(CliError::Usage(m.to_string()));
        for (name, v) in [
            ("--tol", o.tol),
            ("--accept-tol", o.accept_tol),
            ("--excl", o.excl),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return usage(&format!("{name} must be positive"));
            }
        }
        if o.tol < 1e-14 || o.tol > 1e-6 {
            return usage("--tol must lie in [1e-14, 1e-6]");
        }
        if o.grid < 4 {
            return usage("--grid must be at least 4");
        }
        if o.samples < 20 {
            return usage("--samples must be at least 20");
        }
        match self.command {
            Command::Verify { .. } | Command::FindPairs => {
                if o.tau.is_empty() {
                    return usage("at least one --tau is required");
                }
            }
            Command::Scan { family } => {
                let (Some(lo), Some(hi)) = (o.bmin, o.bmax) else {
                    return usage("scan needs --bmin and --bmax");
                };
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return usage("scan range is empty: need --bmin < --bmax");
                }
                if o.nb < 2 {
                    return usage("--nb must be at least 2");
                }
                if family == Family::Rect && lo <= 0.0 {
                    return usage("rectangular scan needs --bmin > 0");
                }
                if family == Family::Rhombus && lo < RHOMBUS_BRACKET.0 - 1e-12 {
                    return usage("rhombus scan needs --bmin >= sqrt(3)/2");
                }
            }
        }
        if o.format == Format::Csv
            && !(matches!(self.command, Command::FindPairs) && o.tau.len() == 1)
        {
            return usage("--format csv is available for find-pairs with a single --tau");
        }
        Ok(())
    }
}

/// Installs the worker pool for `--jobs`; call once per process.
pub fn configure_jobs(jobs: usize) {
    #[cfg(feature = "parallel")]
    if jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            log::warn!("thread pool already configured: {e}");
        }
    }
    #[cfg(not(feature = "parallel"))]
    if jobs > 1 {
        log::info!("built without the parallel feature; --jobs {jobs} runs serially");
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    cli.validate()?;
    let start = Instant::now();
    let (records, results, csv) = match cli.command {
        Command::Verify { suite } => (verify(cli, suite)?, serde_json::Value::Null, None),
        Command::FindPairs => find_pairs(cli)?,
        Command::Scan {
            family: Family::Rect,
        } => scan_rect(cli)?,
        Command::Scan {
            family: Family::Rhombus,
        } => scan_rhombus(cli)?,
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: serde_json::to_value(cli.echo())
            .map_err(|e| CliError::Numerical(e.to_string()))?,
        records,
        results,
        timing: cli.opts.timing.then(|| Timing {
            elapsed_s: start.elapsed().as_secs_f64(),
        }),
    };
    let exit_code = if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    };
    let bytes = match csv {
        Some(bytes) => bytes,
        None => to_json(&report).map_err(|e| CliError::Numerical(e.to_string()))?,
    };
    Ok(Output { bytes, exit_code })
}

fn is_hexagonal(tau: Complex64) -> bool {
    (tau - hexagonal_tau()).norm() < 1e-3
}

fn verify(cli: &Cli, suite: Suite) -> Result<Vec<CheckRecord>, CliError> {
    let cfg = cli.eval_config();
    let sizes = SuiteSizes::scaled(cli.opts.samples);
    let mut records = Vec::new();
    for &tau in &cli.opts.tau {
        let w = match Weierstrass::new(tau, cfg) {
            Ok(w) => w,
            Err(e) => {
                records.push(CheckRecord::error(
                    "lattice_data",
                    "lattice invariants",
                    tau,
                    &e,
                ));
                continue;
            }
        };
        log::info!("verify {suite:?} at tau = {tau}");
        records.extend(identity_suite(&w, &sizes, cli.opts.seed));
        match suite {
            Suite::Identities if is_hexagonal(tau) => {
                let hex = hexagonal_suite(cfg, &sizes, cli.opts.seed)?;
                // The identity suite already carries the g2 record.
                records.extend(
                    hex.into_iter()
                        .filter(|r| r.check_id != "g2_vanishes_hexagonal"),
                );
            }
            Suite::Identities => {}
            Suite::Lemmas => records.extend(structure_suite(&w, &sizes, cli.opts.seed)),
        }
    }
    Ok(records)
}

fn search_record(rep: &PairReport) -> CheckRecord {
    let mut measured = vec![
        ("n_pairs", rep.pairs.len() as f64),
        ("grid_used", rep.grid_used as f64),
    ];
    if let Some(f) = rep.floor {
        measured.push(("floor", f));
    }
    if let Some(f) = rep.floor_abs {
        measured.push(("floor_abs", f));
    }
    let worst = rep
        .pairs
        .iter()
        .map(|p| p.residual_green.max(p.residual_wp).max(p.residual_zeta))
        .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    if let Some(r) = worst {
        measured.push(("max_pair_residual", r));
    }
    let mut rec = CheckRecord::new(
        "pair_search",
        "solvability of G_z(a) + G_z(b) = 0, wp'(a) + wp'(b) = 0",
        rep.tau,
        &measured,
        rep.search_params.accept_tol,
        true,
    );
    rec.status = CheckStatus::Evidence;
    rec
}

type CommandOutput = (Vec<CheckRecord>, serde_json::Value, Option<Vec<u8>>);

fn find_pairs(cli: &Cli) -> Result<CommandOutput, CliError> {
    let cfg = cli.eval_config();
    let params = cli.search_params();
    let mut records = Vec::new();
    let mut reports = Vec::new();
    for &tau in &cli.opts.tau {
        let w = Weierstrass::new(tau, cfg)?;
        log::info!("find-pairs at tau = {tau}, grid {}", params.grid_n);
        let rep = solve_pair_system(&w, &params)?;
        records.push(search_record(&rep));
        reports.push(rep);
    }
    let csv = (cli.opts.format == Format::Csv).then(|| landscape_csv(&reports[0].landscape));
    Ok((records, json!({ "searches": reports }), csv))
}

fn scan_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

fn scan_rect(cli: &Cli) -> Result<CommandOutput, CliError> {
    let cfg = cli.eval_config();
    let params = cli.search_params();
    let (lo, hi) = (
        cli.opts.bmin.unwrap_or_default(),
        cli.opts.bmax.unwrap_or_default(),
    );
    let mut records = Vec::new();
    let mut points = Vec::new();
    for b in scan_grid(lo, hi, cli.opts.nb) {
        let w = Weierstrass::new(Complex64::new(0.0, b), cfg)?;
        let rep = solve_pair_system(&w, &params)?;
        log::info!("scan rect b = {b}: {:?}", rep.status);
        records.push(search_record(&rep));
        points.push(ScanPoint {
            b,
            status: rep.status,
            n_pairs: rep.pairs.len(),
            floor: rep.floor,
        });
    }
    let with_pairs = points
        .iter()
        .filter(|p| p.status == PairStatus::SolutionsFound)
        .count();
    let min_floor = points
        .iter()
        .filter_map(|p| p.floor)
        .fold(f64::INFINITY, f64::min);
    records.push(CheckRecord::new(
        "rectangular_no_solutions",
        "no solutions on rectangular tori",
        Complex64::new(0.0, lo),
        &[
            ("n_b", points.len() as f64),
            ("n_with_pairs", with_pairs as f64),
            ("min_floor", min_floor),
        ],
        params.accept_tol,
        with_pairs == 0,
    ));
    Ok((records, json!({ "points": points }), None))
}

fn scan_rhombus(cli: &Cli) -> Result<CommandOutput, CliError> {
    let cfg = cli.eval_config();
    let params = cli.search_params();
    let (lo, hi) = (
        cli.opts.bmin.unwrap_or_default(),
        cli.opts.bmax.unwrap_or_default(),
    );
    let rep = scan_rhombus_threshold(lo, hi, cli.opts.nb, &params, cfg)?;
    let tau_lo = Complex64::new(0.5, lo);
    let mut records = Vec::new();

    let monotone = CheckRecord::new(
        "rhombus_scan_monotone",
        "solvability along the rhombus family changes once",
        tau_lo,
        &[("inconsistent", rep.inconsistent as u8 as f64)],
        rep.resolution,
        !rep.inconsistent,
    );
    if rep.inconsistent && cli.opts.allow_nonmonotone {
        let mut m = monotone;
        m.status = CheckStatus::Evidence;
        records.push(m);
    } else {
        records.push(monotone);
    }

    let mut measured = vec![("resolution", rep.resolution)];
    if let Some(l) = rep.bracket_low {
        measured.push(("bracket_low", l));
    }
    if let Some(h) = rep.bracket_high {
        measured.push(("bracket_high", h));
    }
    let (known_lo, known_hi) = RHOMBUS_BRACKET;
    let mut bracket = CheckRecord::new(
        "rhombus_threshold_bracket",
        "threshold b* in (sqrt(3)/2, 6/5)",
        tau_lo,
        &measured,
        rep.resolution,
        matches!((rep.bracket_low, rep.bracket_high), (Some(l), Some(h)) if l > known_lo - 1e-12 && h < known_hi),
    );
    if rep.bracket_low.is_none() || rep.bracket_high.is_none() {
        // No transition inside the scanned range: nothing to compare.
        bracket.status = CheckStatus::Evidence;
    }
    records.push(bracket);
    Ok((records, json!({ "scan": rep }), None))
}
