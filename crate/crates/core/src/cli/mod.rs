//! Command-line front end.
//!
//! `analyze` checks a configured space, `simulate` writes event records,
//! `ingest` analyzes recorded events, `tsirelson` scans analyzer angles.
//! Exit codes: 0 ok, 1 a structural invariant failed, 2 parse error,
//! 3 validation error, 4 io error.

pub mod config;
pub mod events;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::chsh::{Arithmetic, FineOptions};
use crate::montecarlo::{self, Estimate, RNG_ALGORITHM};
use crate::quantum::{singlet_table, tsirelson_scan, AngleGrid, AngleSettings, Convention};
use crate::space::{Atom, SampleSpace, Setting};

pub use config::{ConfigFile, Experiment, TableSource};
pub use events::{read_records, write_records, RowError, HEADER};
pub use report::{analyze, render_text, stable_json, AnalysisReport};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed config or CSV syntax.
    Parse(String),
    /// Well-formed input with invalid content.
    Validation(String),
    Io(String),
    /// Event rows that violate the record schema, all of them.
    Schema(Vec<RowError>),
    EmptyFile,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) | CliError::Schema(_) | CliError::EmptyFile => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Schema(rows) => {
                write!(f, "schema error in {} row(s)", rows.len())?;
                for r in rows {
                    write!(f, "\n  line {}: {}", r.line, r.message)?;
                }
                Ok(())
            }
            CliError::EmptyFile => write!(f, "empty file: no event records"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bellspace",
    version,
    about = "Classical probability spaces for two-setting Bell experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Photon,
    Spin,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Photon => Convention::Photon,
            ConventionArg::Spin => Convention::Spin,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the space from a config file and run every check.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tolerance: Option<f64>,
        /// Decide joint-distribution feasibility in exact rational arithmetic.
        #[arg(long)]
        exact_lp: bool,
        /// Also scan analyzer angles with this many points per dial.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample trials from the configured space and write them as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination.
        #[arg(long)]
        out: PathBuf,
        /// Parallel shards; the output does not depend on this.
        #[arg(long, default_value_t = 1)]
        shards: usize,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Estimate tables from an event CSV and run every check on them.
    Ingest {
        csv: PathBuf,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        exact_lp: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest |S_cond| over a grid of analyzer angles in [-90°, 90°].
    Tsirelson {
        #[arg(long, default_value_t = 17)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = ConventionArg::Photon)]
        convention: ConventionArg,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "bellspace: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Analyze {
            config,
            tolerance,
            exact_lp,
            grid,
            format,
            out,
        } => {
            let exp = load_config(&config, tolerance)?;
            let report = analyze_experiment(&exp, &config.display().to_string(), exact_lp, grid)?;
            emit(&report, format, out.as_deref(), stdout)?;
            Ok(if report.structural_ok { 0 } else { 1 })
        }
        Command::Simulate {
            config,
            n,
            seed,
            out,
            shards,
            tolerance,
            format,
        } => {
            if n == 0 {
                return Err(CliError::Validation("--n: must be at least 1".into()));
            }
            if shards == 0 {
                return Err(CliError::Validation("--shards: must be at least 1".into()));
            }
            let exp = load_config(&config, tolerance)?;
            let space = SampleSpace::build_with_tolerance(exp.settings, exp.table, exp.tolerance)?;
            let records = montecarlo::sample_trials_sharded(&space, n, seed, shards);
            let file = fs::File::create(&out).map_err(|e| io_error(&out, e))?;
            write_records(file, &records).map_err(|e| io_error(&out, e))?;
            let summary = simulation_summary(&space, &records, seed, shards, &out)?;
            let text = match format {
                Format::Json => stable_json(&summary),
                Format::Text => render_summary(&summary),
            };
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
            Ok(0)
        }
        Command::Ingest {
            csv,
            tolerance,
            exact_lp,
            format,
            out,
        } => {
            let file = fs::File::open(&csv).map_err(|e| io_error(&csv, e))?;
            let records = read_records(file)?;
            let report = ingest_records(&records, &csv.display().to_string(), tolerance, exact_lp)?;
            emit(&report, format, out.as_deref(), stdout)?;
            Ok(if report.structural_ok { 0 } else { 1 })
        }
        Command::Tsirelson {
            grid,
            convention,
            format,
        } => {
            let scan = tsirelson_scan(&AngleGrid::half_turn(grid), convention.into())?;
            let text = match format {
                Format::Json => stable_json(&scan),
                Format::Text => format!(
                    "max |S_cond| = {} over {} points at a = ({}°, {}°), b = ({}°, {}°)\n",
                    report::fmt_num(scan.max_abs_chsh),
                    scan.points,
                    report::fmt_num(scan.argmax.a[0].to_degrees()),
                    report::fmt_num(scan.argmax.a[1].to_degrees()),
                    report::fmt_num(scan.argmax.b[0].to_degrees()),
                    report::fmt_num(scan.argmax.b[1].to_degrees()),
                ),
            };
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
            Ok(0)
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn load_config(path: &Path, tolerance: Option<f64>) -> Result<Experiment, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    ConfigFile::parse(&text)
        .map_err(|e| match e {
            CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })?
        .validate(tolerance)
}

fn fine_options(tolerance: f64, exact: bool) -> FineOptions {
    FineOptions {
        tolerance,
        arithmetic: if exact { Arithmetic::Exact } else { Arithmetic::Float },
    }
}

pub fn analyze_experiment(
    exp: &Experiment,
    source: &str,
    exact_lp: bool,
    grid: Option<usize>,
) -> Result<AnalysisReport, CliError> {
    let space = SampleSpace::build_with_tolerance(exp.settings, exp.table, exp.tolerance)?;
    let convention = match exp.source {
        TableSource::Angles { convention, .. } => convention,
        TableSource::Explicit => Convention::Photon,
    };
    let scan = grid
        .map(|r| tsirelson_scan(&AngleGrid::half_turn(r), convention))
        .transpose()?;
    Ok(analyze(
        source.to_string(),
        &space,
        Some(&exp.table),
        [[true; 2]; 2],
        Vec::new(),
        &fine_options(exp.tolerance, exact_lp),
        scan,
    ))
}

pub fn ingest_records(
    records: &[montecarlo::EventRecord],
    source: &str,
    tolerance: Option<f64>,
    exact_lp: bool,
) -> Result<AnalysisReport, CliError> {
    let tolerance = tolerance.unwrap_or(crate::space::DEFAULT_TOLERANCE);
    let est = montecarlo::estimate(records)?;
    let space = est.space(tolerance)?;
    let table = est.table();
    let defined = est.blocks.map(|row| row.map(|b| b.is_some()));
    Ok(analyze(
        source.to_string(),
        &space,
        table.as_ref(),
        defined,
        est.undefined_cells(),
        &fine_options(tolerance, exact_lp),
        None,
    ))
}

fn emit(report: &AnalysisReport, format: Format, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = match format {
        Format::Json => stable_json(report),
        Format::Text => render_text(report),
    };
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomDeviation {
    pub atom: String,
    pub exact: f64,
    pub empirical: f64,
    /// `|empirical − exact| / sqrt(p(1−p)/n)`; zero when `p` is 0 or 1.
    pub sigmas: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub out: String,
    pub n: u64,
    pub seed: u64,
    pub shards: usize,
    pub rng: &'static str,
    pub s_cond_exact: Option<f64>,
    pub s_cond_empirical: Option<f64>,
    pub s_abs_exact: f64,
    pub s_abs_empirical: f64,
    /// Empirical `Q_ij`, row `i`, column `j`.
    pub q_empirical: [[Option<f64>; 2]; 2],
    pub q_exact: [[Option<f64>; 2]; 2],
    pub max_atom_sigmas: f64,
    pub atoms: Vec<AtomDeviation>,
    pub undefined_cells: Vec<String>,
}

pub fn simulation_summary(
    space: &SampleSpace,
    records: &[montecarlo::EventRecord],
    seed: u64,
    shards: usize,
    out: &Path,
) -> Result<SimulationSummary, CliError> {
    let est: Estimate = montecarlo::estimate(records)?;
    let exact = crate::chsh::correlations(space);
    let n = est.n;
    let atoms: Vec<AtomDeviation> = Atom::all()
        .iter()
        .map(|w| {
            let p = space.probability(w);
            let f = est.atom_frequency(w).value;
            let sd = (p * (1.0 - p) / n as f64).sqrt();
            AtomDeviation {
                atom: format!("({},{},{},{})", w.a, w.b, w.x, w.y),
                exact: p,
                empirical: f,
                sigmas: if sd > 0.0 { (f - p).abs() / sd } else { 0.0 },
            }
        })
        .collect();
    let q = |set: &crate::chsh::CorrelationSet| Setting::ALL.map(|a| Setting::ALL.map(|b| set.q(a, b)));
    Ok(SimulationSummary {
        out: out.display().to_string(),
        n,
        seed,
        shards,
        rng: RNG_ALGORITHM,
        s_cond_exact: exact.s_cond(),
        s_cond_empirical: est.s_cond(),
        s_abs_exact: exact.s_abs(),
        s_abs_empirical: est.correlations.s_abs(),
        q_empirical: q(&est.correlations),
        q_exact: q(&exact),
        max_atom_sigmas: atoms.iter().map(|a| a.sigmas).fold(0.0, f64::max),
        atoms,
        undefined_cells: est.undefined_cells(),
    })
}

fn render_summary(s: &SimulationSummary) -> String {
    let opt = |x: Option<f64>| x.map_or_else(|| "undefined".into(), report::fmt_num);
    let mut o = format!(
        "wrote {} trials to {} (seed {}, {} shard(s))\nrng: {}\n",
        s.n, s.out, s.seed, s.shards, s.rng
    );
    o += &format!(
        "S_cond: empirical {}, exact {}\nS_abs: empirical {}, exact {}\n",
        opt(s.s_cond_empirical),
        opt(s.s_cond_exact),
        report::fmt_num(s.s_abs_empirical),
        report::fmt_num(s.s_abs_exact)
    );
    for a in Setting::ALL {
        for b in Setting::ALL {
            o += &format!(
                "Q{a}{b}: empirical {}, exact {}\n",
                opt(s.q_empirical[a.index()][b.index()]),
                opt(s.q_exact[a.index()][b.index()])
            );
        }
    }
    o += &format!(
        "largest atom deviation: {} standard errors\n",
        report::fmt_num(s.max_atom_sigmas)
    );
    if !s.undefined_cells.is_empty() {
        o += &format!("undefined cells: {}\n", s.undefined_cells.len());
    }
    o
}

/// Canonical table used by `--help` examples and tests.
pub fn canonical_experiment() -> Experiment {
    let angles = AngleSettings::canonical_chsh();
    Experiment {
        settings: crate::space::SettingDistribution::uniform(),
        table: singlet_table(&angles, Convention::Photon),
        tolerance: crate::space::DEFAULT_TOLERANCE,
        source: TableSource::Angles {
            angles_rad: angles,
            convention: Convention::Photon,
        },
    }
}
