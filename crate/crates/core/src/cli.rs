//! Command-line front end. Every run is a pure function of its arguments;
//! output is written in one piece after all numbers are computed.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::fock::{self, FockState};
use crate::interferometer::fringe_scan;
use crate::modes::MomentumTransform;
use crate::protocol::{
    calibrate_u, cat_leakage, cat_phase, cattiness_sweep, fit_timing, run_protocol,
    timing_tolerance,
};
use crate::state::{site_number_distribution, superfluid_ground_state};

/// Largest `N` accepted by commands that build a dense Fock lift.
pub const MAX_LIFT_N: usize = 60;
/// Largest `N` for the ground-state table.
pub const MAX_GROUND_N: usize = 1000;
/// Tolerance for the probability-sum check made before writing.
pub const SUM_TOLERANCE: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(
    name = "flowcat",
    version,
    about = "Flow-state cats on a three-site ring"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Output file; stdout if omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Site-number distribution (N_a, N_b) of the superfluid ground state.
    Ground {
        #[arg(long)]
        n: usize,
    },
    /// Momentum distribution after one interaction hold.
    Cat {
        #[arg(long)]
        n: usize,
        /// Hold phase Ut in units of π, e.g. 2/3.
        #[arg(long, conflicts_with = "delta")]
        theta_pi: Option<String>,
        /// Relative timing error: Ut = (1 + δ)·2π/3.
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
    },
    /// Cattiness for each N in a list or range.
    CattinessSweep {
        /// `a:b`, `a:b:step` or `a,b,c`.
        #[arg(long, default_value = "1:31")]
        n: String,
        #[arg(long, default_value = "2/3")]
        theta_pi: String,
    },
    /// Timing tolerance δ₀(N) and the fit of 1/δ₀ against N.
    Timing {
        #[arg(long, default_value = "3:30:3")]
        n: String,
        #[arg(long, default_value_t = 0.9)]
        c_target: f64,
    },
    /// Locate the hold phase that maximizes cattiness.
    CalibrateU {
        #[arg(long)]
        n: usize,
        /// Bracket `lo:hi` in units of π.
        #[arg(long, default_value = "1/2:5/6")]
        theta_pi: String,
        #[arg(long, default_value_t = 301)]
        grid: usize,
        #[arg(long, default_value_t = 0.9)]
        c_target: f64,
    },
    /// Interferometer fringes against the rotation coupling.
    Fringes {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        j: f64,
        /// Rotation-coupling range `lo:hi`.
        #[arg(long, allow_negative_numbers = true)]
        xi: String,
        #[arg(long, default_value_t = 1.0)]
        dt: f64,
        #[arg(long, default_value_t = 201)]
        grid: usize,
        #[arg(long, default_value = "2/3")]
        theta_pi: String,
    },
}

/// Failure classes, mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or an unwritable output; exit code 2.
    Config(String),
    /// A physics precondition does not hold; exit code 3.
    Physics(Error),
    /// A self-check on the computed tables failed; exit code 1.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Physics(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Physics(e) => write!(f, "precondition failed: {e}"),
            CliError::Internal(m) => write!(f, "internal check failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::OffComb { .. } | Error::TargetUnreachable { .. } | Error::NoPeakInBracket => {
                CliError::Physics(e)
            }
            Error::InvalidArgument(m) => CliError::Config(m),
            other => CliError::Internal(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// A value in an output table.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Empty => Value::Null,
        }
    }

    fn as_f64(&self) -> f64 {
        match self {
            Cell::Int(v) => *v as f64,
            Cell::Float(v) => *v,
            Cell::Empty => f64::NAN,
        }
    }
}

fn int(v: usize) -> Cell {
    Cell::Int(v as i64)
}

fn opt(v: Option<f64>) -> Cell {
    v.map(Cell::Float).unwrap_or(Cell::Empty)
}

/// Probability columns checked before output.
#[derive(Clone, Debug)]
enum SumCheck {
    /// The column, summed over rows, is 1.
    Column(usize),
    /// In every row, these columns sum to 1.
    Row(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    checks: Vec<SumCheck>,
}

impl Table {
    fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Table {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn col(&self, name: &str) -> usize {
        self.columns
            .iter()
            .position(|c| *c == name)
            .expect("known column")
    }

    fn sum_column(mut self, name: &str) -> Self {
        let c = self.col(name);
        self.checks.push(SumCheck::Column(c));
        self
    }

    fn sum_row(mut self, names: &[&str]) -> Self {
        let cs = names.iter().map(|n| self.col(n)).collect();
        self.checks.push(SumCheck::Row(cs));
        self
    }

    fn verify(&self) -> CliResult<()> {
        let bad = |s: f64| (s - 1.0).abs() > SUM_TOLERANCE || s.is_nan();
        for check in &self.checks {
            match check {
                SumCheck::Column(c) => {
                    let s: f64 = self.rows.iter().map(|r| r[*c].as_f64()).sum();
                    if bad(s) {
                        return Err(CliError::Internal(format!(
                            "column {} of {} sums to {s}",
                            self.columns[*c], self.name
                        )));
                    }
                }
                SumCheck::Row(cs) => {
                    for (i, r) in self.rows.iter().enumerate() {
                        let s: f64 = cs.iter().map(|c| r[*c].as_f64()).sum();
                        if bad(s) {
                            return Err(CliError::Internal(format!(
                                "row {i} of {} sums to {s}",
                                self.name
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The complete result of one run.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub tables: Vec<Table>,
}

impl Report {
    /// Tables in order, each with a header row, separated by blank lines.
    pub fn to_csv(&self) -> CliResult<String> {
        let mut out = String::new();
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Internal(e.to_string());
            w.write_record(&t.columns).map_err(io)?;
            for r in &t.rows {
                w.write_record(r.iter().map(Cell::csv)).map_err(io)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::Internal(e.to_string()))?;
            out.push_str(&String::from_utf8_lossy(&bytes));
        }
        Ok(out)
    }

    /// `{"command": ..., "<table>": [{column: value, ...}, ...], ...}`.
    pub fn to_json(&self) -> CliResult<String> {
        let mut top = Map::new();
        top.insert("command".into(), json!(self.command));
        for t in &self.tables {
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> = t
                        .columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            top.insert(t.name.into(), Value::Array(rows));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(top))
            .map_err(|e| CliError::Internal(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        for t in &self.tables {
            t.verify()?;
        }
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Parses `2/3`, `-1/2`, `0.25` or `1`.
pub fn parse_fraction(s: &str) -> CliResult<f64> {
    let s = s.trim();
    let bad = || config(format!("cannot parse `{s}` as a number or fraction"));
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0.0 {
                return Err(bad());
            }
            a / b
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

/// Parses `lo:hi` with `lo < hi`; each end may be a fraction.
pub fn parse_span(s: &str) -> CliResult<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| config(format!("expected `lo:hi`, got `{s}`")))?;
    let (lo, hi) = (parse_fraction(a)?, parse_fraction(b)?);
    if lo >= hi {
        return Err(config(format!("empty range `{s}`")));
    }
    Ok((lo, hi))
}

/// Parses `a`, `a,b,c`, `a:b` or `a:b:step` (inclusive) into particle
/// numbers.
pub fn parse_n_list(s: &str) -> CliResult<Vec<usize>> {
    let bad = || config(format!("cannot parse particle numbers `{s}`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    let list = match parts.as_slice() {
        [single] => single.split(',').map(num).collect::<CliResult<Vec<_>>>()?,
        [a, b] => (num(a)?..=num(b)?).collect(),
        [a, b, step] => {
            let step = num(step)?;
            if step == 0 {
                return Err(bad());
            }
            (num(a)?..=num(b)?).step_by(step).collect()
        }
        _ => return Err(bad()),
    };
    if list.is_empty() {
        return Err(config(format!("empty particle-number range `{s}`")));
    }
    Ok(list)
}

fn require_n(n: usize, max: usize) -> CliResult<()> {
    if n > max {
        return Err(config(format!(
            "N = {n} exceeds the supported maximum {max}"
        )));
    }
    Ok(())
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}

pub fn cmd_ground(n: usize) -> CliResult<Report> {
    require_n(n, MAX_GROUND_N)?;
    let dist = site_number_distribution(&superfluid_ground_state::<f64>(n))?;
    let mut t =
        Table::new("distribution", &["n_a", "n_b", "probability"]).sum_column("probability");
    t.rows = dist
        .iter()
        .map(|p| vec![int(p.n_a), int(p.n_b), Cell::Float(p.probability)])
        .collect();
    Ok(Report {
        command: "ground",
        tables: vec![t],
    })
}

pub fn cmd_cat(n: usize, theta: f64) -> CliResult<Report> {
    if n == 0 {
        return Err(config("N must be positive"));
    }
    require_n(n, MAX_LIFT_N)?;
    let result = run_protocol(n, theta)?;
    let transform = MomentumTransform::new(n);
    let momentum = transform.to_momentum(&result.state)?;
    let mut dist = Table::new(
        "distribution",
        &["n_alpha", "n_beta", "n_gamma", "probability"],
    )
    .sum_column("probability");
    dist.rows = fock::enumerate_basis(n)
        .iter()
        .zip(momentum.amplitudes().iter())
        .map(|(s, a): (&FockState, _)| {
            vec![
                int(s.0[0]),
                int(s.0[1]),
                int(s.0[2]),
                Cell::Float(a.norm_sqr()),
            ]
        })
        .collect();
    let [pa, pb, pg] = result.probabilities;
    let mut summary = Table::new(
        "summary",
        &[
            "n",
            "theta",
            "p_alpha",
            "p_beta",
            "p_gamma",
            "cattiness",
            "leakage",
        ],
    );
    summary.rows.push(vec![
        int(n),
        Cell::Float(theta),
        Cell::Float(pa),
        Cell::Float(pb),
        Cell::Float(pg),
        Cell::Float(result.cattiness),
        Cell::Float(cat_leakage(&result.state, &transform)?),
    ]);
    Ok(Report {
        command: "cat",
        tables: vec![dist, summary],
    })
}

pub fn cmd_cattiness_sweep(ns: &[usize], theta: f64) -> CliResult<Report> {
    if ns.contains(&0) {
        return Err(config("N must be positive"));
    }
    let results = cattiness_sweep(ns, theta)?;
    let mut t = Table::new(
        "sweep",
        &["n", "theta", "p_alpha", "p_beta", "p_gamma", "cattiness"],
    );
    t.rows = results
        .iter()
        .map(|r| {
            vec![
                int(r.n),
                Cell::Float(theta),
                Cell::Float(r.probabilities[0]),
                Cell::Float(r.probabilities[1]),
                Cell::Float(r.probabilities[2]),
                Cell::Float(r.cattiness),
            ]
        })
        .collect();
    Ok(Report {
        command: "cattiness-sweep",
        tables: vec![t],
    })
}

pub fn cmd_timing(ns: &[usize], target: f64) -> CliResult<Report> {
    use rayon::prelude::*;
    if !(target > 0.0 && target <= 1.0) {
        return Err(config("--c-target must lie in (0, 1]"));
    }
    let deltas = ns
        .par_iter()
        .map(|&n| timing_tolerance(n, target).map(|d| (n, d)))
        .collect::<crate::error::Result<Vec<_>>>()?;
    let fit = fit_timing(&deltas)?;
    let mut t = Table::new(
        "timing",
        &["n", "delta0", "delta0_times_n", "inverse_delta0"],
    );
    t.rows = deltas
        .iter()
        .map(|&(n, d)| {
            vec![
                int(n),
                Cell::Float(d),
                Cell::Float(d * n as f64),
                Cell::Float(1.0 / d),
            ]
        })
        .collect();
    let mut f = Table::new("fit", &["c_target", "slope", "prefactor"]);
    f.rows.push(vec![
        Cell::Float(target),
        Cell::Float(fit.slope),
        Cell::Float(fit.prefactor),
    ]);
    Ok(Report {
        command: "timing",
        tables: vec![t, f],
    })
}

pub fn cmd_calibrate_u(
    n: usize,
    span_pi: (f64, f64),
    grid: usize,
    target: f64,
) -> CliResult<Report> {
    use rayon::prelude::*;
    if n == 0 {
        return Err(config("N must be positive"));
    }
    if grid < 3 {
        return Err(config("--grid must be at least 3"));
    }
    let pi = std::f64::consts::PI;
    let samples: Vec<f64> = linspace(span_pi.0 * pi, span_pi.1 * pi, grid);
    let scan: Vec<f64> = samples
        .par_iter()
        .map(|&t| run_protocol(n, t).map(|r| r.cattiness))
        .collect::<crate::error::Result<_>>()?;
    let cal = calibrate_u(n, &samples, target)?;
    let mut s = Table::new("scan", &["theta_pi", "theta", "cattiness"]);
    s.rows = samples
        .iter()
        .zip(&scan)
        .map(|(&t, &c)| vec![Cell::Float(t / pi), Cell::Float(t), Cell::Float(c)])
        .collect();
    let mut c = Table::new(
        "calibration",
        &[
            "n",
            "theta_peak_pi",
            "theta_peak",
            "cattiness_peak",
            "c_target",
            "half_width",
        ],
    );
    c.rows.push(vec![
        int(n),
        Cell::Float(cal.theta_peak / pi),
        Cell::Float(cal.theta_peak),
        Cell::Float(cal.cattiness_peak),
        Cell::Float(target),
        opt(cal.half_width),
    ]);
    Ok(Report {
        command: "calibrate-u",
        tables: vec![s, c],
    })
}

pub fn cmd_fringes(
    n: usize,
    j: f64,
    xi: (f64, f64),
    dt: f64,
    grid: usize,
    theta: f64,
) -> CliResult<Report> {
    require_n(n, MAX_LIFT_N)?;
    if grid < 1 {
        return Err(config("--grid must be positive"));
    }
    if !dt.is_finite() || !j.is_finite() {
        return Err(config("--j and --dt must be finite"));
    }
    let xs = linspace(xi.0, xi.1, grid);
    let scan = fringe_scan(n, j, &xs, dt, theta)?;
    let mut t = Table::new(
        "fringes",
        &[
            "xi",
            "xi_dt",
            "phi_rot",
            "phi_hop",
            "closed_alpha",
            "closed_beta",
            "closed_gamma",
            "sim_alpha",
            "sim_beta",
            "sim_gamma",
        ],
    )
    .sum_row(&["closed_alpha", "closed_beta", "closed_gamma"])
    .sum_row(&["sim_alpha", "sim_beta", "sim_gamma"]);
    t.rows = scan
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![
                Cell::Float(r.xi),
                Cell::Float(r.xi_dt),
                Cell::Float(r.phi_rot),
                Cell::Float(r.phi_hop),
            ];
            row.extend(
                r.closed
                    .iter()
                    .chain(r.simulated.iter())
                    .map(|&p| Cell::Float(p)),
            );
            row
        })
        .collect();
    let mut s = Table::new(
        "period",
        &["n", "j", "dt", "period_expected", "period_measured"],
    );
    s.rows.push(vec![
        int(n),
        Cell::Float(j),
        Cell::Float(dt),
        Cell::Float(scan.period_expected),
        opt(scan.period_measured),
    ]);
    Ok(Report {
        command: "fringes",
        tables: vec![t, s],
    })
}

/// Runs a parsed command.
pub fn execute(command: &Command) -> CliResult<Report> {
    let pi = std::f64::consts::PI;
    match command {
        Command::Ground { n } => cmd_ground(*n),
        Command::Cat { n, theta_pi, delta } => {
            let theta = match (theta_pi, delta) {
                (Some(t), _) => parse_fraction(t)? * pi,
                (None, Some(d)) => (1.0 + d) * cat_phase::<f64>(),
                (None, None) => cat_phase::<f64>(),
            };
            cmd_cat(*n, theta)
        }
        Command::CattinessSweep { n, theta_pi } => {
            cmd_cattiness_sweep(&parse_n_list(n)?, parse_fraction(theta_pi)? * pi)
        }
        Command::Timing { n, c_target } => cmd_timing(&parse_n_list(n)?, *c_target),
        Command::CalibrateU {
            n,
            theta_pi,
            grid,
            c_target,
        } => cmd_calibrate_u(*n, parse_span(theta_pi)?, *grid, *c_target),
        Command::Fringes {
            n,
            j,
            xi,
            dt,
            grid,
            theta_pi,
        } => cmd_fringes(
            *n,
            *j,
            parse_span(xi)?,
            *dt,
            *grid,
            parse_fraction(theta_pi)? * pi,
        ),
    }
}

/// Executes a run and writes its output.
pub fn run(cli: &Cli) -> CliResult<()> {
    let text = execute(&cli.command)?.render(cli.output.format)?;
    match &cli.output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| config(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Parses `std::env::args`, runs, and returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let mut msg = String::new();
            let _ = write!(msg, "flowcat: {e}");
            eprintln!("{msg}");
            e.exit_code()
        }
    }
}
