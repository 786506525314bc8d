//! Command-line front end: flag parsing, validation and deterministic
//! CSV/JSON rendering.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Number, Value};

use crate::analysis::{
    convergence_curve, data_independence_check, divergence_region_with, divergence_scan_with,
    n_grid, sweep_weights, Pairing, Rounding, Spacing,
};
use crate::bayes::{bayes_factor_jeffreys, bayes_factor_uniform};
use crate::data::{BinomialData, Boundary};
use crate::error::Error;
use crate::lnml::{lnml_evidence, lnml_weights, LuckinessSpec};

#[derive(Debug, Parser)]
#[command(
    name = "order-evidence",
    version,
    about = "Bayes factor and LNML evidence for theta <= z against the full binomial model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evidence for one data set under every method.
    Evidence {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        y: u64,
        #[arg(long)]
        z: f64,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Model weights for every y in 0..=n.
    Sweep {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        z: f64,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Weights along a grid of sample sizes for a fixed ML estimate.
    Converge {
        #[arg(long)]
        z: f64,
        /// ML estimate as a fraction of z.
        #[arg(long)]
        fraction: f64,
        #[arg(long, default_value_t = 10)]
        n_min: u64,
        #[arg(long, default_value_t = 1000)]
        n_max: u64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = GridSpacing::Geometric)]
        spacing: GridSpacing,
        /// Explicit comma-separated sample sizes; overrides the range flags.
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<u64>>,
        #[arg(long, value_enum, default_value_t = RoundingMode::Nearest)]
        rounding: RoundingMode,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Data sets where the Bayes factor and LNML prefer different models.
    Divergence {
        #[arg(long)]
        z: f64,
        #[arg(long, conflicts_with_all = ["n_min", "n_max"])]
        n: Option<u64>,
        #[arg(long, requires = "n_max")]
        n_min: Option<u64>,
        #[arg(long, requires = "n_min")]
        n_max: Option<u64>,
        #[arg(long, value_enum, default_value_t = PairingArg::UniformLnml)]
        pairing: PairingArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Checks that LNML weights are constant where the constraint holds.
    Independence {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        z: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Digits after the decimal point.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u8).range(6..=17))]
    pub precision: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    All,
    Bayes,
    BayesJeffreys,
    Lnml,
    Nml,
}

impl Method {
    fn includes(self, m: Method) -> bool {
        self == Method::All || self == m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridSpacing {
    Geometric,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoundingMode {
    Nearest,
    Floor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairingArg {
    UniformLnml,
    JeffreysNml,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid value for {flag}: {message}")]
    Validation { flag: &'static str, message: String },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

fn invalid(flag: &'static str) -> impl FnOnce(Error) -> CliError {
    move |e| CliError::Validation {
        flag,
        message: e.to_string(),
    }
}

fn boundary(z: f64) -> Result<Boundary, CliError> {
    Boundary::new(z).map_err(invalid("--z"))
}

fn binomial(n: u64, y: u64) -> Result<BinomialData, CliError> {
    if n == 0 {
        return Err(invalid("--n")(Error::ZeroTrials));
    }
    BinomialData::new(n, y).map_err(invalid("--y"))
}

fn trials(flag: &'static str, n: u64) -> Result<u64, CliError> {
    if n == 0 {
        Err(invalid(flag)(Error::ZeroTrials))
    } else {
        Ok(n)
    }
}

/// One rendered value.
#[derive(Debug, Clone)]
enum Cell {
    Int(u64),
    Real(f64),
    /// Real with its own digit count.
    Rounded(f64, usize),
    Bool(bool),
    Text(&'static str),
    Ints(Vec<u64>),
    Null,
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

fn fixed(v: f64, digits: usize) -> String {
    if v.is_finite() {
        format!("{v:.digits$}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

impl Cell {
    fn csv(&self, digits: usize) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => fixed(*v, digits),
            Cell::Rounded(v, d) => fixed(*v, *d),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.to_string(),
            Cell::Ints(vs) => vs.iter().map(u64::to_string).collect::<Vec<_>>().join(";"),
            Cell::Null => String::new(),
        }
    }

    fn json(&self, digits: usize) -> Value {
        let number = |v: f64, d: usize| {
            if v.is_finite() {
                Number::from_str(&fixed(v, d)).map_or(Value::Null, Value::Number)
            } else {
                Value::Null
            }
        };
        match self {
            Cell::Int(v) => Value::Number((*v).into()),
            Cell::Real(v) => number(*v, digits),
            Cell::Rounded(v, d) => number(*v, *d),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.to_string()),
            Cell::Ints(vs) => Value::Array(vs.iter().map(|v| Value::Number((*v).into())).collect()),
            Cell::Null => Value::Null,
        }
    }
}

type Record = Vec<(&'static str, Cell)>;

/// Rendered output: either a single record or a table with parameters.
enum Report {
    Record(Record),
    Table {
        params: Record,
        columns: Vec<&'static str>,
        rows: Vec<Vec<Cell>>,
    },
}

impl Report {
    fn render(&self, format: Format, digits: usize) -> String {
        match (self, format) {
            (Report::Record(rec), Format::Csv) => {
                let head: Vec<_> = rec.iter().map(|(k, _)| *k).collect();
                let vals: Vec<_> = rec.iter().map(|(_, v)| v.csv(digits)).collect();
                format!("{}\n{}\n", head.join(","), vals.join(","))
            }
            (Report::Table { columns, rows, .. }, Format::Csv) => {
                let mut out = columns.join(",");
                out.push('\n');
                for row in rows {
                    let vals: Vec<_> = row.iter().map(|c| c.csv(digits)).collect();
                    let _ = writeln!(out, "{}", vals.join(","));
                }
                out
            }
            (Report::Record(rec), Format::Json) => json_string(object(rec, digits)),
            (Report::Table { params, columns, rows }, Format::Json) => {
                let mut obj = object(params, digits);
                let rows = rows
                    .iter()
                    .map(|row| {
                        let m: Map<String, Value> = columns
                            .iter()
                            .zip(row)
                            .map(|(k, c)| (k.to_string(), c.json(digits)))
                            .collect();
                        Value::Object(m)
                    })
                    .collect();
                if let Value::Object(m) = &mut obj {
                    m.insert("rows".into(), Value::Array(rows));
                }
                json_string(obj)
            }
        }
    }
}

fn object(rec: &Record, digits: usize) -> Value {
    Value::Object(
        rec.iter()
            .map(|(k, v)| (k.to_string(), v.json(digits)))
            .collect(),
    )
}

fn json_string(v: Value) -> String {
    // serde_json's default map is ordered by key.
    let mut s = serde_json::to_string_pretty(&v).unwrap_or_default();
    s.push('\n');
    s
}

struct Prepared {
    report: Report,
    format: Format,
    output: OutputArgs,
}

/// Validates the request, computes it, and returns the rendered output
/// together with its destination. Nothing is written here.
pub fn render(cli: &Cli) -> Result<(String, Option<PathBuf>), CliError> {
    let p = prepare(cli)?;
    let text = p.report.render(p.format, usize::from(p.output.precision));
    Ok((text, p.output.out))
}

/// Renders and writes to the requested destination.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (text, out) = render(cli)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn prepare(cli: &Cli) -> Result<Prepared, CliError> {
    match &cli.command {
        Command::Evidence {
            n,
            y,
            z,
            method,
            output,
        } => {
            let data = binomial(*n, *y)?;
            let b = boundary(*z)?;
            Ok(Prepared {
                report: evidence_report(data, b, *method)?,
                format: output.format.unwrap_or(Format::Json),
                output: output.clone(),
            })
        }
        Command::Sweep {
            n,
            z,
            method,
            output,
        } => {
            let n = trials("--n", *n)?;
            let b = boundary(*z)?;
            Ok(Prepared {
                report: sweep_report(n, b, *method)?,
                format: output.format.unwrap_or(Format::Csv),
                output: output.clone(),
            })
        }
        Command::Converge {
            z,
            fraction,
            n_min,
            n_max,
            steps,
            spacing,
            n_grid: explicit,
            rounding,
            output,
        } => {
            let b = boundary(*z)?;
            if !(*fraction > 0.0 && fraction * b.z() < 1.0) {
                return Err(invalid("--fraction")(Error::InvalidFraction {
                    fraction: *fraction,
                    z: b.z(),
                }));
            }
            let grid = match explicit {
                Some(g) => {
                    if g.is_empty() || g[0] == 0 || g.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(invalid("--n-grid")(Error::InvalidGrid(
                            "sizes must be positive and strictly increasing".into(),
                        )));
                    }
                    g.clone()
                }
                None => {
                    trials("--n-min", *n_min)?;
                    let spacing = match spacing {
                        GridSpacing::Geometric => Spacing::Geometric,
                        GridSpacing::Linear => Spacing::Linear,
                    };
                    n_grid(*n_min, *n_max, *steps, spacing).map_err(invalid("--n-max"))?
                }
            };
            let rounding = match rounding {
                RoundingMode::Nearest => Rounding::NearestInteger,
                RoundingMode::Floor => Rounding::Floor,
            };
            let points = convergence_curve(b, *fraction, &grid, rounding)
                .map_err(invalid("--fraction"))?;
            let rows = points
                .iter()
                .map(|p| {
                    vec![
                        p.n.into(),
                        p.y_used.into(),
                        p.theta_target.into(),
                        p.w0_bayes.into(),
                        p.w0_lnml.into(),
                    ]
                })
                .collect();
            Ok(Prepared {
                report: Report::Table {
                    params: vec![
                        ("command", Cell::Text("converge")),
                        ("z", b.z().into()),
                        ("fraction", (*fraction).into()),
                    ],
                    columns: vec!["n", "y_used", "theta_target", "w0_bayes", "w0_lnml"],
                    rows,
                },
                format: output.format.unwrap_or(Format::Csv),
                output: output.clone(),
            })
        }
        Command::Divergence {
            z,
            n,
            n_min,
            n_max,
            pairing,
            output,
        } => {
            let b = boundary(*z)?;
            let pairing = match pairing {
                PairingArg::UniformLnml => Pairing::UniformLnml,
                PairingArg::JeffreysNml => Pairing::JeffreysNml,
            };
            match (n, n_min, n_max) {
                (Some(n), _, _) => {
                    let n = trials("--n", *n)?;
                    let r = divergence_scan_with(n, b, pairing)?;
                    let record = vec![
                        ("n", r.n.into()),
                        ("z", r.z.into()),
                        ("pairing", Cell::Text(pairing_name(pairing))),
                        ("count", (r.count() as u64).into()),
                        ("total", r.total().into()),
                        ("proportion", r.proportion().into()),
                        ("percent", Cell::Rounded(100.0 * r.proportion(), 1)),
                        ("max_w0_lnml_critical", r.max_w0_lnml_critical().into()),
                        ("min_w0_bayes_critical", r.min_w0_bayes_critical().into()),
                        ("reversed_count", (r.reversed().count() as u64).into()),
                        ("critical_y", Cell::Ints(r.critical_y())),
                    ];
                    Ok(Prepared {
                        report: Report::Record(record),
                        format: output.format.unwrap_or(Format::Json),
                        output: output.clone(),
                    })
                }
                (None, Some(lo), Some(hi)) => {
                    let lo = trials("--n-min", *lo)?;
                    if hi < &lo {
                        return Err(invalid("--n-max")(Error::InvalidGrid(format!(
                            "n_max {hi} < n_min {lo}"
                        ))));
                    }
                    let rows = divergence_region_with(b, lo, *hi, pairing)?
                        .into_iter()
                        .map(|r| {
                            vec![
                                r.n.into(),
                                r.min_critical_y.into(),
                                r.max_critical_y.into(),
                                (r.count as u64).into(),
                            ]
                        })
                        .collect();
                    Ok(Prepared {
                        report: Report::Table {
                            params: vec![
                                ("command", Cell::Text("divergence")),
                                ("z", b.z().into()),
                                ("pairing", Cell::Text(pairing_name(pairing))),
                            ],
                            columns: vec!["n", "min_critical_y", "max_critical_y", "count"],
                            rows,
                        },
                        format: output.format.unwrap_or(Format::Csv),
                        output: output.clone(),
                    })
                }
                _ => Err(CliError::Validation {
                    flag: "--n",
                    message: "give either --n or both --n-min and --n-max".into(),
                }),
            }
        }
        Command::Independence { n, z, output } => {
            let n = trials("--n", *n)?;
            let b = boundary(*z)?;
            let r = data_independence_check(n, b)?;
            let record = vec![
                ("n", r.n.into()),
                ("z", r.z.into()),
                ("holds", Cell::Bool(r.holds)),
                ("region_max_y", r.region_max_y.into()),
                ("region_size", r.region_size().into()),
                ("constant_w0_lnml", r.constant_w0.into()),
                ("max_relative_deviation", Cell::Rounded(r.max_relative_deviation, 17)),
            ];
            Ok(Prepared {
                report: Report::Record(record),
                format: output.format.unwrap_or(Format::Json),
                output: output.clone(),
            })
        }
    }
}

fn pairing_name(p: Pairing) -> &'static str {
    match p {
        Pairing::UniformLnml => "uniform-lnml",
        Pairing::JeffreysNml => "jeffreys-nml",
    }
}

fn evidence_report(data: BinomialData, b: Boundary, method: Method) -> Result<Report, CliError> {
    let mut rec: Record = vec![
        ("n", data.n().into()),
        ("y", data.y().into()),
        ("z", b.z().into()),
    ];
    if method.includes(Method::Bayes) {
        let r = bayes_factor_uniform(data, b)?;
        rec.push(("log_b01_uniform", r.log_b01.ln().into()));
        rec.push(("w0_bayes", r.w0.into()));
    }
    if method.includes(Method::BayesJeffreys) {
        let r = bayes_factor_jeffreys(data, b)?;
        rec.push(("log_b01_jeffreys", r.log_b01.ln().into()));
        rec.push(("w0_bayes_jeffreys", r.w0.into()));
    }
    for (m, luck, names) in [
        (
            Method::Lnml,
            LuckinessSpec::MatchedUniform,
            ["log_lnml0", "log_lnml1", "w0_lnml"],
        ),
        (
            Method::Nml,
            LuckinessSpec::Constant,
            ["log_nml0", "log_nml1", "w0_nml"],
        ),
    ] {
        if method.includes(m) {
            let e0 = lnml_evidence(data, Some(b), luck)?;
            let e1 = lnml_evidence(data, None, luck)?;
            let w = lnml_weights(data, b, luck)?;
            rec.push((names[0], e0.log_lnml.ln().into()));
            rec.push((names[1], e1.log_lnml.ln().into()));
            rec.push((names[2], w.w0.into()));
        }
    }
    Ok(Report::Record(rec))
}

fn sweep_report(n: u64, b: Boundary, method: Method) -> Result<Report, CliError> {
    let all = [
        (Method::Bayes, "w0_bayes"),
        (Method::Lnml, "w0_lnml"),
        (Method::Nml, "w0_nml"),
        (Method::BayesJeffreys, "w0_bayes_jeffreys"),
    ];
    let mut columns = vec!["y", "ml_estimate"];
    columns.extend(all.iter().filter(|(m, _)| method.includes(*m)).map(|(_, c)| *c));
    let rows = sweep_weights(n, b)?
        .into_iter()
        .map(|r| {
            let mut row: Vec<Cell> = vec![r.y.into(), r.ml_estimate.into()];
            for (m, _) in all {
                if method.includes(m) {
                    row.push(
                        match m {
                            Method::Bayes => r.w0_bayes,
                            Method::Lnml => r.w0_lnml,
                            Method::Nml => r.w0_nml,
                            _ => r.w0_bayes_jeffreys,
                        }
                        .into(),
                    );
                }
            }
            row
        })
        .collect();
    Ok(Report::Table {
        params: vec![
            ("command", Cell::Text("sweep")),
            ("n", n.into()),
            ("z", b.z().into()),
        ],
        columns,
        rows,
    })
}
