//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when the report cannot be written, 2 when an
//! input fails validation (bad or unreadable prior, POVM, flag or dimension),
//! 3 when the verification suite reports a failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytic::{capacity_table, delta_f1, delta_f2, delta_i1, delta_i2, f_ap, CapacityRow};
use crate::error::{Error, Result};
use crate::infogain::{average_gain_with, fmt_f64, GainReport, GainSettings};
use crate::optimize::{purity_scan, schmidt_sweep_with, unit_grid, GainFunctional, SweepResult};
use crate::povm::{tetrahedron_povm, von_neumann_z, Povm};
use crate::priors::{
    prior_from_csv_path, prior_point_mass, prior_pure, prior_uniform_ball, IsotropicPrior,
};
use crate::quadrature::QuadratureOrders;
use crate::verify::{run_suite, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(
    name = "qel",
    version,
    about = "Information gain of measurements on qubit copies"
)]
pub struct Cli {
    /// Quadrature orders as `radial,mu,phi`; overrides QEL_QUAD_ORDERS.
    #[arg(long, global = true)]
    pub orders: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Average information gain of a measurement.
    Gain {
        /// `vonneumann`, `tetra` or `file:<path>`.
        #[arg(long)]
        povm: String,
        /// `pure`, `uniform`, `point:<b0>` or `table:<path>`.
        #[arg(long)]
        prior: String,
        /// Number of copies.
        #[arg(long)]
        n: usize,
    },
    /// Moments and closed-form gains of a prior.
    Moments {
        #[arg(long)]
        prior: String,
    },
    /// Gain of the Schmidt-state family over `p ∈ [0, 1]`.
    SchmidtSweep {
        #[arg(long)]
        prior: String,
        /// Odd number of evenly spaced points.
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Pure-state capacity table.
    Capacity {
        #[arg(long)]
        n_max: usize,
    },
    /// A closed-form gain over point-mass priors `b0 ∈ [0, 1]`.
    PurityScan {
        /// `di1`, `di2`, `df1` or `df2`.
        #[arg(long)]
        gain: String,
        #[arg(long, default_value_t = 11)]
        points: usize,
    },
    /// Run the verification suite.
    Verify,
}

/// Parses `pure | uniform | point:<b0> | table:<path>`.
pub fn parse_prior(spec: &str) -> Result<IsotropicPrior> {
    match spec.split_once(':') {
        None if spec == "pure" => Ok(prior_pure()),
        None if spec == "uniform" => Ok(prior_uniform_ball()),
        Some(("point", b0)) => {
            let b0 = b0
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad point-mass radius '{b0}'")))?;
            prior_point_mass(b0)
        }
        Some(("table", path)) => prior_from_csv_path(path),
        _ => Err(Error::Parse(format!(
            "unknown prior '{spec}', expected pure, uniform, point:<b0> or table:<path>"
        ))),
    }
}

/// Parses `vonneumann | tetra | file:<path>`.
pub fn parse_povm(spec: &str) -> Result<Povm> {
    match spec.split_once(':') {
        None if spec == "vonneumann" => Ok(von_neumann_z()),
        None if spec == "tetra" => Ok(tetrahedron_povm()),
        Some(("file", path)) => Povm::from_csv_path(path),
        _ => Err(Error::Parse(format!(
            "unknown POVM '{spec}', expected vonneumann, tetra or file:<path>"
        ))),
    }
}

/// `--orders`, then QEL_QUAD_ORDERS, then the defaults.
pub fn resolve_orders(flag: Option<&str>) -> Result<QuadratureOrders> {
    match flag {
        Some(s) => QuadratureOrders::from_str(s),
        None => QuadratureOrders::from_env(),
    }
}

/// Gain report plus the closed-form value for the built-in measurements.
#[derive(Debug, Serialize)]
struct GainOutput<'a> {
    prior: String,
    povm: &'a str,
    #[serde(flatten)]
    report: &'a GainReport,
    analytic_gain: Option<f64>,
}

#[derive(Debug, Serialize)]
struct MomentRow {
    alpha: f64,
    value: f64,
}

#[derive(Debug, Serialize)]
struct MomentsOutput {
    prior: String,
    moments: Vec<MomentRow>,
    f_ap: f64,
    delta_f1: f64,
    delta_f2: f64,
    delta_i1: f64,
    delta_i2: f64,
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn capacity_csv(rows: &[CapacityRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "gain_bits",
        "compressed_qubits",
        "bits_per_raw_qubit",
        "bits_per_compressed_qubit",
    ])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            fmt_f64(r.gain_bits),
            fmt_f64(r.compressed_qubits),
            fmt_f64(r.bits_per_raw_qubit),
            fmt_f64(r.bits_per_compressed_qubit),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn sweep_output(s: &SweepResult, x: &str, value: &str, format: Format) -> Result<String> {
    match format {
        Format::Csv => s.to_csv_with(x, value),
        Format::Json => to_json(s),
    }
}

/// Report text and whether the command succeeded.
pub struct Rendered {
    pub text: String,
    pub passed: bool,
}

/// Executes a parsed command and renders its report.
pub fn render(cli: &Cli) -> Result<Rendered> {
    let orders = resolve_orders(cli.orders.as_deref())?;
    let text = match &cli.command {
        Command::Gain { povm, prior, n } => {
            let m = parse_povm(povm)?;
            let p = parse_prior(prior)?.with_radial_nodes(orders.radial);
            let report = average_gain_with(&m, &p, *n, &GainSettings::with_orders(orders))?;
            match cli.format {
                Format::Csv => report.to_csv()?,
                Format::Json => {
                    let analytic_gain = match (povm.as_str(), *n) {
                        ("vonneumann", 1) => Some(delta_i1(&p)),
                        ("tetra", 2) => Some(delta_i2(&p)),
                        _ => None,
                    };
                    to_json(&GainOutput {
                        prior: p.describe(),
                        povm,
                        report: &report,
                        analytic_gain,
                    })?
                }
            }
        }
        Command::Moments { prior } => {
            let p = parse_prior(prior)?.with_radial_nodes(orders.radial);
            let out = MomentsOutput {
                prior: p.describe(),
                moments: [0.0, 0.5, 1.0, 1.5]
                    .into_iter()
                    .map(|alpha| MomentRow {
                        alpha,
                        value: p.moment(alpha),
                    })
                    .collect(),
                f_ap: f_ap(&p),
                delta_f1: delta_f1(&p),
                delta_f2: delta_f2(&p),
                delta_i1: delta_i1(&p),
                delta_i2: delta_i2(&p),
            };
            match cli.format {
                Format::Json => to_json(&out)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["quantity", "value"])?;
                    for m in &out.moments {
                        w.write_record([format!("I_{}", m.alpha), fmt_f64(m.value)])?;
                    }
                    for (name, v) in [
                        ("f_ap", out.f_ap),
                        ("delta_f1", out.delta_f1),
                        ("delta_f2", out.delta_f2),
                        ("delta_i1", out.delta_i1),
                        ("delta_i2", out.delta_i2),
                    ] {
                        w.write_record([name.to_string(), fmt_f64(v)])?;
                    }
                    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
                    String::from_utf8(bytes).expect("csv output is UTF-8")
                }
            }
        }
        Command::SchmidtSweep { prior, points } => {
            let p = parse_prior(prior)?;
            let s = schmidt_sweep_with(&p, *points, &orders)?;
            sweep_output(&s, "p", "gain_bits", cli.format)?
        }
        Command::Capacity { n_max } => {
            let rows = capacity_table(*n_max)?;
            match cli.format {
                Format::Csv => capacity_csv(&rows)?,
                Format::Json => to_json(&rows)?,
            }
        }
        Command::PurityScan { gain, points } => {
            let g: GainFunctional = gain.parse()?;
            if *points < 2 {
                return Err(Error::InvalidArgument(format!(
                    "purity scan needs at least 2 points, got {points}"
                )));
            }
            let s = purity_scan(g, &unit_grid(*points))?;
            sweep_output(&s, "b0", &g.to_string(), cli.format)?
        }
        Command::Verify => {
            let report = run_suite(cli.seed)?;
            let text = match cli.format {
                Format::Csv => report.to_table(),
                Format::Json => report.to_json()?,
            };
            return Ok(Rendered {
                text,
                passed: report.all_passed(),
            });
        }
    };
    Ok(Rendered { text, passed: true })
}

/// Writes through a temporary file in the target directory so that a
/// failed run never leaves a truncated report behind.
pub fn write_atomically(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let rendered = match render(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.output {
        Some(path) => write_atomically(path, &rendered.text),
        None => std::io::stdout()
            .write_all(rendered.text.as_bytes())
            .map_err(Error::from),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if rendered.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("verification failed");
        ExitCode::from(3)
    }
}
