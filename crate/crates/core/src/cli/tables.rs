//! CSV schemas written by the commands and read back by `plotdata`.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::analytic::AnalyticCurve;
use crate::montecarlo::OutageEstimate;
use crate::numeric::linear_to_db;
use crate::selection::Scheme;

pub const SIMULATE_HEADER: [&str; 8] = [
    "scheme",
    "power_dbm",
    "rho",
    "p_outage",
    "ci95",
    "mean_gamma_s_db",
    "mean_b",
    "trials",
];

pub const ANALYTIC_HEADER: [&str; 6] = [
    "power_dbm",
    "rho",
    "p_outage_asymptotic",
    "p_outage_highsnr",
    "regime_flag",
    "diversity",
];

pub const TABLE1_HEADER: [&str; 4] = ["scheme", "power_dbm", "mean_b", "trials"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRow {
    pub scheme: String,
    pub power_dbm: f64,
    pub rho: f64,
    pub p_outage: f64,
    pub ci95: f64,
    pub mean_gamma_s_db: f64,
    pub mean_b: f64,
    pub trials: u64,
}

impl From<&OutageEstimate> for SimulateRow {
    fn from(e: &OutageEstimate) -> Self {
        Self {
            scheme: e.scheme.id().to_string(),
            power_dbm: e.power_dbm,
            rho: e.rho,
            p_outage: e.p_hat,
            ci95: e.ci95_halfwidth,
            mean_gamma_s_db: linear_to_db(e.mean_gamma_s),
            mean_b: e.mean_b,
            trials: e.trials,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticRow {
    pub power_dbm: f64,
    pub rho: f64,
    pub p_outage_asymptotic: f64,
    pub p_outage_highsnr: f64,
    pub regime_flag: bool,
    pub diversity: usize,
}

impl AnalyticRow {
    pub fn from_curve(power_dbm: &[f64], curve: &AnalyticCurve) -> Vec<Self> {
        power_dbm
            .iter()
            .enumerate()
            .map(|(i, &p)| Self {
                power_dbm: p,
                rho: curve.rho_grid[i],
                p_outage_asymptotic: curve.p_outage[i],
                p_outage_highsnr: curve.p_highsnr[i],
                regime_flag: curve.regime_violated[i],
                diversity: curve.diversity,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub scheme: String,
    pub power_dbm: f64,
    pub mean_b: f64,
    pub trials: u64,
}

pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// Serializes rows to an in-memory CSV string.
pub fn to_csv_string<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()))
}

/// A CSV produced by one of the commands.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Simulate(Vec<SimulateRow>),
    Analytic(Vec<AnalyticRow>),
}

fn has_columns(header: &csv::StringRecord, wanted: &[&str]) -> bool {
    wanted.iter().all(|w| header.iter().any(|h| h == *w))
}

/// Reads a CSV and identifies its schema from the header.
pub fn read_dataset<R: Read>(input: R, name: &str) -> Result<Dataset, CliError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("{name}: {e}")))?
        .clone();
    let bad = |e: csv::Error| CliError::Input(format!("{name}: {e}"));
    let dataset = if has_columns(&header, &SIMULATE_HEADER) {
        Dataset::Simulate(rdr.deserialize().collect::<Result<_, _>>().map_err(bad)?)
    } else if has_columns(&header, &ANALYTIC_HEADER) {
        Dataset::Analytic(rdr.deserialize().collect::<Result<_, _>>().map_err(bad)?)
    } else {
        let found: Vec<&str> = header.iter().collect();
        return Err(CliError::Input(format!(
            "{name}: missing columns; expected the simulate or analytic schema, found [{}]",
            found.join(",")
        )));
    };
    let empty = match &dataset {
        Dataset::Simulate(r) => r.is_empty(),
        Dataset::Analytic(r) => r.is_empty(),
    };
    if empty {
        return Err(CliError::Input(format!("{name}: no data rows")));
    }
    Ok(dataset)
}

/// The power-coefficient table: one row per scheme, one column per power.
pub fn format_table1(powers: &[f64], rows: &[(Scheme, Vec<f64>)]) -> String {
    let label_width = rows.iter().map(|(s, _)| s.label().len()).max().unwrap_or(0).max(18);
    let mut out = String::new();
    let _ = write!(out, "{:<label_width$}", "Transmit power P");
    for p in powers {
        let _ = write!(out, " {:>8}", format!("{p}dBm"));
    }
    out.push('\n');
    let _ = writeln!(out, "{}", "-".repeat(label_width + 9 * powers.len()));
    for (scheme, values) in rows {
        let _ = write!(out, "{:<label_width$}", scheme.label());
        for v in values {
            let _ = write!(out, " {v:>8.4}");
        }
        out.push('\n');
    }
    out
}
