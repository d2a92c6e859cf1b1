//! Command-line front end.
//!
//! Every command writes its primary output plus a TOML manifest beside it
//! (see [`manifest::RunManifest::path_for`]); `rerun` replays a manifest and
//! reproduces the CSV byte for byte.
//!
//! Exit codes: 0 success, 2 input error, 3 I/O error.

pub mod config_file;
pub mod manifest;
pub mod plot;
pub mod tables;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::analytic::AnalyticCurve;
use crate::montecarlo::{run_plan, ExperimentPlan, OutageEstimate, Pairing};
use crate::selection::Scheme;
use config_file::ScenarioFile;
use manifest::RunManifest;
use tables::{AnalyticRow, SimulateRow, Table1Row};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    /// Malformed config, flags or input data.
    #[error("input error: {0}")]
    Input(String),
    /// An output could not be written.
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    /// The message without the category prefix.
    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Io(m) => m,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub const DEFAULT_SEED: u64 = 1;
pub const TABLE1_GRID_DBM: [f64; 5] = [0.0, 5.0, 10.0, 15.0, 20.0];
pub const TABLE1_SCHEMES: [Scheme; 4] = [Scheme::Random, Scheme::MaxMin, Scheme::Es, Scheme::SjAs];

/// Transmit powers in dBm, written `start:stop:step` (inclusive) or `a,b,c`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerGrid(pub Vec<f64>);

impl FromStr for PowerGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| -> Result<f64, String> {
            let v: f64 = t.trim().parse().map_err(|_| format!("'{t}' is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("'{t}' is not finite"))
            }
        };
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [start, stop, step] = parts.as_slice() else {
                return Err("range must be start:stop:step".into());
            };
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 || stop < start {
                return Err("range needs step > 0 and stop >= start".into());
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            if n > 100_000 {
                return Err("range has too many points".into());
            }
            return Ok(Self((0..=n).map(|i| start + i as f64 * step).collect()));
        }
        let values = s.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err("powers must be strictly increasing".into());
        }
        Ok(Self(values))
    }
}

/// Comma-separated scheme ids, or `all`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeList(pub Vec<Scheme>);

impl FromStr for SchemeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "all" {
            return Ok(Self(Scheme::ALL.to_vec()));
        }
        let mut out = Vec::new();
        for part in s.split(',') {
            let scheme: Scheme = part.trim().parse().map_err(|e: crate::Error| e.to_string())?;
            if out.contains(&scheme) {
                return Err(format!("scheme '{scheme}' listed twice"));
            }
            out.push(scheme);
        }
        Ok(Self(out))
    }
}

#[derive(Debug, Parser)]
#[command(name = "crnoma", version, about = "Antenna selection and outage analysis for MIMO CR-NOMA downlinks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo outage, SU SNR and power split per scheme and power.
    Simulate(SimulateArgs),
    /// Closed-form and high-SNR outage over a power grid.
    Analytic(AnalyticArgs),
    /// Mean SU power coefficient for all four schemes at 0..20 dBm.
    Table1(Table1Args),
    /// gnuplot scripts and data files from simulate/analytic CSVs.
    Plotdata(PlotdataArgs),
    /// Replays a run manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file (`key = value` lines).
    pub config: PathBuf,
    #[arg(long, default_value = "all")]
    pub schemes: SchemeList,
    #[arg(long, default_value = "0:20:5")]
    pub power_grid: PowerGrid,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, env = "CRNOMA_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    pub config: PathBuf,
    #[arg(long, default_value = "0:30:1")]
    pub power_grid: PowerGrid,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    pub config: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, env = "CRNOMA_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    /// CSVs written by `simulate` or `analytic`.
    #[arg(long, num_args = 1.., required = true)]
    pub from: Vec<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    pub manifest: PathBuf,
    /// Write here instead of the manifest's recorded output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
///
/// Returns the process exit code; diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("crnoma: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(a) => {
            let scenario = ScenarioFile::load(&a.config)?;
            simulate(&scenario, &a.schemes.0, &a.power_grid.0, a.trials, a.seed, a.workers, &a.out)?;
        }
        Command::Analytic(a) => {
            let scenario = ScenarioFile::load(&a.config)?;
            analytic(&scenario, &a.power_grid.0, &a.out)?;
        }
        Command::Table1(a) => {
            let scenario = ScenarioFile::load(&a.config)?;
            let text = table1(&scenario, a.trials, a.seed, a.workers, &a.out)?;
            print!("{text}");
        }
        Command::Plotdata(a) => {
            let slopes = plotdata(&a.from, &a.out)?;
            for s in slopes {
                match s.slope {
                    Some(v) => println!("{}: top-decade slope {v:.3}", s.series),
                    None => println!("{}: top-decade slope unavailable", s.series),
                }
            }
        }
        Command::Rerun(a) => rerun(&a.manifest, a.out.as_deref())?,
    }
    Ok(())
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn plan_for(
    scenario: &ScenarioFile,
    schemes: &[Scheme],
    grid: &[f64],
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<ExperimentPlan, CliError> {
    let resolved = scenario.resolve()?;
    let plan = ExperimentPlan {
        config: resolved.config,
        budget: resolved.budget,
        power_grid_dbm: grid.to_vec(),
        schemes: schemes.to_vec(),
        trials,
        master_seed: seed,
        pairing: Pairing::Paired,
        workers,
    };
    plan.validate()?;
    Ok(plan)
}

/// Runs the Monte Carlo plan, writes the CSV and its manifest.
pub fn simulate(
    scenario: &ScenarioFile,
    schemes: &[Scheme],
    grid: &[f64],
    trials: u64,
    seed: u64,
    workers: Option<usize>,
    out: &Path,
) -> Result<Vec<OutageEstimate>, CliError> {
    let plan = plan_for(scenario, schemes, grid, trials, seed, workers)?;
    let estimates = run_plan(&plan)?;
    let rows: Vec<SimulateRow> = estimates.iter().map(SimulateRow::from).collect();
    write_file(out, tables::to_csv_string(&rows)?.as_bytes())?;

    let mut m = RunManifest::new("simulate", out);
    m.master_seed = Some(seed);
    m.trials = Some(trials);
    m.power_grid_dbm = grid.to_vec();
    m.schemes = schemes.iter().map(|s| s.id().to_string()).collect();
    m.config = Some(scenario.clone());
    m.write_beside(out)?;
    Ok(estimates)
}

/// Evaluates the analytic curve, writes the CSV and its manifest.
pub fn analytic(scenario: &ScenarioFile, grid: &[f64], out: &Path) -> Result<AnalyticCurve, CliError> {
    if grid.is_empty() {
        return Err(CliError::Input("power grid is empty".into()));
    }
    let resolved = scenario.resolve()?;
    let rho: Vec<f64> = grid.iter().map(|&p| resolved.budget.rho_at(p)).collect();
    let curve = AnalyticCurve::evaluate(&resolved.config, &rho)?;
    let rows = AnalyticRow::from_curve(grid, &curve);
    write_file(out, tables::to_csv_string(&rows)?.as_bytes())?;

    let mut m = RunManifest::new("analytic", out);
    m.power_grid_dbm = grid.to_vec();
    m.config = Some(scenario.clone());
    m.write_beside(out)?;
    Ok(curve)
}

/// Mean power coefficient per scheme on the fixed 0..20 dBm grid.
///
/// Writes the long-form CSV and manifest; returns the formatted table.
pub fn table1(
    scenario: &ScenarioFile,
    trials: u64,
    seed: u64,
    workers: Option<usize>,
    out: &Path,
) -> Result<String, CliError> {
    let plan = plan_for(scenario, &TABLE1_SCHEMES, &TABLE1_GRID_DBM, trials, seed, workers)?;
    let estimates = run_plan(&plan)?;
    let rows: Vec<Table1Row> = estimates
        .iter()
        .map(|e| Table1Row {
            scheme: e.scheme.id().to_string(),
            power_dbm: e.power_dbm,
            mean_b: e.mean_b,
            trials: e.trials,
        })
        .collect();
    write_file(out, tables::to_csv_string(&rows)?.as_bytes())?;

    let mut m = RunManifest::new("table1", out);
    m.master_seed = Some(seed);
    m.trials = Some(trials);
    m.power_grid_dbm = TABLE1_GRID_DBM.to_vec();
    m.schemes = TABLE1_SCHEMES.iter().map(|s| s.id().to_string()).collect();
    m.config = Some(scenario.clone());
    m.write_beside(out)?;

    let by_scheme: Vec<(Scheme, Vec<f64>)> = TABLE1_SCHEMES
        .iter()
        .map(|&s| {
            let values = estimates.iter().filter(|e| e.scheme == s).map(|e| e.mean_b).collect();
            (s, values)
        })
        .collect();
    Ok(tables::format_table1(&TABLE1_GRID_DBM, &by_scheme))
}

/// Reads the given CSVs and writes the plot bundle into `out_dir`.
pub fn plotdata(inputs: &[PathBuf], out_dir: &Path) -> Result<Vec<plot::SeriesSlope>, CliError> {
    if inputs.is_empty() {
        return Err(CliError::Input("no input CSVs given".into()));
    }
    let mut datasets = Vec::with_capacity(inputs.len());
    for path in inputs {
        let name = path.display().to_string();
        let file = fs::File::open(path).map_err(|e| CliError::Input(format!("cannot read {name}: {e}")))?;
        datasets.push((name.clone(), tables::read_dataset(file, &name)?));
    }
    let (bundle, slopes) = plot::build_bundle(&datasets)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    for (name, contents) in &bundle.files {
        write_file(&out_dir.join(name), contents.as_bytes())?;
    }

    let mut m = RunManifest::new("plotdata", out_dir);
    m.inputs = inputs.iter().map(|p| p.display().to_string()).collect();
    m.write_beside(out_dir)?;
    Ok(slopes)
}

fn required<T>(value: Option<T>, what: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Input(format!("manifest has no {what}")))
}

/// Replays a manifest, writing to `out` or to the recorded output path.
pub fn rerun(manifest_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let m = RunManifest::load(manifest_path)?;
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&m.output));
    let schemes = || -> Result<Vec<Scheme>, CliError> {
        m.schemes
            .iter()
            .map(|s| s.parse().map_err(|e: crate::Error| CliError::Input(e.to_string())))
            .collect()
    };
    match m.command.as_str() {
        "simulate" => {
            let config = required(m.config.clone(), "config")?;
            let seed = required(m.master_seed, "master_seed")?;
            let trials = required(m.trials, "trials")?;
            simulate(&config, &schemes()?, &m.power_grid_dbm, trials, seed, None, &out)?;
        }
        "analytic" => {
            let config = required(m.config.clone(), "config")?;
            analytic(&config, &m.power_grid_dbm, &out)?;
        }
        "table1" => {
            let config = required(m.config.clone(), "config")?;
            let seed = required(m.master_seed, "master_seed")?;
            let trials = required(m.trials, "trials")?;
            print!("{}", table1(&config, trials, seed, None, &out)?);
        }
        "plotdata" => {
            let inputs: Vec<PathBuf> = m.inputs.iter().map(PathBuf::from).collect();
            plotdata(&inputs, &out)?;
        }
        other => return Err(CliError::Input(format!("unknown command '{other}' in manifest"))),
    }
    Ok(())
}
