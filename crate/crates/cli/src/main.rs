//! `lcris`: command-line driver for the LC-RIS secrecy experiments.
//!
//! Every subcommand writes a CSV table (with a `#` metadata header) to
//! `--out` and a JSON companion next to it. Exit status is 0 when every
//! optimizer run converged, 2 when one hit its iteration cap and 1 on error.
//! Log verbosity follows `LCRIS_LOG` (`error`, `warn`, `info`, `debug`, `trace`).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lcris_core::phase_opt::{PhaseVector, RunStatus};
use lcris_core::sim::{
    combined_status, run_convergence, run_distance_sweep, run_heatmap, run_lc_curve, run_optimize, status_str, Cell,
    Design, Orientation, ResultTable, Scenario, PROVENANCE,
};
use serde_json::json;
use thiserror::Error;

const LOG_ENV: &str = "LCRIS_LOG";

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] lcris_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("optimizer diverged; partial results were written")]
    Diverged,
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "lcris", version, about = "Temperature-aware secrecy phase design for LC-RIS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// CSV output path; the JSON companion uses the same stem.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DesignArg {
    Optimized,
    Neglect,
}

impl From<DesignArg> for Design {
    fn from(d: DesignArg) -> Self {
        match d {
            DesignArg::Optimized => Design::Optimized,
            DesignArg::Neglect => Design::Neglect,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrientationArg {
    H,
    V,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::H => Orientation::Horizontal,
            OrientationArg::V => Orientation::Vertical,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Phase budget and regime versus temperature.
    LcCurve {
        #[command(flatten)]
        common: Common,
        /// Comma-separated temperatures in °C (default 0..=120 in 1 °C steps).
        #[arg(long, value_delimiter = ',')]
        temps: Option<Vec<f64>>,
    },
    /// Run one design and write the phases.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "optimized")]
        design: DesignArg,
    },
    /// Per-subproblem rank gap, range violations and gamma.
    Convergence {
        #[command(flatten)]
        common: Common,
    },
    /// Received power on the scenario's heat-map plane.
    Heatmap {
        #[command(flatten)]
        common: Common,
        /// Design to compute when `--phases` is not given.
        #[arg(long, value_enum, default_value = "optimized")]
        design: DesignArg,
        /// Phases from a previous `optimize` run (its CSV or JSON output).
        #[arg(long)]
        phases: Option<PathBuf>,
        /// Overrides the plane resolution in meters.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Secrecy rate of both designs versus eavesdropper distance.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "h")]
        orientation: OrientationArg,
        /// Comma-separated nearest-point gaps in meters.
        #[arg(long, value_delimiter = ',', required = true)]
        distances: Vec<f64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or(LOG_ENV, "warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(RunStatus::Converged) => ExitCode::SUCCESS,
        Ok(RunStatus::IterationCap) => {
            log::warn!("iteration cap reached before convergence");
            ExitCode::from(2)
        }
        Ok(RunStatus::Diverged) => {
            eprintln!("error: {}", CliError::Diverged);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_scenario(common: &Common, required: bool) -> CliResult<Scenario> {
    let mut scenario = match &common.scenario {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Scenario::from_json_str(&text)?
        }
        None if required => return Err(CliError::Usage("--scenario is required for this subcommand".into())),
        None => Scenario::paper(),
    };
    if let Some(seed) = common.seed {
        scenario.seed = seed;
    }
    Ok(scenario)
}

/// `out` itself for the CSV; same stem with `.json` for the companion.
fn output_paths(out: &Path) -> (PathBuf, PathBuf) {
    let json = out.with_extension("json");
    if json == out {
        (out.with_extension("csv"), json)
    } else {
        (out.to_path_buf(), json)
    }
}

fn write_outputs(out: &Path, table: &ResultTable, extra: serde_json::Value) -> CliResult<()> {
    let (csv_path, json_path) = output_paths(out);
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    let csv = table.to_csv_string()?;
    std::fs::write(&csv_path, csv).map_err(io(&csv_path))?;
    let mut doc = table.to_json_value();
    if let (Some(obj), serde_json::Value::Object(extra)) = (doc.as_object_mut(), extra) {
        obj.extend(extra);
    }
    let text = serde_json::to_string_pretty(&doc).map_err(lcris_core::Error::from)?;
    std::fs::write(&json_path, text + "\n").map_err(io(&json_path))?;
    log::info!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn run(command: Command) -> CliResult<RunStatus> {
    match command {
        Command::LcCurve { common, temps } => {
            let scenario = load_scenario(&common, false)?;
            let temps = temps.unwrap_or_else(|| (0..=120).map(f64::from).collect());
            let mut table = run_lc_curve(&scenario.lc, &temps)?;
            table.set_meta("seed", scenario.seed.to_string());
            table.set_meta("scenario_hash", scenario.hash());
            write_outputs(&common.out, &table, json!({}))?;
            Ok(RunStatus::Converged)
        }
        Command::Optimize { common, design } => {
            let scenario = load_scenario(&common, true)?;
            let outcome = run_optimize(&scenario, design.into())?;
            let report = &outcome.report;
            let mut table = ResultTable::new(&["element", "omega_rad"]);
            for (i, &w) in report.final_phases.omega.iter().enumerate() {
                table.push_row(vec![i.into(), w.into()])?;
            }
            table.set_meta("experiment", "optimize");
            table.set_meta("design", outcome.design.as_str());
            table.set_meta("scenario_hash", outcome.scenario_hash.clone());
            table.set_meta("seed", outcome.seed.to_string());
            table.set_meta("provenance", outcome.provenance.clone());
            table.set_meta("status", status_str(report.status));
            table.set_meta("omega_max_rad", report.omega_max.to_string());
            table.set_meta("design_secrecy_rate_bits", report.secrecy_rate_bits.to_string());
            table.set_meta("eval_secrecy_rate_bits", outcome.eval_secrecy_rate_bits.to_string());
            table.set_meta("n_false", report.final_n_false.to_string());
            write_outputs(&common.out, &table, json!({ "outcome": outcome }))?;
            Ok(report.status)
        }
        Command::Convergence { common } => {
            let scenario = load_scenario(&common, true)?;
            let (table, report) = run_convergence(&scenario)?;
            write_outputs(&common.out, &table, json!({ "gamma_trace": report.gamma_trace }))?;
            Ok(report.status)
        }
        Command::Heatmap {
            common,
            design,
            phases,
            step,
        } => {
            let scenario = load_scenario(&common, true)?;
            let mut plane = scenario.heatmap;
            if let Some(step) = step {
                plane.step = step;
            }
            let (phase_vec, status, source) = match phases {
                Some(path) => (read_phases(&path)?, RunStatus::Converged, path.display().to_string()),
                None => {
                    let outcome = run_optimize(&scenario, design.into())?;
                    let status = outcome.report.status;
                    (
                        outcome.report.final_phases,
                        status,
                        Design::from(design).as_str().to_string(),
                    )
                }
            };
            let mut table = run_heatmap(&scenario, &phase_vec, &plane)?;
            table.set_meta("phases", source);
            table.set_meta("status", status_str(status));
            write_outputs(&common.out, &table, json!({ "phases_rad": phase_vec.omega }))?;
            Ok(status)
        }
        Command::Sweep {
            common,
            orientation,
            distances,
        } => {
            let scenario = load_scenario(&common, true)?;
            let table = run_distance_sweep(&scenario, orientation.into(), &distances)?;
            let status = match table.meta("status") {
                Some("converged") => RunStatus::Converged,
                Some("iteration_cap") => RunStatus::IterationCap,
                _ => RunStatus::Diverged,
            };
            write_outputs(&common.out, &table, json!({}))?;
            Ok(combined_status([status]))
        }
    }
}

/// Reads phases from an `optimize` output: the JSON companion or the CSV.
fn read_phases(path: &Path) -> CliResult<PhaseVector> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |msg: &str| CliError::Usage(format!("{}: {msg}", path.display()));
    let table: ResultTable = if text.trim_start().starts_with('{') {
        let doc: serde_json::Value = serde_json::from_str(&text).map_err(lcris_core::Error::from)?;
        let columns: Vec<String> = serde_json::from_value(doc["columns"].clone()).map_err(lcris_core::Error::from)?;
        let rows: Vec<Vec<Cell>> = serde_json::from_value(doc["rows"].clone()).map_err(lcris_core::Error::from)?;
        ResultTable {
            columns,
            rows,
            metadata: Vec::new(),
        }
    } else {
        let mut lines = text.lines().filter(|l| !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| bad("empty phase file"))?;
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let rows = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split(',')
                    .map(|c| {
                        c.parse::<f64>()
                            .map(Cell::Num)
                            .unwrap_or_else(|_| Cell::Text(c.to_string()))
                    })
                    .collect()
            })
            .collect();
        ResultTable {
            columns,
            rows,
            metadata: Vec::new(),
        }
    };
    let omega = table
        .column("omega_rad")
        .ok_or_else(|| bad("no omega_rad column; expected output of `lcris optimize`"))?;
    if omega.is_empty() {
        return Err(bad("no phases"));
    }
    log::debug!("loaded {} phases ({PROVENANCE})", omega.len());
    Ok(PhaseVector { omega })
}
