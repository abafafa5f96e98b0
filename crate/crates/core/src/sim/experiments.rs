//! Experiment drivers: phase-budget curve, convergence trace, received-power
//! map and secrecy-rate-versus-distance sweep.

use serde::{Deserialize, Serialize};

use super::scenario::{mix_seed, ChannelMode, EvePlacement, Orientation, PlaneGrid, Scenario, Setup};
use super::table::{Cell, ResultTable};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::lc_model::{classify_range, max_phase_shift, LcParams};
use crate::linalg::{CMatrix, CVector, C64};
use crate::phase_opt::{neglect_baseline, optimize_phases, PhaseVector, RunStatus, SolveReport};
use crate::secrecy::{worst_case_secrecy_rate, AreaBox};

pub const PROVENANCE: &str = concat!("lcris-core v", env!("CARGO_PKG_VERSION"));

/// Power floor for the heat map, in dB.
pub const POWER_FLOOR_DB: f64 = -300.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    /// Temperature-aware design with the true phase budget.
    Optimized,
    /// Full-range design saturated at the true budget afterwards.
    Neglect,
}

impl Design {
    pub fn as_str(self) -> &'static str {
        match self {
            Design::Optimized => "optimized",
            Design::Neglect => "neglect",
        }
    }
}

impl std::str::FromStr for Design {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimized" | "o" => Ok(Design::Optimized),
            "neglect" | "n" => Ok(Design::Neglect),
            other => Err(Error::InvalidParameter(format!(
                "design must be optimized or neglect, got {other:?}"
            ))),
        }
    }
}

/// Design report plus its evaluation on the scenario's evaluation channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOutcome {
    pub design: Design,
    pub scenario_hash: String,
    pub seed: u64,
    pub provenance: String,
    pub eval_channel_mode: ChannelMode,
    /// Worst-case secrecy rate on the evaluation channels.
    pub eval_secrecy_rate_bits: f64,
    pub report: SolveReport,
}

fn stamp(table: &mut ResultTable, scenario: &Scenario, experiment: &str) {
    table.set_meta("experiment", experiment);
    table.set_meta("scenario_hash", scenario.hash());
    table.set_meta("seed", scenario.seed.to_string());
    table.set_meta("provenance", PROVENANCE);
}

#[cfg(feature = "parallel")]
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Phase budget and regime over a list of temperatures.
pub fn run_lc_curve(lc: &LcParams, temperatures: &[f64]) -> Result<ResultTable> {
    lc.validate()?;
    if temperatures.is_empty() {
        return Err(Error::Empty("temperature list"));
    }
    let mut table = ResultTable::new(&["T_celsius", "omega_max_rad", "range_class"]);
    for &t in temperatures {
        let w = max_phase_shift(lc, t)?;
        table.push_row(vec![t.into(), w.into(), classify_range(w).regime.as_str().into()])?;
    }
    table.set_meta("experiment", "lc-curve");
    table.set_meta("provenance", PROVENANCE);
    Ok(table)
}

fn design_report(scenario: &Scenario, setup: &Setup, design: Design) -> Result<SolveReport> {
    let problem = setup.design_problem(scenario, setup.omega_max)?;
    let opts = scenario.optimizer_options();
    match design {
        Design::Optimized => optimize_phases(&problem, &opts),
        Design::Neglect => neglect_baseline(&problem, &opts),
    }
}

fn evaluate(scenario: &Scenario, setup: &Setup, phases: &PhaseVector) -> Result<f64> {
    let inst = setup.channels(scenario, scenario.eval_channel_mode, scenario.seed)?;
    worst_case_secrecy_rate(&inst, &phases.omega, &setup.beamformer.q)
}

pub fn run_optimize(scenario: &Scenario, design: Design) -> Result<OptimizeOutcome> {
    let setup = scenario.setup()?;
    let report = design_report(scenario, &setup, design)?;
    let eval_secrecy_rate_bits = evaluate(scenario, &setup, &report.final_phases)?;
    Ok(OptimizeOutcome {
        design,
        scenario_hash: scenario.hash(),
        seed: scenario.seed,
        provenance: PROVENANCE.to_string(),
        eval_channel_mode: scenario.eval_channel_mode,
        eval_secrecy_rate_bits,
        report,
    })
}

/// Per-subproblem rank gap and range violations of the temperature-aware design.
pub fn run_convergence(scenario: &Scenario) -> Result<(ResultTable, SolveReport)> {
    let setup = scenario.setup()?;
    let report = design_report(scenario, &setup, Design::Optimized)?;
    let mut table = ResultTable::new(&["outer_iter", "inner_iter", "gap", "n_false", "gamma"]);
    for r in &report.iterations {
        table.push_row(vec![
            r.outer.into(),
            r.inner.into(),
            r.gap.into(),
            r.n_false.into(),
            r.gamma.into(),
        ])?;
    }
    stamp(&mut table, scenario, "convergence");
    table.set_meta("status", status_str(report.status));
    table.set_meta("final_gamma", format!("{}", report.final_gamma));
    table.set_meta("secrecy_rate_bits", format!("{}", report.secrecy_rate_bits));
    Ok((table, report))
}

/// Received-power evaluator for fixed phases: `|h_eff(p)ᴴ q|²` at any point.
pub struct PowerProbe<'a> {
    scenario: &'a Scenario,
    setup: &'a Setup,
    /// `Γ H_t q`, the field leaving the RIS.
    reflected: CVector,
}

impl<'a> PowerProbe<'a> {
    pub fn new(scenario: &'a Scenario, setup: &'a Setup, phases: &PhaseVector) -> Result<Self> {
        let n = setup.ris.len();
        if phases.len() != n {
            return Err(Error::DimensionMismatch {
                context: "phase vector",
                expected: n,
                got: phases.len(),
            });
        }
        let h_t: CMatrix = setup.bs_to_ris(scenario, scenario.eval_channel_mode, scenario.seed)?;
        let w = h_t * &setup.beamformer.q;
        let reflected = CVector::from_iterator(
            n,
            w.iter().zip(&phases.omega).map(|(x, &ph)| x * C64::from_polar(1.0, ph)),
        );
        Ok(Self {
            scenario,
            setup,
            reflected,
        })
    }

    /// Received power in watts.
    pub fn power(&self, p: &Vec3) -> Result<f64> {
        let seed = mix_seed(
            mix_seed(self.scenario.seed, p.x.to_bits()),
            p.y.to_bits() ^ p.z.to_bits().rotate_left(17),
        );
        let h_r = self
            .setup
            .ris_to_point(self.scenario, p, self.scenario.eval_channel_mode, seed)?;
        Ok(h_r.dotc(&self.reflected).norm_sqr())
    }
}

fn to_db(p: f64) -> f64 {
    if p > 0.0 {
        (10.0 * p.log10()).max(POWER_FLOOR_DB)
    } else {
        POWER_FLOOR_DB
    }
}

/// Received power in dB (relative to 1 W) on a horizontal plane.
pub fn run_heatmap(scenario: &Scenario, phases: &PhaseVector, plane: &PlaneGrid) -> Result<ResultTable> {
    let problems = plane.validate();
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    let setup = scenario.setup()?;
    let probe = PowerProbe::new(scenario, &setup, phases)?;
    let points: Vec<Vec3> = plane
        .xs()
        .into_iter()
        .flat_map(|x| plane.ys().into_iter().map(move |y| (x, y)))
        .map(|(x, y)| Vec3::new(x, y, plane.z))
        .collect();
    let powers = par_map(&points, |p| probe.power(p));
    let mut table = ResultTable::new(&["x", "y", "power_dB"]);
    for (p, power) in points.iter().zip(powers) {
        table.push_row(vec![p.x.into(), p.y.into(), to_db(power?).into()])?;
    }
    stamp(&mut table, scenario, "heatmap");
    Ok(table)
}

/// Mean received power (watts) over a `samples × samples` lattice of `area`.
pub fn mean_power_over(scenario: &Scenario, phases: &PhaseVector, area: &AreaBox, samples: usize) -> Result<f64> {
    let setup = scenario.setup()?;
    let probe = PowerProbe::new(scenario, &setup, phases)?;
    let lattice = AreaBox {
        grid: [samples.max(1), samples.max(1)],
        ..*area
    }
    .lattice(crate::secrecy::AreaLabel::EveArea);
    let total = lattice
        .points
        .iter()
        .map(|p| probe.power(p))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .sum::<f64>();
    Ok(total / lattice.points.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub distance: f64,
    pub orientation: Orientation,
    pub sr_optimized_bits: f64,
    pub sr_neglect_bits: f64,
    pub status_optimized: RunStatus,
    pub status_neglect: RunStatus,
}

/// Least favorable of several run statuses: diverged, then capped, then converged.
pub fn combined_status(statuses: impl IntoIterator<Item = RunStatus>) -> RunStatus {
    statuses
        .into_iter()
        .fold(RunStatus::Converged, |acc, s| match (acc, s) {
            (RunStatus::Diverged, _) | (_, RunStatus::Diverged) => RunStatus::Diverged,
            (RunStatus::IterationCap, _) | (_, RunStatus::IterationCap) => RunStatus::IterationCap,
            _ => RunStatus::Converged,
        })
}

pub fn status_str(status: RunStatus) -> &'static str {
    match status {
        RunStatus::Converged => "converged",
        RunStatus::IterationCap => "iteration_cap",
        RunStatus::Diverged => "diverged",
    }
}

/// Secrecy rate of both designs as the eavesdropper area moves away.
pub fn run_distance_sweep(scenario: &Scenario, orientation: Orientation, distances: &[f64]) -> Result<ResultTable> {
    if distances.is_empty() {
        return Err(Error::Empty("distance list"));
    }
    if let Some(d) = distances.iter().find(|d| !(**d > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "sweep distances must be positive, got {d}"
        )));
    }
    let points = par_map(distances, |&gap_m| -> Result<SweepPoint> {
        let s = scenario.with_eve_placement(EvePlacement { orientation, gap_m });
        s.validate()?;
        let setup = s.setup()?;
        let opt = design_report(&s, &setup, Design::Optimized)?;
        let neg = design_report(&s, &setup, Design::Neglect)?;
        let point = SweepPoint {
            distance: gap_m,
            orientation,
            sr_optimized_bits: evaluate(&s, &setup, &opt.final_phases)?,
            sr_neglect_bits: evaluate(&s, &setup, &neg.final_phases)?,
            status_optimized: opt.status,
            status_neglect: neg.status,
        };
        log::info!(
            "sweep {} d={gap_m}: optimized {:.4} bits, neglect {:.4} bits",
            orientation.as_str(),
            point.sr_optimized_bits,
            point.sr_neglect_bits
        );
        Ok(point)
    });
    let points = points.into_iter().collect::<Result<Vec<_>>>()?;
    let mut table = ResultTable::new(&["distance", "orientation", "sr_optimized_bits", "sr_neglect_bits"]);
    for p in &points {
        table.push_row(vec![
            p.distance.into(),
            Cell::Text(p.orientation.as_str().into()),
            p.sr_optimized_bits.into(),
            p.sr_neglect_bits.into(),
        ])?;
    }
    stamp(&mut table, scenario, "sweep");
    let status = combined_status(points.iter().flat_map(|p| [p.status_optimized, p.status_neglect]));
    table.set_meta("status", status_str(status));
    Ok(table)
}
