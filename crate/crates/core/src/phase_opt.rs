//! Temperature-aware phase design: penalty continuation on the lifted Gram
//! matrix with a linearized spectral norm, the convex phase-range
//! constraints, closed-form `γ` updates and rank-one phase extraction.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ChannelInstance, QuadraticForm, Receiver};
use crate::lc_model::{classify_range, RangeRegime};
use crate::linalg::{frob_norm_sq, phasor_vector, CMatrix, CVector, HermitianEigen, C64};
use crate::sdp::{self, SdpConfig, SdpProblem, SdpStatus, TraceInequality};
use crate::secrecy::gamma_update;

/// RIS phase shifts in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    pub omega: Vec<f64>,
}

impl PhaseVector {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn phasors(&self) -> CVector {
        phasor_vector(&self.omega)
    }

    pub fn count_above(&self, omega_max: f64) -> usize {
        self.omega.iter().filter(|&&w| w > omega_max).count()
    }
}

/// Penalty continuation and stopping parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PenaltySchedule {
    pub eta0: f64,
    pub multiplier: f64,
    #[serde(alias = "I_max")]
    pub max_inner: usize,
    #[serde(alias = "J_max")]
    pub max_outer: usize,
    /// Inner stop on `‖S⁽ⁱ⁾ − S⁽ⁱ⁻¹⁾‖²_F`.
    #[serde(alias = "eps1")]
    pub eps_change: f64,
    /// Outer stop on `|log₂γ⁽ʲ⁾ − log₂γ⁽ʲ⁻¹⁾|`.
    #[serde(alias = "eps2")]
    pub eps_gamma: f64,
    pub gamma0: f64,
}

impl Default for PenaltySchedule {
    fn default() -> Self {
        Self {
            eta0: 0.01,
            multiplier: 5.0,
            max_inner: 12,
            max_outer: 4,
            eps_change: 0.01,
            eps_gamma: 0.1,
            gamma0: 1e3,
        }
    }
}

impl PenaltySchedule {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.eta0 > 0.0) {
            problems.push(format!("schedule.eta0 must be positive, got {}", self.eta0));
        }
        if !(self.multiplier > 1.0) {
            problems.push(format!("schedule.multiplier must exceed 1, got {}", self.multiplier));
        }
        if self.max_inner == 0 || self.max_outer == 0 {
            problems.push("schedule.max_inner and schedule.max_outer must be at least 1".into());
        }
        if !(self.eps_change > 0.0) || !(self.eps_gamma > 0.0) {
            problems.push("schedule tolerances must be positive".into());
        }
        if !(self.gamma0 > 0.0) {
            problems.push(format!("schedule.gamma0 must be positive, got {}", self.gamma0));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

/// Affine minorant `constant + Re tr(gradient · S)` of `‖S‖₂` around a point.
#[derive(Debug, Clone)]
pub struct SpectralLinearization {
    /// Unit principal eigenvector `λ_max`.
    pub direction: CVector,
    /// `λ_max λ_maxᴴ`.
    pub gradient: CMatrix,
    /// `‖S_prev‖₂ − λ_maxᴴ S_prev λ_max`.
    pub constant: f64,
    pub spectral_norm: f64,
}

impl SpectralLinearization {
    pub fn evaluate(&self, s: &CMatrix) -> f64 {
        let v = &self.direction;
        self.constant + (v.adjoint() * s * v)[(0, 0)].re
    }
}

pub fn spectral_linearization(s_prev: &CMatrix) -> Result<SpectralLinearization> {
    let eig = HermitianEigen::new(s_prev)?;
    let (_, direction) = eig.principal();
    let spectral_norm = eig.spectral_norm();
    let quad = (direction.adjoint() * s_prev * &direction)[(0, 0)].re;
    Ok(SpectralLinearization {
        gradient: &direction * direction.adjoint(),
        direction,
        constant: spectral_norm - quad,
        spectral_norm,
    })
}

/// Scalar range test `cos ω + tan(ω_max/2)·sin ω`; at most 1 exactly when
/// `ω ∈ [0, ω_max]` for `π < ω_max < 2π` and `ω ∈ [0, 2π)`.
pub fn range_inequality_lhs(omega: f64, omega_max: f64) -> f64 {
    omega.cos() + (omega_max / 2.0).tan() * omega.sin()
}

/// Row coefficient `μ = (1 − j·tan(ω_max/2))·ζ` with
/// `ζ = jω_max / (N(1 − e^{−jω_max}))`, so that row `n` reads
/// `Re(μ Σ_i S_{n,i}) ≤ 1`.
pub fn range_coefficient(omega_max: f64, n: usize) -> C64 {
    let j = C64::new(0.0, 1.0);
    let zeta = 1.0 / (n as f64 * uniform_phasor_mean(omega_max));
    (C64::new(1.0, 0.0) - j * (omega_max / 2.0).tan()) * zeta
}

/// `E[e^{−jω}]` for `ω` uniform on `[0, ω_max]`: `(1 − e^{−jω_max}) / (jω_max)`.
pub fn uniform_phasor_mean(omega_max: f64) -> C64 {
    (C64::new(1.0, 0.0) - C64::from_polar(1.0, -omega_max)) / C64::new(0.0, omega_max)
}

/// Left-hand sides `Re(ζ Σ_i S_{n,i}) + tan(ω_max/2)·Im(ζ Σ_i S_{n,i})` per row.
pub fn range_row_values(s: &CMatrix, omega_max: f64) -> Vec<f64> {
    let mu = range_coefficient(omega_max, s.nrows());
    (0..s.nrows()).map(|r| (mu * s.row(r).iter().sum::<C64>()).re).collect()
}

/// Convex phase-range rows for the SDP; empty in the full-range regime.
pub fn range_constraints(omega_max: f64, n: usize) -> Result<Vec<TraceInequality>> {
    match classify_range(omega_max).regime {
        RangeRegime::Full => Ok(Vec::new()),
        RangeRegime::Unsupported => Err(Error::UnsupportedRange(omega_max)),
        RangeRegime::Constrained => {
            let mu = range_coefficient(omega_max, n);
            Ok((0..n)
                .map(|row| {
                    // tr(M S) = μ Σ_i S_{row,i} when column `row` of M is μ.
                    let mut m = CMatrix::zeros(n, n);
                    for i in 0..n {
                        m[(i, row)] = mu;
                    }
                    let hermitian = (&m + m.adjoint()) * C64::new(-0.5, 0.0);
                    TraceInequality::new(hermitian, -1.0)
                })
                .collect())
        }
    }
}

/// Convex subproblem for fixed `γ`: secrecy rows
/// `tr((A_u − γA_e) S) ≥ γ − 1` for every position pair, the phase-range rows,
/// and the penalty objective `−η(tr S − ‖S_prev‖₂ − tr(λλᴴ(S − S_prev))) + γ`.
///
/// Secrecy rows are scaled to unit Frobenius norm; this leaves the feasible set unchanged.
pub fn assemble_penalized_sdp(
    user_forms: &[QuadraticForm],
    eve_forms: &[QuadraticForm],
    gamma: f64,
    s_prev: &CMatrix,
    eta: f64,
    omega_max: f64,
) -> Result<SdpProblem> {
    if user_forms.is_empty() {
        return Err(Error::Empty("user quadratic forms"));
    }
    if eve_forms.is_empty() {
        return Err(Error::Empty("eavesdropper quadratic forms"));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "penalty factor must be positive, got {eta}"
        )));
    }
    let n = s_prev.nrows();
    let mut inequalities = Vec::with_capacity(user_forms.len() * eve_forms.len() + n);
    for au in user_forms {
        for ae in eve_forms {
            let b = &au.matrix - &ae.matrix * C64::new(gamma, 0.0);
            let norm = frob_norm_sq(&b).sqrt();
            let scale = if norm > 0.0 { 1.0 / norm } else { 1.0 };
            inequalities.push(TraceInequality::new(b * C64::new(scale, 0.0), (gamma - 1.0) * scale));
        }
    }
    inequalities.extend(range_constraints(omega_max, n)?);
    let lin = spectral_linearization(s_prev)?;
    let objective = (&lin.gradient - CMatrix::identity(n, n)) * C64::new(eta, 0.0);
    Ok(SdpProblem {
        dim: n,
        objective,
        offset: eta * lin.constant + gamma,
        inequalities,
        unit_diagonal: true,
    })
}

/// Principal-eigenvector phase recovery with a global-rotation search.
///
/// Returns the phases in `[0, 2π)` (in `[0, ω_max]` when the budget is below
/// `2π`) and the number of entries that still exceeded `ω_max` after the best
/// rotation, counted before they are clamped to the nearer endpoint.
pub fn extract_phases(s: &CMatrix, omega_max: f64, rotation_grid: usize) -> Result<(PhaseVector, usize)> {
    let eig = HermitianEigen::new(s)?;
    let (_, v) = eig.principal();
    let raw: Vec<f64> = v
        .iter()
        .map(|z| if z.norm() > 0.0 { z.arg().rem_euclid(TAU) } else { 0.0 })
        .collect();

    if omega_max >= TAU {
        let reference = raw.first().copied().unwrap_or(0.0);
        let omega = raw.iter().map(|w| wrap(w - reference)).collect();
        return Ok((PhaseVector { omega }, 0));
    }

    let steps = rotation_grid.max(1);
    let mut best = (usize::MAX, f64::INFINITY, 0.0);
    for k in 0..steps {
        let phi = TAU * k as f64 / steps as f64;
        let mut count = 0;
        let mut excess = 0.0;
        for w in &raw {
            let r = wrap(w + phi);
            if r > omega_max {
                count += 1;
                excess += (r - omega_max).min(TAU - r);
            }
        }
        if count < best.0 || (count == best.0 && excess < best.1) {
            best = (count, excess, phi);
        }
    }
    let (n_false, _, phi) = best;
    let omega = raw
        .iter()
        .map(|w| {
            let r = wrap(w + phi);
            if r <= omega_max {
                r
            } else if r - omega_max <= TAU - r {
                omega_max
            } else {
                0.0
            }
        })
        .collect();
    Ok((PhaseVector { omega }, n_false))
}

fn wrap(w: f64) -> f64 {
    let r = w.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Lifted secrecy design data: one SNR form per user and eavesdropper point.
#[derive(Debug, Clone)]
pub struct PhaseDesignProblem {
    pub user_forms: Vec<QuadraticForm>,
    pub eve_forms: Vec<QuadraticForm>,
    pub omega_max: f64,
}

impl PhaseDesignProblem {
    pub fn from_channels(inst: &ChannelInstance, q: &CVector, omega_max: f64) -> Result<Self> {
        Ok(Self {
            user_forms: inst.quadratic_forms(Receiver::User, q)?,
            eve_forms: inst.quadratic_forms(Receiver::Eavesdropper, q)?,
            omega_max,
        })
    }

    pub fn dim(&self) -> usize {
        self.user_forms.first().map(|a| a.dim()).unwrap_or(0)
    }

    /// Worst-case SNR ratio `min_u(1+SNR_u) / max_e(1+SNR_e)` for concrete phases.
    pub fn snr_ratio(&self, phases: &PhaseVector) -> f64 {
        let s = phases.phasors();
        let min_u = self
            .user_forms
            .iter()
            .map(|a| a.value(&s) + 1.0)
            .fold(f64::INFINITY, f64::min);
        let max_e = self
            .eve_forms
            .iter()
            .map(|a| a.value(&s) + 1.0)
            .fold(f64::NEG_INFINITY, f64::max);
        min_u / max_e
    }

    /// `[log₂ ratio]⁺`.
    pub fn secrecy_rate(&self, phases: &PhaseVector) -> f64 {
        self.snr_ratio(phases).log2().max(0.0)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::Empty("phase design forms"));
        }
        if self.eve_forms.is_empty() {
            return Err(Error::Empty("eavesdropper quadratic forms"));
        }
        for f in self.user_forms.iter().chain(&self.eve_forms) {
            if f.dim() != n {
                return Err(Error::DimensionMismatch {
                    context: "quadratic form",
                    expected: n,
                    got: f.dim(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerOptions {
    pub schedule: PenaltySchedule,
    pub sdp: SdpConfig,
    /// Global phase rotations tried by [`extract_phases`].
    pub rotation_grid: usize,
    /// Seed of the random initial phases.
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            schedule: PenaltySchedule::default(),
            sdp: SdpConfig::default(),
            rotation_grid: 720,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// `γ` settled within the outer tolerance.
    Converged,
    /// The outer iteration budget ran out first.
    IterationCap,
    /// A subproblem solve diverged; traces hold the iterations up to that point.
    Diverged,
}

/// One solved convex subproblem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub outer: usize,
    pub inner: usize,
    /// `‖S‖_* − ‖S‖₂` of the subproblem solution.
    pub gap: f64,
    pub n_false: usize,
    /// `γ` held fixed during this subproblem.
    pub gamma: f64,
    pub eta: f64,
    /// `‖S⁽ⁱ⁾ − S⁽ⁱ⁻¹⁾‖²_F`.
    pub change: f64,
    pub sdp_status: SdpStatus,
    pub sdp_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: RunStatus,
    pub omega_max: f64,
    pub final_phases: PhaseVector,
    /// Last `γ` produced by the closed-form update.
    pub final_gamma: f64,
    /// Worst-case secrecy rate of the final phases on the design channels.
    pub secrecy_rate_bits: f64,
    /// Phases above `ω_max` before repair in the final extraction.
    pub final_n_false: usize,
    /// `γ⁽⁰⁾` followed by every outer update.
    pub gamma_trace: Vec<f64>,
    pub iterations: Vec<IterationRecord>,
}

impl SolveReport {
    pub fn gap_trace(&self) -> Vec<f64> {
        self.iterations.iter().map(|r| r.gap).collect()
    }

    pub fn n_false_trace(&self) -> Vec<usize> {
        self.iterations.iter().map(|r| r.n_false).collect()
    }

    pub fn final_gap(&self) -> f64 {
        self.iterations.last().map(|r| r.gap).unwrap_or(f64::NAN)
    }
}

fn rank_gap(s: &CMatrix) -> Result<f64> {
    let eig = HermitianEigen::new(s)?;
    Ok(eig.nuclear_norm() - eig.spectral_norm())
}

/// Alternates penalty-continuation SDP solves (inner loop, fixed `γ`) with the
/// closed-form `γ` update (outer loop). `η` and `S` carry over between outer
/// iterations.
pub fn optimize_phases(problem: &PhaseDesignProblem, opts: &OptimizerOptions) -> Result<SolveReport> {
    problem.validate()?;
    opts.schedule.validate()?;
    let omega_max = problem.omega_max;
    let regime = classify_range(omega_max).regime;
    if regime == RangeRegime::Unsupported {
        return Err(Error::UnsupportedRange(omega_max));
    }
    let sched = &opts.schedule;
    let n = problem.dim();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let init: Vec<f64> = (0..n).map(|_| omega_max * rng.random::<f64>()).collect();
    let s0 = phasor_vector(&init);
    let mut s = &s0 * s0.adjoint();
    let mut gamma = sched.gamma0;
    let mut eta = sched.eta0;
    let mut gamma_trace = vec![gamma];
    let mut iterations = Vec::new();
    let mut status = RunStatus::IterationCap;

    'outer: for outer in 1..=sched.max_outer {
        for inner in 1..=sched.max_inner {
            let subproblem =
                assemble_penalized_sdp(&problem.user_forms, &problem.eve_forms, gamma, &s, eta, omega_max)?;
            let sol = sdp::solve(&subproblem, &opts.sdp, Some(&s))?;
            let change = frob_norm_sq(&(&sol.s - &s));
            if sol.status == SdpStatus::Diverged {
                log::warn!("subproblem diverged at outer {outer}, inner {inner}");
                status = RunStatus::Diverged;
                break 'outer;
            }
            s = sol.s;
            let gap = rank_gap(&s)?;
            let (_, n_false) = extract_phases(&s, omega_max, opts.rotation_grid)?;
            log::debug!(
                "outer {outer} inner {inner}: gamma={gamma:.4e} eta={eta:.3e} gap={gap:.3e} n_false={n_false} change={change:.3e} sdp={:?}/{}",
                sol.status,
                sol.iterations
            );
            iterations.push(IterationRecord {
                outer,
                inner,
                gap,
                n_false,
                gamma,
                eta,
                change,
                sdp_status: sol.status,
                sdp_iterations: sol.iterations,
            });
            eta *= sched.multiplier;
            if change < sched.eps_change {
                break;
            }
        }
        let next = gamma_update(&s, &problem.user_forms, &problem.eve_forms)?;
        gamma_trace.push(next);
        let settled = (next.log2() - gamma.log2()).abs() < sched.eps_gamma;
        gamma = next;
        if settled {
            status = RunStatus::Converged;
            break;
        }
    }

    let (final_phases, final_n_false) = extract_phases(&s, omega_max, opts.rotation_grid)?;
    let secrecy_rate_bits = problem.secrecy_rate(&final_phases);
    Ok(SolveReport {
        status,
        omega_max,
        final_phases,
        final_gamma: gamma,
        secrecy_rate_bits,
        final_n_false,
        gamma_trace,
        iterations,
    })
}

/// Design as if the full `2π` range were available, then let the hardware
/// saturate every phase above the true budget at `ω_max`.
pub fn neglect_baseline(problem: &PhaseDesignProblem, opts: &OptimizerOptions) -> Result<SolveReport> {
    let omega_max = problem.omega_max;
    if classify_range(omega_max).regime == RangeRegime::Unsupported {
        return Err(Error::UnsupportedRange(omega_max));
    }
    let unconstrained = PhaseDesignProblem {
        user_forms: problem.user_forms.clone(),
        eve_forms: problem.eve_forms.clone(),
        omega_max: TAU,
    };
    let mut report = optimize_phases(&unconstrained, opts)?;
    report.final_n_false = report.final_phases.count_above(omega_max);
    for w in report.final_phases.omega.iter_mut() {
        if *w > omega_max {
            *w = omega_max;
        }
    }
    report.omega_max = omega_max;
    report.secrecy_rate_bits = problem.secrecy_rate(&report.final_phases);
    Ok(report)
}
