//! Liquid-crystal phase budget versus temperature.
//!
//! Birefringence follows the Haller approximation `Δn = Δn₀ (1 − T/T_c)^β`.
//! Normalizing so that the cell produces exactly `2π` at the reference
//! temperature `T_r` gives the phase budget
//!
//! ```text
//! ω_max(T) = 2π ((T_c − T) / (T_c − T_r))^β
//! ```
//!
//! which only involves temperature differences and is therefore safe to
//! evaluate directly in °C. The raw Haller form uses absolute (kelvin)
//! temperatures.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const KELVIN_OFFSET: f64 = 273.15;

/// Material constants of the liquid crystal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LcParams {
    /// Haller exponent, typically 0.2–0.25.
    pub beta: f64,
    /// Clearing temperature in °C.
    #[serde(alias = "T_c")]
    pub clearing_temp_c: f64,
    /// Temperature (°C) at which the cell produces a full `2π` range.
    #[serde(alias = "T_r")]
    pub reference_temp_c: f64,
    /// Birefringence extrapolated to absolute zero; only used by
    /// [`haller_birefringence`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_n0: Option<f64>,
    /// Phase-shifter length in carrier wavelengths (`l·f/c`); only used by
    /// [`raw_max_phase_shift`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_length_over_lambda: Option<f64>,
}

impl Default for LcParams {
    fn default() -> Self {
        Self {
            beta: 0.25,
            clearing_temp_c: 127.0,
            reference_temp_c: 17.0,
            delta_n0: None,
            cell_length_over_lambda: None,
        }
    }
}

impl LcParams {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.beta > 0.0 && self.beta < 1.0) {
            problems.push(format!("lc.beta must lie in (0, 1), got {}", self.beta));
        }
        if !(self.reference_temp_c < self.clearing_temp_c) {
            problems.push(format!(
                "lc.reference_temp_c ({}) must be below lc.clearing_temp_c ({})",
                self.reference_temp_c, self.clearing_temp_c
            ));
        }
        if let Some(dn) = self.delta_n0 {
            if !(dn > 0.0) {
                problems.push(format!("lc.delta_n0 must be positive, got {dn}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    fn check_temperature(&self, t_c: f64) -> Result<()> {
        if !t_c.is_finite() || t_c >= self.clearing_temp_c {
            return Err(Error::AboveClearingPoint {
                temperature: t_c,
                clearing: self.clearing_temp_c,
            });
        }
        Ok(())
    }
}

/// Constraint regime implied by a phase budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeRegime {
    /// `ω_max ≥ 2π`: every phase is reachable, no range constraint.
    Full,
    /// `π < ω_max < 2π`: the range constraint is active and representable.
    Constrained,
    /// `ω_max ≤ π`: outside the validity of the convex range constraint.
    Unsupported,
}

impl RangeRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            RangeRegime::Full => "full",
            RangeRegime::Constrained => "constrained",
            RangeRegime::Unsupported => "unsupported",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeClass {
    pub regime: RangeRegime,
    pub omega_max: f64,
}

/// Raw Haller birefringence at `t_c` (°C); the ratio `T/T_c` is taken in kelvin.
pub fn haller_birefringence(lc: &LcParams, t_c: f64) -> Result<f64> {
    lc.check_temperature(t_c)?;
    let dn0 = lc
        .delta_n0
        .ok_or_else(|| Error::InvalidParameter("lc.delta_n0 is required for the raw birefringence model".into()))?;
    let ratio = (t_c + KELVIN_OFFSET) / (lc.clearing_temp_c + KELVIN_OFFSET);
    Ok(dn0 * (1.0 - ratio).powf(lc.beta))
}

/// Absolute phase range `2π (l/λ) Δn(T)` of a cell of known length.
pub fn raw_max_phase_shift(lc: &LcParams, t_c: f64) -> Result<f64> {
    let l = lc
        .cell_length_over_lambda
        .ok_or_else(|| Error::InvalidParameter("lc.cell_length_over_lambda is required for the raw model".into()))?;
    Ok(TAU * l * haller_birefringence(lc, t_c)?)
}

/// Phase budget `ω_max(T)` in radians, normalized to `2π` at the reference temperature.
pub fn max_phase_shift(lc: &LcParams, t_c: f64) -> Result<f64> {
    lc.check_temperature(t_c)?;
    if t_c == lc.reference_temp_c {
        return Ok(TAU);
    }
    let ratio = (lc.clearing_temp_c - t_c) / (lc.clearing_temp_c - lc.reference_temp_c);
    Ok(TAU * ratio.powf(lc.beta))
}

pub fn classify_range(omega_max: f64) -> RangeClass {
    let regime = if omega_max >= TAU {
        RangeRegime::Full
    } else if omega_max > PI {
        RangeRegime::Constrained
    } else {
        RangeRegime::Unsupported
    };
    RangeClass { regime, omega_max }
}
