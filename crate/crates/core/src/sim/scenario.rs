//! Scenario files: JSON documents, optionally layered on the built-in reference
//! setup via `"defaults": "paper"`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{
    build_upa, los_channel, rician_channel, wavelength, ApertureGain, ArrayGeometry, ChannelInstance, PathlossParams,
    Vec3,
};
use crate::lc_model::{classify_range, max_phase_shift, LcParams, RangeRegime};
use crate::linalg::CVector;
use crate::phase_opt::{OptimizerOptions, PenaltySchedule, PhaseDesignProblem};
use crate::sdp::SdpConfig;
use crate::secrecy::{los_beamformer, AreaBox, AreaLabel, Beamformer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BsConfig {
    pub center: [f64; 3],
    pub rows: usize,
    pub cols: usize,
    /// Element spacing in wavelengths.
    pub spacing_wavelengths: f64,
    pub axis_u: [f64; 3],
    pub axis_v: [f64; 3],
}

/// RIS in the y-z plane, centred at the origin; rows run along y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisConfig {
    pub rows: usize,
    pub cols: usize,
    pub spacing_wavelengths: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Eavesdropper area beside the user area (smaller y, same x range).
    #[serde(alias = "h")]
    Horizontal,
    /// Eavesdropper area below the user area (smaller x, same y range).
    #[serde(alias = "v")]
    Vertical,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Horizontal => "h",
            Orientation::Vertical => "v",
        }
    }
}

impl std::str::FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h" | "horizontal" => Ok(Orientation::Horizontal),
            "v" | "vertical" => Ok(Orientation::Vertical),
            other => Err(Error::InvalidParameter(format!(
                "orientation must be h or v, got {other:?}"
            ))),
        }
    }
}

/// Eavesdropper area of the same size as the user area, offset by a
/// nearest-point gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvePlacement {
    pub orientation: Orientation,
    pub gap_m: f64,
}

impl EvePlacement {
    pub fn place(&self, user: &AreaBox) -> AreaBox {
        let mut eve = *user;
        match self.orientation {
            Orientation::Horizontal => {
                let width = user.y[1] - user.y[0];
                eve.y = [user.y[0] - self.gap_m - width, user.y[0] - self.gap_m];
            }
            Orientation::Vertical => {
                let depth = user.x[1] - user.x[0];
                eve.x = [user.x[0] - self.gap_m - depth, user.x[0] - self.gap_m];
            }
        }
        eve
    }
}

/// Per-link parameters. The direct BS-user link is blocked and kept only for
/// completeness; the eavesdropper links reuse `ris_user`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Links<T> {
    pub bs_user: T,
    pub bs_ris: T,
    pub ris_user: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    LosOnly,
    Rician,
}

/// Observation plane of the received-power map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneGrid {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: f64,
    pub step: f64,
}

impl Default for PlaneGrid {
    fn default() -> Self {
        Self {
            x: [2.0, 8.0],
            y: [-4.0, 4.0],
            z: -5.0,
            step: 0.1,
        }
    }
}

impl PlaneGrid {
    fn axis(range: [f64; 2], step: f64) -> Vec<f64> {
        let count = ((range[1] - range[0]) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| range[0] + step * i as f64).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x, self.step)
    }

    pub fn ys(&self) -> Vec<f64> {
        Self::axis(self.y, self.step)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if !(self.step > 0.0) {
            problems.push(format!("heatmap.step must be positive, got {}", self.step));
        }
        for (name, r) in [("x", self.x), ("y", self.y)] {
            if !(r[0] <= r[1]) {
                problems.push(format!("heatmap.{name} must be a non-decreasing range, got {r:?}"));
            }
        }
        problems
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub bs: BsConfig,
    pub ris: RisConfig,
    pub user_box: AreaBox,
    pub eve_placement: EvePlacement,
    /// Explicit eavesdropper area; overrides `eve_placement` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eve_box: Option<AreaBox>,
    pub carrier_frequency_hz: f64,
    pub bandwidth_hz: f64,
    #[serde(rename = "noise_figure_dB")]
    pub noise_figure_db: f64,
    #[serde(rename = "noise_psd_dBm_per_hz")]
    pub noise_psd_dbm_per_hz: f64,
    #[serde(rename = "tx_power_dBm")]
    pub tx_power_dbm: f64,
    pub pathloss: Links<PathlossParams>,
    pub k_factor: Links<f64>,
    pub aperture_gain: ApertureGain,
    pub lc: LcParams,
    pub temperature_c: f64,
    pub seed: u64,
    pub eval_channel_mode: ChannelMode,
    pub schedule: PenaltySchedule,
    pub sdp: SdpConfig,
    pub rotation_grid: usize,
    pub heatmap: PlaneGrid,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl Scenario {
    /// The published simulation setup.
    pub fn paper() -> Self {
        Self {
            bs: BsConfig {
                center: [30.0, 0.0, 5.0],
                rows: 4,
                cols: 4,
                spacing_wavelengths: 0.5,
                axis_u: [0.0, 1.0, 0.0],
                axis_v: [0.0, 0.0, 1.0],
            },
            ris: RisConfig {
                rows: 20,
                cols: 10,
                spacing_wavelengths: 0.5,
            },
            user_box: AreaBox {
                x: [4.5, 5.5],
                y: [-0.5, 0.5],
                z: -5.0,
                grid: [3, 3],
            },
            eve_placement: EvePlacement {
                orientation: Orientation::Horizontal,
                gap_m: 1.5,
            },
            eve_box: None,
            carrier_frequency_hz: 28e9,
            bandwidth_hz: 20e6,
            noise_figure_db: 6.0,
            noise_psd_dbm_per_hz: -174.0,
            tx_power_dbm: 40.0,
            pathloss: Links {
                bs_user: PathlossParams::default(),
                bs_ris: PathlossParams::default(),
                ris_user: PathlossParams::default(),
            },
            k_factor: Links {
                bs_user: 0.0,
                bs_ris: 10.0,
                ris_user: 10.0,
            },
            aperture_gain: ApertureGain::PerElement,
            lc: LcParams::default(),
            temperature_c: 57.0,
            seed: 0,
            eval_channel_mode: ChannelMode::LosOnly,
            schedule: PenaltySchedule::default(),
            sdp: SdpConfig::default(),
            rotation_grid: 720,
            heatmap: PlaneGrid::default(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let mut doc: Value = if text.trim().is_empty() {
            Value::Object(Default::default())
        } else {
            serde_json::from_str(text)?
        };
        let obj = doc
            .as_object_mut()
            .ok_or_else(|| Error::InvalidParameter("scenario must be a JSON object".into()))?;
        let merged = match obj.remove("defaults") {
            Some(Value::String(s)) if s == "paper" => {
                let mut base = serde_json::to_value(Scenario::paper())?;
                canonicalize_aliases(&mut doc);
                merge(&mut base, doc);
                base
            }
            Some(Value::String(s)) if s == "none" => doc,
            None => doc,
            Some(other) => {
                return Err(Error::InvalidParameter(format!(
                    "unknown defaults preset {other}; expected \"paper\" or \"none\""
                )))
            }
        };
        let scenario: Scenario = serde_json::from_value(merged)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// SHA-256 of the canonical (compact, field-ordered) JSON encoding.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("scenario serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Checks every invariant and reports all failures at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.bs.rows == 0 || self.bs.cols == 0 {
            problems.push("bs.rows and bs.cols must be at least 1".to_string());
        }
        if self.ris.rows == 0 || self.ris.cols == 0 {
            problems.push("ris.rows and ris.cols must be at least 1".to_string());
        }
        if !(self.bs.spacing_wavelengths > 0.0) {
            problems.push("bs.spacing_wavelengths must be positive".into());
        }
        if !(self.ris.spacing_wavelengths > 0.0) {
            problems.push("ris.spacing_wavelengths must be positive".into());
        }
        problems.extend(self.user_box.validate("user_box"));
        if let Some(b) = &self.eve_box {
            problems.extend(b.validate("eve_box"));
        }
        if !(self.eve_placement.gap_m >= 0.0) {
            problems.push(format!(
                "eve_placement.gap_m must be non-negative, got {}",
                self.eve_placement.gap_m
            ));
        }
        if !(self.carrier_frequency_hz > 0.0) {
            problems.push(format!(
                "carrier_frequency_hz must be positive, got {}",
                self.carrier_frequency_hz
            ));
        }
        if !(self.bandwidth_hz > 0.0) {
            problems.push(format!("bandwidth_hz must be positive, got {}", self.bandwidth_hz));
        }
        for (name, v) in [
            ("noise_figure_dB", self.noise_figure_db),
            ("noise_psd_dBm_per_hz", self.noise_psd_dbm_per_hz),
            ("tx_power_dBm", self.tx_power_dbm),
        ] {
            if !v.is_finite() {
                problems.push(format!("{name} must be finite"));
            }
        }
        for (name, p) in [
            ("bs_user", self.pathloss.bs_user),
            ("bs_ris", self.pathloss.bs_ris),
            ("ris_user", self.pathloss.ris_user),
        ] {
            if !(p.d0 > 0.0) {
                problems.push(format!("pathloss.{name}.d0 must be positive, got {}", p.d0));
            }
        }
        for (name, k) in [
            ("bs_user", self.k_factor.bs_user),
            ("bs_ris", self.k_factor.bs_ris),
            ("ris_user", self.k_factor.ris_user),
        ] {
            if !(k >= 0.0) {
                problems.push(format!("k_factor.{name} must be non-negative, got {k}"));
            }
        }
        if let Err(Error::Validation(v)) = self.lc.validate() {
            problems.extend(v);
        }
        if !(self.temperature_c < self.lc.clearing_temp_c) {
            problems.push(format!(
                "temperature_c ({}) must be below the clearing temperature lc.clearing_temp_c ({}): T < T_c",
                self.temperature_c, self.lc.clearing_temp_c
            ));
        } else if let Ok(w) = max_phase_shift(&self.lc, self.temperature_c) {
            if classify_range(w).regime == RangeRegime::Unsupported {
                problems.push(format!(
                    "temperature_c ({}) leaves a phase budget of {w:.4} rad, at or below π",
                    self.temperature_c
                ));
            }
        }
        if self.rotation_grid == 0 {
            problems.push("rotation_grid must be at least 1".into());
        }
        if let Err(Error::Validation(v)) = self.schedule.validate() {
            problems.extend(v);
        }
        if let Err(Error::Validation(v)) = self.sdp.validate() {
            problems.extend(v);
        }
        problems.extend(self.heatmap.validate());
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.carrier_frequency_hz)
    }

    /// `σ² = W·N₀·N_f` in watts.
    pub fn noise_power(&self) -> f64 {
        dbm_to_watts(self.noise_psd_dbm_per_hz) * self.bandwidth_hz * db_to_linear(self.noise_figure_db)
    }

    pub fn tx_power(&self) -> f64 {
        dbm_to_watts(self.tx_power_dbm)
    }

    pub fn omega_max(&self) -> Result<f64> {
        max_phase_shift(&self.lc, self.temperature_c)
    }

    pub fn eve_box(&self) -> AreaBox {
        self.eve_box.unwrap_or_else(|| self.eve_placement.place(&self.user_box))
    }

    pub fn with_eve_placement(&self, placement: EvePlacement) -> Self {
        Self {
            eve_placement: placement,
            eve_box: None,
            ..self.clone()
        }
    }

    pub fn bs_geometry(&self) -> Result<ArrayGeometry> {
        let lambda = self.wavelength();
        build_upa(
            self.bs.rows,
            self.bs.cols,
            self.bs.spacing_wavelengths * lambda,
            Vec3::from(self.bs.center),
            Vec3::from(self.bs.axis_u),
            Vec3::from(self.bs.axis_v),
            lambda,
        )
    }

    pub fn ris_geometry(&self) -> Result<ArrayGeometry> {
        let lambda = self.wavelength();
        build_upa(
            self.ris.rows,
            self.ris.cols,
            self.ris.spacing_wavelengths * lambda,
            Vec3::zeros(),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
            lambda,
        )
    }

    pub fn optimizer_options(&self) -> OptimizerOptions {
        OptimizerOptions {
            schedule: self.schedule,
            sdp: self.sdp,
            rotation_grid: self.rotation_grid,
            seed: self.seed,
        }
    }

    /// Resolved arrays, beamformer and position lattices.
    pub fn setup(&self) -> Result<Setup> {
        let bs = self.bs_geometry()?;
        let ris = self.ris_geometry()?;
        let beamformer = los_beamformer(&bs, &ris.center(), self.tx_power())?;
        Ok(Setup {
            user_points: self.user_box.lattice(AreaLabel::UserArea).points,
            eve_points: self.eve_box().lattice(AreaLabel::EveArea).points,
            bs,
            ris,
            beamformer,
            noise_power: self.noise_power(),
            omega_max: self.omega_max()?,
        })
    }
}

/// Field aliases accepted in scenario files, keyed by section.
const ALIASES: &[(&str, &str, &str)] = &[
    ("schedule", "I_max", "max_inner"),
    ("schedule", "J_max", "max_outer"),
    ("schedule", "eps1", "eps_change"),
    ("schedule", "eps2", "eps_gamma"),
    ("lc", "T_c", "clearing_temp_c"),
    ("lc", "T_r", "reference_temp_c"),
];

/// Rename alias keys to their canonical names so a merge does not end up
/// with both spellings of one field.
fn canonicalize_aliases(doc: &mut Value) {
    for (section, alias, canonical) in ALIASES {
        if let Some(Value::Object(obj)) = doc.get_mut(*section) {
            if let Some(v) = obj.remove(*alias) {
                obj.insert(canonical.to_string(), v);
            }
        }
    }
}

/// Right-biased deep merge of JSON objects.
fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// SplitMix64 finalizer, used to derive independent sub-seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_BS_RIS: u64 = 1;
const STREAM_USER: u64 = 1 << 32;
const STREAM_EVE: u64 = 2 << 32;

/// Fully resolved scenario quantities.
#[derive(Debug, Clone)]
pub struct Setup {
    pub bs: ArrayGeometry,
    pub ris: ArrayGeometry,
    pub beamformer: Beamformer,
    pub noise_power: f64,
    pub omega_max: f64,
    pub user_points: Vec<Vec3>,
    pub eve_points: Vec<Vec3>,
}

impl Setup {
    /// BS→RIS channel, LOS or Rician.
    pub fn bs_to_ris(&self, scenario: &Scenario, mode: ChannelMode, seed: u64) -> Result<crate::CMatrix> {
        let los = los_channel(&self.bs, &self.ris, &scenario.pathloss.bs_ris, scenario.aperture_gain)?;
        match mode {
            ChannelMode::LosOnly => Ok(los),
            ChannelMode::Rician => rician_channel(&los, scenario.k_factor.bs_ris, mix_seed(seed, STREAM_BS_RIS)),
        }
    }

    /// `h_r` for a single-antenna receiver at `point`, oriented so the
    /// received signal is `h_rᴴ Γ H_t x`.
    pub fn ris_to_point(
        &self,
        scenario: &Scenario,
        point: &Vec3,
        mode: ChannelMode,
        stream_seed: u64,
    ) -> Result<CVector> {
        let rx = ArrayGeometry::single(*point, self.ris.wavelength());
        let los = los_channel(&self.ris, &rx, &scenario.pathloss.ris_user, scenario.aperture_gain)?;
        let g = match mode {
            ChannelMode::LosOnly => los,
            ChannelMode::Rician => rician_channel(&los, scenario.k_factor.ris_user, stream_seed)?,
        };
        Ok(g.adjoint().column(0).into_owned())
    }

    pub fn channels(&self, scenario: &Scenario, mode: ChannelMode, seed: u64) -> Result<ChannelInstance> {
        let h_t = self.bs_to_ris(scenario, mode, seed)?;
        let users = self
            .user_points
            .iter()
            .enumerate()
            .map(|(i, p)| self.ris_to_point(scenario, p, mode, mix_seed(seed, STREAM_USER + i as u64)))
            .collect::<Result<Vec<_>>>()?;
        let eves = self
            .eve_points
            .iter()
            .enumerate()
            .map(|(i, p)| self.ris_to_point(scenario, p, mode, mix_seed(seed, STREAM_EVE + i as u64)))
            .collect::<Result<Vec<_>>>()?;
        ChannelInstance::new(h_t, users, eves, self.noise_power)
    }

    /// Pure-LOS design problem for a given phase budget.
    pub fn design_problem(&self, scenario: &Scenario, omega_max: f64) -> Result<PhaseDesignProblem> {
        let inst = self.channels(scenario, ChannelMode::LosOnly, scenario.seed)?;
        PhaseDesignProblem::from_channels(&inst, &self.beamformer.q, omega_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_defaults_from_flag() {
        let s = Scenario::from_json_str(r#"{"defaults": "paper"}"#).unwrap();
        assert_eq!(s, Scenario::paper());
        assert_eq!(s.ris.rows * s.ris.cols, 200);
        let w = s.omega_max().unwrap();
        assert!((w - 5.611_851_975_537_865).abs() < 1e-12);
    }

    #[test]
    fn noise_power_example() {
        let s = Scenario::paper();
        let dbm = 10.0 * (s.noise_power() * 1e3).log10();
        assert!((dbm - (-174.0 + 10.0 * 2e7f64.log10() + 6.0)).abs() < 1e-9);
        assert!((dbm + 94.99).abs() < 0.01);
    }

    #[test]
    fn overlay_merges_nested_fields() {
        let s = Scenario::from_json_str(
            r#"{"defaults": "paper", "ris": {"rows": 10, "cols": 5}, "user_box": {"grid": [2, 2]}, "schedule": {"J_max": 2}}"#,
        )
        .unwrap();
        assert_eq!((s.ris.rows, s.ris.cols), (10, 5));
        assert_eq!(s.ris.spacing_wavelengths, 0.5);
        assert_eq!(s.user_box.grid, [2, 2]);
        assert_eq!(s.user_box.x, [4.5, 5.5]);
        assert_eq!(s.schedule.max_outer, 2);
        assert_eq!(s.schedule.max_inner, 12);
    }

    #[test]
    fn validation_names_every_failing_field() {
        let err = Scenario::from_json_str(
            r#"{"defaults": "paper", "temperature_c": 200, "bandwidth_hz": -1, "user_box": {"x": [1, 0]}}"#,
        )
        .unwrap_err();
        let text = err.to_string();
        assert!(text.contains("T < T_c"), "{text}");
        assert!(text.contains("bandwidth_hz"), "{text}");
        assert!(text.contains("user_box.x"), "{text}");
    }

    #[test]
    fn unknown_fields_and_missing_fields_rejected() {
        assert!(Scenario::from_json_str(r#"{"defaults": "paper", "temprature_c": 50}"#).is_err());
        assert!(Scenario::from_json_str(r#"{"temperature_c": 50}"#).is_err());
        assert!(Scenario::from_json_str(r#"{"defaults": "paper", "seed": "#).is_err());
    }

    #[test]
    fn eve_placement_gap() {
        let s = Scenario::paper();
        let h = s.eve_box();
        assert_eq!(h.x, s.user_box.x);
        assert!((s.user_box.y[0] - h.y[1] - 1.5).abs() < 1e-12);
        let v = s
            .with_eve_placement(EvePlacement {
                orientation: Orientation::Vertical,
                gap_m: 1.0,
            })
            .eve_box();
        assert_eq!(v.y, s.user_box.y);
        assert!((s.user_box.x[0] - v.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hash_distinguishes_scenarios() {
        let a = Scenario::paper();
        let mut b = a.clone();
        b.seed = 1;
        assert_eq!(a.hash(), Scenario::paper().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn design_channels_are_los_and_deterministic() {
        let s = Scenario::from_json_str(r#"{"defaults": "paper", "ris": {"rows": 4, "cols": 2}}"#).unwrap();
        let setup = s.setup().unwrap();
        let a = setup.channels(&s, ChannelMode::Rician, 5).unwrap();
        let b = setup.channels(&s, ChannelMode::Rician, 5).unwrap();
        assert_eq!(a.bs_to_ris, b.bs_to_ris);
        assert_eq!(a.ris_to_eve, b.ris_to_eve);
        let los = setup.channels(&s, ChannelMode::LosOnly, 5).unwrap();
        assert_ne!(a.bs_to_ris, los.bs_to_ris);
        assert_eq!(los.receivers(crate::geometry::Receiver::User), 9);
    }
}
