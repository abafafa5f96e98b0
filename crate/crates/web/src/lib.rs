//! Browser bindings for the LC-RIS demo page in `www/`.
//!
//! Three operations: the phase-budget curve, the reachable phase arc with
//! its linear range test, and a small optimized-versus-neglect power map.

use lcris_core::lc_model::{classify_range, max_phase_shift, LcParams};
use lcris_core::phase_opt::{range_inequality_lhs, uniform_phasor_mean};
use lcris_core::sim::{run_heatmap, run_optimize, Design, PlaneGrid, Scenario};
use wasm_bindgen::prelude::*;

/// Reduced geometry so a design finishes in a few seconds in the browser.
const DEMO_SCENARIO: &str = r#"{"defaults":"paper","ris":{"rows":8,"cols":4},"user_box":{"grid":[2,2]}}"#;

fn js_err(e: lcris_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn lc_params(beta: f64, clearing_c: f64, reference_c: f64) -> Result<LcParams, JsError> {
    let lc = LcParams {
        beta,
        clearing_temp_c: clearing_c,
        reference_temp_c: reference_c,
        ..LcParams::default()
    };
    lc.validate().map_err(js_err)?;
    Ok(lc)
}

/// Phase budget in radians at each temperature in `temps_c`.
#[wasm_bindgen]
pub fn lc_curve(beta: f64, clearing_c: f64, reference_c: f64, temps_c: &[f64]) -> Result<Vec<f64>, JsError> {
    let lc = lc_params(beta, clearing_c, reference_c)?;
    temps_c
        .iter()
        .map(|&t| max_phase_shift(&lc, t).map_err(js_err))
        .collect()
}

/// `"full"`, `"constrained"` or `"unsupported"`.
#[wasm_bindgen]
pub fn range_regime(omega_max: f64) -> String {
    classify_range(omega_max).regime.as_str().to_string()
}

/// Samples of `ω ∈ [0, 2π)`: triples `(ω, lhs, inside)` where `lhs` is the
/// linear range-test value and `inside` is 1 when `lhs ≤ 1`.
#[wasm_bindgen]
pub fn range_arc(omega_max: f64, samples: usize) -> Vec<f64> {
    let samples = samples.max(2);
    (0..samples)
        .flat_map(|i| {
            let w = std::f64::consts::TAU * i as f64 / samples as f64;
            let lhs = range_inequality_lhs(w, omega_max);
            [w, lhs, f64::from(u8::from(lhs <= 1.0 + 1e-12))]
        })
        .collect()
}

/// Mean of `e^{jω}` for `ω` uniform on `[0, ω_max]`, as `[re, im]`.
#[wasm_bindgen]
pub fn phasor_mean(omega_max: f64) -> Vec<f64> {
    let m = uniform_phasor_mean(omega_max);
    vec![m.re, m.im]
}

/// Received-power map for one design at one temperature.
#[wasm_bindgen]
pub struct PowerMap {
    nx: usize,
    ny: usize,
    x_range: [f64; 2],
    y_range: [f64; 2],
    power_db: Vec<f64>,
    secrecy_rate_bits: f64,
    omega_max: f64,
    phases: Vec<f64>,
    user_box: Vec<f64>,
    eve_box: Vec<f64>,
}

#[wasm_bindgen]
impl PowerMap {
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    /// `[x_min, x_max, y_min, y_max]` in meters.
    pub fn extent(&self) -> Vec<f64> {
        vec![self.x_range[0], self.x_range[1], self.y_range[0], self.y_range[1]]
    }
    /// Row-major over x then y, in dB.
    pub fn power_db(&self) -> Vec<f64> {
        self.power_db.clone()
    }
    pub fn secrecy_rate_bits(&self) -> f64 {
        self.secrecy_rate_bits
    }
    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }
    pub fn phases(&self) -> Vec<f64> {
        self.phases.clone()
    }
    /// `[x0, x1, y0, y1]` of the user area.
    pub fn user_box(&self) -> Vec<f64> {
        self.user_box.clone()
    }
    /// `[x0, x1, y0, y1]` of the eavesdropper area.
    pub fn eve_box(&self) -> Vec<f64> {
        self.eve_box.clone()
    }
}

/// Designs the demo surface (`optimized` or `neglect`) at `temperature_c`
/// and maps the received power on the `z = −5 m` plane.
#[wasm_bindgen]
pub fn power_map(design: &str, temperature_c: f64, vertical: bool, step_m: f64) -> Result<PowerMap, JsError> {
    let design: Design = design.parse().map_err(js_err)?;
    let mut scenario = Scenario::from_json_str(DEMO_SCENARIO).map_err(js_err)?;
    scenario.temperature_c = temperature_c;
    if vertical {
        scenario.eve_placement.orientation = lcris_core::sim::Orientation::Vertical;
    }
    scenario.validate().map_err(js_err)?;
    let outcome = run_optimize(&scenario, design).map_err(js_err)?;
    let plane = PlaneGrid {
        step: step_m,
        ..scenario.heatmap
    };
    let table = run_heatmap(&scenario, &outcome.report.final_phases, &plane).map_err(js_err)?;
    let power_db = table
        .column("power_dB")
        .ok_or_else(|| JsError::new("missing power column"))?;
    let bounds = |b: &lcris_core::secrecy::AreaBox| vec![b.x[0], b.x[1], b.y[0], b.y[1]];
    Ok(PowerMap {
        nx: plane.xs().len(),
        ny: plane.ys().len(),
        x_range: plane.x,
        y_range: plane.y,
        power_db,
        secrecy_rate_bits: outcome.eval_secrecy_rate_bits,
        omega_max: outcome.report.omega_max,
        phases: outcome.report.final_phases.omega,
        user_box: bounds(&scenario.user_box),
        eve_box: bounds(&scenario.eve_box()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_starts_at_full_range() {
        let w = lc_curve(0.25, 127.0, 17.0, &[17.0, 57.0]).unwrap();
        assert!((w[0] - std::f64::consts::TAU).abs() < 1e-12);
        assert!(w[1] < w[0]);
        assert_eq!(range_regime(w[0]), "full");
        assert_eq!(range_regime(w[1]), "constrained");
    }

    #[test]
    fn arc_marks_the_reachable_interval() {
        let w_max = 4.5;
        for t in range_arc(w_max, 360).chunks(3) {
            if (t[0] - w_max).abs() > 1e-6 {
                assert_eq!(t[2] == 1.0, t[0] <= w_max, "ω = {}", t[0]);
            }
        }
    }

    #[test]
    fn phasor_mean_shrinks_with_budget() {
        let full = phasor_mean(std::f64::consts::TAU);
        assert!(full[0].hypot(full[1]) < 1e-12);
        let half = phasor_mean(std::f64::consts::PI);
        assert!(half[0].hypot(half[1]) > 0.5);
    }

    #[test]
    fn demo_map_has_the_plane_shape() {
        let map = power_map("optimized", 57.0, false, 1.0).unwrap();
        assert_eq!(map.power_db().len(), map.nx() * map.ny());
        assert_eq!((map.nx(), map.ny()), (7, 9));
        assert_eq!(map.phases().len(), 32);
        assert!(map.phases().iter().all(|&w| w <= map.omega_max()));
        assert!(map.secrecy_rate_bits() >= 0.0);
    }
}
