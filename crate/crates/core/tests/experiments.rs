//! Experiment drivers on the reduced 10×5 profile.

use std::f64::consts::TAU;
use std::path::Path;

use lcris_core::geometry::Receiver;
use lcris_core::lc_model::LcParams;
use lcris_core::phase_opt::RunStatus;
use lcris_core::secrecy::snr;
use lcris_core::sim::{
    run_convergence, run_heatmap, run_lc_curve, run_optimize, Design, EvePlacement, Orientation, PlaneGrid, Scenario,
    POWER_FLOOR_DB,
};

fn desk() -> Scenario {
    Scenario::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/desk.json")).unwrap()
}

#[test]
fn lc_curve_reference_temperature_is_full_range() {
    let table = run_lc_curve(&LcParams::default(), &[17.0]).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.column("omega_max_rad").unwrap(), vec![TAU]);
    assert_eq!(table.rows[0][2], lcris_core::sim::Cell::Text("full".into()));
}

#[test]
fn lc_curve_descending_temperatures_give_ascending_budget() {
    let temps: Vec<f64> = (0..=12).rev().map(|t| f64::from(t) * 10.0).collect();
    let w = run_lc_curve(&LcParams::default(), &temps)
        .unwrap()
        .column("omega_max_rad")
        .unwrap();
    assert!(w.windows(2).all(|p| p[0] < p[1]));
}

#[test]
fn lc_curve_rejects_clearing_temperature() {
    assert!(run_lc_curve(&LcParams::default(), &[20.0, 127.0]).is_err());
}

#[test]
fn full_range_run_never_violates_the_budget() {
    let mut s = desk();
    s.temperature_c = s.lc.reference_temp_c;
    let (table, report) = run_convergence(&s).unwrap();
    assert!(table.column("n_false").unwrap().iter().all(|&n| n == 0.0));
    assert_eq!(report.final_n_false, 0);
}

#[test]
fn desk_convergence_reaches_thresholds() {
    let s = desk();
    let (table, report) = run_convergence(&s).unwrap();
    assert_eq!(report.status, RunStatus::Converged);
    let gaps = table.column("gap").unwrap();
    assert!(*gaps.last().unwrap() < s.schedule.eps_change);
    assert_eq!(*table.column("n_false").unwrap().last().unwrap(), 0.0);
    assert_eq!(table.meta("status"), Some("converged"));
}

#[test]
fn single_iteration_caps() {
    let mut s = desk();
    s.schedule.max_inner = 1;
    s.schedule.max_outer = 1;
    let (table, report) = run_convergence(&s).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert_eq!(report.status, RunStatus::IterationCap);
}

#[test]
fn neglect_matches_optimized_at_reference_temperature() {
    let mut s = desk();
    s.temperature_c = s.lc.reference_temp_c;
    let opt = run_optimize(&s, Design::Optimized).unwrap();
    let neg = run_optimize(&s, Design::Neglect).unwrap();
    assert_eq!(opt.report.final_phases, neg.report.final_phases);
    assert_eq!(opt.eval_secrecy_rate_bits, neg.eval_secrecy_rate_bits);
}

#[test]
fn lifted_ratio_tracks_evaluated_rate() {
    let s = desk();
    let out = run_optimize(&s, Design::Optimized).unwrap();
    assert!((out.report.final_gamma.log2() - out.report.secrecy_rate_bits).abs() < 0.2);
}

#[test]
fn beam_points_at_the_user_box() {
    let s = desk();
    let out = run_optimize(&s, Design::Optimized).unwrap();
    let plane = PlaneGrid {
        step: 0.25,
        ..s.heatmap
    };
    let table = run_heatmap(&s, &out.report.final_phases, &plane).unwrap();
    let mut powers = table.column("power_dB").unwrap();
    powers.sort_by(f64::total_cmp);
    let median = powers[powers.len() / 2];
    let center = s.user_box.center();
    let at_user = PlaneGrid {
        x: [center.x, center.x],
        y: [center.y, center.y],
        z: center.z,
        step: 1.0,
    };
    let user = run_heatmap(&s, &out.report.final_phases, &at_user).unwrap();
    assert_eq!(user.rows.len(), 1);
    assert!(user.column("power_dB").unwrap()[0] > median);
}

#[test]
fn vanishing_power_hits_the_floor() {
    let mut s = desk();
    s.tx_power_dbm = -3000.0;
    let n = s.ris.rows * s.ris.cols;
    let phases = lcris_core::phase_opt::PhaseVector { omega: vec![0.0; n] };
    let plane = PlaneGrid { step: 1.0, ..s.heatmap };
    let table = run_heatmap(&s, &phases, &plane).unwrap();
    assert!(table.column("power_dB").unwrap().iter().all(|&p| p == POWER_FLOOR_DB));
}

#[test]
fn distant_eavesdropper_leaves_the_user_rate() {
    let mut s = desk();
    s.eve_placement = EvePlacement {
        orientation: Orientation::Horizontal,
        gap_m: 40.0,
    };
    let out = run_optimize(&s, Design::Optimized).unwrap();
    let setup = s.setup().unwrap();
    let inst = setup.channels(&s, s.eval_channel_mode, s.seed).unwrap();
    let phases = &out.report.final_phases.omega;
    let worst = |which, best: bool| {
        let values = (0..inst.receivers(which)).map(|i| {
            snr(
                &inst.effective_channel(which, i, phases).unwrap(),
                &setup.beamformer.q,
                inst.noise_power,
            )
            .unwrap()
        });
        if best {
            values.fold(0.0, f64::max)
        } else {
            values.fold(f64::INFINITY, f64::min)
        }
    };
    let eve_snr = worst(Receiver::Eavesdropper, true);
    let no_eve_rate = (1.0 + worst(Receiver::User, false)).log2();
    assert!(eve_snr < 0.05, "eve SNR {eve_snr}");
    assert!(no_eve_rate - out.eval_secrecy_rate_bits < 0.1);
}

#[test]
fn runs_are_deterministic() {
    let s = desk();
    let a = run_convergence(&s).unwrap().0.to_csv_string().unwrap();
    let b = run_convergence(&s).unwrap().0.to_csv_string().unwrap();
    assert_eq!(a, b);
}
