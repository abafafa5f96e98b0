//! Scenario configuration, experiment drivers and CSV result tables.

mod experiments;
mod scenario;
mod table;

pub use experiments::{
    combined_status, mean_power_over, run_convergence, run_distance_sweep, run_heatmap, run_lc_curve, run_optimize,
    status_str, Design, OptimizeOutcome, PowerProbe, SweepPoint, POWER_FLOOR_DB, PROVENANCE,
};
pub use scenario::{
    db_to_linear, dbm_to_watts, mix_seed, BsConfig, ChannelMode, EvePlacement, Links, Orientation, PlaneGrid,
    RisConfig, Scenario, Setup,
};
pub use table::{Cell, ResultTable};
