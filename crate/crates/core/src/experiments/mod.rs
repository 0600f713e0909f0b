//! Configuration-driven experiments and their CSV output.

pub mod config;
pub mod csv;
pub mod sweep;

pub use config::{ExperimentConfig, SweepSpec, SweepStride, SweepVariable, SPEED_OF_LIGHT};
pub use csv::{emit_csv, SweepResult, Value};
pub use sweep::{
    run_capacity_point, run_geometry_sweep, run_gram_check, run_optimize, run_spacing_sweep,
    run_xpd_sweep, spacing_row, xpd_row,
};
