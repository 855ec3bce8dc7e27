//! Sweeps, envelope calibration, counterexample experiments and emitters.

pub mod calibrate;
pub mod emit;
pub mod experiment;
mod nonfinite;
pub mod sweep;

pub use calibrate::{calibrate, CalibrationResult, CalibrationRow};
pub use emit::{emit, emit_region, Format, RegionReport};
pub use experiment::{
    calibration_report, run_counterexample, sweep_report, Check, CounterexampleKind,
    CounterexampleSpec, ExperimentReport, Outcome,
};
pub use sweep::{
    calibration_rows, run_sweep, AxisName, AxisRange, GridAxis, PairSampling, RadialInput,
    SweepRow, SweepSpec, SweepTarget,
};
