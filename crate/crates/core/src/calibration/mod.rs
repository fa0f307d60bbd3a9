//! Least-squares calibration of the model variants to ATM swaption premia.
//!
//! The loss is the sum of squared relative premium errors. Each variant is
//! a restriction of the weighted model's parameter space; the fit uses a
//! box-constrained Levenberg-Marquardt iteration from several start points.

mod config;
mod optimizer;
mod problem;
mod report;
mod space;
mod variant;

pub use config::CalibrationConfig;
pub use optimizer::{
    calibrate, embed_without_eta, minimize_from, start_points, CalibrationResult, StartOutcome, TraceEntry,
};
pub use problem::{objective, objective_params, CalibrationProblem, Evaluation, OptimizerSettings, FAILED_CELL_RESIDUAL};
pub use report::{
    exact_fit_q_scale, residual_report, residual_report_params, vol_surface_report, write_vol_surface, ResidualCell,
    ResidualGrid, VolSurfacePoint,
};
pub use space::{Bound, ParamSpace};
pub use variant::{single_curve_from_forwards, ModelVariant};
