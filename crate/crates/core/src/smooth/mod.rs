//! Smoothness on the diagonal and off it: the intensity midpoint `f(a,b)`
//! and its limit quotient, the calibration function, a finite-difference
//! proxy for smooth indifference sets, and cross-partial classification.

pub mod alep;
pub mod debreu;
pub mod diagonal;
pub mod diff;

pub use alep::{
    alep_classify, alep_classify_reconstruction, AlepClassification, AlepLabel, DEFAULT_ALEP_THRESHOLD, MIN_ALEP_DEPTH,
};
pub use debreu::{
    debreu_smoothness_proxy, DebreuOptions, DebreuReport, DebreuSample, DEFAULT_DEBREU_RTOL, DEFAULT_DEBREU_STEP,
};
pub use diagonal::{
    calibrate, calibrate_default, default_schedule, line_smoothness_limit, solve_f, DiagonalPoint, LimitRow,
    LineVerdict, SmoothnessReport, DEFAULT_CALIBRATION_TOL, DEFAULT_F_TOL, LINE_SMOOTH_THRESHOLD,
};
pub use diff::{cross_partial, numeric_gradient, numeric_hessian};
