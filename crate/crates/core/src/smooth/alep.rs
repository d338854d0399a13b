//! Substitute / complement labels from the sign of a cross partial.

use serde::{Deserialize, Serialize};

use crate::construct::ReconstructedUtility;
use crate::domain::{BoxDomain, Point};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::smooth::diff::cross_partial;

pub const DEFAULT_ALEP_THRESHOLD: f64 = 1e-6;
/// Shallower ladders give piecewise-linear utilities with no usable second derivative.
pub const MIN_ALEP_DEPTH: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlepLabel {
    Substitute,
    Complement,
    Neutral,
    /// The stencils disagree with each other or under step halving, typically at a kink.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlepClassification {
    pub point: Vec<f64>,
    pub pair: (usize, usize),
    pub estimate: f64,
    /// Stencil with step `h` along `i` and `h/2` along `j`, and the transpose.
    pub stencil_ij: f64,
    pub stencil_ji: f64,
    /// The same average with every step halved.
    pub estimate_half: f64,
    pub label: AlepLabel,
}

/// Labels each point by `∂²u/∂x_i∂x_j`: below `−threshold` substitute, above
/// `threshold` complement, otherwise neutral.
///
/// The estimate averages the `(h, h/2)` and `(h/2, h)` cross stencils. When
/// the two stencils, or the estimates at `h` and `h/2`, differ by more than
/// `max(threshold, 5%)` of their size the point is indeterminate: a kink
/// makes the stencils asymmetric or scale with `1/h`.
pub fn alep_classify<T, F>(
    f: F,
    domain: &BoxDomain<T>,
    points: &[Point<T>],
    pair: (usize, usize),
    h: T,
    threshold: T,
) -> Result<Vec<AlepClassification>>
where
    T: Scalar,
    F: Fn(&Point<T>) -> Result<T>,
{
    let (i, j) = pair;
    if i == j || i.max(j) >= domain.dim() {
        return Err(Error::InvalidArgument(format!("pair ({i}, {j}) must name two distinct coordinates")));
    }
    if !(h > T::zero()) || !(threshold >= T::zero()) {
        return Err(Error::InvalidArgument("step must be positive and threshold non-negative".into()));
    }
    points
        .iter()
        .map(|x| {
            domain.check(x)?;
            if !domain.contains_with_margin(x, T::two() * h) {
                return Err(Error::MarginViolation { point: x.to_f64_vec(), margin: (T::two() * h).as_f64() });
            }
            let avg = |h: T| -> Result<(T, T, T)> {
                let sij = cross_partial(&f, x, i, j, h, h * T::half())?;
                let sji = cross_partial(&f, x, j, i, h, h * T::half())?;
                Ok(((sij + sji) * T::half(), sij, sji))
            };
            let (est, sij, sji) = avg(h)?;
            let (est2, _, _) = avg(h * T::half())?;
            let allowed = |a: T, b: T| threshold.max(T::lit(0.05) * a.abs().max(b.abs()));
            let label = if (sij - sji).abs() > allowed(sij, sji) || (est - est2).abs() > allowed(est, est2) {
                AlepLabel::Indeterminate
            } else if est < -threshold {
                AlepLabel::Substitute
            } else if est > threshold {
                AlepLabel::Complement
            } else {
                AlepLabel::Neutral
            };
            Ok(AlepClassification {
                point: x.to_f64_vec(),
                pair,
                estimate: est.as_f64(),
                stencil_ij: sij.as_f64(),
                stencil_ji: sji.as_f64(),
                estimate_half: est2.as_f64(),
                label,
            })
        })
        .collect()
}

/// [`alep_classify`] on a reconstruction, refused below depth [`MIN_ALEP_DEPTH`].
pub fn alep_classify_reconstruction<T: Scalar>(
    recon: &ReconstructedUtility<'_, T>,
    points: &[Point<T>],
    pair: (usize, usize),
    h: T,
    threshold: T,
) -> Result<Vec<AlepClassification>> {
    if recon.depth() < MIN_ALEP_DEPTH {
        return Err(Error::ShallowReconstruction { depth: recon.depth(), required: MIN_ALEP_DEPTH });
    }
    alep_classify(|p| recon.evaluate(p), recon.oracle().domain(), points, pair, h, threshold)
}
