//! Diagonal machinery: the intensity midpoint `f(a, b)`, the limit of
//! `(b − f(a,b))/a` as `a ↓ 0`, and the calibration function `a(x)`.

use serde::{Deserialize, Serialize};

use crate::construct::solve::locate;
use crate::construct::solve_midpoint;
use crate::domain::{BoxDomain, Point};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::system::oracle::{AltOracle, IntensityOrder, Preference};

/// Absolute tolerance on `f`, before shrinking with `a`.
pub const DEFAULT_F_TOL: f64 = 1e-10;
/// Limits within this of zero count as zero.
pub const LINE_SMOOTH_THRESHOLD: f64 = 1e-3;
/// Schedule exponents `k` in `a_k = b·2^-k`.
pub const DEFAULT_SCHEDULE: std::ops::RangeInclusive<i32> = 4..=16;

/// The point `b·e`, `e = (1, …, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalPoint<T> {
    b: T,
    dim: usize,
}

impl<T: Scalar> DiagonalPoint<T> {
    pub fn new(b: T, domain: &BoxDomain<T>) -> Result<Self> {
        if !(b > T::zero()) {
            return Err(Error::InvalidArgument(format!("diagonal scale must be positive, got {b}")));
        }
        let d = Self { b, dim: domain.dim() };
        domain.check(&d.point())?;
        Ok(d)
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn point(&self) -> Point<T> {
        Point::diagonal(self.dim, self.b)
    }
}

/// Solves `[f·e, (b−a)·e] = [(b+a)·e, f·e]` for `f`.
///
/// The tolerance on `f` is `min(tol, a·1e-4)` so that the quotient
/// `(b − f)/a` keeps its resolution as `a` shrinks.
pub fn solve_f<T: Scalar>(oracle: &AltOracle<T>, a: T, b: T, tol: T) -> Result<T> {
    if !(a > T::zero() && a < b) {
        return Err(Error::InvalidArgument(format!("need 0 < a < b, got a = {a}, b = {b}")));
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let dom = oracle.domain();
    let lo = DiagonalPoint::new(b - a, dom)?.point();
    let hi = DiagonalPoint::new(b + a, dom)?.point();
    let tol_f = tol.min(a * T::lit(1e-4));
    let sol = solve_midpoint(oracle, &lo, &hi, tol_f / (T::two() * a))?;
    Ok((b - a) + T::two() * a * sol.t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineVerdict {
    LineSmooth,
    NotLineSmooth,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub a: f64,
    pub f: f64,
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub oracle: String,
    pub b: f64,
    pub rows: Vec<LimitRow>,
    /// Pairwise linear extrapolations to `a = 0` over the last four rows.
    pub extrapolations: Vec<f64>,
    pub estimate: f64,
    pub uncertainty: f64,
    pub verdict: LineVerdict,
    /// Whether every quotient lies in `[0, 1]`, as concavity forces.
    pub quotients_in_unit_interval: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// The default schedule `a_k = b·2^-k`, `k = 4..=16`.
pub fn default_schedule<T: Scalar>(b: T) -> Vec<T> {
    DEFAULT_SCHEDULE.map(|k| b * T::lit(2f64.powi(-k))).collect()
}

/// Estimates `lim (b − f(a,b))/a` as `a ↓ 0` along `schedule`.
///
/// The last four quotients give three pairwise linear extrapolations to
/// `a = 0`; the estimate is their mean and the uncertainty half their spread,
/// floored by the solver resolution. The verdict is not-line-smooth only when
/// the estimate exceeds both three uncertainties and the zero threshold.
/// A solver failure at small `a` truncates the table; with fewer than four
/// rows the verdict is inconclusive.
pub fn line_smoothness_limit<T: Scalar>(
    oracle: &AltOracle<T>,
    b: T,
    schedule: Option<Vec<T>>,
) -> Result<SmoothnessReport> {
    let schedule = schedule.unwrap_or_else(|| default_schedule(b));
    if schedule.is_empty() {
        return Err(Error::InvalidArgument("empty step schedule".into()));
    }
    if schedule.windows(2).any(|w| !(w[1] < w[0])) || !(schedule[schedule.len() - 1] > T::zero()) {
        return Err(Error::InvalidArgument("step schedule must be positive and strictly decreasing".into()));
    }
    DiagonalPoint::new(b, oracle.domain())?;
    let tol = T::lit(DEFAULT_F_TOL);

    let mut rows = Vec::with_capacity(schedule.len());
    let mut note = None;
    for &a in &schedule {
        match solve_f(oracle, a, b, tol) {
            Ok(f) => rows.push(LimitRow { a: a.as_f64(), f: f.as_f64(), quotient: ((b - f) / a).as_f64() }),
            Err(e @ (Error::ConstructionFailed(_) | Error::Bracket { .. })) => {
                note = Some(format!("schedule truncated at a = {a}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let quotients_in_unit_interval = rows.iter().all(|r| (-1e-9..=1.0 + 1e-9).contains(&r.quotient));

    let (extrapolations, estimate, uncertainty, verdict) = if rows.len() < 4 {
        note.get_or_insert_with(|| "fewer than four schedule points".into());
        (Vec::new(), f64::NAN, f64::INFINITY, LineVerdict::Inconclusive)
    } else {
        let tail = &rows[rows.len() - 4..];
        let ex: Vec<f64> =
            tail.windows(2).map(|w| (w[0].a * w[1].quotient - w[1].a * w[0].quotient) / (w[0].a - w[1].a)).collect();
        let mean = ex.iter().sum::<f64>() / ex.len() as f64;
        let (lo, hi) = ex.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        // Quotient resolution at the smallest step, amplified by the extrapolation.
        let a_min = tail[3].a;
        let resolution = 3.0 * DEFAULT_F_TOL.min(a_min * 1e-4) / a_min;
        let unc = ((hi - lo) / 2.0).max(resolution);
        let verdict = if mean.abs() > 3.0 * unc && mean.abs() > LINE_SMOOTH_THRESHOLD {
            LineVerdict::NotLineSmooth
        } else if mean.abs() <= LINE_SMOOTH_THRESHOLD && unc <= LINE_SMOOTH_THRESHOLD {
            LineVerdict::LineSmooth
        } else {
            LineVerdict::Inconclusive
        };
        (ex, mean, unc, verdict)
    };
    Ok(SmoothnessReport {
        oracle: oracle.name().to_string(),
        b: b.as_f64(),
        rows,
        extrapolations,
        estimate,
        uncertainty,
        verdict,
        quotients_in_unit_interval,
        note,
    })
}

/// Default calibration tolerance, relative to the diagonal range.
pub const DEFAULT_CALIBRATION_TOL: f64 = 1e-12;

/// `a(x)`: the scale with `x ∼ a(x)·e`, by preference bisection over the diagonal.
///
/// `tol` is absolute in `b`. Points better than the top of the diagonal or
/// worse than its bottom give [`Error::CalibrationRange`].
pub fn calibrate<T: Scalar>(oracle: &AltOracle<T>, x: &Point<T>, tol: T) -> Result<T> {
    let dom = oracle.domain();
    dom.check(x)?;
    let (lo, hi) =
        dom.diagonal_range().ok_or_else(|| Error::InvalidDomain("the box does not meet the diagonal".into()))?;
    let n = dom.dim();
    let clamp = |b: T| dom.clamp(&Point::diagonal(n, b));
    let classify = |b: T| match oracle.prefers(&clamp(b), x) {
        Preference::Prefer => IntensityOrder::Greater,
        Preference::Indifferent => IntensityOrder::Equal,
        Preference::Disprefer => IntensityOrder::Less,
    };
    if classify(hi) == IntensityOrder::Less || classify(lo) == IntensityOrder::Greater {
        return Err(Error::CalibrationRange { point: x.to_f64_vec() });
    }
    Ok(locate(classify, lo, hi, tol)?.t)
}

/// [`calibrate`] with the default tolerance.
pub fn calibrate_default<T: Scalar>(oracle: &AltOracle<T>, x: &Point<T>) -> Result<T> {
    let (lo, hi) = oracle
        .domain()
        .diagonal_range()
        .ok_or_else(|| Error::InvalidDomain("the box does not meet the diagonal".into()))?;
    calibrate(oracle, x, T::lit(DEFAULT_CALIBRATION_TOL) * (hi - lo))
}
