//! Numeric proxy for smooth indifference sets, through the calibration
//! function `a(x)`: where `a` is continuously differentiable its central
//! differences settle under step halving and its one-sided differences agree.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Point;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::smooth::diagonal::{calibrate, DEFAULT_CALIBRATION_TOL};
use crate::system::axioms::CheckOptions;
use crate::system::oracle::AltOracle;
use crate::system::sampling::{trial_rng, Sampler};

/// Difference step relative to the box extent along each coordinate.
pub const DEFAULT_DEBREU_STEP: f64 = 1e-6;
/// Relative agreement required, against the gradient norm.
pub const DEFAULT_DEBREU_RTOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DebreuSample {
    pub point: Vec<f64>,
    pub calibration: f64,
    /// Central differences at `h` and `h/2`.
    pub central_h: Vec<f64>,
    pub central_half: Vec<f64>,
    /// One-sided differences at `h`.
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub halving_ok: bool,
    pub one_sided_ok: bool,
}

impl DebreuSample {
    pub fn smooth(&self) -> bool {
        self.halving_ok && self.one_sided_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DebreuReport {
    pub oracle: String,
    /// Always true: a finite sample cannot certify a smooth manifold.
    pub proxy: bool,
    pub trials: usize,
    pub seed: u64,
    pub step: Vec<f64>,
    pub rtol: f64,
    pub evaluated: usize,
    /// Points without room for the stencil or outside the calibration range.
    pub skipped: usize,
    pub failures: usize,
    pub passed: bool,
    pub witnesses: Vec<DebreuSample>,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DebreuOptions<T> {
    /// Step relative to the box extent.
    pub step: T,
    pub rtol: T,
}

impl<T: Scalar> Default for DebreuOptions<T> {
    fn default() -> Self {
        Self { step: T::lit(DEFAULT_DEBREU_STEP), rtol: T::lit(DEFAULT_DEBREU_RTOL) }
    }
}

fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |a, &b| a + b * b).sqrt()
}

fn probe<T: Scalar>(oracle: &AltOracle<T>, x: &Point<T>, h: &[T], tol: T, rtol: T) -> Result<DebreuSample> {
    let a = |p: &Point<T>| calibrate(oracle, p, tol);
    let n = x.dim();
    let a0 = a(x)?;
    let (mut ch, mut c2, mut right, mut left) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (i, &hi) in h.iter().enumerate().take(n) {
        let half = hi * T::half();
        let (p, m) = (a(&x.shifted(i, hi))?, a(&x.shifted(i, -hi))?);
        let (p2, m2) = (a(&x.shifted(i, half))?, a(&x.shifted(i, -half))?);
        ch.push((p - m) / (T::two() * hi));
        c2.push((p2 - m2) / (T::two() * half));
        right.push((p - a0) / hi);
        left.push((a0 - m) / hi);
    }
    let scale = norm(&ch).max(norm(&c2)).max(T::epsilon());
    let dist = |u: &[T], v: &[T]| norm(&u.iter().zip(v).map(|(&p, &q)| p - q).collect::<Vec<_>>());
    let f64s = |v: &[T]| v.iter().map(|t| t.as_f64()).collect::<Vec<_>>();
    Ok(DebreuSample {
        point: x.to_f64_vec(),
        calibration: a0.as_f64(),
        halving_ok: dist(&ch, &c2) <= rtol * scale,
        one_sided_ok: dist(&right, &left) <= rtol * scale,
        central_h: f64s(&ch),
        central_half: f64s(&c2),
        right: f64s(&right),
        left: f64s(&left),
    })
}

/// Samples points and tests the calibration function for a settled,
/// two-sided derivative at each. The report is labelled a proxy.
pub fn debreu_smoothness_proxy<T: Scalar, S: Sampler<T> + ?Sized>(
    oracle: &AltOracle<T>,
    sampler: &S,
    opts: &CheckOptions,
    dopts: DebreuOptions<T>,
) -> Result<DebreuReport> {
    opts.validate()?;
    if !(dopts.step > T::zero() && dopts.step < T::lit(0.1)) || !(dopts.rtol > T::zero()) {
        return Err(Error::InvalidArgument("step must lie in (0, 0.1) and rtol must be positive".into()));
    }
    let dom = oracle.domain();
    let (lo, hi) =
        dom.diagonal_range().ok_or_else(|| Error::InvalidDomain("the box does not meet the diagonal".into()))?;
    let tol = T::lit(DEFAULT_CALIBRATION_TOL) * (hi - lo);
    let h: Vec<T> = (0..dom.dim()).map(|i| dopts.step * dom.extent(i)).collect();
    let margin = T::two() * h.iter().fold(T::zero(), |a, &b| a.max(b));

    let rows = (0..opts.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(opts.seed, i);
            let pts = sampler.draw(dom, 1, i, &mut rng);
            let Some(x) = pts.into_iter().next() else {
                return Err(Error::InvalidArgument("sampler returned no point".into()));
            };
            if !dom.contains_with_margin(&x, margin) {
                return Ok(None);
            }
            match probe(oracle, &x, &h, tol, dopts.rtol) {
                Ok(s) => Ok(Some(s)),
                Err(Error::CalibrationRange { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let (mut evaluated, mut skipped, mut failures, mut witnesses) = (0, 0, 0, Vec::new());
    for r in rows {
        match r {
            None => skipped += 1,
            Some(s) => {
                evaluated += 1;
                if !s.smooth() {
                    failures += 1;
                    if witnesses.len() < opts.witness_cap {
                        witnesses.push(s);
                    }
                }
            }
        }
    }
    Ok(DebreuReport {
        oracle: oracle.name().to_string(),
        proxy: true,
        trials: opts.trials,
        seed: opts.seed,
        step: h.iter().map(|v| v.as_f64()).collect(),
        rtol: dopts.rtol.as_f64(),
        evaluated,
        skipped,
        failures,
        passed: failures == 0 && evaluated > 0,
        witnesses,
        note: "finite-difference proxy on the calibration function; kinks off the sample are missed".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::sampling::{DiagonalSampler, UniformSampler};
    use crate::zoo::lookup_utility;

    fn run<S: Sampler<f64>>(name: &str, s: &S) -> DebreuReport {
        let o = lookup_utility::<f64>(name).unwrap().oracle().unwrap();
        debreu_smoothness_proxy(&o, s, &CheckOptions::new(64, 11), DebreuOptions::default()).unwrap()
    }

    #[test]
    fn smooth_fixtures_pass() {
        for name in ["cobb_douglas", "kinked_composite", "linear"] {
            let r = run(name, &UniformSampler);
            assert!(r.passed, "{name}: {:?}", r.witnesses.first());
        }
    }

    #[test]
    fn min_fails_on_the_diagonal() {
        let r = run("min", &DiagonalSampler);
        assert!(!r.passed);
        assert_eq!(r.failures, r.evaluated);
        assert!(r.witnesses.iter().all(|w| !w.one_sided_ok));
    }
}
