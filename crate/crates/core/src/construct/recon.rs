//! Utility reconstruction: a ladder on a reference segment plus calibration.
//!
//! A point `x` is evaluated by finding `c(x)` on the segment with `x ∼ c(x)`
//! and reading the ladder value there, interpolated linearly in the segment
//! parameter between the two bracketing deepest-level rungs.

use serde::{Deserialize, Serialize};

use crate::construct::ladder::{build_ladder, DyadicLadder, RungRecord, DEFAULT_DEPTH};
use crate::construct::segment::Segment;
use crate::construct::solve::{locate, DEFAULT_TOL_T};
use crate::domain::Point;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::system::axioms::{check_monotonicity, CheckOptions};
use crate::system::oracle::{AltOracle, IntensityOrder, Preference};
use crate::system::sampling::UniformSampler;

/// Points checked along the reference segment for strictly increasing preference.
const PATH_CHECK_POINTS: usize = 65;
const MONOTONICITY_TRIALS: usize = 256;

/// Where a calibrated point fell relative to the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeFlag {
    /// Between two rungs (or on one).
    Interior,
    /// On the segment but beyond the outermost rung; value extrapolated from the last gap.
    Extrapolated,
    /// Worse than every segment point; evaluated at the segment start.
    ClampedLow,
    /// Better than every segment point; evaluated at the segment end.
    ClampedHigh,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    pub value: T,
    /// Calibration parameter on the reference segment.
    pub t: T,
    pub edge: EdgeFlag,
    /// Deepest-level index of a rung the point is indifferent to, if any.
    pub exact_rung: Option<i64>,
}

#[derive(Debug, Clone)]
pub struct ReconstructionOptions<T> {
    pub depth: u32,
    pub tol_t: T,
    /// Reference segment; the box main diagonal when absent.
    pub segment: Option<Segment<T>>,
    /// `(y*, x*)` with values 0 and 1; the segment ends when absent.
    pub anchors: Option<(Point<T>, Point<T>)>,
}

impl<T: Scalar> Default for ReconstructionOptions<T> {
    fn default() -> Self {
        Self { depth: DEFAULT_DEPTH, tol_t: T::lit(DEFAULT_TOL_T), segment: None, anchors: None }
    }
}

#[derive(Debug)]
pub struct ReconstructedUtility<'o, T: Scalar> {
    oracle: &'o AltOracle<T>,
    ladder: DyadicLadder<T>,
    anchors: (Point<T>, Point<T>),
    tol_t: T,
    construction_calls: u64,
}

/// Serializable form of a reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionArtifact {
    pub oracle: String,
    pub segment: [Vec<f64>; 2],
    pub anchors: [Vec<f64>; 2],
    pub depth: u32,
    pub tol_t: f64,
    pub eps_eq: f64,
    pub oracle_calls: u64,
    pub rungs: Vec<RungRecord>,
}

/// Builds a reconstruction of the oracle's utility.
///
/// The reference path must be strictly increasing in preference. On the
/// default diagonal this is checked with the monotonicity checker plus a scan
/// along the path; a caller-supplied segment is only scanned.
pub fn reconstruct<'o, T: Scalar>(
    oracle: &'o AltOracle<T>,
    opts: ReconstructionOptions<T>,
) -> Result<ReconstructedUtility<'o, T>> {
    let start_calls = oracle.calls();
    let custom = opts.segment.is_some();
    let segment = opts.segment.unwrap_or_else(|| oracle.domain().main_diagonal());
    if !custom {
        let report = check_monotonicity(oracle, &UniformSampler, &CheckOptions::new(MONOTONICITY_TRIALS, 0))?;
        if !report.passed() {
            return Err(Error::NotMonotone(format!(
                "{} of {} dominance pairs not strictly preferred; supply a strictly ranked reference segment",
                report.violation_count, report.evaluated
            )));
        }
    }
    let (y_star, x_star) = opts.anchors.unwrap_or_else(|| (segment.start().clone(), segment.end().clone()));
    let ladder = build_ladder(oracle, &segment, &y_star, &x_star, opts.depth, opts.tol_t)?;
    check_path(oracle, ladder.segment())?;
    Ok(ReconstructedUtility {
        oracle,
        ladder,
        anchors: (y_star, x_star),
        tol_t: opts.tol_t,
        construction_calls: oracle.calls().saturating_sub(start_calls),
    })
}

fn check_path<T: Scalar>(oracle: &AltOracle<T>, seg: &Segment<T>) -> Result<()> {
    let step = T::one() / T::lit((PATH_CHECK_POINTS - 1) as f64);
    let mut prev = seg.at(T::zero());
    for j in 1..PATH_CHECK_POINTS {
        let next = seg.at(step * T::lit(j as f64));
        if oracle.prefers(&next, &prev) != Preference::Prefer {
            return Err(Error::NotMonotone(format!(
                "preference does not strictly increase along the reference segment near {:?}",
                next.to_f64_vec()
            )));
        }
        prev = next;
    }
    Ok(())
}

impl<'o, T: Scalar> ReconstructedUtility<'o, T> {
    pub fn oracle(&self) -> &'o AltOracle<T> {
        self.oracle
    }

    pub fn ladder(&self) -> &DyadicLadder<T> {
        &self.ladder
    }

    pub fn depth(&self) -> u32 {
        self.ladder.depth()
    }

    pub fn anchors(&self) -> (&Point<T>, &Point<T>) {
        (&self.anchors.0, &self.anchors.1)
    }

    pub fn tol_t(&self) -> T {
        self.tol_t
    }

    /// Oracle calls spent building the ladder.
    pub fn construction_calls(&self) -> u64 {
        self.construction_calls
    }

    /// Value spacing of adjacent deepest-level rungs.
    pub fn rung_gap(&self) -> T {
        self.ladder.gap()
    }

    /// Parameter of the point on the reference segment indifferent to `x`.
    pub fn calibrate(&self, x: &Point<T>) -> Result<(T, EdgeFlag)> {
        self.oracle.domain().check(x)?;
        let seg = self.ladder.segment();
        let classify = |t: T| match self.oracle.prefers(&seg.at(t), x) {
            Preference::Prefer => IntensityOrder::Greater,
            Preference::Indifferent => IntensityOrder::Equal,
            Preference::Disprefer => IntensityOrder::Less,
        };
        if classify(T::one()) == IntensityOrder::Less {
            return Ok((T::one(), EdgeFlag::ClampedHigh));
        }
        if classify(T::zero()) == IntensityOrder::Greater {
            return Ok((T::zero(), EdgeFlag::ClampedLow));
        }
        Ok((locate(classify, T::zero(), T::one(), self.tol_t)?.t, EdgeFlag::Interior))
    }

    pub fn evaluate(&self, x: &Point<T>) -> Result<T> {
        Ok(self.evaluate_detailed(x)?.value)
    }

    pub fn evaluate_detailed(&self, x: &Point<T>) -> Result<Evaluation<T>> {
        let (t, mut edge) = self.calibrate(x)?;
        let params = self.ladder.params();
        let base = self.ladder.min_index();
        let depth = self.ladder.depth();
        let value_at = |j: usize| DyadicLadder::<T>::value(base + j as i64, depth);
        let seg = self.ladder.segment();
        let snap = |j: usize| self.oracle.prefers(x, &seg.at(params[j])) == Preference::Indifferent;

        let idx = params.partition_point(|&p| p <= t);
        let (j0, j1) = match idx {
            0 => (0, 1),
            n if n == params.len() => (n - 2, n - 1),
            n => (n - 1, n),
        };
        for j in [j0, j1] {
            if snap(j) {
                return Ok(Evaluation {
                    value: value_at(j),
                    t,
                    edge: EdgeFlag::Interior,
                    exact_rung: Some(base + j as i64),
                });
            }
        }
        if edge == EdgeFlag::Interior && (t < params[0] || t > params[params.len() - 1]) {
            edge = EdgeFlag::Extrapolated;
        }
        let (t0, t1) = (params[j0], params[j1]);
        let frac = (t - t0) / (t1 - t0);
        let value = value_at(j0) + frac * self.ladder.gap();
        Ok(Evaluation { value, t, edge, exact_rung: None })
    }

    pub fn artifact(&self) -> ReconstructionArtifact {
        let seg = self.ladder.segment();
        ReconstructionArtifact {
            oracle: self.oracle.name().to_string(),
            segment: [seg.start().to_f64_vec(), seg.end().to_f64_vec()],
            anchors: [self.anchors.0.to_f64_vec(), self.anchors.1.to_f64_vec()],
            depth: self.depth(),
            tol_t: self.tol_t.as_f64(),
            eps_eq: self.oracle.eps_eq().as_f64(),
            oracle_calls: self.construction_calls,
            rungs: self.ladder.records(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxDomain;

    fn difference_oracle(dom: BoxDomain<f64>, u: fn(&[f64]) -> f64) -> AltOracle<f64> {
        AltOracle::new("u", dom, 1e-9, move |x, y, z, w| IntensityOrder::classify(u(x) - u(y), u(z) - u(w), 1e-9))
    }

    fn p(c: &[f64]) -> Point<f64> {
        Point::from_f64(c).unwrap()
    }

    #[test]
    fn linear_rescale() {
        let o = difference_oracle(BoxDomain::cube(1, 0.0, 1.0).unwrap(), |x| x[0]);
        let opts = ReconstructionOptions { depth: 6, anchors: Some((p(&[0.0]), p(&[0.25]))), ..Default::default() };
        let r = reconstruct(&o, opts).unwrap();
        assert!((r.evaluate(&p(&[0.75])).unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(r.evaluate(&p(&[0.0])).unwrap(), 0.0);
        assert_eq!(r.evaluate(&p(&[0.25])).unwrap(), 1.0);
    }

    #[test]
    fn cobb_douglas_off_diagonal() {
        let o = difference_oracle(BoxDomain::cube(2, 0.1, 10.0).unwrap(), |x| (x[0] * x[1]).sqrt());
        let opts =
            ReconstructionOptions { depth: 8, anchors: Some((p(&[1.0, 1.0]), p(&[2.0, 2.0]))), ..Default::default() };
        let r = reconstruct(&o, opts).unwrap();
        let e = r.evaluate_detailed(&p(&[4.0, 1.0])).unwrap();
        assert!((e.value - 1.0).abs() < 1e-9, "{e:?}");
        assert_eq!(e.edge, EdgeFlag::Interior);
    }

    #[test]
    fn extrapolation_and_clamping_are_flagged() {
        let o = difference_oracle(BoxDomain::cube(1, 0.0, 1.0).unwrap(), |x| x[0]);
        let seg = Segment::new(p(&[0.2]), p(&[0.8]), o.domain()).unwrap();
        let opts = ReconstructionOptions {
            depth: 2,
            segment: Some(seg),
            anchors: Some((p(&[0.2]), p(&[0.45]))),
            ..Default::default()
        };
        let r = reconstruct(&o, opts).unwrap();
        let e = r.evaluate_detailed(&p(&[0.78])).unwrap();
        assert_eq!(e.edge, EdgeFlag::Extrapolated);
        assert!((e.value - 2.32).abs() < 1e-9);
        let high = r.evaluate_detailed(&p(&[0.95])).unwrap();
        assert_eq!(high.edge, EdgeFlag::ClampedHigh);
        assert_eq!(r.evaluate_detailed(&p(&[0.05])).unwrap().edge, EdgeFlag::ClampedLow);
    }

    #[test]
    fn non_monotone_needs_custom_segment() {
        let o = difference_oracle(BoxDomain::cube(1, 0.0, 2.0).unwrap(), |x| -(x[0] - 1.0).powi(2));
        assert!(matches!(reconstruct(&o, ReconstructionOptions::default()), Err(Error::NotMonotone(_))));
        let seg = Segment::new(p(&[0.0]), p(&[1.0]), o.domain()).unwrap();
        let r = reconstruct(&o, ReconstructionOptions { depth: 8, segment: Some(seg), ..Default::default() }).unwrap();
        // u(1.5) = u(0.5) = -0.25, i.e. value 0.75 between u(0) = -1 and u(1) = 0
        assert!((r.evaluate(&p(&[1.5])).unwrap() - 0.75).abs() < 1e-4);
    }

    #[test]
    fn artifact_round_trips() {
        let o = difference_oracle(BoxDomain::cube(1, 0.0, 1.0).unwrap(), |x| x[0]);
        let r = reconstruct(&o, ReconstructionOptions { depth: 3, ..Default::default() }).unwrap();
        let a = r.artifact();
        assert_eq!(a.rungs.len(), 9);
        assert!(a.oracle_calls > 0);
        let back: ReconstructionArtifact = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
    }
}
