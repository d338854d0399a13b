use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::Point;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::system::oracle::{AltOracle, IntensityOrder, Preference};

/// The properties a checker can report on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Consistency,
    Crossover,
    SecondConsistency,
    Continuity,
    Monotonicity,
    Density,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Self::Consistency => "consistency",
            Self::Crossover => "crossover",
            Self::SecondConsistency => "second_consistency",
            Self::Continuity => "continuity",
            Self::Monotonicity => "monotonicity",
            Self::Density => "density",
        }
    }

    /// Evaluates the axiom on one witness tuple.
    ///
    /// Returns whether the tuple violates the axiom plus the raw oracle
    /// outputs consulted, in a fixed order per axiom.
    pub fn evaluate<T: Scalar>(self, oracle: &AltOracle<T>, pts: &[Point<T>]) -> Result<(bool, Vec<IntensityOrder>)> {
        let need = match self {
            Self::Consistency | Self::SecondConsistency => 3,
            Self::Crossover => 4,
            Self::Continuity => 8,
            Self::Monotonicity => 2,
            Self::Density => return Err(Error::NotReplayable(self.name().into())),
        };
        if pts.len() != need {
            return Err(Error::InvalidArgument(format!(
                "{} witness needs {need} points, got {}",
                self.name(),
                pts.len()
            )));
        }
        Ok(match self {
            Self::Consistency => {
                let (x, y, z) = (&pts[0], &pts[1], &pts[2]);
                let xy = oracle.compare(x, y, y, y);
                let xz_yz = oracle.compare(x, z, y, z);
                let yx = oracle.compare(y, x, x, x);
                let yz_xz = oracle.compare(y, z, x, z);
                let bad = xy.is_ge() != xz_yz.is_ge() || yx.is_ge() != yz_xz.is_ge();
                (bad, vec![xy, xz_yz, yx, yz_xz])
            }
            Self::SecondConsistency => {
                let (x, y, z) = (&pts[0], &pts[1], &pts[2]);
                let xy = oracle.compare(x, y, y, y);
                let zy_zx = oracle.compare(z, y, z, x);
                let yx = oracle.compare(y, x, x, x);
                let zx_zy = oracle.compare(z, x, z, y);
                let bad = xy.is_ge() != zy_zx.is_ge() || yx.is_ge() != zx_zy.is_ge();
                (bad, vec![xy, zy_zx, yx, zx_zy])
            }
            Self::Crossover => {
                let (x, y, z, w) = (&pts[0], &pts[1], &pts[2], &pts[3]);
                let xy_zw = oracle.compare(x, y, z, w);
                let xz_yw = oracle.compare(x, z, y, w);
                let bad = (xy_zw == IntensityOrder::Equal) != (xz_yw == IntensityOrder::Equal);
                (bad, vec![xy_zw, xz_yw])
            }
            Self::Continuity => {
                let orig = oracle.compare(&pts[0], &pts[1], &pts[2], &pts[3]);
                let pert = oracle.compare(&pts[4], &pts[5], &pts[6], &pts[7]);
                (orig == IntensityOrder::Greater && !pert.is_ge(), vec![orig, pert])
            }
            Self::Monotonicity => {
                let (x, y) = (&pts[0], &pts[1]);
                let out = oracle.compare(x, y, y, y);
                let bad = x.strictly_dominates(y) && Preference::from(out) != Preference::Prefer;
                (bad, vec![out])
            }
            Self::Density => unreachable!(),
        })
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub points: Vec<Vec<f64>>,
    pub oracle_outputs: Vec<IntensityOrder>,
}

impl Witness {
    pub fn new<T: Scalar>(points: &[Point<T>], oracle_outputs: Vec<IntensityOrder>) -> Self {
        Self { points: points.iter().map(Point::to_f64_vec).collect(), oracle_outputs }
    }

    pub fn points<T: Scalar>(&self) -> Result<Vec<Point<T>>> {
        self.points.iter().map(|p| Point::from_f64(p)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub trials: usize,
    pub seed: u64,
    pub verdict: Verdict,
    /// Tuples on which the axiom was actually tested.
    pub evaluated: usize,
    /// Trials that produced no testable tuple (e.g. no Equal case manufactured).
    pub skipped: usize,
    pub violation_count: usize,
    pub violations: Vec<Witness>,
    /// True when the check is a necessary-condition proxy rather than the axiom itself.
    pub proxy: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Re-runs every stored witness; true when all still violate the axiom.
    pub fn replay<T: Scalar>(&self, oracle: &AltOracle<T>) -> Result<bool> {
        for w in &self.violations {
            let pts = w.points::<T>()?;
            let (bad, _) = self.axiom.evaluate(oracle, &pts)?;
            if !bad {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Accumulates per-trial results in trial order.
#[derive(Debug, Default)]
pub(crate) struct Tally {
    pub evaluated: usize,
    pub skipped: usize,
    pub violations: Vec<Witness>,
}

impl Tally {
    pub fn merge(mut self, other: Tally) -> Tally {
        self.evaluated += other.evaluated;
        self.skipped += other.skipped;
        self.violations.extend(other.violations);
        self
    }

    pub fn into_report(self, axiom: Axiom, trials: usize, seed: u64, cap: usize, proxy: bool) -> AxiomReport {
        let violation_count = self.violations.len();
        let mut violations = self.violations;
        violations.truncate(cap);
        AxiomReport {
            axiom,
            trials,
            seed,
            verdict: if violation_count == 0 { Verdict::Pass } else { Verdict::Fail },
            evaluated: self.evaluated,
            skipped: self.skipped,
            violation_count,
            violations,
            proxy,
            note: None,
        }
    }
}
