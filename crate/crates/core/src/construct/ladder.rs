//! The dyadic standard sequence `a_i^k`, carrying utility `i / 2^k`.
//!
//! Rungs live on one reference segment and are stored by segment parameter
//! at the deepest level only: `a_i^k = a_{i·2^(K-k)}^K`, so the identification
//! `a_i^k = a_{2i}^{k+1}` holds by construction.

use serde::{Deserialize, Serialize};

use crate::construct::segment::Segment;
use crate::construct::solve::{crossing_on, midpoint_on, Crossing};
use crate::domain::Point;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::system::oracle::{AltOracle, IntensityOrder, Preference};

pub const DEFAULT_DEPTH: u32 = 10;

/// Hard limit on stored rungs; deeper ladders exhaust the oracle tolerance long before.
const MAX_RUNGS: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicLadder<T> {
    segment: Segment<T>,
    depth: u32,
    tol_t: T,
    /// Deepest-level index of `params[0]`.
    min_index: i64,
    /// Segment parameters of the deepest-level rungs, strictly increasing.
    params: Vec<T>,
}

/// Serializable rung listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RungRecord {
    pub index: i64,
    pub param: f64,
    pub value: f64,
}

impl<T: Scalar> DyadicLadder<T> {
    pub fn segment(&self) -> &Segment<T> {
        &self.segment
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn tol_t(&self) -> T {
        self.tol_t
    }

    /// Number of deepest-level rungs.
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Deepest-level index range, inclusive.
    pub fn index_range(&self) -> (i64, i64) {
        (self.min_index, self.min_index + self.params.len() as i64 - 1)
    }

    pub(crate) fn params(&self) -> &[T] {
        &self.params
    }

    pub(crate) fn min_index(&self) -> i64 {
        self.min_index
    }

    fn scale(&self, k: u32) -> i64 {
        1i64 << (self.depth - k)
    }

    /// Segment parameter of `a_i^k`, if that rung was defined.
    pub fn rung_param(&self, i: i64, k: u32) -> Option<T> {
        if k > self.depth {
            return None;
        }
        let j = i.checked_mul(self.scale(k))? - self.min_index;
        usize::try_from(j).ok().and_then(|j| self.params.get(j).copied())
    }

    pub fn rung(&self, i: i64, k: u32) -> Option<Point<T>> {
        self.rung_param(i, k).map(|t| self.segment.at(t))
    }

    /// Defined indices at level `k`, ascending.
    pub fn level_indices(&self, k: u32) -> Vec<i64> {
        if k > self.depth {
            return Vec::new();
        }
        let s = self.scale(k);
        let (lo, hi) = self.index_range();
        let first = lo.div_euclid(s) + i64::from(lo.rem_euclid(s) != 0);
        (first..=hi.div_euclid(s)).collect()
    }

    /// Utility value `i / 2^k` assigned to `a_i^k`.
    pub fn value(i: i64, k: u32) -> T {
        T::lit(i as f64 / (1u64 << k) as f64)
    }

    /// Value spacing of consecutive deepest-level rungs.
    pub fn gap(&self) -> T {
        Self::value(1, self.depth)
    }

    pub fn records(&self) -> Vec<RungRecord> {
        self.params
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                let index = self.min_index + j as i64;
                RungRecord { index, param: t.as_f64(), value: Self::value(index, self.depth).as_f64() }
            })
            .collect()
    }
}

/// Builds the ladder anchored at `y_star` (value 0) and `x_star` (value 1).
///
/// Both anchors must lie on `segment`, and preference must increase along it.
/// Level 0 is extended in both directions with the crossing solvers until
/// the segment end cannot accommodate another full step; each further level
/// inserts intensity midpoints between consecutive rungs and tries one more
/// half-step at each end.
pub fn build_ladder<T: Scalar>(
    oracle: &AltOracle<T>,
    segment: &Segment<T>,
    y_star: &Point<T>,
    x_star: &Point<T>,
    depth: u32,
    tol_t: T,
) -> Result<DyadicLadder<T>> {
    if depth > 40 {
        return Err(Error::InvalidArgument(format!("ladder depth {depth} exceeds 40")));
    }
    oracle.domain().check(y_star)?;
    oracle.domain().check(x_star)?;
    if oracle.prefers(x_star, y_star) != Preference::Prefer {
        return Err(Error::Ordering("ladder anchors must be strictly ranked, x* preferred to y*".into()));
    }
    let rel = T::lit(1e-9);
    let locate_anchor = |seg: &Segment<T>, p: &Point<T>| {
        seg.param_of(p, rel).ok_or_else(|| Error::AnchorOffSegment { point: p.to_f64_vec() })
    };
    let mut seg = segment.clone();
    let (mut t_y, mut t_x) = (locate_anchor(&seg, y_star)?, locate_anchor(&seg, x_star)?);
    if t_x < t_y {
        seg = Segment::new_unchecked(segment.end().clone(), segment.start().clone());
        t_y = T::one() - t_y;
        t_x = T::one() - t_x;
    }

    let mut ladder = DyadicLadder { segment: seg, depth: 0, tol_t, min_index: 0, params: vec![t_y, t_x] };
    extend_level_zero(oracle, &mut ladder)?;
    for _ in 0..depth {
        refine(oracle, &mut ladder)?;
    }
    Ok(ladder)
}

fn unit_points<T: Scalar>(ladder: &DyadicLadder<T>) -> (Point<T>, Point<T>) {
    let k = ladder.depth;
    let a0 = ladder.rung(0, k).expect("anchor y* is always a rung");
    let a1 = ladder.rung(1, k).expect("first step is always a rung");
    (a0, a1)
}

/// Tries to add one rung above the current top. Returns whether it did.
fn push_top<T: Scalar>(
    oracle: &AltOracle<T>,
    ladder: &mut DyadicLadder<T>,
    a0: &Point<T>,
    a1: &Point<T>,
) -> Result<bool> {
    let seg = ladder.segment.clone();
    let t_top = *ladder.params.last().expect("non-empty");
    let top = seg.at(t_top);
    if oracle.compare(seg.end(), &top, a1, a0) == IntensityOrder::Less {
        return Ok(false);
    }
    let loc = crossing_on(oracle, &seg, t_top, T::one(), Crossing::Head { base: &top, z: a1, w: a0 }, ladder.tol_t)?;
    if loc.t <= t_top {
        return Ok(false);
    }
    ladder.params.push(loc.t);
    Ok(true)
}

/// Tries to add one rung below the current bottom. Returns whether it did.
fn push_bottom<T: Scalar>(
    oracle: &AltOracle<T>,
    ladder: &mut DyadicLadder<T>,
    a0: &Point<T>,
    a1: &Point<T>,
) -> Result<bool> {
    let seg = ladder.segment.clone();
    let t_bot = ladder.params[0];
    let bot = seg.at(t_bot);
    if oracle.compare(&bot, seg.start(), a1, a0) == IntensityOrder::Less {
        return Ok(false);
    }
    let loc = crossing_on(oracle, &seg, T::zero(), t_bot, Crossing::Tail { head: &bot, z: a1, w: a0 }, ladder.tol_t)?;
    if loc.t >= t_bot {
        return Ok(false);
    }
    ladder.params.insert(0, loc.t);
    ladder.min_index -= 1;
    Ok(true)
}

fn check_size<T>(ladder: &DyadicLadder<T>) -> Result<()> {
    if ladder.params.len() > MAX_RUNGS {
        return Err(Error::ConstructionFailed(format!("ladder exceeded {MAX_RUNGS} rungs")));
    }
    Ok(())
}

fn extend_level_zero<T: Scalar>(oracle: &AltOracle<T>, ladder: &mut DyadicLadder<T>) -> Result<()> {
    let (a0, a1) = unit_points(ladder);
    while push_top(oracle, ladder, &a0, &a1)? {
        check_size(ladder)?;
    }
    while push_bottom(oracle, ladder, &a0, &a1)? {
        check_size(ladder)?;
    }
    Ok(())
}

fn refine<T: Scalar>(oracle: &AltOracle<T>, ladder: &mut DyadicLadder<T>) -> Result<()> {
    let seg = ladder.segment.clone();
    let old = std::mem::take(&mut ladder.params);
    let mut params = Vec::with_capacity(2 * old.len() + 1);
    for pair in old.windows(2) {
        params.push(pair[0]);
        params.push(midpoint_on(oracle, &seg, pair[0], pair[1], ladder.tol_t)?.t);
    }
    params.push(*old.last().expect("non-empty"));
    ladder.params = params;
    ladder.min_index *= 2;
    ladder.depth += 1;
    check_size(ladder)?;

    let (a0, a1) = unit_points(ladder);
    push_top(oracle, ladder, &a0, &a1)?;
    push_bottom(oracle, ladder, &a0, &a1)?;
    Ok(())
}

/// Oracle-side audit of a ladder.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LadderAudit {
    /// Level-`k` rungs not indifferent to their level-`k+1` copy.
    pub identification_failures: usize,
    /// Consecutive deepest-level steps not Equal to the unit step.
    pub spacing_failures: usize,
    /// Consecutive rungs not strictly increasing in preference.
    pub ordering_failures: usize,
    pub checked_steps: usize,
}

impl LadderAudit {
    pub fn is_clean(&self) -> bool {
        self.identification_failures == 0 && self.spacing_failures == 0 && self.ordering_failures == 0
    }
}

impl<T: Scalar> DyadicLadder<T> {
    /// Checks the rung invariants with the oracle.
    pub fn audit(&self, oracle: &AltOracle<T>) -> LadderAudit {
        let mut audit = LadderAudit::default();
        for k in 0..self.depth {
            for i in self.level_indices(k) {
                let (a, b) = (self.rung(i, k).unwrap(), self.rung(2 * i, k + 1).unwrap());
                if oracle.prefers(&a, &b) != Preference::Indifferent {
                    audit.identification_failures += 1;
                }
            }
        }
        let (a0, a1) = unit_points(self);
        let pts: Vec<Point<T>> = self.params.iter().map(|&t| self.segment.at(t)).collect();
        for w in pts.windows(2) {
            audit.checked_steps += 1;
            if oracle.compare(&w[1], &w[0], &a1, &a0) != IntensityOrder::Equal {
                audit.spacing_failures += 1;
            }
            if oracle.prefers(&w[1], &w[0]) != Preference::Prefer {
                audit.ordering_failures += 1;
            }
        }
        audit
    }
}
