//! Commodity bundles and the box domains they live in.

use std::ops::Index;

use rand::distributions::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::construct::Segment;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A commodity bundle in R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T> {
    coords: Vec<T>,
}

impl<T: Scalar> Point<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("point must have at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite(coords.iter().map(|c| c.as_f64()).collect()));
        }
        Ok(Self { coords })
    }

    /// Builds a point from `f64` coordinates, converting to the scalar type.
    pub fn from_f64(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| T::lit(c)).collect())
    }

    /// The diagonal bundle `b·e` with `e = (1, …, 1)`.
    pub fn diagonal(dim: usize, b: T) -> Self {
        Self { coords: vec![b; dim] }
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<T>) -> Self {
        Self { coords }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.as_f64()).collect()
    }

    /// `(1 - t)·self + t·other`.
    pub fn lerp(&self, other: &Self, t: T) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        let s = T::one() - t;
        Self { coords: self.coords.iter().zip(&other.coords).map(|(&a, &b)| s * a + t * b).collect() }
    }

    pub fn midpoint(&self, other: &Self) -> Self {
        self.lerp(other, T::half())
    }

    /// Copy of `self` with coordinate `i` shifted by `delta`.
    pub fn shifted(&self, i: usize, delta: T) -> Self {
        let mut coords = self.coords.clone();
        coords[i] = coords[i] + delta;
        Self { coords }
    }

    /// `self + scale·dir`.
    pub fn offset(&self, dir: &[T], scale: T) -> Self {
        Self { coords: self.coords.iter().zip(dir).map(|(&a, &d)| a + scale * d).collect() }
    }

    pub fn distance(&self, other: &Self) -> T {
        self.coords.iter().zip(&other.coords).fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b)).sqrt()
    }

    /// `self ≫ other`: strictly larger in every coordinate.
    pub fn strictly_dominates(&self, other: &Self) -> bool {
        self.coords.iter().zip(&other.coords).all(|(a, b)| a > b)
    }
}

impl<T> Index<usize> for Point<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.coords[i]
    }
}

/// Serializable description of a box, used by configs and reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_open: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_open: Option<Vec<bool>>,
}

/// A product of intervals. Convex, so every segment between members stays inside.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain<T> {
    lower: Point<T>,
    upper: Point<T>,
    lower_open: Vec<bool>,
    upper_open: Vec<bool>,
}

impl<T: Scalar> BoxDomain<T> {
    /// Closed box `[lower, upper]`.
    pub fn new(lower: Point<T>, upper: Point<T>) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::DimensionMismatch { expected: lower.dim(), found: upper.dim() });
        }
        if lower.coords.iter().zip(&upper.coords).any(|(l, u)| l >= u) {
            return Err(Error::InvalidDomain(format!(
                "lower {:?} must be below upper {:?} in every coordinate",
                lower.to_f64_vec(),
                upper.to_f64_vec()
            )));
        }
        let n = lower.dim();
        Ok(Self { lower, upper, lower_open: vec![false; n], upper_open: vec![false; n] })
    }

    /// `[lo, hi]^n`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(Point::from_f64(&vec![lo; dim])?, Point::from_f64(&vec![hi; dim])?)
    }

    /// Marks faces open, e.g. to model a strictly positive truncation.
    pub fn with_open_faces(mut self, lower_open: Vec<bool>, upper_open: Vec<bool>) -> Result<Self> {
        let n = self.dim();
        if lower_open.len() != n || upper_open.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: lower_open.len().min(upper_open.len()) });
        }
        self.lower_open = lower_open;
        self.upper_open = upper_open;
        Ok(self)
    }

    pub fn from_spec(spec: &DomainSpec) -> Result<Self> {
        let dom = Self::new(Point::from_f64(&spec.lower)?, Point::from_f64(&spec.upper)?)?;
        let n = dom.dim();
        dom.with_open_faces(
            spec.lower_open.clone().unwrap_or_else(|| vec![false; n]),
            spec.upper_open.clone().unwrap_or_else(|| vec![false; n]),
        )
    }

    pub fn to_spec(&self) -> DomainSpec {
        let any = |v: &[bool]| v.iter().any(|&b| b);
        DomainSpec {
            lower: self.lower.to_f64_vec(),
            upper: self.upper.to_f64_vec(),
            lower_open: any(&self.lower_open).then(|| self.lower_open.clone()),
            upper_open: any(&self.upper_open).then(|| self.upper_open.clone()),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn lower(&self) -> &Point<T> {
        &self.lower
    }

    pub fn upper(&self) -> &Point<T> {
        &self.upper
    }

    pub fn extent(&self, i: usize) -> T {
        self.upper[i] - self.lower[i]
    }

    pub fn diameter(&self) -> T {
        self.lower.distance(&self.upper)
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        p.dim() == self.dim()
            && (0..self.dim()).all(|i| {
                let c = p[i];
                let lo_ok = if self.lower_open[i] { c > self.lower[i] } else { c >= self.lower[i] };
                let hi_ok = if self.upper_open[i] { c < self.upper[i] } else { c <= self.upper[i] };
                lo_ok && hi_ok
            })
    }

    /// Dimension and membership check with a typed error.
    pub fn check(&self, p: &Point<T>) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: p.dim() });
        }
        if !self.contains(p) {
            return Err(Error::OutOfDomain { point: p.to_f64_vec() });
        }
        Ok(())
    }

    /// Whether `p` sits at least `margin` inside every face.
    pub fn contains_with_margin(&self, p: &Point<T>, margin: T) -> bool {
        p.dim() == self.dim()
            && (0..self.dim()).all(|i| p[i] - self.lower[i] >= margin && self.upper[i] - p[i] >= margin)
    }

    /// Projects `p` into the box; open faces are approached from inside.
    pub fn clamp(&self, p: &Point<T>) -> Point<T> {
        let nudge = T::epsilon() * T::lit(64.0);
        let coords = (0..self.dim())
            .map(|i| {
                let (lo, hi) = (self.lower[i], self.upper[i]);
                let span = hi - lo;
                let lo = if self.lower_open[i] { lo + span * nudge } else { lo };
                let hi = if self.upper_open[i] { hi - span * nudge } else { hi };
                p[i].max(lo).min(hi)
            })
            .collect();
        Point::from_vec_unchecked(coords)
    }

    /// Uniform draw from the interior.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point<T> {
        self.sample_with_margin(rng, T::zero())
    }

    /// Uniform draw from the box shrunk by `margin` on every face.
    pub fn sample_with_margin<R: Rng + ?Sized>(&self, rng: &mut R, margin: T) -> Point<T> {
        let coords = (0..self.dim())
            .map(|i| {
                let lo = self.lower[i] + margin;
                let hi = self.upper[i] - margin;
                let u: f64 = rng.sample(Open01);
                lo + T::lit(u) * (hi - lo)
            })
            .collect();
        Point::from_vec_unchecked(coords)
    }

    /// The range of `b` for which `b·e` lies in the box.
    pub fn diagonal_range(&self) -> Option<(T, T)> {
        let lo = self.lower.coords.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
        let hi = self.upper.coords.iter().fold(T::infinity(), |a, &b| a.min(b));
        (lo < hi).then_some((lo, hi))
    }

    /// Segment from the lower to the upper corner (nudged inside open faces).
    pub fn main_diagonal(&self) -> Segment<T> {
        Segment::new_unchecked(self.clamp(&self.lower), self.clamp(&self.upper))
    }
}
