//! Fixture oracles: difference oracles of closed-form utilities, general
//! intensity oracles for negative tests, and a small expression language for
//! user-supplied utilities.

pub mod catalog;
pub mod expr;

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{BoxDomain, DomainSpec, Point};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::system::oracle::{AltOracle, IntensityOrder};

pub use catalog::{catalog, intensity_catalog, lookup, lookup_utility, Fixture};
pub use expr::{Expr, ExpressionFile};

pub type UtilityFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;
pub type GradientFn<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;
pub type HessianFn<T> = Arc<dyn Fn(&[T]) -> Vec<Vec<T>> + Send + Sync>;
pub type IntensityFn<T> = Arc<dyn Fn(&[T], &[T]) -> T + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcavityTag {
    Concave,
    StrictlyConcave,
    NonConcave,
    Unknown,
}

impl ConcavityTag {
    pub fn is_concave(self) -> Option<bool> {
        match self {
            Self::Concave | Self::StrictlyConcave => Some(true),
            Self::NonConcave => Some(false),
            Self::Unknown => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothnessTags {
    pub debreu: Option<bool>,
    pub line: Option<bool>,
}

/// A closed-form utility with its documented ground truth.
#[derive(Clone)]
pub struct UtilitySpec<T> {
    pub name: String,
    pub dim: usize,
    pub evaluator: UtilityFn<T>,
    pub gradient: Option<GradientFn<T>>,
    pub hessian: Option<HessianFn<T>>,
    pub concavity: ConcavityTag,
    pub smoothness: SmoothnessTags,
    pub domain: DomainSpec,
    /// Strictly increasing under coordinatewise strict dominance.
    pub monotone: bool,
    pub continuous: bool,
    /// Custom reference segment for reconstruction, when the diagonal is unusable.
    pub reference_segment: Option<(Vec<f64>, Vec<f64>)>,
    pub description: String,
}

impl<T> fmt::Debug for UtilitySpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UtilitySpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("concavity", &self.concavity)
            .field("smoothness", &self.smoothness)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> UtilitySpec<T> {
    pub fn eval(&self, x: &[T]) -> T {
        (self.evaluator)(x)
    }

    pub fn default_domain(&self) -> Result<BoxDomain<T>> {
        BoxDomain::from_spec(&self.domain)
    }

    /// Difference oracle on the default domain with the default tolerance.
    pub fn oracle(&self) -> Result<AltOracle<T>> {
        make_difference_oracle(self, self.default_domain()?, None)
    }

    pub fn reference_segment(&self, domain: &BoxDomain<T>) -> Result<Option<crate::construct::Segment<T>>> {
        self.reference_segment
            .as_ref()
            .map(|(p, q)| crate::construct::Segment::new(Point::from_f64(p)?, Point::from_f64(q)?, domain))
            .transpose()
    }
}

/// A general intensity function `g(x, y)`; not necessarily a utility difference.
#[derive(Clone)]
pub struct IntensitySpec<T> {
    pub name: String,
    pub dim: usize,
    pub evaluator: IntensityFn<T>,
    pub domain: DomainSpec,
    pub description: String,
}

impl<T> fmt::Debug for IntensitySpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntensitySpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> IntensitySpec<T> {
    pub fn default_domain(&self) -> Result<BoxDomain<T>> {
        BoxDomain::from_spec(&self.domain)
    }

    pub fn oracle(&self) -> Result<AltOracle<T>> {
        make_intensity_oracle(self, self.default_domain()?, None)
    }
}

const RANGE_SAMPLES: usize = 256;
const RANGE_SEED: u64 = 0x5eed;

/// Corners (up to 2^10 of them), the centre, and a fixed-seed uniform sample.
fn probe_points<T: Scalar>(domain: &BoxDomain<T>) -> Vec<Point<T>> {
    let n = domain.dim();
    let (lo, hi) = (domain.clamp(domain.lower()), domain.clamp(domain.upper()));
    let mut pts = Vec::new();
    if n <= 10 {
        for mask in 0u32..(1 << n) {
            let c: Vec<T> = (0..n).map(|i| if mask & (1 << i) != 0 { hi[i] } else { lo[i] }).collect();
            pts.push(Point::from_vec_unchecked(c));
        }
    } else {
        pts.push(lo.clone());
        pts.push(hi.clone());
    }
    pts.push(lo.midpoint(&hi));
    let mut rng = ChaCha8Rng::seed_from_u64(RANGE_SEED);
    pts.extend((0..RANGE_SAMPLES).map(|_| domain.sample(&mut rng)));
    pts
}

fn spread<T: Scalar>(values: impl IntoIterator<Item = T>) -> Result<T> {
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for v in values {
        if !v.is_finite() {
            return Err(Error::NonFinite(vec![v.as_f64()]));
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(hi - lo)
}

/// Equal-band width: the default relative factor times the observed value range.
fn default_eps<T: Scalar>(range: T) -> T {
    let scale = if range > T::zero() { range } else { T::one() };
    T::default_eq_factor() * scale
}

fn check_eps<T: Scalar>(eps: T) -> Result<T> {
    if !(eps >= T::zero()) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("equality tolerance must be finite and non-negative, got {eps}")));
    }
    Ok(eps)
}

/// Oracle comparing `u(x) − u(y)` with `u(z) − u(w)`.
///
/// Without an explicit `eps_eq` the Equal band is the default relative factor
/// times the range of `u` observed over probe points of the domain.
pub fn make_difference_oracle<T: Scalar>(
    spec: &UtilitySpec<T>,
    domain: BoxDomain<T>,
    eps_eq: Option<T>,
) -> Result<AltOracle<T>> {
    if spec.dim != domain.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim, found: domain.dim() });
    }
    let u = spec.evaluator.clone();
    let probes = probe_points(&domain);
    for p in &probes {
        if !u(p.coords()).is_finite() {
            return Err(Error::NonFinite(p.to_f64_vec()));
        }
    }
    let eps = match eps_eq {
        Some(e) => check_eps(e)?,
        None => default_eps(spread(probes.iter().map(|p| u(p.coords())))?),
    };
    Ok(AltOracle::new(spec.name.clone(), domain, eps, move |x, y, z, w| {
        IntensityOrder::classify(u(x) - u(y), u(z) - u(w), eps)
    }))
}

/// Oracle comparing `g(x, y)` with `g(z, w)`.
pub fn make_intensity_oracle<T: Scalar>(
    spec: &IntensitySpec<T>,
    domain: BoxDomain<T>,
    eps_eq: Option<T>,
) -> Result<AltOracle<T>> {
    if spec.dim != domain.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim, found: domain.dim() });
    }
    let g = spec.evaluator.clone();
    let probes = probe_points(&domain);
    let values: Vec<T> = probes.iter().zip(probes.iter().rev()).map(|(a, b)| g(a.coords(), b.coords())).collect();
    let eps = match eps_eq {
        Some(e) => check_eps(e)?,
        None => default_eps(spread(values)?),
    };
    Ok(AltOracle::new(spec.name.clone(), domain, eps, move |x, y, z, w| {
        IntensityOrder::classify(g(x, y), g(z, w), eps)
    }))
}
