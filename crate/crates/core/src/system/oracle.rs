use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::domain::{BoxDomain, Point};
use crate::scalar::Scalar;

/// Outcome of comparing the improvement `[x,y]` against `[z,w]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntensityOrder {
    Greater,
    Equal,
    Less,
}

impl IntensityOrder {
    /// Outcome after swapping the two bracket pairs.
    pub fn reversed(self) -> Self {
        match self {
            Self::Greater => Self::Less,
            Self::Equal => Self::Equal,
            Self::Less => Self::Greater,
        }
    }

    /// `[x,y] ≥ [z,w]`.
    #[inline]
    pub fn is_ge(self) -> bool {
        self != Self::Less
    }

    #[inline]
    pub fn is_le(self) -> bool {
        self != Self::Greater
    }

    /// Classifies `lhs` against `rhs`, treating `|lhs - rhs| <= eps` as a tie.
    pub fn classify<T: Scalar>(lhs: T, rhs: T, eps: T) -> Self {
        let d = lhs - rhs;
        if d.abs() <= eps {
            Self::Equal
        } else if d > T::zero() {
            Self::Greater
        } else {
            Self::Less
        }
    }
}

impl fmt::Display for IntensityOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Greater => "greater",
            Self::Equal => "equal",
            Self::Less => "less",
        })
    }
}

/// Outcome of the derived weak order `x ≿ y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preference {
    Prefer,
    Indifferent,
    Disprefer,
}

impl Preference {
    /// `x ≿ y`.
    #[inline]
    pub fn weakly(self) -> bool {
        self != Self::Disprefer
    }

    #[inline]
    pub fn strictly(self) -> bool {
        self == Self::Prefer
    }
}

impl From<IntensityOrder> for Preference {
    fn from(o: IntensityOrder) -> Self {
        match o {
            IntensityOrder::Greater => Self::Prefer,
            IntensityOrder::Equal => Self::Indifferent,
            IntensityOrder::Less => Self::Disprefer,
        }
    }
}

type Comparator<T> = dyn Fn(&[T], &[T], &[T], &[T]) -> IntensityOrder + Send + Sync;

/// A black-box Alt system over a box domain.
///
/// The comparator must be total and deterministic on `domain⁴`. Every call
/// through [`AltOracle::compare`] bumps an atomic counter so query complexity
/// can be reported; the oracle is otherwise immutable and shareable across
/// threads.
pub struct AltOracle<T: Scalar> {
    name: String,
    domain: BoxDomain<T>,
    eps_eq: T,
    comparator: Box<Comparator<T>>,
    calls: AtomicU64,
}

impl<T: Scalar> AltOracle<T> {
    pub fn new<F>(name: impl Into<String>, domain: BoxDomain<T>, eps_eq: T, comparator: F) -> Self
    where
        F: Fn(&[T], &[T], &[T], &[T]) -> IntensityOrder + Send + Sync + 'static,
    {
        Self { name: name.into(), domain, eps_eq, comparator: Box::new(comparator), calls: AtomicU64::new(0) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &BoxDomain<T> {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn eps_eq(&self) -> T {
        self.eps_eq
    }

    /// Compares `[x,y]` against `[z,w]`.
    pub fn compare(&self, x: &Point<T>, y: &Point<T>, z: &Point<T>, w: &Point<T>) -> IntensityOrder {
        debug_assert!([x, y, z, w].iter().all(|p| p.dim() == self.dim()));
        self.calls.fetch_add(1, Ordering::Relaxed);
        (self.comparator)(x.coords(), y.coords(), z.coords(), w.coords())
    }

    /// `x` against `y` in the derived weak order, read off `(x, y, y, y)`.
    pub fn prefers(&self, x: &Point<T>, y: &Point<T>) -> Preference {
        self.compare(x, y, y, y).into()
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_calls(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }
}

impl<T: Scalar> fmt::Debug for AltOracle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AltOracle")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("eps_eq", &self.eps_eq)
            .field("calls", &self.calls())
            .finish_non_exhaustive()
    }
}

/// The weak order `≿` induced by an Alt system.
#[derive(Debug, Clone, Copy)]
pub struct PreferenceOrder<'o, T: Scalar> {
    oracle: &'o AltOracle<T>,
}

impl<'o, T: Scalar> PreferenceOrder<'o, T> {
    pub fn compare(&self, x: &Point<T>, y: &Point<T>) -> Preference {
        self.oracle.prefers(x, y)
    }

    pub fn oracle(&self) -> &'o AltOracle<T> {
        self.oracle
    }
}

pub fn derive_preference<T: Scalar>(oracle: &AltOracle<T>) -> PreferenceOrder<'_, T> {
    PreferenceOrder { oracle }
}
