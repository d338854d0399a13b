//! Cardinal utility from comparisons of improvement intensity.
//!
//! An [`AltOracle`] answers whether moving from `y` to `x` is a larger
//! improvement than moving from `w` to `z`. From such an oracle this crate
//! checks the consistency, crossover, continuity and monotonicity axioms,
//! reconstructs a utility unique up to positive affine transforms, and
//! tests concavity and smoothness of that utility through the oracle alone.
//!
//! Everything is generic over the scalar (`f32` or `f64`); the aliases below
//! fix `f64`, which is what the fixtures and the command-line tool use.

// `!(a > b)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod construct;
pub mod domain;
pub mod error;
pub mod gossen;
pub mod scalar;
pub mod smooth;
pub mod system;
pub mod zoo;

pub use domain::{BoxDomain, DomainSpec, Point};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use system::{AltOracle, IntensityOrder, Preference};

pub type Point64 = Point<f64>;
pub type BoxDomain64 = BoxDomain<f64>;
pub type Oracle64 = AltOracle<f64>;
pub type Segment64 = construct::Segment<f64>;
pub type Ladder64 = construct::DyadicLadder<f64>;
pub type UtilitySpec64 = zoo::UtilitySpec<f64>;

pub type Point32 = Point<f32>;
pub type BoxDomain32 = BoxDomain<f32>;
pub type Oracle32 = AltOracle<f32>;
