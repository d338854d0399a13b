//! The Alt-system contract: comparator oracles, the derived weak order,
//! and randomized axiom checkers.

pub mod axioms;
pub mod oracle;
pub mod report;
pub mod sampling;

pub use axioms::{
    check_consistency, check_continuity_proxy, check_crossover, check_monotonicity, check_second_consistency,
    count_order_violations, CheckOptions, DEFAULT_CONTINUITY_DELTA, DEFAULT_WITNESS_CAP,
};
pub use oracle::{derive_preference, AltOracle, IntensityOrder, Preference, PreferenceOrder};
pub use report::{Axiom, AxiomReport, Verdict, Witness};
pub use sampling::{sub_seed, trial_rng, DiagonalSampler, FixedSampler, Sampler, UniformSampler};
