//! Constructive reconstruction of a cardinal utility from an Alt oracle.
//!
//! The construction is restricted to one reference segment (the box main
//! diagonal unless overridden): a dyadic ladder of equally spaced rungs is
//! built on it, and any other point is valued through the segment point it
//! is indifferent to. This needs preference to be strictly increasing along
//! the segment, which monotonicity guarantees on the diagonal.

pub mod ladder;
pub mod recon;
pub mod segment;
pub mod solve;
pub mod verify;

pub use ladder::{build_ladder, DyadicLadder, LadderAudit, RungRecord, DEFAULT_DEPTH};
pub use recon::{
    reconstruct, EdgeFlag, Evaluation, ReconstructedUtility, ReconstructionArtifact, ReconstructionOptions,
};
pub use segment::Segment;
pub use solve::{
    archimedean_count, solve_crossing, solve_midpoint, ArchimedeanSteps, Crossing, CrossingSolution, DEFAULT_TOL_T,
};
pub use verify::{
    check_density, check_ladder_equiv, dead_band, order_embedding_check, representation_check,
    verify_affine_uniqueness, AffineFit, MismatchWitness, RepresentationReport, AFFINE_RESIDUAL_THRESHOLD,
};
