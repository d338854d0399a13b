//! Randomized checkers for the Alt-system axioms.
//!
//! Each checker draws tuples from a [`Sampler`], evaluates the axiom through
//! [`Axiom::evaluate`] (the same routine used to replay witnesses) and folds
//! the per-trial outcomes, in trial order, into an [`AxiomReport`].

use rand::distributions::Open01;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{solve_crossing, Crossing};
use crate::domain::Point;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::system::oracle::{AltOracle, IntensityOrder};
use crate::system::report::{Axiom, AxiomReport, Tally, Witness};
use crate::system::sampling::{trial_rng, Sampler};

pub const DEFAULT_WITNESS_CAP: usize = 10;

/// Relative perturbation radius of the continuity proxy.
///
/// Small enough that a Lipschitz difference oracle moves by less than its own
/// Equal band, so continuous fixtures cannot trip the proxy.
pub const DEFAULT_CONTINUITY_DELTA: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub trials: usize,
    pub seed: u64,
    pub witness_cap: usize,
}

impl CheckOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self { trials, seed, witness_cap: DEFAULT_WITNESS_CAP }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.witness_cap == 0 {
            return Err(Error::InvalidArgument("witness cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// Runs `trial` for every index in parallel and merges in index order.
pub(crate) fn run_trials<F>(opts: &CheckOptions, trial: F) -> Result<Tally>
where
    F: Fn(u64, &mut rand_chacha::ChaCha8Rng) -> Result<Tally> + Sync + Send,
{
    let tallies = (0..opts.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(opts.seed, i);
            trial(i, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tallies.into_iter().fold(Tally::default(), Tally::merge))
}

fn draw_checked<T: Scalar, S: Sampler<T> + ?Sized>(
    oracle: &AltOracle<T>,
    sampler: &S,
    arity: usize,
    index: u64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Vec<Point<T>>> {
    let pts = sampler.draw(oracle.domain(), arity, index, rng);
    if pts.len() != arity {
        return Err(Error::InvalidArgument(format!("sampler returned {} points, expected {arity}", pts.len())));
    }
    for p in &pts {
        oracle.domain().check(p)?;
    }
    Ok(pts)
}

fn record<T: Scalar>(tally: &mut Tally, axiom: Axiom, oracle: &AltOracle<T>, pts: &[Point<T>]) -> Result<()> {
    let (bad, outputs) = axiom.evaluate(oracle, pts)?;
    tally.evaluated += 1;
    if bad {
        tally.violations.push(Witness::new(pts, outputs));
    }
    Ok(())
}

fn simple_check<T: Scalar, S: Sampler<T> + ?Sized>(
    axiom: Axiom,
    arity: usize,
    oracle: &AltOracle<T>,
    sampler: &S,
    opts: &CheckOptions,
) -> Result<AxiomReport> {
    opts.validate()?;
    let tally = run_trials(opts, |i, rng| {
        let pts = draw_checked(oracle, sampler, arity, i, rng)?;
        let mut t = Tally::default();
        record(&mut t, axiom, oracle, &pts)?;
        Ok(t)
    })?;
    Ok(tally.into_report(axiom, opts.trials, opts.seed, opts.witness_cap, false))
}

/// `x ≿ y ⟺ [x,z] ≥ [y,z]`, checked in both directions on sampled triples.
pub fn check_consistency<T: Scalar, S: Sampler<T> + ?Sized>(
    oracle: &AltOracle<T>,
    sampler: &S,
    opts: &CheckOptions,
) -> Result<AxiomReport> {
    simple_check(Axiom::Consistency, 3, oracle, sampler, opts)
}

/// `x ≿ y ⟺ [z,y] ≥ [z,x]`, checked in both directions on sampled triples.
pub fn check_second_consistency<T: Scalar, S: Sampler<T> + ?Sized>(
    oracle: &AltOracle<T>,
    sampler: &S,
    opts: &CheckOptions,
) -> Result<AxiomReport> {
    simple_check(Axiom::SecondConsistency, 3, oracle, sampler, opts)
}

/// `[x,y] = [z,w] ⟺ [x,z] = [y,w]`.
///
/// Random quadruples are almost never tied, so each trial samples `(x, y, z)`
/// and solves for `w` on the main diagonal with `[z,w] = [x,y]`. Every trial
/// also tests the degenerate quadruple `(x, y, x, y)`, which forces
/// `[x,x] = [y,y]`.
pub fn check_crossover<T: Scalar, S: Sampler<T> + ?Sized>(
    oracle: &AltOracle<T>,
    sampler: &S,
    opts: &CheckOptions,
    tol_t: T,
) -> Result<AxiomReport> {
    opts.validate()?;
    let diag = oracle.domain().main_diagonal();
    let tally = run_trials(opts, |i, rng| {
        let pts = draw_checked(oracle, sampler, 3, i, rng)?;
        let (x, y, z) = (&pts[0], &pts[1], &pts[2]);
        let mut t = Tally::default();
        record(&mut t, Axiom::Crossover, oracle, &[x.clone(), y.clone(), x.clone(), y.clone()])?;
        match solve_crossing(oracle, &diag, Crossing::Tail { head: z, z: x, w: y }, tol_t) {
            Ok(sol) => {
                record(&mut t, Axiom::Crossover, oracle, &[x.clone(), y.clone(), z.clone(), sol.point])?;
            }
            Err(Error::Bracket { .. }) => t.skipped += 1,
            Err(e) => return Err(e),
        }
        Ok(t)
    })?;
    let manufactured = tally.evaluated.saturating_sub(opts.trials);
    let mut report = tally.into_report(Axiom::Crossover, opts.trials, opts.seed, opts.witness_cap, false);
    if manufactured == 0 {
        report.note = Some("no Equal quadruple could be manufactured; only degenerate cases tested".into());
    }
    Ok(report)
}

/// Perturbation-stability proxy for closedness of `≥`.
///
/// For sampled quadruples with a strict outcome (oriented to Greater), every
/// point is moved by up to `delta` times the box extent per coordinate: the
/// sixteen sign patterns along `e = (1, …, 1)` plus four random jitters. A
/// perturbed outcome of Less is a witness. Passing is necessary for
/// continuity, not a proof of it; the report carries `proxy = true`.
pub fn check_continuity_proxy<T: Scalar, S: Sampler<T> + ?Sized>(
    oracle: &AltOracle<T>,
    sampler: &S,
    opts: &CheckOptions,
    delta: T,
) -> Result<AxiomReport> {
    opts.validate()?;
    if !(delta > T::zero() && delta < T::half()) {
        return Err(Error::InvalidArgument(format!(
            "perturbation radius must lie in (0, 0.5) relative to the box, got {delta}"
        )));
    }
    let dom = oracle.domain();
    let n = dom.dim();
    let radius: Vec<T> = (0..n).map(|i| delta * dom.extent(i)).collect();
    let tally = run_trials(opts, |i, rng| {
        let mut pts = draw_checked(oracle, sampler, 4, i, rng)?;
        let mut t = Tally::default();
        match oracle.compare(&pts[0], &pts[1], &pts[2], &pts[3]) {
            IntensityOrder::Equal => {
                t.skipped += 1;
                return Ok(t);
            }
            IntensityOrder::Less => pts.rotate_left(2),
            IntensityOrder::Greater => {}
        }
        t.evaluated += 1;
        let mut candidates: Vec<[Point<T>; 4]> = Vec::with_capacity(20);
        for mask in 0u32..16 {
            candidates.push(std::array::from_fn(|k| {
                let sign = if mask & (1 << k) != 0 { T::one() } else { -T::one() };
                dom.clamp(&pts[k].offset(&radius, sign))
            }));
        }
        for _ in 0..4 {
            candidates.push(std::array::from_fn(|k| {
                let jitter: Vec<T> = radius
                    .iter()
                    .map(|&r| {
                        let u: f64 = rng.sample(Open01);
                        r * T::lit(2.0 * u - 1.0)
                    })
                    .collect();
                dom.clamp(&pts[k].offset(&jitter, T::one()))
            }));
        }
        for cand in candidates {
            let all: Vec<Point<T>> = pts.iter().cloned().chain(cand).collect();
            let (bad, outputs) = Axiom::Continuity.evaluate(oracle, &all)?;
            if bad {
                t.violations.push(Witness::new(&all, outputs));
                break;
            }
        }
        Ok(t)
    })?;
    let mut report = tally.into_report(Axiom::Continuity, opts.trials, opts.seed, opts.witness_cap, true);
    report.note = Some(format!(
        "perturbation proxy (delta = {delta} x box extent): necessary condition only, not a closedness proof"
    ));
    Ok(report)
}

/// `x ≫ y ⟹ x ≻ y`. Each trial takes the coordinatewise max and min of two
/// sampled points as `x` and `y`.
pub fn check_monotonicity<T: Scalar, S: Sampler<T> + ?Sized>(
    oracle: &AltOracle<T>,
    sampler: &S,
    opts: &CheckOptions,
) -> Result<AxiomReport> {
    opts.validate()?;
    let tally = run_trials(opts, |i, rng| {
        let pts = draw_checked(oracle, sampler, 2, i, rng)?;
        let hi: Vec<T> = pts[0].coords().iter().zip(pts[1].coords()).map(|(&a, &b)| a.max(b)).collect();
        let lo: Vec<T> = pts[0].coords().iter().zip(pts[1].coords()).map(|(&a, &b)| a.min(b)).collect();
        let (x, y) = (Point::new(hi)?, Point::new(lo)?);
        let mut t = Tally::default();
        if x.strictly_dominates(&y) {
            record(&mut t, Axiom::Monotonicity, oracle, &[x, y])?;
        } else {
            t.skipped += 1;
        }
        Ok(t)
    })?;
    Ok(tally.into_report(Axiom::Monotonicity, opts.trials, opts.seed, opts.witness_cap, false))
}

/// Antisymmetry and reflexivity of the comparator on sampled quadruples.
/// Returns the number of violating quadruples.
pub fn count_order_violations<T: Scalar, S: Sampler<T> + ?Sized>(
    oracle: &AltOracle<T>,
    sampler: &S,
    opts: &CheckOptions,
) -> Result<usize> {
    opts.validate()?;
    let tally = run_trials(opts, |i, rng| {
        let p = draw_checked(oracle, sampler, 4, i, rng)?;
        let fwd = oracle.compare(&p[0], &p[1], &p[2], &p[3]);
        let back = oracle.compare(&p[2], &p[3], &p[0], &p[1]);
        let refl = oracle.compare(&p[0], &p[1], &p[0], &p[1]);
        let mut t = Tally { evaluated: 1, ..Default::default() };
        if back != fwd.reversed() || refl != IntensityOrder::Equal {
            t.violations.push(Witness::new(&p, vec![fwd, back, refl]));
        }
        Ok(t)
    })?;
    Ok(tally.violations.len())
}
