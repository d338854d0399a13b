//! Post-construction checks of a reconstruction against its oracle.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::ladder::DyadicLadder;
use crate::construct::recon::{reconstruct, ReconstructedUtility, ReconstructionOptions};
use crate::domain::Point;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::system::axioms::{run_trials, CheckOptions};
use crate::system::oracle::{AltOracle, IntensityOrder, Preference};
use crate::system::report::{Axiom, AxiomReport, Tally, Witness};
use crate::system::sampling::{trial_rng, Sampler};

/// Residual threshold, in units of the second reconstruction, for affine agreement.
pub const AFFINE_RESIDUAL_THRESHOLD: f64 = 5e-3;

/// Dead-band, in reconstructed units, for a ladder of depth `depth`: four rung gaps.
pub fn dead_band<T: Scalar>(depth: u32) -> T {
    T::lit(4.0) * DyadicLadder::<T>::value(1, depth)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MismatchWitness {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub oracle: IntensityOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationReport {
    pub samples: usize,
    pub seed: u64,
    pub dead_band: f64,
    /// Disagreements of any size between the oracle and the reconstruction.
    pub mismatches: usize,
    /// Disagreements where the reconstructed difference exceeds the dead-band.
    pub mismatches_outside_band: usize,
    pub witnesses: Vec<MismatchWitness>,
}

impl RepresentationReport {
    pub fn passed(&self) -> bool {
        self.mismatches_outside_band == 0
    }
}

const WITNESS_CAP: usize = 10;

fn mismatch_scan<T: Scalar>(
    recon: &ReconstructedUtility<'_, T>,
    arity: usize,
    samples: usize,
    seed: u64,
    band: T,
    judge: impl Fn(&AltOracle<T>, &[Point<T>], &[T]) -> (IntensityOrder, T) + Sync,
) -> Result<RepresentationReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let oracle = recon.oracle();
    let rows = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let pts: Vec<Point<T>> = (0..arity).map(|_| oracle.domain().sample(&mut rng)).collect();
            let vals = pts.iter().map(|p| recon.evaluate(p)).collect::<Result<Vec<T>>>()?;
            let (truth, d) = judge(oracle, &pts, &vals);
            let predicted = IntensityOrder::classify(d, T::zero(), T::zero());
            let raw = predicted != truth;
            let outside = raw && d.abs() > band;
            Ok((raw, outside, pts, vals, truth))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = RepresentationReport {
        samples,
        seed,
        dead_band: band.as_f64(),
        mismatches: 0,
        mismatches_outside_band: 0,
        witnesses: Vec::new(),
    };
    for (raw, outside, pts, vals, truth) in rows {
        report.mismatches += usize::from(raw);
        if outside {
            report.mismatches_outside_band += 1;
            if report.witnesses.len() < WITNESS_CAP {
                report.witnesses.push(MismatchWitness {
                    points: pts.iter().map(Point::to_f64_vec).collect(),
                    values: vals.iter().map(|v| v.as_f64()).collect(),
                    oracle: truth,
                });
            }
        }
    }
    Ok(report)
}

/// Compares `sign(û(x) − û(y) − û(z) + û(w))` with the oracle on random quadruples.
///
/// An oracle Equal against a nonzero reconstructed difference counts as a
/// mismatch; it is outside the band only when that difference exceeds `band`.
pub fn representation_check<T: Scalar>(
    recon: &ReconstructedUtility<'_, T>,
    samples: usize,
    seed: u64,
    band: T,
) -> Result<RepresentationReport> {
    mismatch_scan(recon, 4, samples, seed, band, |o, p, v| {
        (o.compare(&p[0], &p[1], &p[2], &p[3]), (v[0] - v[1]) - (v[2] - v[3]))
    })
}

/// Compares `û(x) ≥ û(y)` with the derived preference on random pairs.
pub fn order_embedding_check<T: Scalar>(
    recon: &ReconstructedUtility<'_, T>,
    samples: usize,
    seed: u64,
    band: T,
) -> Result<RepresentationReport> {
    mismatch_scan(recon, 2, samples, seed, band, |o, p, v| (o.compare(&p[0], &p[1], &p[1], &p[1]), v[0] - v[1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineFit {
    pub alpha: f64,
    pub beta: f64,
    pub max_residual: f64,
    pub samples: usize,
}

impl AffineFit {
    pub fn passed(&self, threshold: f64) -> bool {
        self.alpha > 0.0 && self.max_residual < threshold
    }
}

/// Reconstructs twice from different anchor pairs on the main diagonal and
/// fits `û₂ ≈ α·û₁ + β` by least squares over sampled points.
pub fn verify_affine_uniqueness<T: Scalar>(
    oracle: &AltOracle<T>,
    anchors1: (Point<T>, Point<T>),
    anchors2: (Point<T>, Point<T>),
    depth: u32,
    samples: usize,
    seed: u64,
) -> Result<AffineFit> {
    if samples < 2 {
        return Err(Error::InvalidArgument("affine fit needs at least 2 samples".into()));
    }
    let r1 = reconstruct(oracle, ReconstructionOptions { depth, anchors: Some(anchors1), ..Default::default() })?;
    let r2 = reconstruct(oracle, ReconstructionOptions { depth, anchors: Some(anchors2), ..Default::default() })?;
    let pairs = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = oracle.domain().sample(&mut trial_rng(seed, i));
            Ok((r1.evaluate(&x)?.as_f64(), r2.evaluate(&x)?.as_f64()))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    fit_affine(&pairs)
}

pub(crate) fn fit_affine(pairs: &[(f64, f64)]) -> Result<AffineFit> {
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("first reconstruction is constant on the sample".into()));
    }
    let alpha = sxy / sxx;
    let beta = my - alpha * mx;
    let max_residual = pairs.iter().map(|&(x, y)| (y - alpha * x - beta).abs()).fold(0.0, f64::max);
    Ok(AffineFit { alpha, beta, max_residual, samples: pairs.len() })
}

/// For sampled pairs `x ≻ y` whose reconstructed values differ by more than
/// two rung gaps, checks that some rung `z` has `x ≻ z ≻ y`.
///
/// The rung is found by bisecting the ladder with the oracle, independently of
/// the reconstructed values, which only serve as the gap filter.
pub fn check_density<T: Scalar, S: Sampler<T> + ?Sized>(
    recon: &ReconstructedUtility<'_, T>,
    sampler: &S,
    opts: &CheckOptions,
    min_depth: u32,
) -> Result<AxiomReport> {
    opts.validate()?;
    if recon.depth() < min_depth {
        return Err(Error::ShallowReconstruction { depth: recon.depth(), required: min_depth });
    }
    let oracle = recon.oracle();
    let ladder = recon.ladder();
    let gap = T::two() * ladder.gap();
    let rungs: Vec<Point<T>> = ladder.params().iter().map(|&t| ladder.segment().at(t)).collect();
    let tally = run_trials(opts, |i, rng| {
        let mut pts = sampler.draw(oracle.domain(), 2, i, rng);
        if pts.len() != 2 {
            return Err(Error::InvalidArgument("density sampler must return pairs".into()));
        }
        let mut t = Tally::default();
        match oracle.prefers(&pts[0], &pts[1]) {
            Preference::Indifferent => {
                t.skipped += 1;
                return Ok(t);
            }
            Preference::Disprefer => pts.swap(0, 1),
            Preference::Prefer => {}
        }
        let (x, y) = (&pts[0], &pts[1]);
        if recon.evaluate(x)? - recon.evaluate(y)? <= gap {
            t.skipped += 1;
            return Ok(t);
        }
        t.evaluated += 1;
        // First rung strictly preferred to y.
        let j = rungs.partition_point(|r| oracle.prefers(r, y) != Preference::Prefer);
        let found = rungs.get(j).is_some_and(|z| oracle.prefers(x, z) == Preference::Prefer);
        if !found {
            let outs = rungs.get(j).map(|z| vec![oracle.compare(x, z, z, z)]).unwrap_or_default();
            t.violations.push(Witness::new(&pts, outs));
        }
        Ok(t)
    })?;
    Ok(tally.into_report(Axiom::Density, opts.trials, opts.seed, opts.witness_cap, false))
}

/// Draws `k` in `[lo, hi]` uniformly; used by ladder property tests.
pub(crate) fn uniform_index(rng: &mut impl Rng, lo: i64, hi: i64) -> i64 {
    rng.gen_range(lo..=hi)
}

/// EQUIV check on random index triples: `[a_{i+k}, a_i] = [a_{j+k}, a_j]`
/// at the deepest level. Returns the number of non-Equal outcomes.
pub fn check_ladder_equiv<T: Scalar>(
    oracle: &AltOracle<T>,
    ladder: &DyadicLadder<T>,
    trials: usize,
    seed: u64,
) -> usize {
    let (lo, hi) = ladder.index_range();
    let depth = ladder.depth();
    if hi - lo < 1 {
        return 0;
    }
    (0..trials as u64)
        .into_par_iter()
        .filter(|&n| {
            let mut rng = trial_rng(seed, n);
            let k = uniform_index(&mut rng, 1, hi - lo);
            let i = uniform_index(&mut rng, lo, hi - k);
            let j = uniform_index(&mut rng, lo, hi - k);
            let r = |m: i64| ladder.rung(m, depth).expect("index in range");
            oracle.compare(&r(i + k), &r(i), &r(j + k), &r(j)) != IntensityOrder::Equal
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxDomain;
    use crate::system::sampling::UniformSampler;

    fn difference_oracle(dom: BoxDomain<f64>, u: fn(&[f64]) -> f64) -> AltOracle<f64> {
        AltOracle::new("u", dom, 1e-9, move |x, y, z, w| IntensityOrder::classify(u(x) - u(y), u(z) - u(w), 1e-9))
    }

    fn p(v: f64) -> Point<f64> {
        Point::from_f64(&[v]).unwrap()
    }

    #[test]
    fn affine_fit_linear() {
        let o = difference_oracle(BoxDomain::cube(1, 0.0, 1.0).unwrap(), |x| x[0]);
        let fit = verify_affine_uniqueness(&o, (p(0.0), p(0.25)), (p(0.1), p(0.9)), 10, 500, 3).unwrap();
        assert!(fit.passed(AFFINE_RESIDUAL_THRESHOLD), "{fit:?}");
        // û₁ = 4t, û₂ = (t − 0.1)/0.8
        assert!((fit.alpha - 0.3125).abs() < 1e-6);
        assert!((fit.beta + 0.125).abs() < 1e-6);
    }

    #[test]
    fn affine_fit_identical_anchors() {
        let o = difference_oracle(BoxDomain::cube(1, -1.0, 1.0).unwrap(), |x| x[0].powi(3));
        let a = (p(-0.5), p(0.5));
        let fit = verify_affine_uniqueness(&o, a.clone(), a, 8, 200, 1).unwrap();
        assert!((fit.alpha - 1.0).abs() < 1e-12 && fit.beta.abs() < 1e-12 && fit.max_residual < 1e-12);
    }

    #[test]
    fn degenerate_fit() {
        assert!(matches!(fit_affine(&[(1.0, 2.0), (1.0, 3.0)]), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn density_linear_depth_six() {
        let o = difference_oracle(BoxDomain::cube(1, 0.0, 1.0).unwrap(), |x| x[0]);
        let r = reconstruct(&o, ReconstructionOptions { depth: 6, ..Default::default() }).unwrap();
        let rep = check_density(&r, &UniformSampler, &CheckOptions::new(500, 9), 0).unwrap();
        assert!(rep.passed() && rep.evaluated > 400, "{rep:?}");
    }

    #[test]
    fn density_depth_zero_is_vacuous() {
        let o = difference_oracle(BoxDomain::cube(1, 0.0, 1.0).unwrap(), |x| x[0]);
        let r = reconstruct(&o, ReconstructionOptions { depth: 0, ..Default::default() }).unwrap();
        let rep = check_density(&r, &UniformSampler, &CheckOptions::new(200, 9), 0).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.evaluated, 0);
    }

    #[test]
    fn shallow_density_rejected() {
        let o = difference_oracle(BoxDomain::cube(1, 0.0, 1.0).unwrap(), |x| x[0]);
        let r = reconstruct(&o, ReconstructionOptions { depth: 2, ..Default::default() }).unwrap();
        let err = check_density(&r, &UniformSampler, &CheckOptions::new(10, 0), 4);
        assert!(matches!(err, Err(Error::ShallowReconstruction { depth: 2, required: 4 })));
    }

    #[test]
    fn representation_of_square() {
        let o = difference_oracle(BoxDomain::cube(1, 0.0, 1.0).unwrap(), |x| x[0] * x[0]);
        let r = reconstruct(&o, ReconstructionOptions { depth: 10, ..Default::default() }).unwrap();
        let rep = representation_check(&r, 1000, 5, dead_band(10)).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let emb = order_embedding_check(&r, 1000, 5, dead_band(10)).unwrap();
        assert_eq!(emb.mismatches, 0);
        assert_eq!(check_ladder_equiv(&o, r.ladder(), 500, 2), 0);
    }
}
