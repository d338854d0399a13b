//! Concavity through the oracle: the generalized Gossen law `[z,x] ≥ [y,z]`
//! for `z = (x+y)/2`, direct midpoint concavity of a utility function, and a
//! round trip comparing both against a fixture's documented tag.

use serde::{Deserialize, Serialize};

use crate::construct::{dead_band, reconstruct, ReconstructionOptions};
use crate::domain::{BoxDomain, Point};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use rayon::prelude::*;

use crate::system::axioms::CheckOptions;
use crate::system::oracle::{AltOracle, IntensityOrder};
use crate::system::sampling::{trial_rng, Sampler, UniformSampler};
use crate::zoo::{make_difference_oracle, ConcavityTag, UtilitySpec};

/// Pairs closer than this fraction of the box diagonal are left out of the
/// strictness classification.
pub const DEFAULT_STRICT_FLOOR: f64 = 1e-3;
pub const DEFAULT_SWEEP_DEPTH: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcavityLaw {
    Holds,
    HoldsStrictly,
    Fails,
}

impl ConcavityLaw {
    pub fn holds(self) -> bool {
        self != Self::Fails
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// The interior point tested, `(1 − t)x + t·y`.
    pub z: Vec<f64>,
    pub t: f64,
    /// Oracle outputs `[z,x]` vs `[y,z]`, for oracle checks.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub oracle_outputs: Vec<IntensityOrder>,
    /// `(u(x), u(y), u(z))`, for function checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityVerdict {
    pub law: ConcavityLaw,
    pub trials: usize,
    pub seed: u64,
    pub evaluated: usize,
    pub violation_count: usize,
    pub witnesses: Vec<ConcavityWitness>,
    /// Pairs far enough apart to count towards strictness.
    pub strict_eligible: usize,
    /// Eligible pairs with a strict inequality.
    pub strict_count: usize,
    /// Dyadic sweep depth for function checks; absent for midpoint-only checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_depth: Option<u32>,
}

/// Per-trial outcomes folded in trial order.
#[derive(Default)]
struct Folded {
    evaluated: usize,
    violation_count: usize,
    strict_eligible: usize,
    strict_count: usize,
    witnesses: Vec<ConcavityWitness>,
}

impl Folded {
    fn into_verdict(self, opts: &CheckOptions, sweep_depth: Option<u32>) -> ConcavityVerdict {
        let law = if self.violation_count > 0 {
            ConcavityLaw::Fails
        } else if self.strict_eligible > 0 && self.strict_count == self.strict_eligible {
            ConcavityLaw::HoldsStrictly
        } else {
            ConcavityLaw::Holds
        };
        ConcavityVerdict {
            law,
            trials: opts.trials,
            seed: opts.seed,
            evaluated: self.evaluated,
            violation_count: self.violation_count,
            witnesses: self.witnesses,
            strict_eligible: self.strict_eligible,
            strict_count: self.strict_count,
            sweep_depth,
        }
    }
}

/// `[z,x]` against `[y,z]` with `z = (x+y)/2`.
pub fn ggfl_outcome<T: Scalar>(oracle: &AltOracle<T>, x: &Point<T>, y: &Point<T>) -> IntensityOrder {
    let z = x.midpoint(y);
    oracle.compare(&z, x, y, &z)
}

/// The same law in direction form: `[x+v, x]` against `[x+2v, x+v]`.
pub fn ggfl_directional_outcome<T: Scalar>(oracle: &AltOracle<T>, x: &Point<T>, v: &[T]) -> IntensityOrder {
    let z = x.offset(v, T::one());
    let y = x.offset(v, T::two());
    oracle.compare(&z, x, &y, &z)
}

struct PerTrial {
    witness: Option<ConcavityWitness>,
    eligible: bool,
    strict: bool,
}

fn fold_trials<F>(opts: &CheckOptions, per: F) -> Result<Folded>
where
    F: Fn(u64, &mut rand_chacha::ChaCha8Rng) -> Result<PerTrial> + Sync + Send,
{
    let rows = (0..opts.trials as u64)
        .into_par_iter()
        .map(|i| per(i, &mut trial_rng(opts.seed, i)))
        .collect::<Result<Vec<_>>>()?;
    let mut f = Folded::default();
    for r in rows {
        f.evaluated += 1;
        if r.eligible {
            f.strict_eligible += 1;
            f.strict_count += usize::from(r.strict);
        }
        if let Some(w) = r.witness {
            f.violation_count += 1;
            if f.witnesses.len() < opts.witness_cap {
                f.witnesses.push(w);
            }
        }
    }
    Ok(f)
}

fn draw_pair<T: Scalar, S: Sampler<T> + ?Sized>(
    domain: &BoxDomain<T>,
    sampler: &S,
    i: u64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<(Point<T>, Point<T>)> {
    let mut pts = sampler.draw(domain, 2, i, rng);
    if pts.len() != 2 {
        return Err(Error::InvalidArgument(format!("sampler returned {} points, expected 2", pts.len())));
    }
    for p in &pts {
        domain.check(p)?;
    }
    let y = pts.pop().expect("two points");
    let x = pts.pop().expect("two points");
    Ok((x, y))
}

/// Samples pairs and checks `[z,x] ≥ [y,z]` at the midpoint.
///
/// Holds strictly when every sampled pair at least `strict_floor` box
/// diagonals apart gives a strict Greater.
pub fn check_ggfl<T: Scalar, S: Sampler<T> + ?Sized>(
    oracle: &AltOracle<T>,
    sampler: &S,
    opts: &CheckOptions,
) -> Result<ConcavityVerdict> {
    check_ggfl_with_floor(oracle, sampler, opts, T::lit(DEFAULT_STRICT_FLOOR))
}

pub fn check_ggfl_with_floor<T: Scalar, S: Sampler<T> + ?Sized>(
    oracle: &AltOracle<T>,
    sampler: &S,
    opts: &CheckOptions,
    strict_floor: T,
) -> Result<ConcavityVerdict> {
    opts.validate()?;
    let dom = oracle.domain();
    let floor = strict_floor * dom.diameter();
    let folded = fold_trials(opts, |i, rng| {
        let (x, y) = draw_pair(dom, sampler, i, rng)?;
        let z = x.midpoint(&y);
        let out = oracle.compare(&z, &x, &y, &z);
        let witness = (out == IntensityOrder::Less).then(|| ConcavityWitness {
            x: x.to_f64_vec(),
            y: y.to_f64_vec(),
            z: z.to_f64_vec(),
            t: 0.5,
            oracle_outputs: vec![out],
            values: None,
        });
        Ok(PerTrial { witness, eligible: x.distance(&y) >= floor, strict: out == IntensityOrder::Greater })
    })?;
    Ok(folded.into_verdict(opts, None))
}

/// The law sampled as `(x, v)`: `x` and `w` are drawn and `v = (w − x)/2`,
/// so `x + 2v = w` stays inside the box.
pub fn check_ggfl_directional<T: Scalar, S: Sampler<T> + ?Sized>(
    oracle: &AltOracle<T>,
    sampler: &S,
    opts: &CheckOptions,
) -> Result<ConcavityVerdict> {
    opts.validate()?;
    let dom = oracle.domain();
    let floor = T::lit(DEFAULT_STRICT_FLOOR) * dom.diameter();
    let folded = fold_trials(opts, |i, rng| {
        let (x, w) = draw_pair(dom, sampler, i, rng)?;
        let v: Vec<T> = w.coords().iter().zip(x.coords()).map(|(&a, &b)| (a - b) * T::half()).collect();
        let out = ggfl_directional_outcome(oracle, &x, &v);
        let witness = (out == IntensityOrder::Less).then(|| ConcavityWitness {
            x: x.to_f64_vec(),
            y: x.offset(&v, T::two()).to_f64_vec(),
            z: x.offset(&v, T::one()).to_f64_vec(),
            t: 0.5,
            oracle_outputs: vec![out],
            values: None,
        });
        Ok(PerTrial { witness, eligible: x.distance(&w) >= floor, strict: out == IntensityOrder::Greater })
    })?;
    Ok(folded.into_verdict(opts, None))
}

/// Checks `u((1−t)x + t·y) ≥ (1−t)u(x) + t·u(y) − tol` on sampled pairs.
///
/// With `sweep_depth = None` only `t = 1/2` is tested; `Some(ℓ)` tests every
/// `t = m/2^ℓ` in `(0, 1)`. Strictness is classified at the midpoint with
/// margin `tol`.
pub fn check_midpoint_concavity<T, F, S>(
    u: F,
    domain: &BoxDomain<T>,
    sampler: &S,
    opts: &CheckOptions,
    tol: T,
    sweep_depth: Option<u32>,
) -> Result<ConcavityVerdict>
where
    T: Scalar,
    F: Fn(&Point<T>) -> Result<T> + Sync + Send,
    S: Sampler<T> + ?Sized,
{
    opts.validate()?;
    if !(tol >= T::zero()) {
        return Err(Error::InvalidArgument(format!("concavity tolerance must be non-negative, got {tol}")));
    }
    if sweep_depth.is_some_and(|l| l == 0 || l > 20) {
        return Err(Error::InvalidArgument("sweep depth must lie in 1..=20".into()));
    }
    let floor = T::lit(DEFAULT_STRICT_FLOOR) * domain.diameter();
    let ts: Vec<T> = match sweep_depth {
        None => vec![T::half()],
        Some(l) => {
            let n = 1u64 << l;
            (1..n).map(|m| T::lit(m as f64 / n as f64)).collect()
        }
    };
    let folded = fold_trials(opts, |i, rng| {
        let (x, y) = draw_pair(domain, sampler, i, rng)?;
        let (ux, uy) = (u(&x)?, u(&y)?);
        let mut witness = None;
        let mut strict = false;
        for &t in &ts {
            let z = x.lerp(&y, t);
            let uz = u(&z)?;
            let chord = (T::one() - t) * ux + t * uy;
            if t == T::half() {
                strict = uz - chord > tol;
            }
            if uz < chord - tol && witness.is_none() {
                witness = Some(ConcavityWitness {
                    x: x.to_f64_vec(),
                    y: y.to_f64_vec(),
                    z: z.to_f64_vec(),
                    t: t.as_f64(),
                    oracle_outputs: Vec::new(),
                    values: Some([ux.as_f64(), uy.as_f64(), uz.as_f64()]),
                });
            }
        }
        Ok(PerTrial { witness, eligible: x.distance(&y) >= floor, strict })
    })?;
    Ok(folded.into_verdict(opts, sweep_depth))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundtripReport {
    pub fixture: String,
    pub tag: ConcavityTag,
    pub depth: u32,
    pub tolerance: f64,
    pub ggfl: ConcavityVerdict,
    pub midpoint: ConcavityVerdict,
    pub agree: bool,
    /// One line per disagreement.
    pub diff: Vec<String>,
}

/// Runs the oracle law and the reconstruction's midpoint check and compares
/// both with the fixture's concavity tag.
///
/// The function check uses a tolerance of twice the reconstruction dead-band.
/// A strictly concave tag additionally requires the oracle law to hold
/// strictly; a plain concave tag is not checked for strictness, since
/// functions like `sqrt(x1 x2)` are strict off a measure-zero set.
pub fn concavity_roundtrip<T: Scalar>(
    spec: &UtilitySpec<T>,
    domain: Option<BoxDomain<T>>,
    opts: &CheckOptions,
    depth: u32,
) -> Result<RoundtripReport> {
    let Some(expect) = spec.concavity.is_concave() else {
        return Err(Error::InvalidArgument(format!("fixture {} has no concavity tag", spec.name)));
    };
    let domain = match domain {
        Some(d) => d,
        None => spec.default_domain()?,
    };
    let segment = spec.reference_segment(&domain)?;
    let oracle = make_difference_oracle(spec, domain, None)?;
    let ggfl = check_ggfl(&oracle, &UniformSampler, opts)?;
    let recon = reconstruct(&oracle, ReconstructionOptions { depth, segment, ..Default::default() })?;
    let tol = T::two() * dead_band::<T>(depth);
    let midpoint = check_midpoint_concavity(|p| recon.evaluate(p), oracle.domain(), &UniformSampler, opts, tol, None)?;

    let mut diff = Vec::new();
    if ggfl.law.holds() != expect {
        diff.push(format!("oracle law {:?} but tag {:?}", ggfl.law, spec.concavity));
    }
    if midpoint.law.holds() != expect {
        diff.push(format!("reconstruction midpoint check {:?} but tag {:?}", midpoint.law, spec.concavity));
    }
    if spec.concavity == ConcavityTag::StrictlyConcave && ggfl.law != ConcavityLaw::HoldsStrictly {
        diff.push(format!("tag strictly concave but oracle law {:?}", ggfl.law));
    }
    Ok(RoundtripReport {
        fixture: spec.name.clone(),
        tag: spec.concavity,
        depth,
        tolerance: tol.as_f64(),
        agree: diff.is_empty(),
        ggfl,
        midpoint,
        diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::sampling::FixedSampler;
    use crate::zoo::lookup_utility;

    fn p(v: f64) -> Point<f64> {
        Point::from_f64(&[v]).unwrap()
    }

    #[test]
    fn concave_quadratic_holds_strictly() {
        let o = lookup_utility::<f64>("concave_quadratic").unwrap().oracle().unwrap();
        let v = check_ggfl(&o, &UniformSampler, &CheckOptions::new(2000, 4)).unwrap();
        assert_eq!(v.law, ConcavityLaw::HoldsStrictly);
    }

    #[test]
    fn exp_fails_at_the_endpoints() {
        let o = lookup_utility::<f64>("exp1d").unwrap().oracle().unwrap();
        let fixed = FixedSampler::scalars(&[&[0.0, 1.0]]);
        let v = check_ggfl(&o, &fixed, &CheckOptions::new(1, 0)).unwrap();
        assert_eq!(v.law, ConcavityLaw::Fails);
        assert_eq!(v.witnesses[0].z, vec![0.5]);
        // e^0.5 − 1 = 0.64872 < e − e^0.5 = 1.06956
        assert_eq!(ggfl_outcome(&o, &p(0.0), &p(1.0)), IntensityOrder::Less);
    }

    #[test]
    fn coincident_pair_is_equal_and_not_counted() {
        let o = lookup_utility::<f64>("concave_quadratic").unwrap().oracle().unwrap();
        assert_eq!(ggfl_outcome(&o, &p(0.3), &p(0.3)), IntensityOrder::Equal);
        let fixed = FixedSampler::scalars(&[&[0.3, 0.3]]);
        let v = check_ggfl(&o, &fixed, &CheckOptions::new(3, 0)).unwrap();
        assert_eq!((v.law, v.strict_eligible), (ConcavityLaw::Holds, 0));
    }

    #[test]
    fn linear_never_strict() {
        let o = lookup_utility::<f64>("linear").unwrap().oracle().unwrap();
        let v = check_ggfl(&o, &UniformSampler, &CheckOptions::new(2000, 1)).unwrap();
        assert_eq!(v.law, ConcavityLaw::Holds);
        let f = |x: &Point<f64>| Ok(x[0] + x[1]);
        let dom = o.domain().clone();
        let m = check_midpoint_concavity(f, &dom, &UniformSampler, &CheckOptions::new(500, 1), 1e-12, Some(4)).unwrap();
        assert_eq!(m.law, ConcavityLaw::Holds);
    }

    #[test]
    fn sweep_catches_convexity() {
        let dom = BoxDomain::cube(1, 0.0, 1.0).unwrap();
        let f = |x: &Point<f64>| Ok(x[0].exp());
        let m = check_midpoint_concavity(f, &dom, &UniformSampler, &CheckOptions::new(200, 2), 1e-9, Some(6)).unwrap();
        assert_eq!(m.law, ConcavityLaw::Fails);
        assert_eq!(m.sweep_depth, Some(6));
    }

    #[test]
    fn roundtrips_agree() {
        for name in ["cobb_douglas", "exp1d", "concave_quadratic"] {
            let spec = lookup_utility::<f64>(name).unwrap();
            let r = concavity_roundtrip(&spec, None, &CheckOptions::new(1000, 7), 8).unwrap();
            assert!(r.agree, "{name}: {:?}", r.diff);
        }
    }
}
