//! Crossing solvers on straight segments.
//!
//! All solvers share one bisection over a three-valued classifier. The set
//! where the classifier reports Greater or Equal plays the role of `U`, the
//! set where it reports Less or Equal plays `D`; the solution lies in `U ∩ D`.
//! Because a tolerance-based oracle reports Equal on a whole band, the
//! bisection locates both edges of that band and returns its centre.

use crate::construct::segment::Segment;
use crate::domain::Point;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::system::oracle::{AltOracle, IntensityOrder, Preference};

/// Default bisection width in segment parameter.
pub const DEFAULT_TOL_T: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Located<T> {
    pub t: T,
    pub exact: bool,
}

/// Bisection on `[lo, hi]` for the centre of the Equal band of `classify`.
///
/// The endpoints must classify on opposite sides (either orientation);
/// an endpoint that already classifies Equal is accepted.
pub(crate) fn locate<T: Scalar>(classify: impl Fn(T) -> IntensityOrder, lo: T, hi: T, tol: T) -> Result<Located<T>> {
    use IntensityOrder::*;

    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("bisection tolerance must be positive, got {tol}")));
    }
    let (c_lo, c_hi) = (classify(lo), classify(hi));
    let flip = match (c_lo, c_hi) {
        (Less, Greater) | (Less, Equal) | (Equal, Greater) => false,
        (Greater, Less) | (Greater, Equal) | (Equal, Less) => true,
        (Equal, Equal) => {
            let t = (lo + hi) * T::half();
            return Ok(Located { t, exact: classify(t) == Equal });
        }
        _ => return Err(Error::Bracket { start: c_lo.to_string(), end: c_hi.to_string() }),
    };
    let g = |t: T| if flip { classify(t).reversed() } else { classify(t) };
    let (g_lo, g_hi) = if flip { (c_lo.reversed(), c_hi.reversed()) } else { (c_lo, c_hi) };

    let (mut a, mut b) = (lo, hi);
    let mut hit = match (g_lo, g_hi) {
        (Equal, _) => Some(lo),
        (_, Equal) => Some(hi),
        _ => None,
    };
    while hit.is_none() && b - a > tol {
        let m = (a + b) * T::half();
        if m <= a || m >= b {
            break;
        }
        match g(m) {
            Less => a = m,
            Greater => b = m,
            Equal => hit = Some(m),
        }
    }
    let t = match hit {
        None => (a + b) * T::half(),
        Some(e) => {
            let lower = if g_lo == Equal && e == lo { lo } else { edge(&g, a, e, tol, |o| o == Less) };
            let upper = if g_hi == Equal && e == hi { hi } else { edge(&g, e, b, tol, |o| o != Greater) };
            (lower + upper) * T::half()
        }
    };
    Ok(Located { t, exact: classify(t) == Equal })
}

/// Boundary between `left(g(t))` true (at `l`) and false (at `r`).
fn edge<T: Scalar>(
    g: &impl Fn(T) -> IntensityOrder,
    mut l: T,
    mut r: T,
    tol: T,
    left: impl Fn(IntensityOrder) -> bool,
) -> T {
    while r - l > tol {
        let m = (l + r) * T::half();
        if m <= l || m >= r {
            break;
        }
        if left(g(m)) {
            l = m;
        } else {
            r = m;
        }
    }
    (l + r) * T::half()
}

/// Which slot of the bracket the unknown point occupies.
#[derive(Debug, Clone, Copy)]
pub enum Crossing<'a, T> {
    /// Find `x` with `[x, base] = [z, w]`.
    Head { base: &'a Point<T>, z: &'a Point<T>, w: &'a Point<T> },
    /// Find `x` with `[head, x] = [z, w]`.
    Tail { head: &'a Point<T>, z: &'a Point<T>, w: &'a Point<T> },
}

impl<T: Scalar> Crossing<'_, T> {
    /// Greater/Equal means `x ∈ U`, Less/Equal means `x ∈ D`.
    pub fn classify(&self, oracle: &AltOracle<T>, x: &Point<T>) -> IntensityOrder {
        match *self {
            Self::Head { base, z, w } => oracle.compare(x, base, z, w),
            Self::Tail { head, z, w } => oracle.compare(head, x, z, w),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingSolution<T> {
    /// Parameter on the segment that was searched.
    pub t: T,
    pub point: Point<T>,
    /// Whether the oracle reports Equal at the returned point.
    pub exact: bool,
}

pub(crate) fn crossing_on<T: Scalar>(
    oracle: &AltOracle<T>,
    seg: &Segment<T>,
    lo: T,
    hi: T,
    crossing: Crossing<'_, T>,
    tol_t: T,
) -> Result<Located<T>> {
    locate(|t| crossing.classify(oracle, &seg.at(t)), lo, hi, tol_t)
}

/// Solves `[x,y] = [z,w]` (or the tail form) for `x` on `seg`.
///
/// One endpoint must lie in `U` and the other in `D`; the orientation is
/// detected. Endpoints on the same strict side yield [`Error::Bracket`].
pub fn solve_crossing<T: Scalar>(
    oracle: &AltOracle<T>,
    seg: &Segment<T>,
    crossing: Crossing<'_, T>,
    tol_t: T,
) -> Result<CrossingSolution<T>> {
    let loc = crossing_on(oracle, seg, T::zero(), T::one(), crossing, tol_t)?;
    Ok(CrossingSolution { t: loc.t, point: seg.at(loc.t), exact: loc.exact })
}

/// Midpoint in intensity between the rungs at `t_x` and `t_z` of `seg`,
/// with the ordering post-condition `z ≻ y ≻ x` enforced.
pub(crate) fn midpoint_on<T: Scalar>(
    oracle: &AltOracle<T>,
    seg: &Segment<T>,
    t_x: T,
    t_z: T,
    tol_t: T,
) -> Result<Located<T>> {
    let (x, z) = (seg.at(t_x), seg.at(t_z));
    let (lo, hi) = if t_x <= t_z { (t_x, t_z) } else { (t_z, t_x) };
    let loc = locate(
        |t| {
            let y = seg.at(t);
            oracle.compare(&y, &x, &z, &y)
        },
        lo,
        hi,
        tol_t,
    )?;
    let y = seg.at(loc.t);
    if oracle.prefers(&z, &y) != Preference::Prefer || oracle.prefers(&y, &x) != Preference::Prefer {
        return Err(Error::ConstructionFailed(format!(
            "intensity midpoint {:?} is not strictly between its ends",
            y.to_f64_vec()
        )));
    }
    Ok(loc)
}

/// Finds `y` on the segment `x → z` with `[y,x] = [z,y]`; requires `z ≻ x`.
pub fn solve_midpoint<T: Scalar>(
    oracle: &AltOracle<T>,
    x: &Point<T>,
    z: &Point<T>,
    tol_t: T,
) -> Result<CrossingSolution<T>> {
    oracle.domain().check(x)?;
    oracle.domain().check(z)?;
    if oracle.prefers(z, x) != Preference::Prefer {
        return Err(Error::Ordering("midpoint requires z strictly preferred to x".into()));
    }
    let seg = Segment::new_unchecked(x.clone(), z.clone());
    let loc = midpoint_on(oracle, &seg, T::zero(), T::one(), tol_t)?;
    Ok(CrossingSolution { t: loc.t, point: seg.at(loc.t), exact: loc.exact })
}

/// Standard-sequence steps from `y` through `x` towards `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchimedeanSteps<T> {
    /// Smallest `k` with `[a₁,a₀] > [z,a_k]`.
    pub k: usize,
    /// `a₀ = y, a₁ = x, …, a_k`.
    pub steps: Vec<Point<T>>,
}

/// Repeats the step `[a₁,a₀]` from `x` towards `z` until the remainder
/// `[z,a_k]` is strictly shorter than one step.
///
/// Requires `x ≻ y` and `z ≿ x`. Stepping more than `cap` times is reported as
/// [`Error::ArchimedeanCap`]; on a bounded domain this only happens when the
/// oracle tolerance swamps the step.
pub fn archimedean_count<T: Scalar>(
    oracle: &AltOracle<T>,
    x: &Point<T>,
    y: &Point<T>,
    z: &Point<T>,
    cap: usize,
    tol_t: T,
) -> Result<ArchimedeanSteps<T>> {
    for p in [x, y, z] {
        oracle.domain().check(p)?;
    }
    if oracle.prefers(x, y) != Preference::Prefer {
        return Err(Error::Ordering("archimedean stepping requires x strictly preferred to y".into()));
    }
    if !oracle.prefers(z, x).weakly() {
        return Err(Error::Ordering("archimedean stepping requires z weakly preferred to x".into()));
    }
    let mut steps = vec![y.clone(), x.clone()];
    loop {
        let k = steps.len() - 1;
        let ak = &steps[k];
        if oracle.compare(&steps[1], &steps[0], z, ak) == IntensityOrder::Greater {
            return Ok(ArchimedeanSteps { k, steps });
        }
        if k >= cap {
            return Err(Error::ArchimedeanCap { cap });
        }
        let seg = Segment::new_unchecked(ak.clone(), z.clone());
        let crossing = Crossing::Head { base: ak, z: &steps[1], w: &steps[0] };
        let loc = crossing_on(oracle, &seg, T::zero(), T::one(), crossing, tol_t)?;
        let next = seg.at(loc.t);
        steps.push(next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxDomain;

    fn oracle_1d(lo: f64, hi: f64, u: fn(f64) -> f64) -> AltOracle<f64> {
        let dom = BoxDomain::cube(1, lo, hi).unwrap();
        AltOracle::new("t", dom, 1e-12, move |x, y, z, w| {
            IntensityOrder::classify(u(x[0]) - u(y[0]), u(z[0]) - u(w[0]), 1e-12)
        })
    }

    fn p(v: f64) -> Point<f64> {
        Point::from_f64(&[v]).unwrap()
    }

    #[test]
    fn crossing_of_square_hits_sqrt_two() {
        let o = oracle_1d(0.0, 3.0, |t| t * t);
        let seg = o.domain().main_diagonal();
        // target intensity u(z) - u(w) = 2
        let (z, w) = (p(2.0), p(2.0f64.sqrt()));
        let sol = solve_crossing(&o, &seg, Crossing::Head { base: &p(0.0), z: &z, w: &w }, 1e-13).unwrap();
        // brute-force scan at 1e-6 resolution gives 1.414214
        #[allow(clippy::approx_constant)]
        let scanned = 1.414214;
        assert!((sol.point[0] - scanned).abs() < 1e-6);
        assert!((sol.point[0] - std::f64::consts::SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn zero_intensity_target_returns_base() {
        let o = oracle_1d(0.0, 3.0, |t| t * t);
        let seg = o.domain().main_diagonal();
        let z = p(1.7);
        let sol = solve_crossing(&o, &seg, Crossing::Head { base: &p(0.5), z: &z, w: &z }, 1e-13).unwrap();
        assert!((sol.point[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn unbracketed_crossing_errors() {
        let o = oracle_1d(0.0, 3.0, |t| t);
        let seg = Segment::new(p(2.0), p(3.0), o.domain()).unwrap();
        // [x, 0] >= [1, 0] for every x on [2, 3]: both ends in U
        let err =
            solve_crossing(&o, &seg, Crossing::Head { base: &p(0.0), z: &p(1.0), w: &p(0.0) }, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn midpoints_match_closed_forms() {
        let lin = oracle_1d(0.0, 2.0, |t| t);
        let y = solve_midpoint(&lin, &p(0.0), &p(2.0), 1e-13).unwrap();
        assert!((y.point[0] - 1.0).abs() < 1e-10);

        let sq = oracle_1d(0.0, 2.0, |t| t * t);
        let y = solve_midpoint(&sq, &p(0.0), &p(2.0), 1e-13).unwrap();
        assert!((y.point[0] - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn midpoint_requires_strict_order() {
        let lin = oracle_1d(0.0, 2.0, |t| t);
        assert!(matches!(solve_midpoint(&lin, &p(1.0), &p(1.0), 1e-12), Err(Error::Ordering(_))));
        assert!(matches!(solve_midpoint(&lin, &p(1.5), &p(1.0), 1e-12), Err(Error::Ordering(_))));
    }

    #[test]
    fn archimedean_counts_bracket_the_gap() {
        let o = oracle_1d(0.0, 4.0, |t| t);
        for (z, k) in [(3.5, 3), (1.0, 1), (1.5, 1)] {
            let steps = archimedean_count(&o, &p(1.0), &p(0.0), &p(z), 100, 1e-13).unwrap();
            assert_eq!(steps.k, k, "z = {z}");
            assert_eq!(steps.steps.len(), k + 1);
        }
    }

    #[test]
    fn archimedean_cap_is_enforced() {
        let o = oracle_1d(0.0, 4.0, |t| t);
        let err = archimedean_count(&o, &p(0.1), &p(0.0), &p(4.0), 5, 1e-13).unwrap_err();
        assert_eq!(err, Error::ArchimedeanCap { cap: 5 });
    }

    #[test]
    fn locate_handles_wide_equal_band() {
        // Equal band [0.3, 0.5] in t; centre is 0.4
        let c = |t: f64| {
            if t < 0.3 {
                IntensityOrder::Less
            } else if t > 0.5 {
                IntensityOrder::Greater
            } else {
                IntensityOrder::Equal
            }
        };
        let loc = locate(c, 0.0, 1.0, 1e-12).unwrap();
        assert!((loc.t - 0.4).abs() < 1e-11);
        assert!(loc.exact);
        let flipped = locate(|t| c(t).reversed(), 0.0, 1.0, 1e-12).unwrap();
        assert!((flipped.t - 0.4).abs() < 1e-11);
    }

    #[test]
    fn f32_midpoint() {
        let dom = BoxDomain::<f32>::cube(1, 0.0, 2.0).unwrap();
        let o = AltOracle::new("sq32", dom, 1e-6f32, |x: &[f32], y: &[f32], z: &[f32], w: &[f32]| {
            IntensityOrder::classify(x[0] * x[0] - y[0] * y[0], z[0] * z[0] - w[0] * w[0], 1e-6)
        });
        let y = solve_midpoint(&o, &Point::diagonal(1, 0.0f32), &Point::diagonal(1, 2.0f32), 1e-7).unwrap();
        assert!((y.point[0] - std::f32::consts::SQRT_2).abs() < 1e-5);
    }
}
