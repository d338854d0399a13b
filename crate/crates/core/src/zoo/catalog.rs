//! Named fixtures with documented ground truth.

use std::sync::Arc;

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::system::oracle::AltOracle;
use crate::zoo::{ConcavityTag, IntensitySpec, SmoothnessTags, UtilitySpec};

fn cube(dim: usize, lo: f64, hi: f64) -> DomainSpec {
    DomainSpec { lower: vec![lo; dim], upper: vec![hi; dim], lower_open: None, upper_open: None }
}

/// Default box for fixtures on the positive orthant: away from the log / root singularities at 0.
fn positive_box() -> DomainSpec {
    cube(2, 0.1, 10.0)
}

fn base<T: Scalar>(
    name: &str,
    dim: usize,
    domain: DomainSpec,
    f: impl Fn(&[T]) -> T + Send + Sync + 'static,
) -> UtilitySpec<T> {
    UtilitySpec {
        name: name.into(),
        dim,
        evaluator: Arc::new(f),
        gradient: None,
        hessian: None,
        concavity: ConcavityTag::Unknown,
        smoothness: SmoothnessTags::default(),
        domain,
        monotone: true,
        continuous: true,
        reference_segment: None,
        description: String::new(),
    }
}

fn smooth_both() -> SmoothnessTags {
    SmoothnessTags { debreu: Some(true), line: Some(true) }
}

fn linear<T: Scalar>() -> UtilitySpec<T> {
    UtilitySpec {
        gradient: Some(Arc::new(|x: &[T]| vec![T::one(); x.len()])),
        hessian: Some(Arc::new(|x: &[T]| vec![vec![T::zero(); x.len()]; x.len()])),
        concavity: ConcavityTag::Concave,
        smoothness: smooth_both(),
        description: "x1 + x2".into(),
        ..base("linear", 2, positive_box(), |x: &[T]| x.iter().fold(T::zero(), |a, &b| a + b))
    }
}

fn cobb_douglas<T: Scalar>() -> UtilitySpec<T> {
    let q = T::lit(0.25);
    UtilitySpec {
        gradient: Some(Arc::new(|x: &[T]| {
            let h = T::half();
            vec![h * (x[1] / x[0]).sqrt(), h * (x[0] / x[1]).sqrt()]
        })),
        hessian: Some(Arc::new(move |x: &[T]| {
            let c = q / (x[0] * x[1]).sqrt();
            vec![vec![-q * x[1].sqrt() / x[0].powf(T::lit(1.5)), c], vec![c, -q * x[0].sqrt() / x[1].powf(T::lit(1.5))]]
        })),
        // Concave, but linear along rays through the origin, hence not strictly.
        concavity: ConcavityTag::Concave,
        smoothness: smooth_both(),
        description: "sqrt(x1 * x2)".into(),
        ..base("cobb_douglas", 2, positive_box(), |x: &[T]| (x[0] * x[1]).sqrt())
    }
}

fn ces<T: Scalar>() -> UtilitySpec<T> {
    let h = T::half();
    let s = move |x: &[T]| h * x[0].sqrt() + h * x[1].sqrt();
    UtilitySpec {
        gradient: Some(Arc::new(move |x: &[T]| {
            let sv = s(x);
            vec![sv / (T::two() * x[0].sqrt()), sv / (T::two() * x[1].sqrt())]
        })),
        hessian: Some(Arc::new(move |x: &[T]| {
            let sv = s(x);
            let e = T::lit(0.125);
            let q = T::lit(0.25);
            let c = e / (x[0] * x[1]).sqrt();
            let d = |a: T| e / a - q * sv / a.powf(T::lit(1.5));
            vec![vec![d(x[0]), c], vec![c, d(x[1])]]
        })),
        concavity: ConcavityTag::Concave,
        smoothness: smooth_both(),
        description: "(x1^0.5 / 2 + x2^0.5 / 2)^2, rho = 0.5".into(),
        ..base("ces", 2, positive_box(), move |x: &[T]| {
            let v = s(x);
            v * v
        })
    }
}

fn exp1d<T: Scalar>() -> UtilitySpec<T> {
    UtilitySpec {
        gradient: Some(Arc::new(|x: &[T]| vec![x[0].exp()])),
        hessian: Some(Arc::new(|x: &[T]| vec![vec![x[0].exp()]])),
        concavity: ConcavityTag::NonConcave,
        smoothness: smooth_both(),
        description: "exp(x1), convex".into(),
        ..base("exp1d", 1, cube(1, 0.0, 1.0), |x: &[T]| x[0].exp())
    }
}

fn log_sum<T: Scalar>() -> UtilitySpec<T> {
    UtilitySpec {
        gradient: Some(Arc::new(|x: &[T]| vec![x[0].recip(), x[1].recip()])),
        hessian: Some(Arc::new(|x: &[T]| {
            vec![vec![-(x[0] * x[0]).recip(), T::zero()], vec![T::zero(), -(x[1] * x[1]).recip()]]
        })),
        concavity: ConcavityTag::StrictlyConcave,
        smoothness: smooth_both(),
        description: "log(x1) + log(x2)".into(),
        ..base("log_sum", 2, positive_box(), |x: &[T]| x[0].ln() + x[1].ln())
    }
}

/// `g(c) = c − 1` for `c ≤ 1`, `(c − 1)/2` above, exactly piecewise.
pub fn kink<T: Scalar>(c: T) -> T {
    if c <= T::one() {
        c - T::one()
    } else {
        (c - T::one()) * T::half()
    }
}

fn kinked_composite<T: Scalar>() -> UtilitySpec<T> {
    UtilitySpec {
        concavity: ConcavityTag::Concave,
        smoothness: SmoothnessTags { debreu: Some(true), line: Some(false) },
        description: "g(sqrt(x1 * x2)) with g(c) = c - 1 (c <= 1), (c - 1)/2 (c > 1); box [0.01, 4]^2".into(),
        ..base("kinked_composite", 2, cube(2, 0.01, 4.0), |x: &[T]| kink((x[0] * x[1]).sqrt()))
    }
}

fn min2<T: Scalar>() -> UtilitySpec<T> {
    UtilitySpec {
        concavity: ConcavityTag::Concave,
        smoothness: SmoothnessTags { debreu: Some(false), line: Some(true) },
        description: "min(x1, x2), kinked indifference curves".into(),
        ..base("min", 2, positive_box(), |x: &[T]| x[0].min(x[1]))
    }
}

fn cubic<T: Scalar>() -> UtilitySpec<T> {
    UtilitySpec {
        gradient: Some(Arc::new(|x: &[T]| vec![T::lit(3.0) * x[0] * x[0]])),
        hessian: Some(Arc::new(|x: &[T]| vec![vec![T::lit(6.0) * x[0]]])),
        concavity: ConcavityTag::NonConcave,
        description: "t^3 on [-1, 1]".into(),
        ..base("cubic", 1, cube(1, -1.0, 1.0), |x: &[T]| x[0] * x[0] * x[0])
    }
}

fn step<T: Scalar>() -> UtilitySpec<T> {
    UtilitySpec {
        concavity: ConcavityTag::NonConcave,
        smoothness: SmoothnessTags { debreu: Some(false), line: Some(false) },
        monotone: false,
        continuous: false,
        description: "floor(x1), discontinuous".into(),
        ..base("step", 1, cube(1, 0.0, 3.0), |x: &[T]| x[0].floor())
    }
}

fn concave_quadratic<T: Scalar>() -> UtilitySpec<T> {
    UtilitySpec {
        gradient: Some(Arc::new(|x: &[T]| vec![-T::two() * (x[0] - T::one())])),
        hessian: Some(Arc::new(|_: &[T]| vec![vec![-T::two()]])),
        concavity: ConcavityTag::StrictlyConcave,
        monotone: false,
        reference_segment: Some((vec![0.0], vec![1.0])),
        description: "-(t - 1)^2 on [0, 2], peaks inside the box".into(),
        ..base("concave_quadratic", 1, cube(1, 0.0, 2.0), |x: &[T]| {
            let d = x[0] - T::one();
            -d * d
        })
    }
}

/// Every utility fixture.
pub fn catalog<T: Scalar>() -> Vec<UtilitySpec<T>> {
    vec![
        linear(),
        cobb_douglas(),
        ces(),
        exp1d(),
        log_sum(),
        kinked_composite(),
        min2(),
        cubic(),
        step(),
        concave_quadratic(),
    ]
}

fn intensity<T: Scalar>(
    name: &str,
    description: &str,
    g: impl Fn(&[T], &[T]) -> T + Send + Sync + 'static,
) -> IntensitySpec<T> {
    IntensitySpec {
        name: name.into(),
        dim: 1,
        evaluator: Arc::new(g),
        domain: cube(1, 0.0, 10.0),
        description: description.into(),
    }
}

/// General intensity fixtures, all on `[0, 10]`.
pub fn intensity_catalog<T: Scalar>() -> Vec<IntensitySpec<T>> {
    vec![
        intensity("broken_crossover", "g(x, y) = x - 2y; violates crossover", |x, y| x[0] - T::two() * y[0]),
        intensity("sum_intensity", "g(x, y) = x + y; violates second consistency", |x, y| x[0] + y[0]),
        intensity("constant", "g = 0; every comparison Equal", |_, _| T::zero()),
    ]
}

/// A named fixture of either kind.
#[derive(Debug, Clone)]
pub enum Fixture<T> {
    Utility(UtilitySpec<T>),
    Intensity(IntensitySpec<T>),
}

impl<T: Scalar> Fixture<T> {
    pub fn name(&self) -> &str {
        match self {
            Self::Utility(s) => &s.name,
            Self::Intensity(s) => &s.name,
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        match self {
            Self::Utility(s) => &s.domain,
            Self::Intensity(s) => &s.domain,
        }
    }

    pub fn oracle(&self) -> Result<AltOracle<T>> {
        match self {
            Self::Utility(s) => s.oracle(),
            Self::Intensity(s) => s.oracle(),
        }
    }

    pub fn utility(&self) -> Option<&UtilitySpec<T>> {
        match self {
            Self::Utility(s) => Some(s),
            Self::Intensity(_) => None,
        }
    }
}

pub fn lookup<T: Scalar>(name: &str) -> Result<Fixture<T>> {
    if let Some(s) = catalog().into_iter().find(|s| s.name == name) {
        return Ok(Fixture::Utility(s));
    }
    intensity_catalog()
        .into_iter()
        .find(|s| s.name == name)
        .map(Fixture::Intensity)
        .ok_or_else(|| Error::UnknownFixture(name.into()))
}

pub fn lookup_utility<T: Scalar>(name: &str) -> Result<UtilitySpec<T>> {
    catalog().into_iter().find(|s| s.name == name).ok_or_else(|| Error::UnknownFixture(name.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let mut names: Vec<String> = catalog::<f64>().into_iter().map(|s| s.name).collect();
        names.extend(intensity_catalog::<f64>().into_iter().map(|s| s.name));
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
    }

    #[test]
    fn documented_tags() {
        let composite = lookup_utility::<f64>("kinked_composite").unwrap();
        assert_eq!(composite.smoothness, SmoothnessTags { debreu: Some(true), line: Some(false) });
        let m = lookup_utility::<f64>("min").unwrap();
        assert_eq!(m.smoothness, SmoothnessTags { debreu: Some(false), line: Some(true) });
        assert_eq!(lookup_utility::<f64>("cobb_douglas").unwrap().concavity, ConcavityTag::Concave);
    }

    #[test]
    fn composite_is_exactly_piecewise() {
        assert_eq!(kink(1.0_f64), 0.0);
        assert_eq!(kink(0.5_f64), -0.5);
        assert_eq!(kink(3.0_f64), 1.0);
    }

    #[test]
    fn cobb_douglas_is_not_strictly_concave_on_rays() {
        // Collinear pairs through the origin: u is linear there, so the midpoint inequality is tight.
        let u = lookup_utility::<f64>("cobb_douglas").unwrap();
        for &(s, r) in &[(1.0, 4.0), (0.5, 9.0), (2.0, 3.0)] {
            let (x, y) = ([s, 2.0 * s], [r, 2.0 * r]);
            let z = [(s + r) / 2.0, s + r];
            let gap = u.eval(&z) - 0.5 * (u.eval(&x) + u.eval(&y));
            assert!(gap.abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let h = 1e-5;
        for spec in catalog::<f64>() {
            let (Some(g), Some(hess)) = (&spec.gradient, &spec.hessian) else { continue };
            let dom = spec.default_domain().unwrap();
            let x: Vec<f64> =
                dom.lower().coords().iter().zip(dom.upper().coords()).map(|(a, b)| 0.3 * a + 0.7 * b).collect();
            let gx = g(&x);
            for i in 0..spec.dim {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (spec.eval(&xp) - spec.eval(&xm)) / (2.0 * h);
                assert!((fd - gx[i]).abs() < 1e-6 * (1.0 + gx[i].abs()), "{} grad {i}", spec.name);
                let gp = g(&xp);
                let gm = g(&xm);
                for j in 0..spec.dim {
                    let fd2 = (gp[j] - gm[j]) / (2.0 * h);
                    let hx = hess(&x)[i][j];
                    assert!((fd2 - hx).abs() < 1e-5 * (1.0 + hx.abs()), "{} hess {i}{j}", spec.name);
                }
            }
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(lookup::<f64>("nope"), Err(Error::UnknownFixture(_))));
    }
}
