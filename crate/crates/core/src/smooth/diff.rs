//! Central finite differences on a box.

use crate::domain::{BoxDomain, Point};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_margin<T: Scalar>(domain: &BoxDomain<T>, x: &Point<T>, margin: T) -> Result<()> {
    domain.check(x)?;
    if !(margin > T::zero()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {margin}")));
    }
    if !domain.contains_with_margin(x, margin) {
        return Err(Error::MarginViolation { point: x.to_f64_vec(), margin: margin.as_f64() });
    }
    Ok(())
}

/// Central-difference gradient; `x` must sit at least `2h` inside the box.
pub fn numeric_gradient<T, F>(f: F, domain: &BoxDomain<T>, x: &Point<T>, h: T) -> Result<Vec<T>>
where
    T: Scalar,
    F: Fn(&Point<T>) -> Result<T>,
{
    check_margin(domain, x, T::two() * h)?;
    (0..x.dim()).map(|i| Ok((f(&x.shifted(i, h))? - f(&x.shifted(i, -h))?) / (T::two() * h))).collect()
}

/// Cross-stencil estimate of `∂²f/∂x_i∂x_j` with steps `hi` along `i` and `hj` along `j`.
///
/// For `i == j` this is the three-point second difference with step `hi`.
pub fn cross_partial<T, F>(f: &F, x: &Point<T>, i: usize, j: usize, hi: T, hj: T) -> Result<T>
where
    T: Scalar,
    F: Fn(&Point<T>) -> Result<T>,
{
    if i == j {
        let c = f(x)?;
        return Ok((f(&x.shifted(i, hi))? - T::two() * c + f(&x.shifted(i, -hi))?) / (hi * hi));
    }
    let at = |si: T, sj: T| f(&x.shifted(i, si).shifted(j, sj));
    let s = at(hi, hj)? - at(hi, -hj)? - at(-hi, hj)? + at(-hi, -hj)?;
    Ok(s / (T::lit(4.0) * hi * hj))
}

/// Central-difference Hessian with the four-point cross stencil off the diagonal.
#[allow(clippy::needless_range_loop)]
pub fn numeric_hessian<T, F>(f: F, domain: &BoxDomain<T>, x: &Point<T>, h: T) -> Result<Vec<Vec<T>>>
where
    T: Scalar,
    F: Fn(&Point<T>) -> Result<T>,
{
    check_margin(domain, x, T::two() * h)?;
    let n = x.dim();
    let mut hess = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = cross_partial(&f, x, i, j, h, h)?;
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    Ok(hess)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Point<f64> {
        Point::from_f64(c).unwrap()
    }

    #[test]
    fn cobb_douglas_at_unit() {
        let dom = BoxDomain::cube(2, 0.1, 10.0).unwrap();
        let f = |x: &Point<f64>| Ok((x[0] * x[1]).sqrt());
        let g = numeric_gradient(f, &dom, &p(&[1.0, 1.0]), 1e-4).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-8 && (g[1] - 0.5).abs() < 1e-8);
        let h = numeric_hessian(f, &dom, &p(&[1.0, 1.0]), 1e-3).unwrap();
        assert!((h[0][1] - 0.25).abs() < 1e-6);
        assert!((h[0][0] + 0.25).abs() < 1e-6);
    }

    #[test]
    fn linear_hessian_vanishes() {
        let dom = BoxDomain::cube(2, 0.1, 10.0).unwrap();
        let h = numeric_hessian(|x: &Point<f64>| Ok(x[0] + x[1]), &dom, &p(&[3.0, 4.0]), 1e-3).unwrap();
        assert!(h.iter().flatten().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn margin_enforced() {
        let dom = BoxDomain::cube(2, 0.1, 10.0).unwrap();
        let err = numeric_gradient(|x: &Point<f64>| Ok(x[0]), &dom, &p(&[0.1005, 1.0]), 1e-3);
        assert!(matches!(err, Err(Error::MarginViolation { .. })));
    }
}
