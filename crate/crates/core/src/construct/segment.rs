use crate::domain::{BoxDomain, Point};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Straight path `t ↦ (1 - t)·p + t·q` for `t ∈ [0, 1]`.
///
/// On a convex domain the whole segment lies inside whenever both endpoints do.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<T> {
    p: Point<T>,
    q: Point<T>,
}

impl<T: Scalar> Segment<T> {
    pub fn new(p: Point<T>, q: Point<T>, domain: &BoxDomain<T>) -> Result<Self> {
        domain.check(&p)?;
        domain.check(&q)?;
        if p == q {
            return Err(Error::InvalidArgument("segment endpoints coincide".into()));
        }
        Ok(Self { p, q })
    }

    pub(crate) fn new_unchecked(p: Point<T>, q: Point<T>) -> Self {
        Self { p, q }
    }

    pub fn start(&self) -> &Point<T> {
        &self.p
    }

    pub fn end(&self) -> &Point<T> {
        &self.q
    }

    pub fn at(&self, t: T) -> Point<T> {
        self.p.lerp(&self.q, t)
    }

    pub fn length(&self) -> T {
        self.p.distance(&self.q)
    }

    /// Parameter of the orthogonal projection of `x`, if `x` lies on the
    /// segment within a relative distance of `rel_tol`.
    pub fn param_of(&self, x: &Point<T>, rel_tol: T) -> Option<T> {
        if x.dim() != self.p.dim() {
            return None;
        }
        let dir: Vec<T> = self.q.coords().iter().zip(self.p.coords()).map(|(&b, &a)| b - a).collect();
        let len2 = dir.iter().fold(T::zero(), |acc, &d| acc + d * d);
        let dot = x
            .coords()
            .iter()
            .zip(self.p.coords())
            .zip(&dir)
            .fold(T::zero(), |acc, ((&xi, &pi), &d)| acc + (xi - pi) * d);
        let t = dot / len2;
        let slack = rel_tol.max(T::epsilon() * T::lit(16.0));
        if t < -slack || t > T::one() + slack {
            return None;
        }
        let t = t.max(T::zero()).min(T::one());
        (self.at(t).distance(x) <= slack * len2.sqrt()).then_some(t)
    }
}
