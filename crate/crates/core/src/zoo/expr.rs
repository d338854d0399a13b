//! JSON expression form for user-defined utilities.
//!
//! ```json
//! { "name": "my_cd", "dimension": 2,
//!   "utility": { "sqrt": { "mul": [ { "var": 0 }, { "var": 1 } ] } },
//!   "domain": { "lower": [0.1, 0.1], "upper": [10, 10] },
//!   "concavity": "concave" }
//! ```
//!
//! Variables are zero-based coordinate indices.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::zoo::{ConcavityTag, SmoothnessTags, UtilitySpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Var(usize),
    Const(f64),
    Add(Vec<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Vec<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sqrt(Box<Expr>),
    Log(Box<Expr>),
    Exp(Box<Expr>),
    Neg(Box<Expr>),
    Min(Vec<Expr>),
    Max(Vec<Expr>),
}

impl Expr {
    pub fn eval<T: Scalar>(&self, x: &[T]) -> T {
        let fold = |xs: &[Expr], init: T, op: fn(T, T) -> T| xs.iter().fold(init, |a, e| op(a, e.eval(x)));
        match self {
            Self::Var(i) => x[*i],
            Self::Const(c) => T::from_f64(*c).unwrap_or_else(T::nan),
            Self::Add(xs) => fold(xs, T::zero(), |a, b| a + b),
            Self::Mul(xs) => fold(xs, T::one(), |a, b| a * b),
            Self::Min(xs) => fold(xs, T::infinity(), T::min),
            Self::Max(xs) => fold(xs, T::neg_infinity(), T::max),
            Self::Sub(a, b) => a.eval(x) - b.eval(x),
            Self::Div(a, b) => a.eval(x) / b.eval(x),
            Self::Pow(a, b) => a.eval(x).powf(b.eval(x)),
            Self::Sqrt(a) => a.eval(x).sqrt(),
            Self::Log(a) => a.eval(x).ln(),
            Self::Exp(a) => a.eval(x).exp(),
            Self::Neg(a) => -a.eval(x),
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Self::Var(i) => Some(*i),
            Self::Const(_) => None,
            Self::Add(xs) | Self::Mul(xs) | Self::Min(xs) | Self::Max(xs) => xs.iter().filter_map(Expr::max_var).max(),
            Self::Sub(a, b) | Self::Div(a, b) | Self::Pow(a, b) => a.max_var().max(b.max_var()),
            Self::Sqrt(a) | Self::Log(a) | Self::Exp(a) | Self::Neg(a) => a.max_var(),
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            Self::Add(xs) | Self::Mul(xs) | Self::Min(xs) | Self::Max(xs) => {
                if xs.is_empty() {
                    return Err(Error::Expression("n-ary operator needs at least one operand".into()));
                }
                xs.iter().try_for_each(Expr::check)
            }
            Self::Const(c) if !c.is_finite() => Err(Error::Expression(format!("non-finite constant {c}"))),
            Self::Sub(a, b) | Self::Div(a, b) | Self::Pow(a, b) => a.check().and(b.check()),
            Self::Sqrt(a) | Self::Log(a) | Self::Exp(a) | Self::Neg(a) => a.check(),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressionFile {
    pub name: String,
    pub dimension: usize,
    pub utility: Expr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concavity: Option<ConcavityTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotone: Option<bool>,
}

impl ExpressionFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Expression(e.to_string()))
    }

    /// Validates the expression and wraps it as a utility fixture.
    /// The domain defaults to `[0.1, 10]^n`.
    pub fn into_spec<T: Scalar>(self) -> Result<UtilitySpec<T>> {
        if self.dimension == 0 {
            return Err(Error::Expression("dimension must be at least 1".into()));
        }
        self.utility.check()?;
        if let Some(i) = self.utility.max_var() {
            if i >= self.dimension {
                return Err(Error::Expression(format!("variable {i} out of range for dimension {}", self.dimension)));
            }
        }
        let domain = self.domain.unwrap_or_else(|| DomainSpec {
            lower: vec![0.1; self.dimension],
            upper: vec![10.0; self.dimension],
            lower_open: None,
            upper_open: None,
        });
        if domain.lower.len() != self.dimension || domain.upper.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: domain.lower.len() });
        }
        let e = self.utility;
        Ok(UtilitySpec {
            name: self.name,
            dim: self.dimension,
            evaluator: Arc::new(move |x: &[T]| e.eval(x)),
            gradient: None,
            hessian: None,
            concavity: self.concavity.unwrap_or(ConcavityTag::Unknown),
            smoothness: SmoothnessTags::default(),
            domain,
            monotone: self.monotone.unwrap_or(true),
            continuous: true,
            reference_segment: None,
            description: "user expression".into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_evaluates() {
        let f = ExpressionFile::from_json(
            r#"{"name":"cd","dimension":2,"utility":{"sqrt":{"mul":[{"var":0},{"var":1}]}}}"#,
        )
        .unwrap();
        let spec = f.into_spec::<f64>().unwrap();
        assert_eq!(spec.eval(&[4.0, 9.0]), 6.0);
        assert_eq!(spec.domain.lower, vec![0.1, 0.1]);
    }

    #[test]
    fn full_grammar() {
        let e: Expr = serde_json::from_str(
            r#"{"add":[{"pow":[{"var":0},{"const":2}]},{"neg":{"log":{"exp":{"const":1}}}},
                {"div":[{"sub":[{"var":1},{"const":1}]},{"const":2}]},
                {"min":[{"var":0},{"var":1}]},{"max":[{"var":0},{"var":1}]}]}"#,
        )
        .unwrap();
        // 9 - 1 + 2 + 3 + 5
        assert!((e.eval(&[3.0_f64, 5.0]) - 18.0).abs() < 1e-12);
    }

    #[test]
    fn variable_out_of_range() {
        let f = ExpressionFile::from_json(r#"{"name":"bad","dimension":1,"utility":{"var":1}}"#).unwrap();
        assert!(matches!(f.into_spec::<f64>(), Err(Error::Expression(_))));
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(ExpressionFile::from_json("{"), Err(Error::Expression(_))));
    }
}
