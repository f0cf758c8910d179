//! Expression language for frame coefficients, metric entries and contact data.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' ['-'] power)?        exponent must fold to an integer
//! atom  := NUMBER | P/Q | coord | fn '(' expr ')' | '(' expr ')'
//! fn    := exp | ln | sin | cos | sqrt
//! ```
//!
//! `3/2` written without spaces is one rational literal; `3 / 2` is a
//! division. Both evaluate to the same value. There is no implicit
//! multiplication, so `2x` is rejected.

mod parser;

use std::fmt;

use crate::jet::{ElemFn, Jet, JetError};
use crate::scalar::Scalar;

pub use parser::parse;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("exponent at byte {offset} is not an integer constant")]
    NonIntegerExponent { offset: usize },
    #[error("point lies outside the chart domain ({constraint})")]
    PointOutsideDomain { constraint: String },
    #[error("point has {got} coordinates, chart has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid constant `{0}`")]
    InvalidConstant(String),
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Unsigned decimal literal as written (`2`, `0.5`).
    Decimal(String),
    /// Rational literal `p/q`.
    Ratio(i64, i64),
    Coord {
        index: usize,
        name: String,
    },
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(ElemFn, Box<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        if v < 0 {
            Expr::Neg(Box::new(Expr::Decimal((-v).to_string())))
        } else {
            Expr::Decimal(v.to_string())
        }
    }

    pub fn coord(chart: &Chart, index: usize) -> Expr {
        Expr::Coord { index, name: chart.coord_names[index].clone() }
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Decimal(_) | Expr::Ratio(..) => true,
            Expr::Coord { .. } => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Evaluates into a jet at `point` without checking domain constraints.
    pub fn to_jet<S: Scalar>(&self, point: &[S], degree: usize) -> Result<Jet<S>, ExprError> {
        let n = point.len();
        Ok(match self {
            Expr::Decimal(text) => Jet::constant(S::from_decimal(text).ok_or_else(|| ExprError::InvalidConstant(text.clone()))?, n, degree),
            Expr::Ratio(p, q) => Jet::constant(S::from_ratio(*p, *q)?, n, degree),
            Expr::Coord { index, .. } => Jet::var(*index, point, degree)?,
            Expr::Neg(a) => -a.to_jet(point, degree)?,
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.to_jet(point, degree)?, b.to_jet(point, degree)?);
                match op {
                    BinOp::Add => &a + &b,
                    BinOp::Sub => &a - &b,
                    BinOp::Mul => &a * &b,
                    BinOp::Div => a.try_div(&b)?,
                }
            }
            Expr::Pow(a, k) => a.to_jet(point, degree)?.powi(*k)?,
            Expr::Call(f, a) => a.to_jet(point, degree)?.apply(*f)?,
        })
    }

    /// Value of a coordinate-free expression.
    pub fn eval_constant<S: Scalar>(&self) -> Result<S, ExprError> {
        if !self.is_constant() {
            return Err(ExprError::InvalidConstant(self.to_string()));
        }
        Ok(self.to_jet::<S>(&[], 0)?.value().clone())
    }

    pub fn eval_scalar<S: Scalar>(&self, point: &[S]) -> Result<S, ExprError> {
        Ok(self.to_jet(point, 0)?.value().clone())
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized so that printing and re-parsing is structurally stable.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Decimal(s) => write!(f, "{s}"),
            Expr::Ratio(p, q) if *p < 0 => write!(f, "(-{}/{q})", -(*p as i128)),
            Expr::Ratio(p, q) => write!(f, "{p}/{q}"),
            Expr::Coord { name, .. } => write!(f, "{name}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow(a, k) => match **a {
                Expr::Decimal(_) | Expr::Coord { .. } => write!(f, "{a}^{k}"),
                _ => write!(f, "({a})^{k}"),
            },
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Gt,
    Lt,
    Ne,
}

/// A strict inequality `lhs op rhs` restricting the chart domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub lhs: Expr,
    pub cmp: Cmp,
    pub rhs: Expr,
    pub text: String,
}

impl Constraint {
    pub fn parse(text: &str, chart: &Chart) -> Result<Constraint, ExprError> {
        let (at, cmp, width) = if let Some(i) = text.find("!=") {
            (i, Cmp::Ne, 2)
        } else if let Some(i) = text.find('>') {
            (i, Cmp::Gt, 1)
        } else if let Some(i) = text.find('<') {
            (i, Cmp::Lt, 1)
        } else {
            return Err(ExprError::Syntax { offset: 0, message: "domain constraint needs one of `>`, `<`, `!=`".into() });
        };
        let shift = |e: ExprError, base: usize| match e {
            ExprError::Syntax { offset, message } => ExprError::Syntax { offset: offset + base, message },
            other => other,
        };
        let lhs = parse(&text[..at], chart).map_err(|e| shift(e, 0))?;
        let rhs = parse(&text[at + width..], chart).map_err(|e| shift(e, at + width))?;
        Ok(Constraint { lhs, cmp, rhs, text: text.trim().to_string() })
    }

    pub fn holds<S: Scalar>(&self, point: &[S]) -> Result<bool, ExprError> {
        let l = self.lhs.eval_scalar(point)?;
        let r = self.rhs.eval_scalar(point)?;
        Ok(match self.cmp {
            Cmp::Gt => l > r,
            Cmp::Lt => l < r,
            Cmp::Ne => l != r,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub coord_names: Vec<String>,
    pub constraints: Vec<Constraint>,
}

impl Chart {
    pub fn new<I, T>(names: I) -> Result<Chart, ExprError>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let coord_names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in coord_names.iter().enumerate() {
            let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid || ElemFn::from_name(name).is_some() {
                return Err(ExprError::Syntax { offset: 0, message: format!("`{name}` is not a valid coordinate name") });
            }
            if coord_names[..i].contains(name) {
                return Err(ExprError::Syntax { offset: 0, message: format!("duplicate coordinate name `{name}`") });
            }
        }
        Ok(Chart { coord_names, constraints: Vec::new() })
    }

    pub fn dim(&self) -> usize {
        self.coord_names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coord_names.iter().position(|n| n == name)
    }

    pub fn with_constraint(mut self, text: &str) -> Result<Chart, ExprError> {
        let c = Constraint::parse(text, &self)?;
        self.constraints.push(c);
        Ok(self)
    }

    pub fn check_point<S: Scalar>(&self, point: &[S]) -> Result<(), ExprError> {
        if point.len() != self.dim() {
            return Err(ExprError::DimensionMismatch { expected: self.dim(), got: point.len() });
        }
        for c in &self.constraints {
            if !c.holds(point)? {
                return Err(ExprError::PointOutsideDomain { constraint: c.text.clone() });
            }
        }
        Ok(())
    }

    pub fn contains<S: Scalar>(&self, point: &[S]) -> bool {
        self.check_point(point).is_ok()
    }
}

/// Evaluates `expr` to a jet after checking the chart's domain constraints.
pub fn eval_jet<S: Scalar>(expr: &Expr, chart: &Chart, point: &[S], degree: usize) -> Result<Jet<S>, ExprError> {
    chart.check_point(point)?;
    expr.to_jet(point, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn xyz() -> Chart {
        Chart::new(["x", "y", "z"]).unwrap()
    }

    fn c(name: &str) -> Box<Expr> {
        let chart = xyz();
        Box::new(Expr::coord(&chart, chart.index_of(name).unwrap()))
    }

    #[test]
    fn precedence() {
        let e = parse("z^2 + 3/2*x", &xyz()).unwrap();
        let expected = Expr::Binary(
            BinOp::Add,
            Box::new(Expr::Pow(c("z"), 2)),
            Box::new(Expr::Binary(BinOp::Mul, Box::new(Expr::Ratio(3, 2)), c("x"))),
        );
        assert_eq!(e, expected);
        assert_eq!(parse("-z", &xyz()).unwrap(), Expr::Neg(c("z")));
        assert_eq!(parse("-z^2", &xyz()).unwrap(), Expr::Neg(Box::new(Expr::Pow(c("z"), 2))));
        assert_eq!(parse("2^3^2", &xyz()).unwrap(), Expr::Pow(Box::new(Expr::int(2)), 9));
        assert_eq!(parse("x - y - z", &xyz()).unwrap(), parse("(x - y) - z", &xyz()).unwrap());
        assert_eq!(parse("x / y / z", &xyz()).unwrap(), parse("(x / y) / z", &xyz()).unwrap());
    }

    #[test]
    fn rational_literal_versus_division() {
        assert_eq!(parse("3/2", &xyz()).unwrap(), Expr::Ratio(3, 2));
        let spaced = parse("3 / 2", &xyz()).unwrap();
        assert_eq!(spaced, Expr::Binary(BinOp::Div, Box::new(Expr::int(3)), Box::new(Expr::int(2))));
        let a: BigRational = Expr::Ratio(3, 2).eval_constant().unwrap();
        let b: BigRational = spaced.eval_constant().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse("exp(2*t", &Chart::new(["t"]).unwrap()), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("2x", &xyz()), Err(ExprError::Syntax { offset: 1, .. })));
        assert!(matches!(parse("", &xyz()), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("x +", &xyz()), Err(ExprError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("x $ y", &xyz()), Err(ExprError::Syntax { offset: 2, .. })));
        assert_eq!(parse("w + 1", &xyz()), Err(ExprError::UnknownIdentifier { name: "w".into(), offset: 0 }));
        assert_eq!(parse("foo(x)", &xyz()), Err(ExprError::UnknownIdentifier { name: "foo".into(), offset: 0 }));
        assert_eq!(parse("z^0.5", &xyz()), Err(ExprError::NonIntegerExponent { offset: 2 }));
        assert_eq!(parse("z^x", &xyz()), Err(ExprError::NonIntegerExponent { offset: 2 }));
        assert!(parse("z^(4/2)", &xyz()).is_ok());
    }

    #[test]
    fn eval_examples() {
        let p = [1.0, 1.0, 2.0];
        let z = eval_jet(&parse("z", &xyz()).unwrap(), &xyz(), &p, 4).unwrap();
        assert_eq!(*z.value(), 2.0);
        assert_eq!(z.gradient(), vec![0.0, 0.0, 1.0]);
        assert_eq!(z.valid_order(), 4);
        let mz = eval_jet(&parse("-z", &xyz()).unwrap(), &xyz(), &p, 4).unwrap();
        assert_eq!(*mz.value(), -2.0);
        assert_eq!(mz.gradient(), vec![0.0, 0.0, -1.0]);
    }

    #[test]
    fn domain_constraints() {
        let chart = xyz().with_constraint("z > 0").unwrap();
        let e = parse("z", &chart).unwrap();
        assert!(eval_jet(&e, &chart, &[0.0, 0.0, 1.0], 2).is_ok());
        assert_eq!(eval_jet(&e, &chart, &[0.0, 0.0, -1.0], 2), Err(ExprError::PointOutsideDomain { constraint: "z > 0".into() }));
        let ne = xyz().with_constraint("z != 0").unwrap();
        assert!(!ne.contains(&[1.0, 1.0, 0.0]));
        assert!(ne.contains(&[1.0, 1.0, -0.5]));
    }

    #[test]
    fn printing_is_reparseable() {
        for text in ["z^2 + 3/2*x", "-z", "exp(-2*x)*(1 + (x^2 + y^2)/4)", "3/2^2", "(x*y)^-3", "1/2/3"] {
            let e = parse(text, &xyz()).unwrap();
            let again = parse(&e.to_string(), &xyz()).unwrap();
            assert_eq!(e, again, "{text} -> {e}");
        }
    }
}
