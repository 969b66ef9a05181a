//! A small expression language for supplying `f(t)` on the command line.
//!
//! The grammar (also documented in the CLI help):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?            -- right associative
//! atom   := number | 't' | name '(' expr ')' | '(' expr ')'
//! name   := exp | log | abs | sqrt
//! ```
//!
//! `^` binds tighter than unary minus, which binds tighter than `*` and `/`.
//! There is no implicit multiplication. Whitespace is ignored.

mod parse;

pub use parse::{parse, ParseError};

use std::fmt;

use crate::scalar::Real;

/// Unary function names admitted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Abs,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Parsed expression tree with one free variable `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Evaluation failure: the expression left its real domain at `t`.
#[derive(Debug, Clone, thiserror::Error, PartialEq)]
#[error("domain error in `{node}` at t = {at}")]
pub struct DomainError {
    /// Pretty-printed subexpression whose evaluation failed.
    pub node: String,
    /// Input value the whole expression was evaluated at.
    pub at: f64,
}

impl Expr {
    /// IEEE evaluation at `t`. Domain violations (log of a nonpositive
    /// value, `0^negative`, a negative base with a fractional exponent,
    /// division by zero, overflow to infinity) are reported as errors,
    /// never returned as NaN.
    pub fn eval<T: Real>(&self, t: T) -> Result<T, DomainError> {
        let err = |node: &Expr| DomainError {
            node: node.to_string(),
            at: t.as_f64(),
        };
        let v = match self {
            Expr::Const(c) => T::lit(*c),
            Expr::Var => t,
            Expr::Neg(e) => -e.eval(t)?,
            Expr::Add(a, b) => a.eval(t)? + b.eval(t)?,
            Expr::Sub(a, b) => a.eval(t)? - b.eval(t)?,
            Expr::Mul(a, b) => a.eval(t)? * b.eval(t)?,
            Expr::Div(a, b) => {
                let d = b.eval(t)?;
                if d == T::zero() {
                    return Err(err(self));
                }
                a.eval(t)? / d
            }
            Expr::Pow(a, b) => {
                let base = a.eval(t)?;
                let expo = b.eval(t)?;
                if base == T::zero() && expo < T::zero() {
                    return Err(err(self));
                }
                if base < T::zero() && expo.fract() != T::zero() {
                    return Err(err(self));
                }
                base.powf(expo)
            }
            Expr::Call(f, e) => {
                let x = e.eval(t)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= T::zero() {
                            return Err(err(self));
                        }
                        x.ln()
                    }
                    Func::Abs => x.abs(),
                    Func::Sqrt => {
                        if x < T::zero() {
                            return Err(err(self));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if !v.is_finite() {
            return Err(err(self));
        }
        Ok(v)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(..) | Expr::Var | Expr::Call(..) => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            write!(f, "(")?;
        }
        match self {
            Expr::Const(c) => write!(f, "{c:?}")?,
            Expr::Var => write!(f, "t")?,
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_prec(f, 3)?;
            }
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Pow(a, b) => {
                a.fmt_prec(f, 5)?;
                write!(f, "^")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Call(func, e) => {
                write!(f, "{}(", func.name())?;
                e.fmt_prec(f, 1)?;
                write!(f, ")")?;
            }
        }
        if prec < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Pretty-printer. Output reparses to a structurally identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 1)
    }
}

/// Built-in function families used by the verification corpus and the
/// superquadratic power family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// `1/(t+1)`
    InverseShift,
    /// `exp(-t)`
    ExpDecay,
    /// `t*exp(-t)`
    RampExpDecay,
    /// `t/(1+t^2)`
    OddRational,
    /// `1/(1+t^2)`
    Lorentzian,
    /// `t^p` or `-t^p`
    Power { exponent: f64, negated: bool },
    /// constant
    Constant(f64),
}

impl Builtin {
    fn eval<T: Real>(self, t: T) -> T {
        let one = T::one();
        match self {
            Builtin::InverseShift => one / (t + one),
            Builtin::ExpDecay => (-t).exp(),
            Builtin::RampExpDecay => t * (-t).exp(),
            Builtin::OddRational => t / (one + t * t),
            Builtin::Lorentzian => one / (one + t * t),
            Builtin::Power { exponent, negated } => {
                let v = t.powf(T::lit(exponent));
                if negated {
                    -v
                } else {
                    v
                }
            }
            Builtin::Constant(c) => T::lit(c),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::InverseShift => write!(f, "1/(t+1)"),
            Builtin::ExpDecay => write!(f, "exp(-t)"),
            Builtin::RampExpDecay => write!(f, "t*exp(-t)"),
            Builtin::OddRational => write!(f, "t/(1+t^2)"),
            Builtin::Lorentzian => write!(f, "1/(1+t^2)"),
            Builtin::Power { exponent, negated } => {
                if *negated {
                    write!(f, "-t^{exponent:?}")
                } else {
                    write!(f, "t^{exponent:?}")
                }
            }
            Builtin::Constant(c) => write!(f, "{c:?}"),
        }
    }
}

/// An evaluable nonnegative-domain function on `(0, ∞)` (evaluation at
/// `t = 0` is also admitted; the Jensen machinery needs it).
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFn {
    Parsed(Expr),
    Builtin(Builtin),
}

impl ScalarFn {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        Ok(ScalarFn::Parsed(parse(source)?))
    }

    pub fn builtin(b: Builtin) -> Self {
        ScalarFn::Builtin(b)
    }

    pub fn zero() -> Self {
        ScalarFn::Builtin(Builtin::Constant(0.0))
    }

    pub fn constant(c: f64) -> Self {
        ScalarFn::Builtin(Builtin::Constant(c))
    }

    pub fn eval<T: Real>(&self, t: T) -> Result<T, DomainError> {
        match self {
            ScalarFn::Parsed(e) => e.eval(t),
            ScalarFn::Builtin(b) => {
                let v = b.eval(t);
                if !v.is_finite() {
                    return Err(DomainError {
                        node: b.to_string(),
                        at: t.as_f64(),
                    });
                }
                Ok(v)
            }
        }
    }
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Parsed(e) => write!(f, "{e}"),
            ScalarFn::Builtin(b) => write!(f, "{b}"),
        }
    }
}
