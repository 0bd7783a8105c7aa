//! A small expression language for nonlinearities `f(u)` and `f(u, λ)`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' ['+' | '-'] INTEGER)?
//! atom  := NUMBER | 'u' | 'lambda' | FUNC '(' expr ')' | '(' expr ')'
//! FUNC  := sin | cos | tan | atan | tanh | exp | log | abs | sqrt
//! ```
//!
//! Exponents are integer literals, so evaluation never raises a negative base
//! to a fractional power. `u^2^3` is rejected; write `(u^2)^3`.

mod diff;
mod parse;
mod zeros;

use std::fmt;

use thiserror::Error;

pub use parse::{parse, ParseError};
pub use zeros::{asymptotic_slope_warning, find_zeros, Zero, ZeroDiagnostic, ZeroScan, DEFAULT_CELLS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    U,
    Lambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Atan,
    Tanh,
    Exp,
    Log,
    Abs,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Atan,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Abs,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree. Literals are finite and nonnegative; a negative constant
/// is `Neg(Num(c))`, which is what the parser produces.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("log of a nonpositive value in `{0}`")]
    LogDomain(String),
    #[error("sqrt of a negative value in `{0}`")]
    SqrtDomain(String),
    #[error("non-finite value in `{0}`")]
    NonFinite(String),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        if v < 0.0 {
            Expr::Neg(Box::new(Expr::Num(-v)))
        } else {
            Expr::Num(v)
        }
    }

    pub fn u() -> Expr {
        Expr::Var(Var::U)
    }

    pub fn lambda() -> Expr {
        Expr::Var(Var::Lambda)
    }

    /// Constant value, if the expression is a literal or a negated literal.
    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            Expr::Neg(a) => match **a {
                Expr::Num(v) => Some(-v),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn mentions(&self, var: Var) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.mentions(var),
            Expr::Bin(_, a, b) => a.mentions(var) || b.mentions(var),
        }
    }

    pub fn eval(&self, u: f64, lam: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::U) => u,
            Expr::Var(Var::Lambda) => lam,
            Expr::Neg(a) => -a.eval(u, lam)?,
            Expr::Bin(op, a, b) => {
                let x = a.eval(u, lam)?;
                let y = b.eval(u, lam)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(EvalError::DivisionByZero(self.to_string()));
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(a, n) => {
                let x = a.eval(u, lam)?;
                if x == 0.0 && *n < 0 {
                    return Err(EvalError::DivisionByZero(self.to_string()));
                }
                x.powi(*n)
            }
            Expr::Call(f, a) => {
                let x = a.eval(u, lam)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Atan => x.atan(),
                    Func::Tanh => x.tanh(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(EvalError::LogDomain(self.to_string()));
                        }
                        x.ln()
                    }
                    Func::Abs => x.abs(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(EvalError::SqrtDomain(self.to_string()));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite(self.to_string()))
        }
    }

    /// Binding strength used by the renderer; higher binds tighter.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(Var::U) => write!(f, "u"),
            Expr::Var(Var::Lambda) => write!(f, "lambda"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_at(f, 3)
            }
            Expr::Bin(op, a, b) => {
                let (p, sym) = match op {
                    BinOp::Add => (1, " + "),
                    BinOp::Sub => (1, " - "),
                    BinOp::Mul => (2, "*"),
                    BinOp::Div => (2, "/"),
                };
                a.fmt_at(f, p)?;
                write!(f, "{sym}")?;
                b.fmt_at(f, p + 1)
            }
            Expr::Pow(a, n) => {
                a.fmt_at(f, 5)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_at(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p("u").eval(2.0, 0.0).unwrap(), 2.0);
        assert_eq!(p("tanh(u)").eval(0.0, 0.0).unwrap(), 0.0);
        let v = p("21*tanh(u)-u").eval(3.0, 0.0).unwrap();
        assert!((v - (21.0 * 3f64.tanh() - 3.0)).abs() < 1e-12);
        assert_eq!(p("lambda*u").eval(2.0, 3.0).unwrap(), 6.0);
    }

    #[test]
    fn eval_errors_name_the_subexpression() {
        let err = p("1 + 1/(u - 2)").eval(2.0, 0.0).unwrap_err();
        assert_eq!(err, EvalError::DivisionByZero("1/(u - 2)".into()));
        assert!(matches!(p("log(u)").eval(0.0, 0.0), Err(EvalError::LogDomain(_))));
        assert!(matches!(p("sqrt(u)").eval(-1.0, 0.0), Err(EvalError::SqrtDomain(_))));
        assert!(matches!(p("exp(u)").eval(1e3, 0.0), Err(EvalError::NonFinite(_))));
        assert!(matches!(p("u^-1").eval(0.0, 0.0), Err(EvalError::DivisionByZero(_))));
    }

    #[test]
    fn render_is_minimal() {
        assert_eq!(p("21*tanh(u) - u").to_string(), "21*tanh(u) - u");
        assert_eq!(p("((u))").to_string(), "u");
        assert_eq!(p("(u - 1)*(lambda + 2)^2").to_string(), "(u - 1)*(lambda + 2)^2");
    }
}
