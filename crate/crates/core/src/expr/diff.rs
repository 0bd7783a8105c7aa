//! Symbolic differentiation with light algebraic simplification.
//!
//! The derivative of `abs(a)` is written `a/abs(a)·a'`; it is undefined where
//! `a = 0` and evaluation there reports a division by zero.

use super::{BinOp, Expr, Func, Var};

fn is_const(e: &Expr, c: f64) -> bool {
    e.as_const() == Some(c)
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Neg(inner) => *inner,
        Expr::Num(v) if v == 0.0 => Expr::Num(0.0),
        other => Expr::Neg(Box::new(other)),
    }
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        return Expr::num(x + y);
    }
    if is_const(&a, 0.0) {
        return b;
    }
    if is_const(&b, 0.0) {
        return a;
    }
    if let Expr::Neg(nb) = b {
        return sub(a, *nb);
    }
    Expr::Bin(BinOp::Add, Box::new(a), Box::new(b))
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        return Expr::num(x - y);
    }
    if is_const(&b, 0.0) {
        return a;
    }
    if is_const(&a, 0.0) {
        return neg(b);
    }
    if let Expr::Neg(nb) = b {
        return add(a, *nb);
    }
    Expr::Bin(BinOp::Sub, Box::new(a), Box::new(b))
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        return Expr::num(x * y);
    }
    if is_const(&a, 0.0) || is_const(&b, 0.0) {
        return Expr::Num(0.0);
    }
    if is_const(&a, 1.0) {
        return b;
    }
    if is_const(&b, 1.0) {
        return a;
    }
    if is_const(&a, -1.0) {
        return neg(b);
    }
    if is_const(&b, -1.0) {
        return neg(a);
    }
    match (a, b) {
        (Expr::Neg(x), Expr::Neg(y)) => mul(*x, *y),
        (Expr::Neg(x), y) => neg(mul(*x, y)),
        (x, Expr::Neg(y)) => neg(mul(x, *y)),
        // Keep constants in front: `a*2` becomes `2*a`.
        (x, y) if y.as_const().is_some() && x.as_const().is_none() => {
            Expr::Bin(BinOp::Mul, Box::new(y), Box::new(x))
        }
        (x, y) => Expr::Bin(BinOp::Mul, Box::new(x), Box::new(y)),
    }
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) && !is_const(&b, 0.0) {
        return Expr::Num(0.0);
    }
    if is_const(&b, 1.0) {
        return a;
    }
    match (a, b) {
        (Expr::Neg(x), y) => neg(div(*x, y)),
        (x, y) => Expr::Bin(BinOp::Div, Box::new(x), Box::new(y)),
    }
}

pub(crate) fn pow(a: Expr, n: i32) -> Expr {
    match n {
        0 => Expr::Num(1.0),
        1 => a,
        _ => Expr::Pow(Box::new(a), n),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

impl Expr {
    /// Derivative with respect to `var`.
    pub fn diff(&self, var: Var) -> Expr {
        match self {
            Expr::Num(_) => Expr::Num(0.0),
            Expr::Var(v) => Expr::Num(if *v == var { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.diff(var)),
            Expr::Bin(op, a, b) => {
                let (da, db) = (a.diff(var), b.diff(var));
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinOp::Add => add(da, db),
                    BinOp::Sub => sub(da, db),
                    BinOp::Mul => add(mul(da, b), mul(a, db)),
                    BinOp::Div => {
                        if !self.mentions_in_denominator(var) {
                            div(da, b)
                        } else {
                            div(sub(mul(da, b.clone()), mul(a, db)), pow(b, 2))
                        }
                    }
                }
            }
            Expr::Pow(a, n) => {
                let da = a.diff(var);
                mul(mul(Expr::num(f64::from(*n)), pow((**a).clone(), n - 1)), da)
            }
            Expr::Call(f, a) => {
                let da = a.diff(var);
                if is_const(&da, 0.0) {
                    return Expr::Num(0.0);
                }
                let a = (**a).clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, a),
                    Func::Cos => neg(call(Func::Sin, a)),
                    Func::Tan => add(Expr::Num(1.0), pow(call(Func::Tan, a), 2)),
                    Func::Atan => div(Expr::Num(1.0), add(Expr::Num(1.0), pow(a, 2))),
                    Func::Tanh => sub(Expr::Num(1.0), pow(call(Func::Tanh, a), 2)),
                    Func::Exp => call(Func::Exp, a),
                    Func::Log => div(Expr::Num(1.0), a),
                    Func::Abs => div(a.clone(), call(Func::Abs, a)),
                    Func::Sqrt => div(Expr::Num(1.0), mul(Expr::Num(2.0), call(Func::Sqrt, a))),
                };
                chain(outer, da)
            }
        }
    }

    fn mentions_in_denominator(&self, var: Var) -> bool {
        match self {
            Expr::Bin(BinOp::Div, _, b) => b.mentions(var),
            _ => false,
        }
    }

    /// `∂/∂u`.
    pub fn diff_u(&self) -> Expr {
        self.diff(Var::U)
    }

    /// `∂/∂λ`.
    pub fn diff_lambda(&self) -> Expr {
        self.diff(Var::Lambda)
    }
}

/// `outer · inner'`, folding `1/x · d` into `d/x`.
fn chain(outer: Expr, da: Expr) -> Expr {
    match outer {
        Expr::Bin(BinOp::Div, n, d) if is_const(&n, 1.0) => div(da, *d),
        other => mul(other, da),
    }
}
