use thiserror::Error;

use super::{BinOp, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Int(i64),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Returns the next token and the byte offset where it starts.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == '.' {
            let bytes = rest.as_bytes();
            let mut i = 0;
            let mut integral = true;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                integral = false;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    integral = false;
                    i = j;
                }
            }
            let text = &rest[..i];
            self.pos += i;
            let bad = || ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            };
            let v: f64 = text.parse().map_err(|_| bad())?;
            if !v.is_finite() {
                return Err(bad());
            }
            if integral {
                if let Ok(n) = text.parse::<i64>() {
                    return Ok((Tok::Int(n), start));
                }
            }
            return Ok((Tok::Num(v), start));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            self.pos += len;
            return Ok((Tok::Ident(rest[..len].to_string()), start));
        }
        if "+-*/^()".contains(c) {
            self.pos += 1;
            return Ok((Tok::Op(c), start));
        }
        Err(ParseError::Syntax {
            offset: start,
            message: format!("unexpected character `{c}`"),
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (t, at) = self.lexer.next()?;
        self.tok = t;
        self.at = at;
        Ok(())
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.at,
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.tok == Tok::Op(c) {
            self.bump()
        } else {
            self.fail(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.tok != Tok::Op('^') {
            return Ok(base);
        }
        self.bump()?;
        let negative = match self.tok {
            Tok::Op('-') => {
                self.bump()?;
                true
            }
            Tok::Op('+') => {
                self.bump()?;
                false
            }
            _ => false,
        };
        let Tok::Int(n) = self.tok else {
            return self.fail("exponent must be an integer literal");
        };
        let n = if negative { -n } else { n };
        let Ok(n) = i32::try_from(n) else {
            return self.fail("exponent out of range");
        };
        self.bump()?;
        if self.tok == Tok::Op('^') {
            return self.fail("chained exponents are ambiguous; add parentheses");
        }
        Ok(Expr::Pow(Box::new(base), n))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Num(v))
            }
            Tok::Int(n) => {
                self.bump()?;
                Ok(Expr::Num(n as f64))
            }
            Tok::Op('(') => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                match name.as_str() {
                    "u" => Ok(Expr::Var(Var::U)),
                    "lambda" => Ok(Expr::Var(Var::Lambda)),
                    _ => match Func::from_name(&name) {
                        Some(f) => {
                            self.expect('(')?;
                            let arg = self.expr()?;
                            self.expect(')')?;
                            Ok(Expr::Call(f, Box::new(arg)))
                        }
                        None => Err(ParseError::UnknownIdentifier { name, offset: at }),
                    },
                }
            }
            Tok::End => self.fail("unexpected end of input"),
            Tok::Op(c) => self.fail(format!("unexpected `{c}`")),
        }
    }
}

/// Parses an expression in `u` and `lambda`.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        lexer: Lexer { src, pos: 0 },
        tok: Tok::End,
        at: 0,
    };
    p.bump()?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return p.fail("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn tree_shapes() {
        let want = Expr::Bin(
            BinOp::Sub,
            b(Expr::Bin(BinOp::Mul, b(Expr::Num(21.0)), b(Expr::Call(Func::Tanh, b(Expr::u()))))),
            b(Expr::u()),
        );
        assert_eq!(parse("21*tanh(u) - u").unwrap(), want);

        let e = parse("lambda*u/(1+u^2)").unwrap();
        let Expr::Bin(BinOp::Div, num, den) = e else { panic!("{e:?}") };
        assert_eq!(*num, Expr::Bin(BinOp::Mul, b(Expr::lambda()), b(Expr::u())));
        assert_eq!(*den, Expr::Bin(BinOp::Add, b(Expr::Num(1.0)), b(Expr::Pow(b(Expr::u()), 2))));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("-u^2").unwrap(), Expr::Neg(b(Expr::Pow(b(Expr::u()), 2))));
        assert_eq!(parse("1-2-3").unwrap().eval(0.0, 0.0).unwrap(), -4.0);
        assert_eq!(parse("8/4/2").unwrap().eval(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(parse("2*-u").unwrap().eval(3.0, 0.0).unwrap(), -6.0);
        assert_eq!(parse("u^-2").unwrap(), Expr::Pow(b(Expr::u()), -2));
        assert_eq!(parse("1.5e2 + .5").unwrap().eval(0.0, 0.0).unwrap(), 150.5);
    }

    #[test]
    fn errors() {
        assert_eq!(
            parse("u +"),
            Err(ParseError::Syntax {
                offset: 3,
                message: "unexpected end of input".into()
            })
        );
        assert_eq!(
            parse("2*foo(u)"),
            Err(ParseError::UnknownIdentifier {
                name: "foo".into(),
                offset: 2
            })
        );
        assert!(matches!(parse("u^2^3"), Err(ParseError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("u^1.5"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("(u"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("u $"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("sin u"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse(""), Err(ParseError::Syntax { offset: 0, .. })));
    }

    #[test]
    fn round_trip_corpus() {
        let corpus = [
            "21*tanh(u) - u",
            "lambda*u/(1 + u^2)",
            "6*atan(u) - u",
            "lambda*u - atan(u)",
            "-(u - 1)^3",
            "--u",
            "u - -u",
            "(-u)^2",
            "(u^2)^3",
            "u/(u*u)",
            "u - (u - u)",
            "u*(u/u)",
            "exp(-u^2)*sin(3*u) + log(1 + abs(u))",
            "sqrt(1 + u^2) - cos(lambda*u)^-2",
            "0.1*u + 1e-20 - 2.5e10*tan(u)",
        ];
        for src in corpus {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{src} -> {e}");
        }
    }
}
