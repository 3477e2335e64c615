//! Expression parser for chart functions.
//!
//! Grammar (integers are arbitrary precision; `i` is the imaginary unit):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := identifier | integer | 'i' | '(' expr ')'
//! ```
//!
//! Identifiers are the chart variables of the active mode: `z1..zn` and
//! `zb1..zbn` on Kähler charts, `x1..` on real charts, `u1..` on holomorphic
//! charts. Parsing, printing and re-parsing is idempotent.

use crate::gauss::Gauss;
use crate::ratfun::Rat;
use crate::VarSpec;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{ident}` at position {pos}")]
    UnknownIdent { pos: usize, ident: String },
    #[error("division by the zero function at position {pos}")]
    DivisionByZero { pos: usize },
}

/// Parse tree of a chart expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    I,
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    /// Parse `text` over the variables of `vars`.
    pub fn parse(text: &str, vars: &VarSpec) -> Result<Expr, ParseError> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
            vars: *vars,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(ParseError::Syntax {
                pos: p.pos,
                msg: "unexpected trailing input".into(),
            });
        }
        Ok(e)
    }

    /// Evaluate to a canonical rational function.
    pub fn eval(&self, vars: &VarSpec) -> Result<Rat, ParseError> {
        let nv = vars.nvars();
        Ok(match self {
            Expr::Int(n) => Rat::constant(
                nv,
                Gauss::new(BigRational::from_integer(n.clone()), BigRational::default()),
            ),
            Expr::I => Rat::constant(nv, Gauss::i()),
            Expr::Var(idx) => Rat::var(nv, *idx),
            Expr::Neg(a) => -&a.eval(vars)?,
            Expr::Add(a, b) => &a.eval(vars)? + &b.eval(vars)?,
            Expr::Sub(a, b) => &a.eval(vars)? - &b.eval(vars)?,
            Expr::Mul(a, b) => &a.eval(vars)? * &b.eval(vars)?,
            Expr::Div(a, b) => {
                let d = b.eval(vars)?;
                if d.is_zero() {
                    return Err(ParseError::DivisionByZero { pos: 0 });
                }
                &a.eval(vars)? / &d
            }
            Expr::Pow(a, e) => {
                let base = a.eval(vars)?;
                if *e < 0 && base.is_zero() {
                    return Err(ParseError::DivisionByZero { pos: 0 });
                }
                base.pow(*e)
            }
        })
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, vars: &VarSpec, min: u8) -> fmt::Result {
        let me = self.prec();
        if me < min {
            write!(f, "(")?;
        }
        match self {
            Expr::Int(n) => write!(f, "{}", n)?,
            Expr::I => write!(f, "i")?,
            Expr::Var(idx) => write!(f, "{}", vars.name(*idx))?,
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.fmt_prec(f, vars, 3)?;
            }
            Expr::Add(a, b) => {
                a.fmt_prec(f, vars, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, vars, 2)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, vars, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, vars, 2)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, vars, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, vars, 3)?;
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, vars, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, vars, 5)?;
            }
            Expr::Pow(a, e) => {
                a.fmt_prec(f, vars, 5)?;
                write!(f, "^{}", e)?;
            }
        }
        if me < min {
            write!(f, ")")?;
        }
        Ok(())
    }

    /// Render with the variable names of `vars`.
    pub fn render(&self, vars: &VarSpec) -> String {
        struct D<'a>(&'a Expr, &'a VarSpec);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_prec(f, self.1, 0)
            }
        }
        D(self, vars).to_string()
    }
}

/// Parse and evaluate in one step; the common entry point.
pub fn parse_expr(text: &str, vars: &VarSpec) -> Result<Rat, ParseError> {
    Expr::parse(text, vars)?.eval(vars)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: VarSpec,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let neg = if self.src.get(self.pos) == Some(&b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let start = self.pos;
            let n = self.integer()?;
            let e: i32 = n.to_string().parse().map_err(|_| ParseError::Syntax {
                pos: start,
                msg: "exponent out of range".into(),
            })?;
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(ParseError::Syntax {
                        pos: self.pos,
                        msg: "expected `)`".into(),
                    });
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Int(self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .map_or(false, |c| c.is_ascii_alphanumeric())
                {
                    self.pos += 1;
                }
                let ident = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if ident == "i" || ident == "I" {
                    return Ok(Expr::I);
                }
                match self.vars.lookup(ident) {
                    Some(idx) => Ok(Expr::Var(idx)),
                    None => Err(ParseError::UnknownIdent {
                        pos: start,
                        ident: ident.to_string(),
                    }),
                }
            }
            _ => Err(ParseError::Syntax {
                pos: self.pos,
                msg: "expected expression".into(),
            }),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .map_or(false, |c| c.is_ascii_digit())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ParseError::Syntax {
                pos: start,
                msg: "expected integer".into(),
            });
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_readback() {
        let vars = VarSpec::kahler(1);
        let f = parse_expr("z1*zb1 + 1", &vars).unwrap();
        let g = &(&Rat::var(2, 0) * &Rat::var(2, 1)) + &Rat::one(2);
        assert_eq!(f, g);
    }

    #[test]
    fn canonical_ratio() {
        let vars = VarSpec::kahler(1);
        let f = parse_expr("1/(1+z1*zb1)^2", &vars).unwrap();
        let d = &(&Rat::var(2, 0) * &Rat::var(2, 1)) + &Rat::one(2);
        assert_eq!(f, d.pow(-2));
    }

    #[test]
    fn zero_denominator_rejected() {
        let vars = VarSpec::kahler(1);
        assert!(matches!(
            parse_expr("z1/(z1 - z1)", &vars),
            Err(ParseError::DivisionByZero { .. })
        ));
    }

    #[test]
    fn unknown_identifier() {
        let vars = VarSpec::kahler(1);
        assert!(matches!(
            parse_expr("z2 + 1", &vars),
            Err(ParseError::UnknownIdent { .. })
        ));
        assert!(matches!(
            parse_expr("y1", &VarSpec::real(2)),
            Err(ParseError::UnknownIdent { .. })
        ));
    }

    #[test]
    fn syntax_error_position() {
        let vars = VarSpec::kahler(1);
        match parse_expr("z1 + ", &vars) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn print_parse_roundtrip() {
        let vars = VarSpec::kahler(2);
        for src in [
            "z1*zb1 + 1",
            "1/(1+z1*zb1)^2",
            "-(z1 - zb2)^3/(2*z2)",
            "i*z1^2 - 3/4",
        ] {
            let e = Expr::parse(src, &vars).unwrap();
            let printed = e.render(&vars);
            let e2 = Expr::parse(&printed, &vars).unwrap();
            assert_eq!(e2.render(&vars), printed, "roundtrip failed for {}", src);
            assert_eq!(e.eval(&vars).unwrap(), e2.eval(&vars).unwrap());
        }
    }
}
