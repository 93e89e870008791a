//! Parser for the small expression language used in configs and on the
//! command line.
//!
//! Grammar: integers, the parameter (`lambda`, `λ` or `t`), roots of unity
//! `zN` / `zetaN` (and `i` for `z4`), `+ - * / ^`, parentheses, and implicit
//! multiplication by juxtaposition (`4z8`). Exponents are integer literals,
//! optionally negative.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use super::ring::{InvError, Ring};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not allowed here")]
    Disallowed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Param,
    Zeta(u64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let mut out = Vec::new();
    let cs: Vec<(usize, char)> = s.char_indices().collect();
    let mut i = 0;
    while i < cs.len() {
        let (pos, c) = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < cs.len() && cs[j].1.is_ascii_digit() {
                j += 1;
            }
            let end = cs.get(j).map_or(s.len(), |x| x.0);
            out.push((pos, Tok::Int(s[pos..end].parse().unwrap())));
            i = j;
        } else if c.is_alphabetic() {
            let mut j = i;
            // identifiers: letters, then optional digits (z8, zeta12)
            while j < cs.len() && cs[j].1.is_alphabetic() {
                j += 1;
            }
            while j < cs.len() && cs[j].1.is_ascii_digit() {
                j += 1;
            }
            let end = cs.get(j).map_or(s.len(), |x| x.0);
            out.push((pos, Tok::Ident(s[pos..end].to_string())));
            i = j;
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ExprError::Parse { pos, msg: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }
    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.len, |t| t.0)
    }
    fn err<T>(&self, msg: &str) -> Result<T, ExprError> {
        Err(ExprError::Parse { pos: self.pos(), msg: msg.to_string() })
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.term()?;
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut e = self.unary()?;
        loop {
            if self.eat('*') {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat('/') {
                e = Expr::Div(Box::new(e), Box::new(self.unary()?));
            } else if matches!(self.peek(), Some(Tok::Int(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('('))) {
                e = Expr::Mul(Box::new(e), Box::new(self.power()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let paren = !neg && self.eat('(');
        let neg = neg || (paren && self.eat('-'));
        let e = match self.peek() {
            Some(Tok::Int(n)) => n.to_i64().filter(|v| *v <= 1 << 20),
            _ => return self.err("expected integer exponent"),
        };
        let Some(e) = e else { return self.err("exponent too large") };
        self.i += 1;
        if paren && !self.eat(')') {
            return self.err("expected ')'");
        }
        Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Int(n)) => {
                self.i += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Op('(')) => {
                self.i += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(Tok::Ident(id)) => {
                let e = match id.as_str() {
                    "lambda" | "λ" | "t" => Expr::Param,
                    "i" => Expr::Zeta(4),
                    _ => {
                        let digits = id.trim_start_matches(|c: char| c.is_alphabetic());
                        let head = &id[..id.len() - digits.len()];
                        match (head, digits.parse::<u64>()) {
                            ("z" | "zeta", Ok(n)) if n >= 1 => Expr::Zeta(n),
                            _ => return self.err(&format!("unknown identifier {id:?}")),
                        }
                    }
                };
                self.i += 1;
                Ok(e)
            }
            _ => self.err("expected a number, identifier or '('"),
        }
    }
}

pub fn parse(s: &str) -> Result<Expr, ExprError> {
    let toks = tokenize(s)?;
    let mut p = Parser { toks, i: 0, len: s.len() };
    let e = p.expr()?;
    if p.i != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

impl Expr {
    /// Least common multiple of all root-of-unity orders appearing.
    pub fn conductor(&self) -> u64 {
        match self {
            Expr::Int(_) | Expr::Param => 1,
            Expr::Zeta(n) => *n,
            Expr::Neg(a) | Expr::Pow(a, _) => a.conductor(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.conductor().lcm(&b.conductor()),
        }
    }

    pub fn uses_param(&self) -> bool {
        match self {
            Expr::Param => true,
            Expr::Int(_) | Expr::Zeta(_) => false,
            Expr::Neg(a) | Expr::Pow(a, _) => a.uses_param(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.uses_param() || b.uses_param(),
        }
    }

    /// Evaluates in a ring; `leaf` supplies the parameter and roots of unity.
    pub fn eval<T: Ring>(&self, template: &T, leaf: &dyn Fn(&Expr) -> Result<T, ExprError>) -> Result<T, ExprError> {
        let div = |a: T, b: T| {
            a.try_div(&b).map_err(|e| match e {
                InvError::Zero => ExprError::DivisionByZero,
                InvError::ZeroDivisor(_) => ExprError::Disallowed("division by a zero divisor".into()),
            })
        };
        Ok(match self {
            Expr::Int(n) => template.from_bigint_like(n),
            Expr::Param | Expr::Zeta(_) => leaf(self)?,
            Expr::Neg(a) => a.eval(template, leaf)?.neg_ref(),
            Expr::Add(a, b) => a.eval(template, leaf)?.add_ref(&b.eval(template, leaf)?),
            Expr::Sub(a, b) => a.eval(template, leaf)?.sub_ref(&b.eval(template, leaf)?),
            Expr::Mul(a, b) => a.eval(template, leaf)?.mul_ref(&b.eval(template, leaf)?),
            Expr::Div(a, b) => div(a.eval(template, leaf)?, b.eval(template, leaf)?)?,
            Expr::Pow(a, e) => {
                let v = a.eval(template, leaf)?.pow_u64(e.unsigned_abs());
                if e.is_negative() {
                    div(template.one_like(), v)?
                } else {
                    v
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring::{rat, ratio};
    use num_rational::BigRational;

    fn ev(s: &str) -> BigRational {
        parse(s).unwrap().eval(&rat(0), &|_| Err(ExprError::Disallowed("atom".into()))).unwrap()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(ev("1 + 2*3"), rat(7));
        assert_eq!(ev("-(4 - 6)^3 / 4"), rat(2));
        assert_eq!(ev("2^-2"), ratio(1, 4));
        assert_eq!(ev("3(1+1)"), rat(6));
        assert_eq!(ev("2^(-1) + 1/2"), rat(1));
    }

    #[test]
    fn atoms_and_errors() {
        let e = parse("-4 + 4*(z8 + z8^-1)").unwrap();
        assert_eq!(e.conductor(), 8);
        assert!(!e.uses_param());
        assert!(parse("lambda^2 - 2").unwrap().uses_param());
        assert_eq!(parse("i").unwrap(), Expr::Zeta(4));
        assert!(parse("1 +").is_err());
        assert!(parse("foo").is_err());
        assert!(matches!(parse("1/0").unwrap().eval(&rat(0), &|_| unreachable!()), Err(ExprError::DivisionByZero)));
    }
}
