//! Text syntax for rational functions: integers, `i`, `z`, `+ - * / ^` and parentheses.
//!
//! Exponents are integer literals, optionally negative. Printing with `Display`
//! produces text that parses back to the identical reduced function.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::poly::Poly;
use super::rational::RationalFunction;
use super::scalar::GaussianRational;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    I,
    Z,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut k = 0;
    while k < bytes.len() {
        let c = bytes[k] as char;
        let start = k;
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                k += 1;
                continue;
            }
            '0'..='9' => {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                out.push((start, Tok::Int(src[start..k].parse().expect("digits"))));
                continue;
            }
            'i' => Tok::I,
            'z' => Tok::Z,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(Error::Parse {
                    pos: k,
                    msg: format!("unexpected character '{}'", c),
                })
            }
        };
        out.push((start, tok));
        k += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.0).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.to_string() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.1.clone());
        self.at += 1;
        t
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.unary()?)?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let pos = self.pos();
                    let d = self.unary()?;
                    acc = acc.div(&d).map_err(|e| match e {
                        Error::DivisionByZero => Error::Parse { pos, msg: "division by zero".into() },
                        other => other,
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let neg = if let Some(Tok::Minus) = self.peek() {
                self.bump();
                true
            } else {
                false
            };
            let pos = self.pos();
            let k = match self.bump() {
                Some(Tok::Int(n)) => i32::try_from(n).map_err(|_| Error::Parse {
                    pos,
                    msg: "exponent too large".into(),
                })?,
                _ => return Err(Error::Parse { pos, msg: "expected integer exponent".into() }),
            };
            let k = if neg { -k } else { k };
            if k < 0 && base.is_zero() {
                return Err(Error::Parse { pos, msg: "negative power of zero".into() });
            }
            return base.pow(k);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.bump() {
            Some(Tok::Int(n)) => Ok(RationalFunction::constant(GaussianRational::new(
                BigRational::from_integer(n),
                BigRational::zero(),
            ))),
            Some(Tok::I) => Ok(RationalFunction::constant(GaussianRational::i())),
            Some(Tok::Z) => Ok(RationalFunction::from_poly(Poly::z())?),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => {
                        self.at -= 1;
                        self.err("expected ')'")
                    }
                }
            }
            _ => {
                self.at = self.at.saturating_sub(1);
                self.err("expected a number, i, z or '('")
            }
        }
    }
}

/// Parse a rational function of z.
pub fn parse_rational(src: &str) -> Result<RationalFunction> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(Error::Parse { pos: 0, msg: "empty expression".into() });
    }
    let mut p = Parser { toks, at: 0, len: src.len() };
    let r = p.expr()?;
    if p.at < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(r)
}

/// Parse a constant, rejecting anything that depends on z.
pub fn parse_gaussian(src: &str) -> Result<GaussianRational> {
    let r = parse_rational(src)?;
    r.as_constant().ok_or(Error::Parse { pos: 0, msg: "expected a constant".into() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for s in ["z", "(z-1)/(z+1)", "z^2+i", "(1/2-3*i)*z^2-1", "1/(z^3-2*i*z)", "-z^-2", "(z-3)*z"] {
            let r = parse_rational(s).unwrap();
            let back = parse_rational(&r.to_string()).unwrap();
            assert_eq!(r, back, "{} -> {}", s, r);
        }
    }

    #[test]
    fn errors_have_positions() {
        assert!(matches!(parse_rational("z+"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_rational("z $"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_rational("(z"), Err(Error::Parse { .. })));
        assert!(matches!(parse_rational("1/0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_rational(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn constants() {
        assert_eq!(parse_gaussian("3/4-i").unwrap(), GaussianRational::from_parts((3, 4), (-1, 1)));
        assert!(parse_gaussian("z").is_err());
    }
}
