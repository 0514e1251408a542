//! Expression syntax for polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := number | 'i' | 'z'k | 'zb'k | '(' expr ')'
//!         | 're(' k ')'           2 Re z_k
//!         | 'abs2m(' k ',' m ')'  |z_k|^{2m}
//!         | 'abs2(' expr ')'      |expr|^2
//!         | 'conj(' expr ')'
//! ```
//!
//! Variable indices are 1-based. Division is only allowed by nonzero constants.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Zero};

use super::{real_coeff, Coeff, Monomial, Rational, WirtingerPoly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        let start = i;
        match ch {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            ',' => out.push((start, Tok::Comma)),
            c if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let text = &src[start..i];
                out.push((start, Tok::Num(parse_decimal(text, start)?)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            other => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Exact value of a decimal literal such as `12`, `0.25` or `3.`.
pub(crate) fn parse_decimal(text: &str, pos: usize) -> Result<Rational> {
    let bad = || Error::Parse {
        pos,
        msg: format!("malformed number {text:?}"),
    };
    let (int_part, frac_part) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if frac_part.contains('.') || (int_part.is_empty() && frac_part.is_empty()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    Ok(Rational::new(numer, denom))
}

struct Parser<'a> {
    n: usize,
    toks: &'a [(usize, Tok)],
    pos: usize,
    src_len: usize,
}

impl<'a> Parser<'a> {
    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.src_len)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.err(format!("expected {tok:?}"))
        }
    }

    fn integer(&mut self) -> Result<u32> {
        match self.peek().cloned() {
            Some(Tok::Num(r)) if r.is_integer() => {
                self.pos += 1;
                u32::try_from(r.to_integer()).or_else(|_| self.err("integer too large"))
            }
            _ => self.err("expected a non-negative integer"),
        }
    }

    fn index(&mut self) -> Result<usize> {
        let pos = self.here();
        let k = self.integer()? as usize;
        if k == 0 || k > self.n {
            return Err(Error::Parse {
                pos,
                msg: format!("variable index {k} outside 1..={}", self.n),
            });
        }
        Ok(k - 1)
    }

    fn expr(&mut self) -> Result<WirtingerPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = &acc + &self.term()?;
            } else if self.eat(&Tok::Minus) {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<WirtingerPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                acc = &acc * &self.unary()?;
            } else if self.eat(&Tok::Slash) {
                let pos = self.here();
                let d = self.unary()?;
                let c = constant_value(&d).filter(|c| !c.is_zero()).ok_or(Error::Parse {
                    pos,
                    msg: "division only by a nonzero constant".into(),
                })?;
                acc = acc.scale(&(Coeff::one() / c));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<WirtingerPoly> {
        if self.eat(&Tok::Minus) {
            Ok(-self.unary()?)
        } else if self.eat(&Tok::Plus) {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<WirtingerPoly> {
        let base = self.atom()?;
        if self.eat(&Tok::Caret) {
            let e = self.integer()?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<WirtingerPoly> {
        let n = self.n;
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(WirtingerPoly::constant(n, real_coeff(r)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.ident(&name)
            }
            _ => self.err("expected a number, variable, function or '('"),
        }
    }

    fn ident(&mut self, name: &str) -> Result<WirtingerPoly> {
        let n = self.n;
        let call = |p: &mut Self| p.expect(Tok::LParen);
        match name {
            "i" => Ok(WirtingerPoly::constant(
                n,
                Complex::new(Rational::zero(), Rational::one()),
            )),
            "re" => {
                call(self)?;
                let j = self.index()?;
                self.expect(Tok::RParen)?;
                Ok(WirtingerPoly::two_re(n, j))
            }
            "abs2m" => {
                call(self)?;
                let j = self.index()?;
                self.expect(Tok::Comma)?;
                let m = self.integer()?;
                self.expect(Tok::RParen)?;
                Ok(WirtingerPoly::abs2m(n, j, m))
            }
            "abs2" => {
                call(self)?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(&e * &e.conj())
            }
            "conj" => {
                call(self)?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e.conj())
            }
            _ => {
                let (conj, digits) = if let Some(d) = name.strip_prefix("zb") {
                    (true, d)
                } else if let Some(d) = name.strip_prefix('z') {
                    (false, d)
                } else {
                    return self.err(format!("unknown identifier {name:?}"));
                };
                let k: usize = match digits.parse() {
                    Ok(k) if k >= 1 && k <= n => k,
                    _ => return self.err(format!("bad variable {name:?} for n = {n}")),
                };
                Ok(if conj {
                    WirtingerPoly::conj_var(n, k - 1)
                } else {
                    WirtingerPoly::var(n, k - 1)
                })
            }
        }
    }
}

fn constant_value(p: &WirtingerPoly) -> Option<Coeff> {
    if p.is_zero() {
        return Some(Coeff::zero());
    }
    let one = Monomial::one(p.n());
    if p.terms().count() == 1 && p.terms().next()?.0 == &one {
        Some(p.coeff(&one))
    } else {
        None
    }
}

/// Parses a polynomial expression in `n` complex variables.
pub fn parse_expr(n: usize, src: &str) -> Result<WirtingerPoly> {
    let toks = lex(src)?;
    let mut p = Parser {
        n,
        toks: &toks,
        pos: 0,
        src_len: src.len(),
    };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational;

    #[test]
    fn parses_model_domains() {
        let r = parse_expr(2, "2*re(2) + abs2m(1, 2)").unwrap();
        let expected = &WirtingerPoly::two_re(2, 1).scale(&real_coeff(rational(2, 1)))
            + &WirtingerPoly::abs2m(2, 0, 2);
        assert_eq!(r, expected);
        assert!(r.is_real());
    }

    #[test]
    fn abs2_expands_products() {
        let a = parse_expr(2, "abs2(z1^2 + z2^3)").unwrap();
        let b = parse_expr(2, "z1^2*zb1^2 + z1^2*zb2^3 + z2^3*zb1^2 + z2^3*zb2^3").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn decimals_are_exact() {
        let p = parse_expr(1, "0.1*z1").unwrap();
        let q = parse_expr(1, "z1/10").unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn imaginary_unit_and_conj() {
        let p = parse_expr(1, "conj(i*z1)").unwrap();
        let q = parse_expr(1, "-i*zb1").unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn errors_carry_position() {
        assert!(matches!(parse_expr(2, "z3"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_expr(2, "z1 / z2"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr(2, "abs2m(1,2"), Err(Error::Parse { .. })));
        assert!(matches!(parse_expr(2, "z1 $"), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse_expr(2, "z1 z2"), Err(Error::Parse { .. })));
    }
}
