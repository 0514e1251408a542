//! Config-file representation of polynomials.
//!
//! A polynomial is either a single expression string (see [`super::parse_expr`])
//! or a list of summands, each an explicit term
//! `{"coeff_re": .., "coeff_im": .., "a": [..], "b": [..]}` or an expression
//! string such as `"abs2m(1, 2)"` or `"re(2)"`.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{parse::parse_decimal, parse_expr, Monomial, Rational, WirtingerPoly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalLiteral {
    Int(i64),
    Float(f64),
    /// `"p/q"` or a decimal such as `"0.1"`; exact.
    Text(String),
}

impl Default for RationalLiteral {
    fn default() -> Self {
        RationalLiteral::Int(0)
    }
}

impl RationalLiteral {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            RationalLiteral::Int(v) => Ok(Rational::from_integer((*v).into())),
            RationalLiteral::Float(v) => BigRational::from_float(*v).ok_or(Error::Parse {
                pos: 0,
                msg: format!("non-finite coefficient {v}"),
            }),
            RationalLiteral::Text(s) => {
                let s = s.trim();
                let (neg, body) = match s.strip_prefix('-') {
                    Some(rest) => (true, rest.trim()),
                    None => (false, s),
                };
                let value = match body.split_once('/') {
                    Some((p, q)) => {
                        let p = parse_decimal(p.trim(), 0)?;
                        let q = parse_decimal(q.trim(), 0)?;
                        if q.is_zero() {
                            return Err(Error::Parse {
                                pos: 0,
                                msg: format!("zero denominator in {s:?}"),
                            });
                        }
                        p / q
                    }
                    None => parse_decimal(body, 0)?,
                };
                Ok(if neg { -value } else { value })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermLiteral {
    pub coeff_re: RationalLiteral,
    #[serde(default)]
    pub coeff_im: RationalLiteral,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Summand {
    Term(TermLiteral),
    Expr(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyLiteral {
    Expr(String),
    Sum(Vec<Summand>),
}

impl PolyLiteral {
    pub fn build(&self, n: usize) -> Result<WirtingerPoly> {
        match self {
            PolyLiteral::Expr(s) => parse_expr(n, s),
            PolyLiteral::Sum(parts) => {
                let mut acc = WirtingerPoly::zero(n);
                for part in parts {
                    let p = match part {
                        Summand::Expr(s) => parse_expr(n, s)?,
                        Summand::Term(t) => {
                            let c = Complex::new(t.coeff_re.to_rational()?, t.coeff_im.to_rational()?);
                            let m = Monomial {
                                z: t.a.clone(),
                                zbar: t.b.clone(),
                            };
                            WirtingerPoly::from_terms(n, [(m, c)])?
                        }
                    };
                    acc = &acc + &p;
                }
                Ok(acc)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational;

    #[test]
    fn rational_literals() {
        assert_eq!(RationalLiteral::Text("3/2".into()).to_rational().unwrap(), rational(3, 2));
        assert_eq!(RationalLiteral::Text("-0.25".into()).to_rational().unwrap(), rational(-1, 4));
        assert_eq!(RationalLiteral::Float(0.5).to_rational().unwrap(), rational(1, 2));
        assert_eq!(RationalLiteral::Int(-3).to_rational().unwrap(), rational(-3, 1));
        assert!(RationalLiteral::Text("1/0".into()).to_rational().is_err());
    }

    #[test]
    fn mixed_summands_match_expression() {
        let lit = PolyLiteral::Sum(vec![
            Summand::Expr("re(2)".into()),
            Summand::Term(TermLiteral {
                coeff_re: RationalLiteral::Int(1),
                coeff_im: RationalLiteral::Int(0),
                a: vec![2, 0],
                b: vec![2, 0],
            }),
        ]);
        let p = lit.build(2).unwrap();
        assert_eq!(p, parse_expr(2, "re(2) + abs2m(1,2)").unwrap());
    }

    #[test]
    fn term_dimension_is_checked() {
        let lit = PolyLiteral::Sum(vec![Summand::Term(TermLiteral {
            coeff_re: RationalLiteral::Int(1),
            coeff_im: RationalLiteral::Int(0),
            a: vec![1],
            b: vec![0],
        })]);
        assert!(lit.build(2).is_err());
    }
}
