//! Exact sparse polynomials in `z_1..z_n` and their conjugates.
//!
//! Coefficients are complex rationals, so differentiation, reality checks and
//! vanishing orders are decided symbolically. Only [`WirtingerPoly::evaluate`]
//! touches floating point.

mod literal;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use literal::{PolyLiteral, RationalLiteral, Summand, TermLiteral};
pub use parse::parse_expr;

pub type Rational = BigRational;
pub type Coeff = Complex<BigRational>;

/// Exponent pair `z^a zbar^b`. The derived ordering is lexicographic on `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
}

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial {
            z: vec![0; n],
            zbar: vec![0; n],
        }
    }

    pub fn degree(&self) -> u32 {
        self.z.iter().chain(self.zbar.iter()).sum()
    }

    pub fn conj(&self) -> Self {
        Monomial {
            z: self.zbar.clone(),
            zbar: self.z.clone(),
        }
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial {
            z: self.z.iter().zip(&other.z).map(|(a, b)| a + b).collect(),
            zbar: self.zbar.iter().zip(&other.zbar).map(|(a, b)| a + b).collect(),
        }
    }

    /// True when only variable `j` (or its conjugate) appears.
    fn only_in(&self, j: usize) -> bool {
        self.z
            .iter()
            .zip(&self.zbar)
            .enumerate()
            .all(|(i, (a, b))| i == j || (*a == 0 && *b == 0))
    }
}

#[derive(Clone, Debug)]
struct NumericTerm {
    z: Vec<u32>,
    zbar: Vec<u32>,
    coeff: Complex64,
}

/// Polynomial in `z` and `zbar` with exact complex-rational coefficients.
///
/// Variables are indexed from 0 in this API; the config syntax uses `z1..zn`.
#[derive(Clone)]
pub struct WirtingerPoly {
    n: usize,
    terms: BTreeMap<Monomial, Coeff>,
    real: bool,
    numeric: Vec<NumericTerm>,
}

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn real_coeff(r: Rational) -> Coeff {
    Complex::new(r, Rational::zero())
}

fn coeff_conj(c: &Coeff) -> Coeff {
    Complex::new(c.re.clone(), -c.im.clone())
}

fn coeff_to_f64(c: &Coeff) -> Complex64 {
    Complex64::new(
        c.re.to_f64().unwrap_or(f64::NAN),
        c.im.to_f64().unwrap_or(f64::NAN),
    )
}

impl WirtingerPoly {
    fn from_map(n: usize, mut terms: BTreeMap<Monomial, Coeff>) -> Self {
        terms.retain(|_, c| !c.is_zero());
        let real = terms.iter().all(|(m, c)| match terms.get(&m.conj()) {
            Some(other) => *c == coeff_conj(other),
            None => false,
        });
        let numeric = terms
            .iter()
            .map(|(m, c)| NumericTerm {
                z: m.z.clone(),
                zbar: m.zbar.clone(),
                coeff: coeff_to_f64(c),
            })
            .collect();
        WirtingerPoly {
            n,
            terms,
            real,
            numeric,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_map(n, BTreeMap::new())
    }

    pub fn constant(n: usize, c: Coeff) -> Self {
        let mut map = BTreeMap::new();
        map.insert(Monomial::one(n), c);
        Self::from_map(n, map)
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Coeff)>,
    {
        let mut map: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (m, c) in terms {
            for len in [m.z.len(), m.zbar.len()] {
                if len != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: len,
                    });
                }
            }
            let slot = map.entry(m).or_insert_with(Coeff::zero);
            *slot = &*slot + c;
        }
        Ok(Self::from_map(n, map))
    }

    /// `z_j`.
    pub fn var(n: usize, j: usize) -> Self {
        let mut m = Monomial::one(n);
        m.z[j] = 1;
        Self::from_map(n, BTreeMap::from([(m, Coeff::one())]))
    }

    /// `zbar_j`.
    pub fn conj_var(n: usize, j: usize) -> Self {
        let mut m = Monomial::one(n);
        m.zbar[j] = 1;
        Self::from_map(n, BTreeMap::from([(m, Coeff::one())]))
    }

    /// `|z_j|^{2m}`.
    pub fn abs2m(n: usize, j: usize, m: u32) -> Self {
        let mut mono = Monomial::one(n);
        mono.z[j] = m;
        mono.zbar[j] = m;
        Self::from_map(n, BTreeMap::from([(mono, Coeff::one())]))
    }

    /// `2 Re z_j = z_j + zbar_j`.
    pub fn two_re(n: usize, j: usize) -> Self {
        &Self::var(n, j) + &Self::conj_var(n, j)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether `coeff(a, b) = conj(coeff(b, a))` holds for every term.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let map = self
            .terms
            .iter()
            .map(|(m, v)| (m.clone(), v * c))
            .collect();
        Self::from_map(self.n, map)
    }

    /// Complex conjugate: swaps `z` and `zbar` exponents and conjugates coefficients.
    pub fn conj(&self) -> Self {
        let map = self
            .terms
            .iter()
            .map(|(m, c)| (m.conj(), coeff_conj(c)))
            .collect();
        Self::from_map(self.n, map)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.n, Coeff::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `dp/dz_j`, or `dp/dzbar_j` when `conjugated`.
    pub fn derive(&self, j: usize, conjugated: bool) -> Result<Self> {
        if j >= self.n {
            return Err(Error::VariableOutOfRange {
                index: j,
                n: self.n,
            });
        }
        let mut map = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = if conjugated { m.zbar[j] } else { m.z[j] };
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            if conjugated {
                dm.zbar[j] -= 1;
            } else {
                dm.z[j] -= 1;
            }
            let factor = real_coeff(Rational::from_integer(BigInt::from(e)));
            map.insert(dm, c * factor);
        }
        Ok(Self::from_map(self.n, map))
    }

    /// `d/dx_j = d/dz_j + d/dzbar_j`.
    pub fn derive_x(&self, j: usize) -> Result<Self> {
        Ok(&self.derive(j, false)? + &self.derive(j, true)?)
    }

    /// Lowest total degree among the terms (order of vanishing at the origin).
    pub fn vanishing_order(&self) -> Result<u32> {
        self.terms
            .keys()
            .map(Monomial::degree)
            .min()
            .ok_or(Error::ZeroPolynomial)
    }

    /// Terms involving only `z_j` and `zbar_j`: the restriction to the j-th coordinate axis.
    pub fn restrict_to_axis(&self, j: usize) -> Self {
        let map = self
            .terms
            .iter()
            .filter(|(m, _)| m.only_in(j) && m.degree() > 0)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Self::from_map(self.n, map)
    }

    /// Laplacian in the j-th complex variable, `4 d^2/dz_j dzbar_j`.
    pub fn laplacian(&self, j: usize) -> Result<Self> {
        let four = real_coeff(Rational::from_integer(BigInt::from(4)));
        Ok(self.derive(j, false)?.derive(j, true)?.scale(&four))
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: point.len(),
            });
        }
        Ok(self.eval_with_magnitude(point).0)
    }

    /// Value together with `sum |c| |monomial|`, the scale for rounding checks.
    fn eval_with_magnitude(&self, point: &[Complex64]) -> (Complex64, f64) {
        let conj: Vec<Complex64> = point.iter().map(|z| z.conj()).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for t in &self.numeric {
            let mut mono = t.coeff;
            for j in 0..self.n {
                if t.z[j] > 0 {
                    mono *= point[j].powu(t.z[j]);
                }
                if t.zbar[j] > 0 {
                    mono *= conj[j].powu(t.zbar[j]);
                }
            }
            mag += mono.norm();
            acc += mono;
        }
        (acc, mag)
    }

    /// Evaluates a real-valued polynomial, checking that the imaginary part is rounding noise.
    pub fn evaluate_real(&self, point: &[Complex64]) -> Result<f64> {
        if !self.real {
            return Err(Error::NotReal(format!("{self}")));
        }
        if point.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: point.len(),
            });
        }
        let (v, mag) = self.eval_with_magnitude(point);
        let tol = 1e-10 * mag + f64::MIN_POSITIVE;
        if v.im.abs() > tol {
            return Err(Error::RealityViolation { imag: v.im, tol });
        }
        Ok(v.re)
    }
}

impl PartialEq for WirtingerPoly {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.terms == other.terms
    }
}

impl fmt::Debug for WirtingerPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WirtingerPoly(n={}, {})", self.n, self)
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for WirtingerPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match (c.re.is_zero(), c.im.is_zero()) {
                (false, true) => write!(f, "{}", fmt_rational(&c.re))?,
                (true, false) => write!(f, "{}*i", fmt_rational(&c.im))?,
                _ => write!(f, "({} + {}*i)", fmt_rational(&c.re), fmt_rational(&c.im))?,
            }
            for (j, e) in m.z.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*z{}", j + 1)?,
                    _ => write!(f, "*z{}^{}", j + 1, e)?,
                }
            }
            for (j, e) in m.zbar.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*zb{}", j + 1)?,
                    _ => write!(f, "*zb{}^{}", j + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &WirtingerPoly {
    type Output = WirtingerPoly;

    fn add(self, rhs: &WirtingerPoly) -> WirtingerPoly {
        assert_eq!(self.n, rhs.n, "adding polynomials in different dimensions");
        let mut map = self.terms.clone();
        for (m, c) in &rhs.terms {
            let slot = map.entry(m.clone()).or_insert_with(Coeff::zero);
            *slot = &*slot + c;
        }
        WirtingerPoly::from_map(self.n, map)
    }
}

impl Sub for &WirtingerPoly {
    type Output = WirtingerPoly;

    fn sub(self, rhs: &WirtingerPoly) -> WirtingerPoly {
        self + &(-rhs)
    }
}

impl Neg for &WirtingerPoly {
    type Output = WirtingerPoly;

    fn neg(self) -> WirtingerPoly {
        let map = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        WirtingerPoly::from_map(self.n, map)
    }
}

impl Mul for &WirtingerPoly {
    type Output = WirtingerPoly;

    fn mul(self, rhs: &WirtingerPoly) -> WirtingerPoly {
        assert_eq!(self.n, rhs.n, "multiplying polynomials in different dimensions");
        let mut map: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let slot = map.entry(ma.times(mb)).or_insert_with(Coeff::zero);
                *slot = &*slot + ca * cb;
            }
        }
        WirtingerPoly::from_map(self.n, map)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for WirtingerPoly {
            type Output = WirtingerPoly;
            fn $method(self, rhs: WirtingerPoly) -> WirtingerPoly {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for WirtingerPoly {
    type Output = WirtingerPoly;
    fn neg(self) -> WirtingerPoly {
        -&self
    }
}

/// Outcome of [`check_subharmonic`].
#[derive(Clone, Debug, PartialEq)]
pub struct SubharmonicVerdict {
    pub subharmonic: bool,
    /// Smallest sampled value of `4 d^2p/dz_j dzbar_j`.
    pub worst_margin: f64,
    /// Laplacian vanishes identically (decided symbolically).
    pub harmonic: bool,
}

/// Samples the Laplacian of `p` in variable `j` and reports the smallest value.
pub fn check_subharmonic(
    p: &WirtingerPoly,
    j: usize,
    samples: &[Vec<Complex64>],
    tol: f64,
) -> Result<SubharmonicVerdict> {
    if !p.is_real() {
        return Err(Error::NotReal(format!("{p}")));
    }
    let lap = p.laplacian(j)?;
    let mut worst = f64::INFINITY;
    for z in samples {
        worst = worst.min(lap.evaluate_real(z)?);
    }
    Ok(SubharmonicVerdict {
        subharmonic: worst >= -tol,
        worst_margin: worst,
        harmonic: lap.is_zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn derivative_of_abs_squared() {
        let p = WirtingerPoly::abs2m(1, 0, 1);
        assert_eq!(p.derive(0, false).unwrap(), WirtingerPoly::conj_var(1, 0));
    }

    #[test]
    fn mixed_derivative_of_abs_power() {
        for m in 1..5u32 {
            let p = WirtingerPoly::abs2m(1, 0, m);
            let d = p.derive(0, false).unwrap().derive(0, true).unwrap();
            let expected = WirtingerPoly::abs2m(1, 0, m - 1)
                .scale(&real_coeff(rational((m * m) as i64, 1)));
            assert_eq!(d, expected);
        }
    }

    #[test]
    fn holomorphic_derivative() {
        let p = &WirtingerPoly::var(2, 0).pow(2) + &WirtingerPoly::var(2, 1).pow(3);
        let d = p.derive(0, false).unwrap();
        assert_eq!(d, WirtingerPoly::var(2, 0).scale(&real_coeff(rational(2, 1))));
    }

    #[test]
    fn derive_rejects_bad_index() {
        let p = WirtingerPoly::var(2, 0);
        assert!(matches!(
            p.derive(2, false),
            Err(Error::VariableOutOfRange { index: 2, n: 2 })
        ));
    }

    #[test]
    fn evaluation_examples() {
        let p = WirtingerPoly::abs2m(1, 0, 1);
        assert!((p.evaluate_real(&[c(1.0, 1.0)]).unwrap() - 2.0).abs() < 1e-15);

        let q = &WirtingerPoly::two_re(2, 1) + &WirtingerPoly::abs2m(2, 0, 2);
        assert!(q.evaluate_real(&[c(1.0, 0.0), c(-0.5, 0.0)]).unwrap().abs() < 1e-15);

        let f = &WirtingerPoly::var(2, 0).pow(2) + &WirtingerPoly::var(2, 1).pow(3);
        let g = &f * &f.conj();
        assert!(g.is_real());
        assert!((g.evaluate_real(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn evaluate_checks_dimension() {
        let p = WirtingerPoly::var(2, 0);
        assert!(p.evaluate(&[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn non_real_poly_is_refused_by_real_evaluation() {
        let p = WirtingerPoly::var(1, 0);
        assert!(!p.is_real());
        assert!(matches!(p.evaluate_real(&[c(1.0, 0.0)]), Err(Error::NotReal(_))));
    }

    #[test]
    fn vanishing_orders() {
        assert_eq!(WirtingerPoly::abs2m(2, 0, 2).vanishing_order().unwrap(), 4);
        let f = &WirtingerPoly::var(2, 0).pow(2) + &WirtingerPoly::var(2, 1).pow(3);
        assert_eq!((&f * &f.conj()).vanishing_order().unwrap(), 4);
        let p = &WirtingerPoly::two_re(2, 1) + &WirtingerPoly::abs2m(2, 0, 1);
        assert_eq!(p.vanishing_order().unwrap(), 1);
        assert_eq!(WirtingerPoly::zero(2).vanishing_order(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn expansion_of_abs_square_of_sum() {
        // |z1^2 + z2^3|^2 = |z1|^4 + z1^2 zb2^3 + zb1^2 z2^3 + |z2|^6
        let f = &WirtingerPoly::var(2, 0).pow(2) + &WirtingerPoly::var(2, 1).pow(3);
        let g = &f * &f.conj();
        assert_eq!(g.terms().count(), 4);
        let degrees: Vec<u32> = g.terms().map(|(m, _)| m.degree()).collect();
        assert_eq!(degrees.iter().min(), Some(&4));
        assert_eq!(g.total_degree(), 6);
    }

    #[test]
    fn subharmonic_examples() {
        let pts: Vec<Vec<Complex64>> = vec![vec![c(0.1, 0.2)], vec![c(-0.4, 0.0)], vec![c(0.0, 0.0)]];
        for m in 1..4 {
            let v = check_subharmonic(&WirtingerPoly::abs2m(1, 0, m), 0, &pts, 1e-12).unwrap();
            assert!(v.subharmonic && !v.harmonic);
        }
        let re_sq = &WirtingerPoly::var(1, 0).pow(2) + &WirtingerPoly::conj_var(1, 0).pow(2);
        let v = check_subharmonic(&re_sq, 0, &pts, 1e-12).unwrap();
        assert!(v.harmonic && v.subharmonic);
        let v = check_subharmonic(&-WirtingerPoly::abs2m(1, 0, 1), 0, &pts, 1e-12).unwrap();
        assert!(!v.subharmonic);
        assert!((v.worst_margin + 4.0).abs() < 1e-15);
    }

    #[test]
    fn axis_restriction() {
        let r = parse_expr(3, "2*re(3) - abs2(z1^2 + z2^3) + abs2m(1,3) + abs2m(2,2)").unwrap();
        assert_eq!(r.restrict_to_axis(0).vanishing_order().unwrap(), 4);
        assert_eq!(r.restrict_to_axis(1).vanishing_order().unwrap(), 4);
    }

    #[test]
    fn canonical_term_order() {
        let p = parse_expr(2, "zb2 + z1 + z2*zb1 + 3").unwrap();
        let keys: Vec<&Monomial> = p.terms().map(|(m, _)| m).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
