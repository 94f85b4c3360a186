//! Bivariate polynomials in the weights `(a, b)` and ratios of them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use super::poly::Poly;
use super::rational::Rational;
use super::Scalar;
use crate::error::{Error, Result};

/// Sparse polynomial in two variables: `(i, j) -> coefficient of a^i b^j`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        BiPoly::monomial(c, 0, 0)
    }

    pub fn monomial(c: Rational, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BiPoly { terms }
    }

    pub fn a() -> Self {
        BiPoly::monomial(Rational::one(), 1, 0)
    }

    pub fn b() -> Self {
        BiPoly::monomial(Rational::one(), 0, 1)
    }

    /// `ca * a + cb * b`.
    pub fn linear(ca: i64, cb: i64) -> Self {
        &BiPoly::a().scale(&Rational::integer(ca)) + &BiPoly::b().scale(&Rational::integer(cb))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, v * c))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(BiPoly::constant(Rational::one()), |acc, _| &acc * self)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree if every term has the same total degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|(i, j)| i + j);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn eval(&self, a: &Rational, b: &Rational) -> Rational {
        self.terms
            .iter()
            .map(|((i, j), c)| c * a.pow(*i) * b.pow(*j))
            .sum()
    }

    /// Largest monomial `a^i b^j` dividing every term.
    pub fn monomial_content(&self) -> (u32, u32) {
        let i = self.terms.keys().map(|k| k.0).min().unwrap_or(0);
        let j = self.terms.keys().map(|k| k.1).min().unwrap_or(0);
        (i, j)
    }

    /// Divides by `a^i b^j`; every term must be divisible.
    pub fn div_monomial(&self, i: u32, j: u32) -> Self {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|((x, y), c)| ((x - i, y - j), c.clone()))
                .collect(),
        }
    }

    /// Sets `b = 1`, leaving a polynomial in `mu = a/b`.
    pub fn dehomogenize(&self) -> Poly {
        self.terms.iter().fold(Poly::zero(), |acc, ((i, _), c)| {
            let mut mono = vec![Rational::zero(); *i as usize + 1];
            mono[*i as usize] = c.clone();
            &acc + &Poly::new(mono)
        })
    }

    pub fn eval_in<S: Scalar>(&self, a: &S, b: &S) -> S {
        let zero = a.lift(&Rational::zero());
        self.terms.iter().fold(zero, |acc, ((i, j), c)| {
            let mut term = a.lift(c);
            for _ in 0..*i {
                term = term * a.clone();
            }
            for _ in 0..*j {
                term = term * b.clone();
            }
            acc + term
        })
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|((i, j), c)| {
                let mut s = if c.is_integer() {
                    c.numer().to_string()
                } else {
                    format!("({c})")
                };
                for (var, e) in [("a", *i), ("b", *j)] {
                    match e {
                        0 => {}
                        1 => s.push_str(&format!("*{var}")),
                        _ => s.push_str(&format!("*{var}^{e}")),
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut terms = self.terms.clone();
        for (k, v) in &rhs.terms {
            let e = terms.entry(*k).or_insert_with(Rational::zero);
            *e += v;
        }
        terms.retain(|_, v| !v.is_zero());
        BiPoly { terms }
    }
}

impl Sub<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self + &rhs.scale(&Rational::integer(-1))
    }
}

impl Mul<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &rhs.terms {
                out = &out + &BiPoly::monomial(c1 * c2, i1 + i2, j1 + j2);
            }
        }
        out
    }
}

/// A quotient of two bivariate polynomials, such as a ratio entry `A/S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormRatio {
    pub numerator: BiPoly,
    pub denominator: BiPoly,
}

impl FormRatio {
    pub fn new(numerator: BiPoly, denominator: BiPoly) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FormRatio {
            numerator,
            denominator,
        })
    }

    /// Degree of homogeneity, or `NotApplicable` when either side is not homogeneous.
    pub fn homogeneity(&self) -> Result<i64> {
        let n = self.numerator.homogeneous_degree();
        let d = self.denominator.homogeneous_degree();
        match (n, d) {
            (Some(n), Some(d)) => Ok(n as i64 - d as i64),
            (None, _) if self.numerator.is_zero() => Ok(0),
            _ => Err(Error::NotApplicable(format!(
                "({}) / ({}) is not a ratio of homogeneous forms",
                self.numerator, self.denominator
            ))),
        }
    }

    pub fn eval(&self, a: &Rational, b: &Rational) -> Result<Rational> {
        self.numerator.eval(a, b).checked_div(&self.denominator.eval(a, b))
    }

    pub fn eval_in<S: Scalar>(&self, a: &S, b: &S) -> Result<S> {
        let den = self.denominator.eval_in(a, b);
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.numerator.eval_in(a, b).checked_div(&den)
    }

    /// Cancels the common monomial factor of numerator and denominator.
    pub fn cancel_monomials(&self) -> Self {
        let (ni, nj) = self.numerator.monomial_content();
        let (di, dj) = self.denominator.monomial_content();
        let (i, j) = (ni.min(di), nj.min(dj));
        FormRatio {
            numerator: self.numerator.div_monomial(i, j),
            denominator: self.denominator.div_monomial(i, j),
        }
    }

    pub fn recip(&self) -> Result<Self> {
        FormRatio::new(self.denominator.clone(), self.numerator.clone())
    }
}

impl fmt::Display for FormRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.numerator, self.denominator)
    }
}
