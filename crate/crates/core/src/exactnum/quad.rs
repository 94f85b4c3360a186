//! Elements `r + s*sqrt(d)` of a real quadratic field, with exact ordering.
//!
//! Arithmetic between two values is defined when their radicands agree or when
//! either value has a zero radical part. Comparison is defined across
//! radicands: [`quad_compare`] resolves the sign of `r + s1*sqrt(d1) - s2*sqrt(d2)`
//! by isolating one radical and squaring, so no floating point is involved.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::Rational;
use crate::error::{Error, Result};

/// Radicand used when a purely rational value is parsed or lifted without context.
pub const DEFAULT_RADICAND: u64 = 3;

#[derive(Clone)]
pub struct QuadExt {
    rational: Rational,
    radical: Rational,
    radicand: u64,
}

/// Returns `(k, m)` with `n = k^2 * m` and `m` squarefree.
pub fn squarefree_split(n: u64) -> (u64, u64) {
    let mut k = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        while m.is_multiple_of(p * p) {
            m /= p * p;
            k *= p;
        }
        p += 1;
    }
    (k, m)
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && squarefree_split(n).0 == 1
}

/// Exact square root of a non-negative rational, as `coeff * sqrt(m)` with `m`
/// squarefree. `m == 1` means the root is rational.
pub fn sqrt_rational(x: &Rational) -> Result<(Rational, u64)> {
    if x.is_negative() {
        return Err(Error::Domain(format!("square root of negative value {x}")));
    }
    if x.is_zero() {
        return Ok((Rational::zero(), 1));
    }
    // sqrt(p/q) = sqrt(p*q)/q
    let pq: BigInt = x.numer() * x.denom();
    let pq = pq.to_u64().ok_or_else(|| {
        Error::Domain(format!("radicand of sqrt({x}) exceeds the supported range"))
    })?;
    let (k, m) = squarefree_split(pq);
    let coeff = Rational::from(k) / Rational::from(x.denom().clone());
    Ok((coeff, m))
}

fn sign_same_field(r: &Rational, s: &Rational, d: u64) -> i32 {
    let sr = r.signum();
    let ss = s.signum();
    if ss == 0 {
        return sr;
    }
    if sr == 0 || sr == ss {
        return ss;
    }
    let lhs = r.square();
    let rhs = s.square() * Rational::from(d);
    match lhs.cmp(&rhs) {
        Ordering::Greater => sr,
        Ordering::Less => ss,
        Ordering::Equal => 0,
    }
}

/// Sign of `a + b*sqrt(e)` where `a` lives in another quadratic field.
fn sign_mixed(a: &QuadExt, b: &Rational, e: u64) -> i32 {
    let sa = a.signum();
    let sb = b.signum();
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    let a2 = a * a;
    let diff = QuadExt {
        rational: &a2.rational - b.square() * Rational::from(e),
        radical: a2.radical,
        radicand: a2.radicand,
    };
    match diff.signum() {
        1 => sa,
        -1 => sb,
        _ => 0,
    }
}

/// Exact ordering of the real values of `x` and `y`, for any radicands.
pub fn quad_compare(x: &QuadExt, y: &QuadExt) -> Ordering {
    let s = if x.radicand == y.radicand || x.radical.is_zero() || y.radical.is_zero() {
        let diff = x - y;
        diff.signum()
    } else {
        let a = QuadExt {
            rational: &x.rational - &y.rational,
            radical: x.radical.clone(),
            radicand: x.radicand,
        };
        sign_mixed(&a, &-&y.radical, y.radicand)
    };
    s.cmp(&0)
}

impl QuadExt {
    pub fn new(rational: Rational, radical: Rational, radicand: u64) -> Result<Self> {
        if radicand < 2 || !is_squarefree(radicand) {
            return Err(Error::BadRadicand(radicand));
        }
        Ok(QuadExt {
            rational,
            radical,
            radicand,
        })
    }

    pub fn from_rational(r: Rational, radicand: u64) -> Result<Self> {
        Self::new(r, Rational::zero(), radicand)
    }

    /// `sqrt(d)` for squarefree `d >= 2`.
    pub fn sqrt(d: u64) -> Result<Self> {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    /// `r + s*sqrt(3)`.
    pub fn sqrt3(r: Rational, s: Rational) -> Self {
        QuadExt {
            rational: r,
            radical: s,
            radicand: 3,
        }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn radical_part(&self) -> &Rational {
        &self.radical
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.radical.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.radical.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.rational)
    }

    pub fn signum(&self) -> i32 {
        sign_same_field(&self.rational, &self.radical, self.radicand)
    }

    pub fn conj(&self) -> Self {
        QuadExt {
            rational: self.rational.clone(),
            radical: -&self.radical,
            radicand: self.radicand,
        }
    }

    /// `r^2 - d*s^2`.
    pub fn norm(&self) -> Rational {
        self.rational.square() - self.radical.square() * Rational::from(self.radicand)
    }

    /// A rational constant in the same field as `self`.
    pub fn lift(&self, r: &Rational) -> Self {
        QuadExt {
            rational: r.clone(),
            radical: Rational::zero(),
            radicand: self.radicand,
        }
    }

    fn field_with(&self, other: &QuadExt) -> Result<u64> {
        if self.radicand == other.radicand || other.radical.is_zero() {
            Ok(self.radicand)
        } else if self.radical.is_zero() {
            Ok(other.radicand)
        } else {
            Err(Error::MixedRadicand {
                left: self.radicand,
                right: other.radicand,
            })
        }
    }

    pub fn checked_add(&self, other: &QuadExt) -> Result<Self> {
        let d = self.field_with(other)?;
        Ok(QuadExt {
            rational: &self.rational + &other.rational,
            radical: &self.radical + &other.radical,
            radicand: d,
        })
    }

    pub fn checked_sub(&self, other: &QuadExt) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &QuadExt) -> Result<Self> {
        let d = self.field_with(other)?;
        let dr = Rational::from(d);
        Ok(QuadExt {
            rational: &self.rational * &other.rational + &self.radical * &other.radical * dr,
            radical: &self.rational * &other.radical + &self.radical * &other.rational,
            radicand: d,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QuadExt {
            rational: &self.rational / &n,
            radical: -&self.radical / &n,
            radicand: self.radicand,
        })
    }

    pub fn checked_div(&self, other: &QuadExt) -> Result<Self> {
        self.field_with(other)?;
        self.checked_mul(&other.inverse()?)
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64() + self.radical.to_f64() * (self.radicand as f64).sqrt()
    }

    /// Common-denominator form, e.g. `(66+48*sqrt(3))/71`.
    pub fn pretty(&self) -> String {
        if self.radical.is_zero() {
            return if self.rational.is_integer() {
                self.rational.numer().to_string()
            } else {
                self.rational.to_string()
            };
        }
        let l = self.rational.denom().lcm(self.radical.denom());
        let big_l = Rational::from(l.clone());
        let a = (&self.rational * &big_l).numer().clone();
        let b = (&self.radical * &big_l).numer().clone();
        let radical_term = if b.abs().is_one() {
            format!("sqrt({})", self.radicand)
        } else {
            format!("{}*sqrt({})", b.abs(), self.radicand)
        };
        let body = if a.is_zero() {
            if b.is_negative() {
                format!("-{radical_term}")
            } else {
                radical_term
            }
        } else {
            let sign = if b.is_negative() { '-' } else { '+' };
            format!("{a}{sign}{radical_term}")
        };
        if l.is_one() {
            body
        } else {
            format!("({body})/{l}")
        }
    }
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.rational == other.rational
            && self.radical == other.radical
            && (self.radical.is_zero() || self.radicand == other.radicand)
    }
}

impl Eq for QuadExt {}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        quad_compare(self, other)
    }
}

impl From<Rational> for QuadExt {
    fn from(r: Rational) -> Self {
        QuadExt {
            rational: r,
            radical: Rational::zero(),
            radicand: DEFAULT_RADICAND,
        }
    }
}

impl fmt::Display for QuadExt {
    /// Canonical form `p/q+r/s*sqrt(d)` with an explicit sign on the radical term.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.radical.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{}{}{}*sqrt({})",
            self.rational,
            sign,
            self.radical.abs(),
            self.radicand
        )
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_err(input: &str, reason: &str) -> Error {
    Error::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    }
}

/// Splits `s` at top-level `+`/`-` signs, keeping each sign with its term.
fn split_terms(s: &str) -> Vec<&str> {
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = s.as_bytes();
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 && i > start && bytes[i - 1] != b'*' && bytes[i - 1] != b'/' => {
                terms.push(&s[start..i]);
                start = i;
            }
            _ => {}
        }
    }
    terms.push(&s[start..]);
    terms
}

fn parse_sum(input: &str, s: &str) -> Result<(Rational, Rational, Option<u64>)> {
    let mut rational = Rational::zero();
    let mut radical = Rational::zero();
    let mut radicand: Option<u64> = None;
    for term in split_terms(s) {
        let (neg, body) = match term.as_bytes().first() {
            Some(b'+') => (false, &term[1..]),
            Some(b'-') => (true, &term[1..]),
            _ => (false, term),
        };
        if body.is_empty() {
            return Err(parse_err(input, "empty term"));
        }
        let mut value_r = Rational::zero();
        let mut value_s = Rational::zero();
        if let Some(pos) = body.find("sqrt(") {
            let coeff_str = body[..pos].trim_end_matches('*');
            let coeff = if coeff_str.is_empty() {
                Rational::one()
            } else {
                coeff_str.parse::<Rational>()?
            };
            let rest = &body[pos + 5..];
            let close = rest
                .find(')')
                .ok_or_else(|| parse_err(input, "unclosed sqrt("))?;
            if close + 1 != rest.len() {
                return Err(parse_err(input, "trailing characters after sqrt(...)"));
            }
            let n: u64 = rest[..close]
                .parse()
                .map_err(|_| parse_err(input, "bad radicand"))?;
            let (k, m) = squarefree_split(n);
            let coeff = coeff * Rational::from(k);
            if m == 1 {
                value_r = coeff;
            } else {
                match radicand {
                    Some(d) if d != m => return Err(parse_err(input, "mixed radicands")),
                    _ => radicand = Some(m),
                }
                value_s = coeff;
            }
        } else {
            value_r = body.parse::<Rational>()?;
        }
        if neg {
            rational -= &value_r;
            radical -= &value_s;
        } else {
            rational += &value_r;
            radical += &value_s;
        }
    }
    Ok((rational, radical, radicand))
}

impl FromStr for QuadExt {
    type Err = Error;

    /// Accepts the canonical form, the common-denominator form produced by
    /// [`QuadExt::pretty`], and plain rationals (given radicand 3).
    fn from_str(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(parse_err(input, "empty string"));
        }
        let (inner, divisor) = if let Some(rest) = s.strip_prefix('(') {
            let close = rest
                .rfind(')')
                .ok_or_else(|| parse_err(input, "unbalanced parentheses"))?;
            let tail = &rest[close + 1..];
            let divisor = if tail.is_empty() {
                Rational::one()
            } else {
                let d = tail
                    .strip_prefix('/')
                    .ok_or_else(|| parse_err(input, "expected /denominator"))?;
                d.parse::<Rational>()?
            };
            (rest[..close].to_string(), divisor)
        } else {
            (s.clone(), Rational::one())
        };
        if divisor.is_zero() {
            return Err(parse_err(input, "zero denominator"));
        }
        let (r, sr, d) = parse_sum(input, &inner)?;
        Ok(QuadExt {
            rational: r / &divisor,
            radical: sr / &divisor,
            radicand: d.unwrap_or(DEFAULT_RADICAND),
        })
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// Operator forms panic on mixed radicands; the `checked_*` methods report them.
impl Add<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: &QuadExt) -> QuadExt {
        self.checked_add(rhs).expect("QuadExt addition")
    }
}

impl Sub<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn sub(self, rhs: &QuadExt) -> QuadExt {
        self.checked_sub(rhs).expect("QuadExt subtraction")
    }
}

impl Mul<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: &QuadExt) -> QuadExt {
        self.checked_mul(rhs).expect("QuadExt multiplication")
    }
}

impl Div<&QuadExt> for &QuadExt {
    type Output = QuadExt;
    fn div(self, rhs: &QuadExt) -> QuadExt {
        self.checked_div(rhs).expect("QuadExt division")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &QuadExt) -> QuadExt {
                (&self).$method(rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt {
            rational: -&self.rational,
            radical: -&self.radical,
            radicand: self.radicand,
        }
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::q;

    fn lambda() -> QuadExt {
        QuadExt::sqrt3(q(66, 71), q(48, 71))
    }

    #[test]
    fn two_over_root_three_exceeds_one() {
        let mu0 = QuadExt::sqrt3(q(0, 1), q(2, 3));
        assert_eq!(quad_compare(&mu0, &QuadExt::from(q(1, 1))), Ordering::Greater);
    }

    #[test]
    fn lambda_below_forty_nineteenths() {
        assert_eq!(quad_compare(&lambda(), &QuadExt::from(q(40, 19))), Ordering::Less);
        assert_eq!(quad_compare(&lambda(), &QuadExt::from(q(60, 31))), Ordering::Greater);
    }

    #[test]
    fn cross_radicand_root_right_of_mu0() {
        let root = QuadExt::new(q(2, 9), q(2, 9), 22).unwrap();
        let mu0 = QuadExt::sqrt3(q(0, 1), q(2, 3));
        assert_eq!(quad_compare(&root, &mu0), Ordering::Greater);
        assert_eq!(quad_compare(&mu0, &root), Ordering::Less);
    }

    #[test]
    fn mixed_radicand_arithmetic_is_rejected() {
        let x = QuadExt::sqrt(2).unwrap();
        let y = QuadExt::sqrt(3).unwrap();
        assert_eq!(
            x.checked_add(&y),
            Err(Error::MixedRadicand { left: 2, right: 3 })
        );
        // rational values adopt the other radicand
        let r = QuadExt::from_rational(q(1, 2), 2).unwrap();
        assert_eq!(r.checked_mul(&y).unwrap(), QuadExt::sqrt3(q(0, 1), q(1, 2)));
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(QuadExt::sqrt3(q(0, 1), q(0, 1)).inverse(), Err(Error::DivisionByZero));
    }

    #[test]
    fn canonical_and_pretty_forms() {
        let l = lambda();
        assert_eq!(l.to_string(), "66/71+48/71*sqrt(3)");
        assert_eq!(l.pretty(), "(66+48*sqrt(3))/71");
        assert_eq!(l.to_string().parse::<QuadExt>().unwrap(), l);
        assert_eq!(l.pretty().parse::<QuadExt>().unwrap(), l);
        let mu0 = QuadExt::sqrt3(q(0, 1), q(2, 3));
        assert_eq!(mu0.pretty(), "(2*sqrt(3))/3");
        assert_eq!(mu0.pretty().parse::<QuadExt>().unwrap(), mu0);
        let neg = QuadExt::sqrt3(q(8, 1), q(-8, 1));
        assert_eq!(neg.to_string(), "8/1-8/1*sqrt(3)");
        assert_eq!(neg.to_string().parse::<QuadExt>().unwrap(), neg);
        assert_eq!("sqrt(12)".parse::<QuadExt>().unwrap(), QuadExt::sqrt3(q(0, 1), q(2, 1)));
        assert!("1+sqrt(2)+sqrt(3)".parse::<QuadExt>().is_err());
    }

    #[test]
    fn zero_canonical_form() {
        let z = QuadExt::sqrt3(q(1, 2), q(1, 3)) - QuadExt::sqrt3(q(1, 2), q(1, 3));
        assert_eq!(z.to_string(), "0/1+0/1*sqrt(3)");
        assert!(z.is_zero());
    }

    #[test]
    fn sqrt_of_rationals() {
        assert_eq!(sqrt_rational(&q(3168, 1)).unwrap(), (q(12, 1), 22));
        assert_eq!(sqrt_rational(&q(4, 9)).unwrap(), (q(2, 3), 1));
        assert_eq!(sqrt_rational(&q(1, 3)).unwrap(), (q(1, 3), 3));
        assert!(sqrt_rational(&q(-1, 1)).is_err());
    }
}
