//! Exact scalars and exactly integrable piecewise polynomials.

pub mod biform;
pub mod linalg;
pub mod piecewise;
pub mod poly;
pub mod quad;
pub mod rational;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

pub use biform::{BiPoly, FormRatio};
pub use linalg::{determinant, is_negative_definite, solve};
pub use piecewise::{piecewise_integrate, ContinuityCheck, PiecewisePolynomial};
pub use poly::Poly;
pub use quad::{quad_compare, sqrt_rational, QuadExt};
pub use rational::{q, Rational};

use crate::error::Result;

/// Exact field elements that rational-coefficient formulas can be evaluated in.
pub trait Scalar:
    Clone + Debug + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// The rational constant `r`, living in the same field as `self`.
    fn lift(&self, r: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn checked_div(&self, rhs: &Self) -> Result<Self>;
    fn to_f64(&self) -> f64;
}

impl Scalar for Rational {
    fn lift(&self, r: &Rational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Rational::checked_div(self, rhs)
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
}

impl Scalar for QuadExt {
    fn lift(&self, r: &Rational) -> Self {
        QuadExt::lift(self, r)
    }
    fn is_zero(&self) -> bool {
        QuadExt::is_zero(self)
    }
    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        QuadExt::checked_div(self, rhs)
    }
    fn to_f64(&self) -> f64 {
        QuadExt::to_f64(self)
    }
}
