//! Piecewise polynomials over rational breakpoints.

use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::rational::Rational;
use crate::error::{Error, Result};

/// `pieces[k]` is the polynomial on `[breakpoints[k], breakpoints[k+1]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<Rational>,
    pieces: Vec<Poly>,
}

/// One-sided values at an interior breakpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuityCheck {
    pub at: Rational,
    pub left: Rational,
    pub right: Rational,
    pub equal: bool,
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Poly>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Domain("need at least two breakpoints".into()));
        }
        if pieces.len() + 1 != breakpoints.len() {
            return Err(Error::Domain(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                pieces.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("breakpoints must be strictly increasing".into()));
        }
        Ok(PiecewisePolynomial {
            breakpoints,
            pieces,
        })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn lo(&self) -> &Rational {
        &self.breakpoints[0]
    }

    pub fn hi(&self) -> &Rational {
        self.breakpoints.last().expect("non-empty")
    }

    fn check_domain(&self, x: &Rational) -> Result<()> {
        if x < self.lo() || x > self.hi() {
            return Err(Error::OutOfDomain {
                value: x.to_string(),
                lo: self.lo().to_string(),
                hi: self.hi().to_string(),
            });
        }
        Ok(())
    }

    /// Index of the piece used at `x`; at an interior breakpoint the piece on
    /// the left is used, so intervals read as `(lo, hi]` except the first.
    fn piece_index(&self, x: &Rational) -> usize {
        self.breakpoints[1..]
            .iter()
            .position(|bp| x <= bp)
            .unwrap_or(self.pieces.len() - 1)
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        self.check_domain(x)?;
        Ok(self.pieces[self.piece_index(x)].eval(x))
    }

    /// Exact `∫_lo^hi f`.
    pub fn integrate(&self, lo: &Rational, hi: &Rational) -> Result<Rational> {
        self.check_domain(lo)?;
        self.check_domain(hi)?;
        if lo > hi {
            return Err(Error::Domain(format!("lower bound {lo} exceeds upper bound {hi}")));
        }
        let mut total = Rational::zero();
        for (k, piece) in self.pieces.iter().enumerate() {
            let a = self.breakpoints[k].clone().max(lo.clone());
            let b = self.breakpoints[k + 1].clone().min(hi.clone());
            if a < b {
                total += &piece.integrate(&a, &b);
            }
        }
        Ok(total)
    }

    pub fn integrate_all(&self) -> Rational {
        self.pieces
            .iter()
            .enumerate()
            .map(|(k, p)| p.integrate(&self.breakpoints[k], &self.breakpoints[k + 1]))
            .sum()
    }

    pub fn check_continuity(&self) -> Vec<ContinuityCheck> {
        (1..self.pieces.len())
            .map(|k| {
                let at = self.breakpoints[k].clone();
                let left = self.pieces[k - 1].eval(&at);
                let right = self.pieces[k].eval(&at);
                let equal = left == right;
                ContinuityCheck {
                    at,
                    left,
                    right,
                    equal,
                }
            })
            .collect()
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        PiecewisePolynomial {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(f).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        self.map(Poly::derivative)
    }

    /// Pointwise combination of two functions on the same domain; the result
    /// lives on the union of both breakpoint sets.
    pub fn combine(
        &self,
        other: &PiecewisePolynomial,
        f: impl Fn(&Poly, &Poly) -> Poly,
    ) -> Result<Self> {
        if self.lo() != other.lo() || self.hi() != other.hi() {
            return Err(Error::Domain("functions live on different domains".into()));
        }
        let mut bps: Vec<Rational> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .cloned()
            .collect();
        bps.sort();
        bps.dedup();
        let pieces = bps
            .windows(2)
            .map(|w| {
                let mid = (&w[0] + &w[1]) / Rational::integer(2);
                f(
                    &self.pieces[self.piece_index(&mid)],
                    &other.pieces[other.piece_index(&mid)],
                )
            })
            .collect();
        PiecewisePolynomial::new(bps, pieces)
    }

    /// Splits at an additional interior point without changing the function.
    pub fn refine(&self, at: &Rational) -> Result<Self> {
        self.check_domain(at)?;
        if self.breakpoints.contains(at) {
            return Ok(self.clone());
        }
        let k = self.piece_index(at);
        let mut breakpoints = self.breakpoints.clone();
        let mut pieces = self.pieces.clone();
        breakpoints.insert(k + 1, at.clone());
        pieces.insert(k + 1, self.pieces[k].clone());
        PiecewisePolynomial::new(breakpoints, pieces)
    }
}

/// Exact integral of `f` over `[lo, hi]`.
pub fn piecewise_integrate(f: &PiecewisePolynomial, lo: &Rational, hi: &Rational) -> Result<Rational> {
    f.integrate(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::q;

    fn p(c: &[Rational]) -> Poly {
        Poly::new(c.to_vec())
    }

    /// Volume function of the (1,1) weighted blowup: 2 - t^2, then the
    /// middle chamber, then 3(3 - 2t)^2.
    fn volume_one_one() -> PiecewisePolynomial {
        PiecewisePolynomial::new(
            vec![q(0, 1), q(1, 1), q(7, 5), q(3, 2)],
            vec![
                p(&[q(2, 1), q(0, 1), q(-1, 1)]),
                // 2 - t^2 + (t-1)^2/2
                p(&[q(5, 2), q(-1, 1), q(-1, 2)]),
                p(&[q(27, 1), q(-36, 1), q(12, 1)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn identity_integral() {
        let f = PiecewisePolynomial::new(vec![q(0, 1), q(1, 1)], vec![Poly::x()]).unwrap();
        assert_eq!(piecewise_integrate(&f, &q(0, 1), &q(1, 1)).unwrap(), q(1, 2));
    }

    #[test]
    fn quadratic_integral() {
        let f = PiecewisePolynomial::new(vec![q(0, 1), q(1, 1)], vec![p(&[q(2, 1), q(0, 1), q(-1, 1)])])
            .unwrap();
        assert_eq!(f.integrate(&q(0, 1), &q(1, 1)).unwrap(), q(5, 3));
    }

    #[test]
    fn volume_one_one_integral() {
        let f = volume_one_one();
        assert_eq!(f.integrate(&q(0, 1), &q(3, 2)).unwrap(), q(19, 10));
        assert!(f.check_continuity().iter().all(|c| c.equal));
    }

    #[test]
    fn out_of_domain_bounds() {
        let f = volume_one_one();
        assert!(matches!(
            f.integrate(&q(0, 1), &q(2, 1)),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(f.eval(&q(-1, 1)).is_err());
        assert!(f.integrate(&q(1, 1), &q(1, 2)).is_err());
    }

    #[test]
    fn constant_function_is_continuous() {
        let c = Poly::constant(q(3, 1));
        let f = PiecewisePolynomial::new(vec![q(0, 1), q(1, 1), q(2, 1)], vec![c.clone(), c]).unwrap();
        let checks = f.check_continuity();
        assert_eq!(checks.len(), 1);
        assert!(checks[0].equal);
    }

    #[test]
    fn mismatched_pieces_flagged() {
        let f = PiecewisePolynomial::new(
            vec![q(0, 1), q(1, 1), q(2, 1)],
            vec![Poly::constant(q(1, 1)), Poly::constant(q(2, 1))],
        )
        .unwrap();
        let checks = f.check_continuity();
        assert!(!checks[0].equal);
        assert_eq!((checks[0].left.clone(), checks[0].right.clone()), (q(1, 1), q(2, 1)));
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(PiecewisePolynomial::new(vec![q(1, 1), q(0, 1)], vec![Poly::zero()]).is_err());
        assert!(PiecewisePolynomial::new(vec![q(0, 1), q(1, 1)], vec![]).is_err());
    }

    #[test]
    fn combine_on_union_of_breakpoints() {
        let f = volume_one_one();
        let g = PiecewisePolynomial::new(vec![q(0, 1), q(3, 2)], vec![Poly::x()]).unwrap();
        let fg = f.combine(&g, |a, b| a * b).unwrap();
        assert_eq!(fg.breakpoints().len(), 4);
        assert_eq!(fg.eval(&q(6, 5)).unwrap(), f.eval(&q(6, 5)).unwrap() * q(6, 5));
    }
}
