//! Exact Gaussian elimination and negative-definiteness over the rationals.

use super::rational::Rational;
use crate::error::{Error, Result};

/// Solves `m x = rhs`. Singular systems are reported as degenerate.
pub fn solve(m: &[Vec<Rational>], rhs: &[Rational]) -> Result<Vec<Rational>> {
    let n = m.len();
    if rhs.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidConfig(format!("system must be {n}x{n}")));
    }
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::DegenerateConfiguration("singular intersection matrix".into()))?;
        a.swap(col, pivot);
        let inv = a[col][col].recip()?;
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=n {
                    let t = &f * &a[col][c];
                    a[r][c] -= &t;
                }
            }
        }
    }
    Ok(a.into_iter().map(|row| row[n].clone()).collect())
}

pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= &t;
            }
        }
    }
    det
}

/// Sylvester's criterion applied to `-m`: every leading principal minor of `-m`
/// is positive.
pub fn is_negative_definite(m: &[Vec<Rational>]) -> bool {
    (1..=m.len()).all(|k| {
        let minor: Vec<Vec<Rational>> = m[..k].iter().map(|r| r[..k].iter().map(|x| -x).collect()).collect();
        determinant(&minor).is_positive()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::q;

    #[test]
    fn solves_two_by_two() {
        let m = vec![vec![q(-2, 1), q(1, 1)], vec![q(1, 1), q(-1, 1)]];
        let x = solve(&m, &[q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(x, vec![q(-1, 1), q(-1, 1)]);
        assert_eq!(determinant(&m), q(1, 1));
        assert!(is_negative_definite(&m));
    }

    #[test]
    fn singular_and_indefinite() {
        let m = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert!(matches!(solve(&m, &[q(1, 1), q(1, 1)]), Err(Error::DegenerateConfiguration(_))));
        assert!(!is_negative_definite(&[vec![q(-1, 1), q(2, 1)], vec![q(2, 1), q(-1, 1)]]));
    }
}
