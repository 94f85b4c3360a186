//! Volumes of `pi^*(-K_X) - tE`, the expected vanishing order `S(-K_X; E)`,
//! the ratio `A/S` as a function of `mu = a/b`, and its exact minimum.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{
    quad_compare, sqrt_rational, BiPoly, FormRatio, PiecewisePolynomial, Poly, QuadExt, Rational, Scalar,
};
use crate::lattice::{DivisorExpr, SurfaceConfig, Weights, ANTICANONICAL_DEGREE, E};
use crate::zariski::{family_for, positive_parts, ZariskiDecomposition};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VolumeProfile {
    pub a: u64,
    pub b: u64,
    /// `P(t)^2`.
    pub vol: PiecewisePolynomial,
    /// `P(t).E`.
    pub vol_restricted: PiecewisePolynomial,
    pub tau: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VolumeChecks {
    pub starts_at_degree: bool,
    pub ends_at_zero: bool,
    pub continuous: bool,
    pub restricted_continuous: bool,
    /// `vol_restricted = -vol'/2` on every piece.
    pub derivative_identity: bool,
    pub non_increasing: bool,
    pub restricted_matches_closed_form: bool,
}

impl VolumeChecks {
    pub fn all(&self) -> bool {
        self.starts_at_degree
            && self.ends_at_zero
            && self.continuous
            && self.restricted_continuous
            && self.derivative_identity
            && self.non_increasing
            && self.restricted_matches_closed_form
    }
}

pub fn anticanonical_degree() -> Rational {
    Rational::integer(ANTICANONICAL_DEGREE)
}

impl VolumeProfile {
    pub fn from_decomposition(config: &SurfaceConfig, z: &ZariskiDecomposition) -> Result<Self> {
        let parts = positive_parts(config, z)?;
        let e = DivisorExpr::curve(E);
        let vol = parts
            .iter()
            .map(|p| config.dot_poly(p, p))
            .collect::<Result<Vec<_>>>()?;
        let restricted = parts
            .iter()
            .map(|p| config.dot_poly(p, &e))
            .collect::<Result<Vec<_>>>()?;
        let bps = z.breakpoints();
        Ok(VolumeProfile {
            a: z.a,
            b: z.b,
            vol: PiecewisePolynomial::new(bps.clone(), vol)?,
            vol_restricted: PiecewisePolynomial::new(bps, restricted)?,
            tau: z.tau.clone(),
        })
    }

    pub fn checks(&self) -> Result<VolumeChecks> {
        let zero = Rational::zero();
        let half = Rational::new(-1, 2);
        let derivative_identity = self
            .vol
            .pieces()
            .iter()
            .zip(self.vol_restricted.pieces())
            .all(|(v, r)| v.derivative().scale(&half) == *r);
        let non_increasing = self
            .vol_restricted
            .pieces()
            .iter()
            .enumerate()
            .all(|(k, r)| {
                let bps = self.vol_restricted.breakpoints();
                !r.eval(&bps[k]).is_negative() && !r.eval(&bps[k + 1]).is_negative()
            });
        Ok(VolumeChecks {
            starts_at_degree: self.vol.eval(&zero)? == anticanonical_degree(),
            ends_at_zero: self.vol.eval(&self.tau)?.is_zero(),
            continuous: self.vol.check_continuity().iter().all(|c| c.equal),
            restricted_continuous: self.vol_restricted.check_continuity().iter().all(|c| c.equal),
            derivative_identity,
            non_increasing,
            restricted_matches_closed_form: self.vol_restricted
                == restricted_volume_closed_form(self.a, self.b)?,
        })
    }
}

pub fn volume_profile(a: u64, b: u64) -> Result<VolumeProfile> {
    let (config, z) = family_for(a, b)?;
    VolumeProfile::from_decomposition(&config, &z)
}

/// `t/(ab)`, `(a+t)/(a(a+b))`, `6(a+2b-2t)/(4b^2-3a^2)` on the three regions.
pub fn restricted_volume_closed_form(a: u64, b: u64) -> Result<PiecewisePolynomial> {
    let w = Weights::in_chamber(a, b)?;
    let (ar, br) = (w.ar(), w.br());
    let int = Rational::integer;
    let ab = &ar * &br;
    let aab = &ar * (&ar + &br);
    let den = int(4) * &br * &br - int(3) * &ar * &ar;
    PiecewisePolynomial::new(
        vec![
            Rational::zero(),
            br.clone(),
            crate::zariski::second_breakpoint(a, b),
            w.tau(),
        ],
        vec![
            Poly::linear(Rational::zero(), ab.recip()?),
            Poly::linear(&ar / &aab, aab.recip()?),
            Poly::linear(int(6) * (&ar + int(2) * &br) / &den, int(-12) / &den),
        ],
    )
}

/// `(15a^2 + 34ab + 8b^2) / (12(3a + 2b))`.
pub fn s_value_form() -> FormRatio {
    let num = &(&BiPoly::a().pow(2).scale(&Rational::integer(15))
        + &(&BiPoly::a() * &BiPoly::b()).scale(&Rational::integer(34)))
        + &BiPoly::b().pow(2).scale(&Rational::integer(8));
    let den = BiPoly::linear(36, 24);
    FormRatio::new(num, den).expect("nonzero denominator")
}

/// `A/S` as a bivariate form: `12(a+b)(3a+2b) / (15a^2+34ab+8b^2)`.
pub fn ratio_form() -> FormRatio {
    let s = s_value_form();
    FormRatio::new(&BiPoly::linear(1, 1) * &s.denominator, s.numerator).expect("nonzero")
}

/// Closed-form S for any positive weights, coprime or not.
pub fn s_value_closed_form(a: u64, b: u64) -> Result<Rational> {
    s_value_form().eval(&Rational::from(a), &Rational::from(b))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SValueE {
    pub a: u64,
    pub b: u64,
    /// `(2/(-K)^2) * int t * vol_restricted`.
    pub via_restricted: Rational,
    /// `(1/(-K)^2) * int vol`.
    pub via_volume: Rational,
    pub closed_form: Rational,
}

impl SValueE {
    pub fn consistent(&self) -> bool {
        self.via_restricted == self.via_volume && self.via_volume == self.closed_form
    }
}

pub fn s_value_e_detail(a: u64, b: u64) -> Result<SValueE> {
    let profile = volume_profile(a, b)?;
    let deg = anticanonical_degree();
    let weighted = profile.vol_restricted.map(|p| p * &Poly::x());
    let via_restricted = Rational::integer(2) * weighted.integrate_all() / &deg;
    let via_volume = profile.vol.integrate_all() / &deg;
    Ok(SValueE {
        a,
        b,
        via_restricted,
        via_volume,
        closed_form: s_value_closed_form(a, b)?,
    })
}

/// `S(-K_X; E)` by integration, checked against the second integral form.
pub fn s_value_e(a: u64, b: u64) -> Result<Rational> {
    let s = s_value_e_detail(a, b)?;
    if s.via_restricted != s.via_volume {
        return Err(Error::Inconsistent(format!(
            "S integrals disagree at ({a}, {b}): {} vs {}",
            s.via_restricted, s.via_volume
        )));
    }
    Ok(s.via_volume)
}

/// `f(mu) = A/S` after dividing through by `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatioFunction {
    pub numerator: Poly,
    pub denominator: Poly,
}

impl RatioFunction {
    pub fn new() -> Self {
        let f = ratio_form();
        RatioFunction {
            numerator: f.numerator.dehomogenize(),
            denominator: f.denominator.dehomogenize(),
        }
    }

    pub fn eval<S: Scalar>(&self, mu: &S) -> Result<S> {
        self.numerator.eval_in(mu).checked_div(&self.denominator.eval_in(mu))
    }

    /// Primitive integer form of `N'D - ND'`, which has the sign of `f'`.
    pub fn derivative_numerator(&self) -> Poly {
        (&(&self.numerator.derivative() * &self.denominator) - &(&self.numerator * &self.denominator.derivative()))
            .primitive()
    }
}

impl Default for RatioFunction {
    fn default() -> Self {
        RatioFunction::new()
    }
}

pub fn ratio_f<S: Scalar>(mu: &S) -> Result<S> {
    RatioFunction::new().eval(mu)
}

/// `2/sqrt(3)`, the boundary of the weight chamber as `a/b`.
pub fn mu0() -> QuadExt {
    QuadExt::sqrt3(Rational::zero(), Rational::new(2, 3))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Minimum {
    pub lo: QuadExt,
    pub hi: QuadExt,
    pub argmin: QuadExt,
    pub min: QuadExt,
    pub derivative_numerator: Poly,
    pub critical_points: Vec<QuadExt>,
    pub certificate: String,
}

fn sign_word(s: i32) -> &'static str {
    match s {
        1 => ">",
        -1 => "<",
        _ => "=",
    }
}

/// Real roots of a quadratic or linear polynomial, exactly.
fn real_roots(g: &Poly) -> Result<Vec<QuadExt>> {
    let rat = |r: Rational| QuadExt::from_rational(r, crate::exactnum::quad::DEFAULT_RADICAND);
    match g.degree() {
        Some(1) => Ok(vec![rat(-g.coeff(0) / g.coeff(1))?]),
        Some(2) => {
            let (a, b, c) = (g.coeff(2), g.coeff(1), g.coeff(0));
            let disc = &b * &b - Rational::integer(4) * &a * &c;
            if disc.is_negative() {
                return Ok(Vec::new());
            }
            let (k, m) = sqrt_rational(&disc)?;
            let two_a = Rational::integer(2) * &a;
            let mid = -&b / &two_a;
            let half = &k / &two_a;
            let mut roots = if m == 1 {
                vec![rat(&mid - &half)?, rat(&mid + &half)?]
            } else {
                vec![
                    QuadExt::new(mid.clone(), -&half, m)?,
                    QuadExt::new(mid, half, m)?,
                ]
            };
            roots.sort_by(quad_compare);
            roots.dedup();
            Ok(roots)
        }
        _ => Err(Error::NotApplicable(format!("derivative numerator {g} is not of degree 1 or 2"))),
    }
}

/// Exact minimum of `f` on `[lo, hi]` from the sign of `f'` at the endpoints
/// and the position of its real critical points.
pub fn minimize_ratio(lo: &QuadExt, hi: &QuadExt) -> Result<Minimum> {
    if lo.signum() <= 0 || quad_compare(lo, hi) != Ordering::Less {
        return Err(Error::Domain(format!("need 0 < lo < hi, got [{}, {}]", lo.pretty(), hi.pretty())));
    }
    let f = RatioFunction::new();
    let g = f.derivative_numerator();
    let roots = real_roots(&g)?;
    let mut notes = Vec::new();
    let mut candidates = vec![lo.clone(), hi.clone()];
    for r in &roots {
        let pos = if quad_compare(r, lo) != Ordering::Greater {
            format!("lies left of {}", lo.pretty())
        } else if quad_compare(r, hi) != Ordering::Less {
            format!("lies right of {}", hi.pretty())
        } else {
            candidates.push(r.clone());
            format!("lies inside ({}, {})", lo.pretty(), hi.pretty())
        };
        notes.push(format!("critical point {} {pos}", r.pretty()));
    }
    let s_lo = g.eval_in(lo).signum();
    let s_hi = g.eval_in(hi).signum();
    let shape = if candidates.len() == 2 && s_lo == s_hi && s_lo != 0 {
        format!("f' {} 0 on the interval", sign_word(s_lo))
    } else {
        format!("f' {} 0 at {}, f' {} 0 at {}", sign_word(s_lo), lo.pretty(), sign_word(s_hi), hi.pretty())
    };
    let mut best: Option<(QuadExt, QuadExt)> = None;
    for c in candidates {
        let v = f.eval(&c)?;
        if best.as_ref().is_none_or(|(_, bv)| quad_compare(&v, bv) == Ordering::Less) {
            best = Some((c, v));
        }
    }
    let (argmin, min) = best.expect("two endpoints");
    let certificate = std::iter::once(shape).chain(notes).collect::<Vec<_>>().join("; ");
    Ok(Minimum {
        lo: lo.clone(),
        hi: hi.clone(),
        argmin,
        min,
        derivative_numerator: g,
        critical_points: roots,
        certificate,
    })
}

/// The minimum of `A/S` over the admissible ratios `[2/3, 2/sqrt(3)]`.
pub fn main_minimum() -> Result<Minimum> {
    let lo = QuadExt::from(Rational::new(2, 3));
    minimize_ratio(&lo, &mu0())
}

/// `(mu, f(mu))` on `n` evenly spaced rational points of `[lo, hi]`.
pub fn ratio_grid(lo: &Rational, hi: &Rational, n: usize) -> Result<Vec<(Rational, Rational)>> {
    if n < 2 || lo >= hi || !lo.is_positive() {
        return Err(Error::Domain(format!("grid needs 0 < lo < hi and n >= 2, got {lo}:{hi}:{n}")));
    }
    let f = RatioFunction::new();
    crate::zariski::sample_points(lo, hi, n)
        .into_iter()
        .map(|mu| f.eval(&mu).map(|v| (mu, v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;
    use crate::lattice::{chamber_pairs, log_discrepancy_e};

    #[test]
    fn one_one_volumes() {
        let p = volume_profile(1, 1).unwrap();
        assert_eq!(p.vol_restricted.eval(&q(1, 1)).unwrap(), q(1, 1));
        assert_eq!(p.vol.eval(&q(1, 1)).unwrap(), q(1, 1));
        assert_eq!(p.vol.eval(&q(3, 2)).unwrap(), q(0, 1));
        assert_eq!(p.vol.eval(&q(7, 5)).unwrap(), q(3, 25));
        assert!(p.checks().unwrap().all());
    }

    #[test]
    fn s_values() {
        assert_eq!(s_value_e(1, 1).unwrap(), q(19, 20));
        assert_eq!(s_value_closed_form(5, 4).unwrap(), q(1183, 276));
        let d = s_value_e_detail(8, 7).unwrap();
        assert!(d.consistent());
    }

    #[test]
    fn s_closed_form_is_homogeneous() {
        assert_eq!(s_value_form().homogeneity().unwrap(), 1);
        for (a, b) in [(1, 1), (5, 4), (8, 7)] {
            for c in [2, 3] {
                assert_eq!(
                    s_value_closed_form(c * a, c * b).unwrap(),
                    Rational::from(c) * s_value_closed_form(a, b).unwrap()
                );
            }
        }
    }

    #[test]
    fn ratio_values() {
        assert_eq!(ratio_f(&q(1, 1)).unwrap(), q(40, 19));
        assert_eq!(ratio_f(&q(2, 3)).unwrap(), q(15, 7));
        let lambda = ratio_f(&mu0()).unwrap();
        assert_eq!(lambda, QuadExt::sqrt3(q(66, 71), q(48, 71)));
    }

    #[test]
    fn ratio_function_shape() {
        let f = RatioFunction::new();
        assert_eq!(f.numerator, Poly::new(vec![q(24, 1), q(60, 1), q(36, 1)]));
        assert_eq!(f.denominator, Poly::new(vec![q(8, 1), q(34, 1), q(15, 1)]));
        assert_eq!(f.derivative_numerator(), Poly::new(vec![q(-28, 1), q(-12, 1), q(27, 1)]));
    }

    #[test]
    fn ratio_times_s_is_log_discrepancy() {
        for w in chamber_pairs(30) {
            let mu = w.ar() / w.br();
            let s = s_value_e(w.a(), w.b()).unwrap();
            assert_eq!(ratio_f(&mu).unwrap() * s, log_discrepancy_e(w.a(), w.b()).unwrap());
        }
    }

    #[test]
    fn minimum_on_admissible_range() {
        let m = main_minimum().unwrap();
        assert_eq!(m.argmin, mu0());
        assert_eq!(m.min.to_string(), "66/71+48/71*sqrt(3)");
        assert!(m.certificate.starts_with("f' < 0 on the interval"));
        assert!(m.certificate.contains("critical point (2+2*sqrt(22))/9 lies right of (2*sqrt(3))/3"));
    }

    #[test]
    fn minimum_on_rational_interval() {
        let m = minimize_ratio(&QuadExt::from(q(2, 3)), &QuadExt::from(q(1, 1))).unwrap();
        assert_eq!(m.argmin, QuadExt::from(q(1, 1)));
        assert_eq!(m.min, QuadExt::from(q(40, 19)));
    }

    #[test]
    fn derivative_sign_at_boundary() {
        let g = RatioFunction::new().derivative_numerator();
        assert_eq!(g.eval_in(&mu0()), QuadExt::sqrt3(q(8, 1), q(-8, 1)));
    }

    #[test]
    fn malformed_interval() {
        assert!(minimize_ratio(&mu0(), &QuadExt::from(q(1, 1))).is_err());
        assert!(minimize_ratio(&QuadExt::from(q(0, 1)), &QuadExt::from(q(1, 1))).is_err());
    }

    #[test]
    fn grid() {
        let rows = ratio_grid(&q(2, 3), &q(6, 5), 50).unwrap();
        assert_eq!(rows.len(), 50);
        assert_eq!(rows[0].1, q(15, 7));
        assert!(ratio_grid(&q(1, 1), &q(1, 2), 5).is_err());
    }
}
