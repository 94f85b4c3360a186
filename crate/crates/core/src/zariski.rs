//! Zariski decomposition of `pi^*(-K_X) - tE` on the weighted blowup.
//!
//! [`decompose_at`] runs the usual support-augmentation algorithm at a single
//! rational `t`. [`decompose_family`] runs the same algorithm symbolically in
//! `t`, discovering the breakpoints as roots of linear intersection numbers.
//! [`closed_form`] is the three-region formula; [`cross_validate`] compares.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{is_negative_definite, solve, Poly, Rational};
use crate::lattice::{
    anticanonical_family, build_wbu_config, DivisorExpr, SurfaceConfig, Weights, D_TILDE, E, L_TILDE,
};

/// Positive and negative parts at one value of `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub t: Rational,
    pub positive: DivisorExpr,
    pub negative: DivisorExpr,
}

/// One chamber `[lo, hi]` with negative part linear in `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Region {
    pub lo: Rational,
    pub hi: Rational,
    pub support: Vec<String>,
    pub negative: DivisorExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZariskiDecomposition {
    pub a: u64,
    pub b: u64,
    pub tau: Rational,
    pub regions: Vec<Region>,
}

impl ZariskiDecomposition {
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out = vec![self.regions[0].lo.clone()];
        out.extend(self.regions.iter().map(|r| r.hi.clone()));
        out
    }

    /// Region used at `t`; interior breakpoints go to the left region.
    pub fn region_at(&self, t: &Rational) -> Result<&Region> {
        if t.is_negative() || *t > self.tau {
            return Err(Error::OutOfRange {
                t: t.to_string(),
                tau: self.tau.to_string(),
            });
        }
        Ok(self
            .regions
            .iter()
            .find(|r| t <= &r.hi)
            .unwrap_or_else(|| self.regions.last().expect("non-empty")))
    }

    pub fn negative_at(&self, t: &Rational) -> Result<DivisorExpr> {
        Ok(self.region_at(t)?.negative.at(t))
    }
}

fn check_t(w: &Weights, t: &Rational) -> Result<()> {
    if t.is_negative() || *t > w.tau() {
        return Err(Error::OutOfRange {
            t: t.to_string(),
            tau: w.tau().to_string(),
        });
    }
    Ok(())
}

/// Solves `(D - sum x_C C).C' = 0` for `C'` in `support`, with `D` a family, so
/// the coefficients come out as polynomials in `t`.
fn negative_part(config: &SurfaceConfig, family: &DivisorExpr, support: &[String]) -> Result<DivisorExpr> {
    if support.is_empty() {
        return Ok(DivisorExpr::zero());
    }
    let m = config.submatrix(support)?;
    let rhs: Vec<Poly> = support
        .iter()
        .map(|c| config.dot_poly(family, &DivisorExpr::curve(c)))
        .collect::<Result<_>>()?;
    let degree = rhs.iter().filter_map(Poly::degree).max().unwrap_or(0);
    let mut coeffs = vec![Poly::zero(); support.len()];
    for k in 0..=degree {
        let column: Vec<Rational> = rhs.iter().map(|p| p.coeff(k)).collect();
        let x = solve(&m, &column)?;
        for (c, v) in coeffs.iter_mut().zip(x) {
            let mut mono = vec![Rational::zero(); k + 1];
            mono[k] = v;
            *c = &*c + &Poly::new(mono);
        }
    }
    Ok(support
        .iter()
        .zip(coeffs)
        .fold(DivisorExpr::zero(), |d, (c, p)| d.with(c, p)))
}

fn curves_of(config: &SurfaceConfig) -> Vec<String> {
    config.curves().to_vec()
}

/// Support augmentation at a fixed `t`: add every curve the current positive
/// part meets negatively, re-solve, repeat until nef.
pub fn decompose_at(config: &SurfaceConfig, a: u64, b: u64, t: &Rational) -> Result<Decomposition> {
    let w = Weights::in_chamber(a, b)?;
    check_t(&w, t)?;
    let family = anticanonical_family(config, a, b)?.at(t);
    let mut support: Vec<String> = Vec::new();
    loop {
        let negative = negative_part(config, &family, &support)?;
        let positive = family.sub(&negative);
        let mut violated = Vec::new();
        for c in curves_of(config) {
            if !support.contains(&c) && config.dot(&positive, &DivisorExpr::curve(&c))?.is_negative() {
                violated.push(c);
            }
        }
        if violated.is_empty() {
            if !support.is_empty() && !is_negative_definite(&config.submatrix(&support)?) {
                return Err(Error::DegenerateConfiguration(format!(
                    "support {support:?} is not negative definite"
                )));
            }
            return Ok(Decomposition {
                t: t.clone(),
                positive,
                negative,
            });
        }
        support.extend(violated);
        support.sort();
    }
}

/// The same algorithm in `t`: on each region the negative part is linear, and
/// the region ends where some `P(t).C` with `C` outside the support reaches 0.
pub fn decompose_family(config: &SurfaceConfig, a: u64, b: u64) -> Result<ZariskiDecomposition> {
    let w = Weights::in_chamber(a, b)?;
    let family = anticanonical_family(config, a, b)?;
    let tau = w.tau();
    let mut lo = Rational::zero();
    let mut support: Vec<String> = Vec::new();
    let mut regions = Vec::new();
    while lo < tau {
        let negative = negative_part(config, &family, &support)?;
        let positive = family.sub(&negative);
        let mut entering = Vec::new();
        let mut hi = tau.clone();
        for c in curves_of(config) {
            if support.contains(&c) {
                continue;
            }
            let q = config.dot_poly(&positive, &DivisorExpr::curve(&c))?;
            let slope = q.coeff(1);
            if q.degree().unwrap_or(0) > 1 {
                return Err(Error::Inconsistent(format!("P.{c} is not linear in t")));
            }
            let at_lo = q.eval(&lo);
            if at_lo.is_negative() || (at_lo.is_zero() && slope.is_negative()) {
                entering.push(c);
            } else if slope.is_negative() {
                let root = -q.coeff(0) / &slope;
                if root < hi {
                    hi = root;
                }
            }
        }
        if !entering.is_empty() {
            support.extend(entering);
            support.sort();
            continue;
        }
        for c in &support {
            let p = negative.coeff(c);
            if p.eval(&lo).is_negative() || p.eval(&hi).is_negative() {
                return Err(Error::Inconsistent(format!("negative coefficient of {c} on [{lo}, {hi}]")));
            }
        }
        if !support.is_empty() && !is_negative_definite(&config.submatrix(&support)?) {
            return Err(Error::DegenerateConfiguration(format!(
                "support {support:?} is not negative definite"
            )));
        }
        regions.push(Region {
            lo: lo.clone(),
            hi: hi.clone(),
            support: support.clone(),
            negative,
        });
        lo = hi;
    }
    Ok(ZariskiDecomposition {
        a: w.a(),
        b: w.b(),
        tau,
        regions,
    })
}

/// Middle breakpoint `a(3a+4b)/(3a+2b)`, where `D~` enters the support.
pub fn second_breakpoint(a: u64, b: u64) -> Rational {
    let (a, b) = (Rational::from(a), Rational::from(b));
    let three = Rational::integer(3);
    &a * (&three * &a + Rational::integer(4) * &b) / (&three * &a + Rational::integer(2) * &b)
}

/// Three regions: `N = 0` on `[0, b]`; `N = (t-b)/(a+b) L~` up to the middle
/// breakpoint; then both `L~` and `D~` up to `(a+2b)/2`.
pub fn closed_form(a: u64, b: u64) -> Result<ZariskiDecomposition> {
    let w = Weights::in_chamber(a, b)?;
    let (ar, br) = (w.ar(), w.br());
    let int = Rational::integer;
    let t2 = second_breakpoint(a, b);
    let sum = &ar + &br;
    let region2 = DivisorExpr::zero().with(L_TILDE, Poly::linear(-&br / &sum, sum.recip()?));
    let den = int(4) * &br * &br - int(3) * &ar * &ar;
    let region3 = DivisorExpr::zero()
        .with(
            L_TILDE,
            Poly::linear(
                -(int(4) * &br * &br) / &den,
                int(3) * (int(2) * &br - &ar) / &den,
            ),
        )
        .with(
            D_TILDE,
            Poly::linear(
                -(&ar * (int(3) * &ar + int(4) * &br)) / &den,
                (int(3) * &ar + int(2) * &br) / &den,
            ),
        );
    Ok(ZariskiDecomposition {
        a,
        b,
        tau: w.tau(),
        regions: vec![
            Region {
                lo: Rational::zero(),
                hi: br.clone(),
                support: Vec::new(),
                negative: DivisorExpr::zero(),
            },
            Region {
                lo: br,
                hi: t2.clone(),
                support: vec![L_TILDE.into()],
                negative: region2,
            },
            Region {
                lo: t2,
                hi: w.tau(),
                support: vec![D_TILDE.into(), L_TILDE.into()],
                negative: region3,
            },
        ],
    })
}

/// Defining properties of a decomposition at one `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub t: Rational,
    pub nef: bool,
    pub orthogonal_to_support: bool,
    pub effective: bool,
    pub negative_definite: bool,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.nef && self.orthogonal_to_support && self.effective && self.negative_definite
    }
}

pub fn certify(config: &SurfaceConfig, d: &Decomposition) -> Result<Certificate> {
    let support = d.negative.support();
    let mut nef = true;
    let mut orthogonal_to_support = true;
    for c in curves_of(config) {
        let v = config.dot(&d.positive, &DivisorExpr::curve(&c))?;
        nef &= !v.is_negative();
        if support.contains(&c) {
            orthogonal_to_support &= v.is_zero();
        }
    }
    let effective = support.iter().all(|c| d.negative.coeff(c).coeff(0).is_positive());
    let negative_definite = support.is_empty() || is_negative_definite(&config.submatrix(&support)?);
    Ok(Certificate {
        t: d.t.clone(),
        nef,
        orthogonal_to_support,
        effective,
        negative_definite,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleCheck {
    pub t: Rational,
    pub region: usize,
    pub matches_closed_form: bool,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossValidation {
    pub a: u64,
    pub b: u64,
    pub family_matches_closed_form: bool,
    /// Negative part at each interior breakpoint agrees from both sides.
    pub continuous_at_breakpoints: bool,
    pub samples: Vec<SampleCheck>,
    pub mismatches: Vec<String>,
}

impl CrossValidation {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Evenly spaced points of `[lo, hi]`, endpoints included.
pub fn sample_points(lo: &Rational, hi: &Rational, samples: usize) -> Vec<Rational> {
    if samples <= 1 {
        return vec![(lo + hi) / Rational::integer(2)];
    }
    let step = (hi - lo) / Rational::from(samples - 1);
    (0..samples).map(|k| lo + &step * Rational::from(k)).collect()
}

pub fn cross_validate(config: &SurfaceConfig, a: u64, b: u64, samples: usize) -> Result<CrossValidation> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let closed = closed_form(a, b)?;
    let family = decompose_family(config, a, b)?;
    let mut mismatches = Vec::new();
    let family_matches_closed_form = family == closed;
    if !family_matches_closed_form {
        mismatches.push("symbolic family differs from the closed form".to_string());
    }
    let continuous_at_breakpoints = closed.regions.windows(2).all(|w| {
        let t = &w[0].hi;
        w[0].negative.at(t) == w[1].negative.at(t)
    });
    if !continuous_at_breakpoints {
        mismatches.push("negative part jumps at a breakpoint".to_string());
    }
    let mut checks = Vec::new();
    for (k, region) in closed.regions.iter().enumerate() {
        for t in sample_points(&region.lo, &region.hi, samples) {
            let d = decompose_at(config, a, b, &t)?;
            let matches_closed_form = d.negative == region.negative.at(&t);
            let certificate = certify(config, &d)?;
            if !matches_closed_form {
                mismatches.push(format!("t = {t}: N = {} but closed form gives {}", d.negative, region.negative.at(&t)));
            }
            if !certificate.holds() {
                mismatches.push(format!("t = {t}: certificate fails {certificate:?}"));
            }
            checks.push(SampleCheck {
                t,
                region: k,
                matches_closed_form,
                certificate,
            });
        }
    }
    Ok(CrossValidation {
        a,
        b,
        family_matches_closed_form,
        continuous_at_breakpoints,
        samples: checks,
        mismatches,
    })
}

/// `P(t)` on each region of a decomposition.
pub fn positive_parts(config: &SurfaceConfig, z: &ZariskiDecomposition) -> Result<Vec<DivisorExpr>> {
    let family = anticanonical_family(config, z.a, z.b)?;
    Ok(z.regions.iter().map(|r| family.sub(&r.negative)).collect())
}

/// Negative-part coefficients per region, keyed by curve.
pub fn coefficient_table(z: &ZariskiDecomposition) -> Vec<BTreeMap<String, Poly>> {
    z.regions
        .iter()
        .map(|r| {
            [L_TILDE, D_TILDE, E]
                .iter()
                .map(|c| (c.to_string(), r.negative.coeff(c)))
                .collect()
        })
        .collect()
}

/// Convenience: config and family decomposition for a chamber pair.
pub fn family_for(a: u64, b: u64) -> Result<(SurfaceConfig, ZariskiDecomposition)> {
    let config = build_wbu_config(a, b)?;
    let z = decompose_family(&config, a, b)?;
    Ok((config, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;
    use crate::lattice::chamber_pairs;

    fn one_one() -> SurfaceConfig {
        build_wbu_config(1, 1).unwrap()
    }

    #[test]
    fn first_region_has_no_negative_part() {
        let d = decompose_at(&one_one(), 1, 1, &q(1, 2)).unwrap();
        assert_eq!(d.negative, DivisorExpr::zero());
    }

    #[test]
    fn middle_region() {
        let d = decompose_at(&one_one(), 1, 1, &q(6, 5)).unwrap();
        assert_eq!(d.negative, DivisorExpr::from_constants([(L_TILDE, q(1, 10))]));
    }

    #[test]
    fn at_threshold() {
        let c = one_one();
        let d = decompose_at(&c, 1, 1, &q(3, 2)).unwrap();
        assert_eq!(d.negative, DivisorExpr::from_constants([(L_TILDE, q(1, 2)), (D_TILDE, q(1, 2))]));
        assert_eq!(c.dot(&d.positive, &d.positive).unwrap(), q(0, 1));
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(
            decompose_at(&one_one(), 1, 1, &q(2, 1)),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn family_breakpoints() {
        let (_, z) = family_for(1, 1).unwrap();
        assert_eq!(z.breakpoints(), vec![q(0, 1), q(1, 1), q(7, 5), q(3, 2)]);
        assert_eq!(second_breakpoint(5, 4), q(155, 23));
        assert_eq!(Weights::new(5, 4).unwrap().tau(), q(13, 2));
    }

    #[test]
    fn family_equals_closed_form() {
        for w in chamber_pairs(30) {
            let (_, z) = family_for(w.a(), w.b()).unwrap();
            assert_eq!(z, closed_form(w.a(), w.b()).unwrap(), "{w}");
        }
    }

    #[test]
    fn cross_validation() {
        for (a, b) in [(1, 1), (8, 7)] {
            let c = build_wbu_config(a, b).unwrap();
            let rep = cross_validate(&c, a, b, 11).unwrap();
            assert!(rep.passed(), "{:?}", rep.mismatches);
            assert_eq!(rep.samples.len(), 33);
        }
    }

    #[test]
    fn coefficients_non_decreasing() {
        for w in chamber_pairs(20) {
            let z = closed_form(w.a(), w.b()).unwrap();
            for r in &z.regions {
                for c in &r.support {
                    assert!(!r.negative.coeff(c).coeff(1).is_negative());
                }
            }
        }
    }
}
