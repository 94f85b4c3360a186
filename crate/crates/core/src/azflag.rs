//! Refined S-values on `E` at its special points.
//!
//! `E` carries three special points: `P1 = L~ ∩ E` (index `b`), and the two
//! points `P2`, `P3` where `D~` meets `E`, with `P2` of index `a`. For a point
//! `x` the refined value is `S(W; x) = (2/(-K)^2) ∫ h` with
//!
//! ```text
//! h(t) = (P.E) * sum_C n_C(t) (C.E)_x + (P.E)^2 / 2
//! ```
//!
//! How the mass `D~.E = 2/a` is shared between `P2` and `P3` is a convention;
//! both choices are computed.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{quad_compare, BiPoly, FormRatio, PiecewisePolynomial, QuadExt, Rational};
use crate::lattice::{Weights, D_TILDE, E, L_TILDE};
use crate::svalues::{anticanonical_degree, mu0, ratio_form, volume_profile};
use crate::zariski::{family_for, positive_parts};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PointId {
    P1,
    P2,
    P3,
    #[serde(rename = "GENERIC")]
    Generic,
}

impl PointId {
    pub const ALL: [PointId; 4] = [PointId::P1, PointId::P2, PointId::P3, PointId::Generic];
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PointId::P1 => "P1",
            PointId::P2 => "P2",
            PointId::P3 => "P3",
            PointId::Generic => "GENERIC",
        };
        f.write_str(s)
    }
}

/// How the two points of `D~ ∩ E` share the intersection `2/a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Convention {
    /// All of `2/a` at `P2`.
    #[serde(rename = "concentrated")]
    Concentrated,
    /// `1/a` at each of `P2`, `P3`.
    #[serde(rename = "split")]
    EqualSplit,
}

impl Convention {
    pub const ALL: [Convention; 2] = [Convention::Concentrated, Convention::EqualSplit];
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Concentrated => "concentrated",
            Convention::EqualSplit => "split",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlagPoint {
    pub id: PointId,
    pub convention: Convention,
    /// Coefficient of the point in the different of `E`.
    pub different_coeff: Rational,
    pub local_masses: BTreeMap<String, Rational>,
}

impl FlagPoint {
    pub fn new(w: &Weights, id: PointId, convention: Convention) -> Self {
        let (a, b) = (w.ar(), w.br());
        let one = Rational::one();
        let mut local_masses = BTreeMap::new();
        let different_coeff = match id {
            PointId::P1 => {
                local_masses.insert(L_TILDE.to_string(), b.recip().expect("positive"));
                &one - b.recip().expect("positive")
            }
            PointId::P2 => {
                let m = match convention {
                    Convention::Concentrated => Rational::integer(2) / &a,
                    Convention::EqualSplit => a.recip().expect("positive"),
                };
                local_masses.insert(D_TILDE.to_string(), m);
                &one - a.recip().expect("positive")
            }
            PointId::P3 => {
                if convention == Convention::EqualSplit {
                    local_masses.insert(D_TILDE.to_string(), a.recip().expect("positive"));
                }
                Rational::zero()
            }
            PointId::Generic => Rational::zero(),
        };
        FlagPoint {
            id,
            convention,
            different_coeff,
            local_masses,
        }
    }

    pub fn mass(&self, curve: &str) -> Rational {
        self.local_masses.get(curve).cloned().unwrap_or_else(Rational::zero)
    }
}

/// Masses of all points add up to `C.E` for each curve `C`.
pub fn masses_conserved(w: &Weights, convention: Convention) -> bool {
    [(L_TILDE, Rational::one() / w.br()), (D_TILDE, Rational::integer(2) / w.ar())]
        .iter()
        .all(|(c, total)| {
            PointId::ALL
                .iter()
                .map(|&id| FlagPoint::new(w, id, convention).mass(c))
                .sum::<Rational>()
                == *total
        })
}

pub fn h_function(a: u64, b: u64, point: &FlagPoint) -> Result<PiecewisePolynomial> {
    let (config, z) = family_for(a, b)?;
    for (c, m) in &point.local_masses {
        let total = config.intersect(c, E)?;
        if m.is_negative() || *m > total {
            return Err(Error::Domain(format!("mass {m} of {c} at {} exceeds {c}.E = {total}", point.id)));
        }
    }
    let parts = positive_parts(&config, &z)?;
    let e = crate::lattice::DivisorExpr::curve(E);
    let half = Rational::new(1, 2);
    let pieces = z
        .regions
        .iter()
        .zip(&parts)
        .map(|(region, p)| {
            let pe = config.dot_poly(p, &e)?;
            let local = point
                .local_masses
                .iter()
                .fold(crate::exactnum::Poly::zero(), |acc, (c, m)| &acc + &region.negative.coeff(c).scale(m));
            Ok(&(&pe * &local) + &(&pe * &pe).scale(&half))
        })
        .collect::<Result<Vec<_>>>()?;
    PiecewisePolynomial::new(z.breakpoints(), pieces)
}

/// `S(W; x)` by integrating `h`.
pub fn s_value_point(a: u64, b: u64, point: &FlagPoint) -> Result<Rational> {
    let h = h_function(a, b, point)?;
    Ok(Rational::integer(2) * h.integrate_all() / anticanonical_degree())
}

fn form(num: BiPoly, den: BiPoly) -> FormRatio {
    FormRatio::new(num, den).expect("nonzero denominator")
}

fn quad_form(c2: i64, c11: i64, c02: i64) -> BiPoly {
    let int = Rational::integer;
    &(&BiPoly::a().pow(2).scale(&int(c2)) + &(&BiPoly::a() * &BiPoly::b()).scale(&int(c11)))
        + &BiPoly::b().pow(2).scale(&int(c02))
}

/// Closed forms being audited, as functions of `(a, b)`.
pub fn reference_s_form(id: PointId) -> FormRatio {
    let sq = BiPoly::linear(3, 2).pow(2);
    match id {
        PointId::P1 => form(
            quad_form(45, 60, 44),
            &(&BiPoly::b() * &sq) * &BiPoly::constant(Rational::integer(12)),
        ),
        PointId::P2 | PointId::P3 => form(
            quad_form(18, 12, 4),
            &(&BiPoly::a() * &sq) * &BiPoly::constant(Rational::integer(3)),
        ),
        PointId::Generic => form(BiPoly::linear(15, -2), quad_form(18, 12, 0)),
    }
}

/// The five quantities whose minimum bounds the local threshold from below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EntryId {
    #[serde(rename = "A/S")]
    AOverS,
    P1,
    P2,
    P3,
    #[serde(rename = "GENERIC")]
    Generic,
}

impl EntryId {
    pub const ALL: [EntryId; 5] = [EntryId::AOverS, EntryId::P1, EntryId::P2, EntryId::P3, EntryId::Generic];

    pub fn point(&self) -> Option<PointId> {
        match self {
            EntryId::AOverS => None,
            EntryId::P1 => Some(PointId::P1),
            EntryId::P2 => Some(PointId::P2),
            EntryId::P3 => Some(PointId::P3),
            EntryId::Generic => Some(PointId::Generic),
        }
    }
}

impl fmt::Display for EntryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.point() {
            None => f.write_str("A/S"),
            Some(p) => write!(f, "{p}"),
        }
    }
}

/// `(1 - ord Delta)/S` as a ratio of forms in `(a, b)`; `A/S` for [`EntryId::AOverS`].
pub fn entry_form(id: EntryId) -> FormRatio {
    let Some(point) = id.point() else {
        return ratio_form();
    };
    let s = reference_s_form(point);
    // 1 - ord Delta is 1/b at P1, 1/a at P2 and 1 elsewhere
    let scale = match point {
        PointId::P1 => BiPoly::b(),
        PointId::P2 => BiPoly::a(),
        _ => BiPoly::constant(Rational::one()),
    };
    form(s.denominator, &scale * &s.numerator).cancel_monomials()
}

/// Evaluates a homogeneous entry along `direction`. Degree 0 gives the limit
/// along integer pairs approaching that direction; higher degrees only give a
/// value normalised to this particular direction vector.
pub fn limit_entry(entry: &FormRatio, direction: &(QuadExt, QuadExt)) -> Result<(QuadExt, i64)> {
    let degree = entry.homogeneity()?;
    let value = entry.eval_in(&direction.0, &direction.1)?;
    Ok((value, degree))
}

/// `(2, sqrt(3))`.
pub fn default_direction() -> (QuadExt, QuadExt) {
    (QuadExt::from(Rational::integer(2)), QuadExt::sqrt3(Rational::zero(), Rational::one()))
}

/// `(6/71)(11 + 8 sqrt(3))`.
pub fn lambda() -> QuadExt {
    QuadExt::sqrt3(Rational::new(66, 71), Rational::new(48, 71))
}

/// Constants displayed for each entry's limit along `(2, sqrt(3))`.
pub fn reference_limit(id: EntryId) -> QuadExt {
    let q = Rational::new;
    match id {
        EntryId::AOverS => lambda(),
        EntryId::P1 => QuadExt::sqrt3(q(66, 47), q(18, 47)),
        EntryId::P2 => QuadExt::sqrt3(q(48, 37), q(18, 37)),
        EntryId::P3 | EntryId::Generic => QuadExt::sqrt3(q(96, 37), q(36, 37)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flag {
    Match,
    FormulaMismatch,
    DivergesAlongSequences,
}

impl Flag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flag::Match => "MATCH",
            Flag::FormulaMismatch => "FORMULA-MISMATCH",
            Flag::DivergesAlongSequences => "DIVERGES-ALONG-SEQUENCES",
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Flag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlagRecord {
    pub subject: String,
    pub flag: Flag,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub entry: EntryId,
    pub form: String,
    pub homogeneity: i64,
    pub limit: QuadExt,
    pub limit_pretty: String,
    pub reference_limit: QuadExt,
    pub limit_matches_reference: bool,
    pub flag: Flag,
}

/// Oracle and closed-form S at one sample pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleRow {
    pub a: u64,
    pub b: u64,
    pub point: PointId,
    pub convention: Convention,
    pub oracle_s: Rational,
    pub reference_s: Rational,
    pub entry: Rational,
    pub flag: Flag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SValueReport {
    pub direction: (QuadExt, QuadExt),
    pub conventions: Vec<Convention>,
    pub a_over_s: EntryReport,
    pub entries: Vec<EntryReport>,
    pub samples: Vec<SampleRow>,
    /// Minimum over the entries of degree 0.
    pub computed_min: QuadExt,
    pub computed_min_entry: EntryId,
    pub claimed_min: QuadExt,
    pub flags: Vec<FlagRecord>,
    pub noted_gaps: Vec<String>,
}

/// Convergents `p/q` of `x` with `p/q < x`, up to `max_den`.
pub fn lower_convergents(x: &QuadExt, max_den: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut y = x.clone();
    for _ in 0..64 {
        let mut k = y.to_f64().floor() as u64;
        while quad_compare(&QuadExt::from(Rational::from(k + 1)), &y) != Ordering::Greater {
            k += 1;
        }
        while quad_compare(&QuadExt::from(Rational::from(k)), &y) == Ordering::Greater {
            k -= 1;
        }
        let (p, q) = (k * p1 + p0, k * q1 + q0);
        if q > max_den {
            break;
        }
        let c = QuadExt::from(Rational::new(p as i64, q as i64));
        if quad_compare(&c, x) == Ordering::Less {
            out.push((p, q));
        }
        (p0, q0, p1, q1) = (p1, q1, p, q);
        let frac = &y - &QuadExt::from(Rational::from(k));
        if frac.is_zero() {
            break;
        }
        y = frac.inverse().expect("nonzero");
    }
    out
}

/// `(1, 1)` and the lower convergents of `2/sqrt(3)` with `b <= max_b`.
pub fn sample_pairs(max_b: u64) -> Vec<Weights> {
    let mut out = vec![Weights::new(1, 1).expect("coprime")];
    for (p, q) in lower_convergents(&mu0(), max_b) {
        if let Ok(w) = Weights::in_chamber(p, q) {
            if !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

fn entry_report(id: EntryId, direction: &(QuadExt, QuadExt)) -> Result<EntryReport> {
    let f = entry_form(id);
    let (limit, homogeneity) = limit_entry(&f, direction)?;
    let reference = reference_limit(id);
    let flag = if homogeneity != 0 {
        Flag::DivergesAlongSequences
    } else if limit == reference {
        Flag::Match
    } else {
        Flag::FormulaMismatch
    };
    Ok(EntryReport {
        entry: id,
        form: f.to_string(),
        homogeneity,
        limit_pretty: limit.pretty(),
        limit_matches_reference: limit == reference,
        reference_limit: reference,
        limit,
        flag,
    })
}

pub fn sample_rows(w: &Weights, conventions: &[Convention]) -> Result<Vec<SampleRow>> {
    let (ar, br) = (w.ar(), w.br());
    let mut rows = Vec::new();
    for &convention in conventions {
        for id in PointId::ALL {
            let point = FlagPoint::new(w, id, convention);
            let oracle_s = s_value_point(w.a(), w.b(), &point)?;
            let reference_s = reference_s_form(id).eval(&ar, &br)?;
            let entry = (Rational::one() - &point.different_coeff) / &oracle_s;
            let flag = if oracle_s == reference_s {
                Flag::Match
            } else {
                Flag::FormulaMismatch
            };
            rows.push(SampleRow {
                a: w.a(),
                b: w.b(),
                point: id,
                convention,
                oracle_s,
                reference_s,
                entry,
                flag,
            });
        }
    }
    Ok(rows)
}

pub fn theorem_report(direction: &(QuadExt, QuadExt)) -> Result<SValueReport> {
    theorem_report_with(direction, &Convention::ALL, 3000)
}

/// Full report; sample pairs are `(1, 1)` and lower convergents of `2/sqrt(3)`
/// with `b <= max_b`.
pub fn theorem_report_with(
    direction: &(QuadExt, QuadExt),
    conventions: &[Convention],
    max_b: u64,
) -> Result<SValueReport> {
    let a_over_s = entry_report(EntryId::AOverS, direction)?;
    let entries = EntryId::ALL[1..]
        .iter()
        .map(|&id| entry_report(id, direction))
        .collect::<Result<Vec<_>>>()?;
    let mut flags = Vec::new();
    for e in std::iter::once(&a_over_s).chain(&entries) {
        let detail = match e.flag {
            Flag::DivergesAlongSequences => format!(
                "homogeneous of degree {}; {} is normalised to this direction and grows without bound along integer pairs",
                e.homogeneity, e.limit_pretty
            ),
            Flag::Match => format!("limit {} equals the displayed constant", e.limit_pretty),
            Flag::FormulaMismatch => format!(
                "limit {} differs from the displayed constant {}",
                e.limit_pretty,
                e.reference_limit.pretty()
            ),
        };
        flags.push(FlagRecord {
            subject: format!("limit of {}", e.entry),
            flag: e.flag,
            detail,
        });
    }
    let (computed_min_entry, computed_min) = std::iter::once(&a_over_s)
        .chain(&entries)
        .filter(|e| e.homogeneity == 0)
        .map(|e| (e.entry, e.limit.clone()))
        .min_by(|x, y| quad_compare(&x.1, &y.1))
        .expect("A/S has degree 0");
    let claimed_min = lambda();
    let order = quad_compare(&computed_min, &claimed_min);
    flags.push(FlagRecord {
        subject: "claimed minimum".into(),
        flag: if order == Ordering::Equal {
            Flag::Match
        } else {
            Flag::FormulaMismatch
        },
        detail: match order {
            Ordering::Equal => format!("minimum of the degree-0 limits is {}", claimed_min.pretty()),
            _ => format!(
                "minimum of the degree-0 limits is {} from {}, which is {} the claimed minimum {}",
                computed_min.pretty(),
                computed_min_entry,
                if order == Ordering::Less { "strictly below" } else { "strictly above" },
                claimed_min.pretty()
            ),
        },
    });
    let mut samples = Vec::new();
    for w in sample_pairs(max_b) {
        samples.extend(sample_rows(&w, conventions)?);
    }
    for row in samples.iter().filter(|r| r.flag != Flag::Match) {
        flags.push(FlagRecord {
            subject: format!("S({}) at ({}, {}), {} masses", row.point, row.a, row.b, row.convention),
            flag: row.flag,
            detail: format!("integral gives {}, closed form gives {}", row.oracle_s, row.reference_s),
        });
    }
    Ok(SValueReport {
        direction: direction.clone(),
        conventions: conventions.to_vec(),
        a_over_s,
        entries,
        samples,
        computed_min,
        computed_min_entry,
        claimed_min,
        flags,
        noted_gaps: vec![
            "a curve written C-check with self-intersection 3 - b/a appears without a parent curve in the configuration; it is not modelled".into(),
        ],
    })
}

/// Integral of `(P.E)^2/2`, the generic-point value, via the volume profile.
pub fn generic_s_from_volumes(a: u64, b: u64) -> Result<Rational> {
    let p = volume_profile(a, b)?;
    let sq = p.vol_restricted.map(|r| (r * r).scale(&Rational::new(1, 2)));
    Ok(Rational::integer(2) * sq.integrate_all() / anticanonical_degree())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;

    fn w11() -> Weights {
        Weights::new(1, 1).unwrap()
    }

    #[test]
    fn h_generic_one_one() {
        let p = FlagPoint::new(&w11(), PointId::Generic, Convention::Concentrated);
        let h = h_function(1, 1, &p).unwrap();
        assert_eq!(h.eval(&q(1, 2)).unwrap(), q(1, 8));
    }

    #[test]
    fn h_p1_one_one() {
        let p = FlagPoint::new(&w11(), PointId::P1, Convention::Concentrated);
        let h = h_function(1, 1, &p).unwrap();
        assert_eq!(h.eval(&q(6, 5)).unwrap(), q(143, 200));
    }

    #[test]
    fn h_p2_split_one_one() {
        let p = FlagPoint::new(&w11(), PointId::P2, Convention::EqualSplit);
        let h = h_function(1, 1, &p).unwrap();
        let t = q(29, 20);
        let u = q(3, 1) - q(2, 1) * &t;
        let expected = q(6, 1) * &u * (q(5, 1) * &t - q(7, 1)) + q(18, 1) * &u * &u;
        assert_eq!(h.eval(&t).unwrap(), expected);
    }

    #[test]
    fn s_values_one_one() {
        let s = |id, c| s_value_point(1, 1, &FlagPoint::new(&w11(), id, c)).unwrap();
        assert_eq!(s(PointId::P1, Convention::Concentrated), q(149, 300));
        assert_eq!(s(PointId::Generic, Convention::Concentrated), q(13, 30));
        assert_eq!(s(PointId::P2, Convention::EqualSplit), q(133, 300));
        assert_eq!(s(PointId::P2, Convention::Concentrated), q(136, 300));
        assert_eq!(reference_s_form(PointId::P2).eval(&q(1, 1), &q(1, 1)).unwrap(), q(34, 75));
    }

    #[test]
    fn different_coefficients() {
        let w = Weights::new(8, 7).unwrap();
        assert_eq!(FlagPoint::new(&w, PointId::P1, Convention::Concentrated).different_coeff, q(6, 7));
        assert_eq!(FlagPoint::new(&w, PointId::P2, Convention::EqualSplit).different_coeff, q(7, 8));
        assert!(masses_conserved(&w, Convention::Concentrated));
        assert!(masses_conserved(&w, Convention::EqualSplit));
    }

    #[test]
    fn limits() {
        let d = default_direction();
        let cases = [
            (EntryId::P1, "(66+18*sqrt(3))/47", 0),
            (EntryId::P2, "(48+18*sqrt(3))/37", 0),
            (EntryId::P3, "(96+36*sqrt(3))/37", 1),
            (EntryId::Generic, "(96+36*sqrt(3))/37", 1),
            (EntryId::AOverS, "(66+48*sqrt(3))/71", 0),
        ];
        for (id, pretty, deg) in cases {
            let (v, h) = limit_entry(&entry_form(id), &d).unwrap();
            assert_eq!((v.pretty().as_str(), h), (pretty, deg), "{id}");
            assert_eq!(v, reference_limit(id));
        }
    }

    #[test]
    fn limits_ignore_direction_scale() {
        let d2 = (QuadExt::from(q(4, 1)), QuadExt::sqrt3(q(0, 1), q(2, 1)));
        for id in [EntryId::AOverS, EntryId::P1, EntryId::P2] {
            assert_eq!(
                limit_entry(&entry_form(id), &d2).unwrap().0,
                limit_entry(&entry_form(id), &default_direction()).unwrap().0
            );
        }
    }

    #[test]
    fn non_homogeneous_entry_rejected() {
        let f = FormRatio::new(&BiPoly::a() + &BiPoly::constant(q(1, 1)), BiPoly::b()).unwrap();
        assert!(matches!(limit_entry(&f, &default_direction()), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn closed_forms_against_integral() {
        for w in crate::lattice::chamber_pairs(20) {
            let rows = sample_rows(&w, &Convention::ALL).unwrap();
            for r in rows {
                let expect_match = matches!(
                    (r.point, r.convention),
                    (PointId::P1 | PointId::Generic, _) | (PointId::P2, Convention::Concentrated)
                );
                assert_eq!(r.flag == Flag::Match, expect_match, "{:?}", r);
            }
            assert_eq!(
                generic_s_from_volumes(w.a(), w.b()).unwrap(),
                reference_s_form(PointId::Generic).eval(&w.ar(), &w.br()).unwrap()
            );
        }
    }

    #[test]
    fn convergents_of_boundary() {
        let c = lower_convergents(&mu0(), 3000);
        assert_eq!(c, vec![(1, 1), (15, 13), (209, 181), (2911, 2521)]);
    }

    #[test]
    fn report_flags_claimed_minimum() {
        let r = theorem_report_with(&default_direction(), &Convention::ALL, 200).unwrap();
        assert_eq!(r.computed_min_entry, EntryId::P1);
        assert_eq!(quad_compare(&r.computed_min, &lambda()), Ordering::Less);
        let f = r.flags.iter().find(|f| f.subject == "claimed minimum").unwrap();
        assert_eq!(f.flag, Flag::FormulaMismatch);
    }
}
