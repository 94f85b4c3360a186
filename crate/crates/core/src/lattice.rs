//! Intersection data of the `(a, b)` weighted blowup and blowdown bookkeeping.
//!
//! A [`SurfaceConfig`] is a list of named classes with a symmetric rational
//! intersection matrix. Classes need not be curves: the resolved surface carries
//! the pullback of `-K_X` as an extra row so that it survives contractions.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{Poly, Rational};

pub const E: &str = "E";
pub const L_TILDE: &str = "L~";
pub const D_TILDE: &str = "D~";

/// Anticanonical degree of the del Pezzo surface.
pub const ANTICANONICAL_DEGREE: i64 = 2;

/// A coprime pair of positive weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Weights {
    a: u64,
    b: u64,
}

impl Weights {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::InvalidWeights {
                a,
                b,
                reason: "weights must be positive".into(),
            });
        }
        if a.gcd(&b) != 1 {
            return Err(Error::InvalidWeights {
                a,
                b,
                reason: format!("gcd is {}", a.gcd(&b)),
            });
        }
        Ok(Weights { a, b })
    }

    /// Coprime weights with `b <= a` and `4b^2 > 3a^2`.
    pub fn in_chamber(a: u64, b: u64) -> Result<Self> {
        let w = Weights::new(a, b)?;
        if !w.is_chamber() {
            return Err(Error::ChamberViolation { a, b });
        }
        Ok(w)
    }

    /// Coprime weights with `b < a`, or `(1, 1)`.
    pub fn ordered(a: u64, b: u64) -> Result<Self> {
        let w = Weights::new(a, b)?;
        if b > a {
            return Err(Error::InvalidWeights {
                a,
                b,
                reason: "expected b <= a".into(),
            });
        }
        Ok(w)
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn ar(&self) -> Rational {
        Rational::from(self.a)
    }

    pub fn br(&self) -> Rational {
        Rational::from(self.b)
    }

    pub fn is_chamber(&self) -> bool {
        let (a, b) = (self.a as u128, self.b as u128);
        b <= a && 4 * b * b > 3 * a * a
    }

    /// Pseudoeffective threshold `(a + 2b)/2` of the anticanonical family.
    pub fn tau(&self) -> Rational {
        Rational::new((self.a + 2 * self.b) as i64, 2)
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// Every coprime pair with `b <= a <= max` inside the chamber, ordered by `(a, b)`.
pub fn chamber_pairs(max: u64) -> Vec<Weights> {
    (1..=max)
        .flat_map(|a| (1..=a).map(move |b| (a, b)))
        .filter_map(|(a, b)| Weights::in_chamber(a, b).ok())
        .collect()
}

/// Named classes with a symmetric intersection form, stored sparsely: each row
/// keeps only the nonzero pairings of one class, its self-intersection included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "DenseConfig", try_from = "DenseConfig")]
pub struct SurfaceConfig {
    curves: Vec<String>,
    rows: BTreeMap<String, BTreeMap<String, Rational>>,
}

/// JSON form: curve names and the full matrix.
#[derive(Serialize, Deserialize)]
struct DenseConfig {
    curves: Vec<String>,
    gram: Vec<Vec<Rational>>,
}

impl From<SurfaceConfig> for DenseConfig {
    fn from(c: SurfaceConfig) -> Self {
        DenseConfig {
            gram: c.gram(),
            curves: c.curves,
        }
    }
}

impl TryFrom<DenseConfig> for SurfaceConfig {
    type Error = Error;
    fn try_from(d: DenseConfig) -> Result<Self> {
        SurfaceConfig::new(d.curves, d.gram)
    }
}

impl SurfaceConfig {
    pub fn new(curves: Vec<String>, gram: Vec<Vec<Rational>>) -> Result<Self> {
        let n = curves.len();
        if gram.len() != n || gram.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidConfig(format!("gram must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidConfig(format!(
                        "gram not symmetric at ({}, {})",
                        curves[i], curves[j]
                    )));
                }
            }
        }
        let mut config = SurfaceConfig::empty(curves)?;
        for (i, row) in gram.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    config.set_entry(i, j, v.clone());
                }
            }
        }
        Ok(config)
    }

    fn empty(curves: Vec<String>) -> Result<Self> {
        let mut rows = BTreeMap::new();
        for c in &curves {
            if rows.insert(c.clone(), BTreeMap::new()).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate curve {c:?}")));
            }
        }
        Ok(SurfaceConfig { curves, rows })
    }

    fn set_entry(&mut self, i: usize, j: usize, v: Rational) {
        let (x, y) = (self.curves[i].clone(), self.curves[j].clone());
        self.set(&x, &y, v);
    }

    /// Sets `x.y` and `y.x`; zero removes the entry.
    fn set(&mut self, x: &str, y: &str, v: Rational) {
        for (p, q) in [(x, y), (y, x)] {
            let row = self.rows.get_mut(p).expect("known curve");
            if v.is_zero() {
                row.remove(q);
            } else {
                row.insert(q.to_string(), v.clone());
            }
        }
    }

    /// Builds a config from self-intersections and a list of nonzero pairings.
    pub fn from_pairs(
        selfints: &[(String, Rational)],
        pairs: &[(String, String, Rational)],
    ) -> Result<Self> {
        let mut config = SurfaceConfig::empty(selfints.iter().map(|(n, _)| n.clone()).collect())?;
        for (n, s) in selfints {
            config.set(n, n, s.clone());
        }
        for (x, y, v) in pairs {
            config.index(x)?;
            config.index(y)?;
            config.set(x, y, v.clone());
        }
        Ok(config)
    }

    pub fn curves(&self) -> &[String] {
        &self.curves
    }

    /// Dense intersection matrix in curve order.
    pub fn gram(&self) -> Vec<Vec<Rational>> {
        self.submatrix(&self.curves).expect("own curves")
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.rows.contains_key(name)
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.curves
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownCurve(name.to_string()))
    }

    fn row(&self, name: &str) -> Result<&BTreeMap<String, Rational>> {
        self.rows
            .get(name)
            .ok_or_else(|| Error::UnknownCurve(name.to_string()))
    }

    pub fn intersect(&self, x: &str, y: &str) -> Result<Rational> {
        self.row(y)?;
        Ok(self.row(x)?.get(y).cloned().unwrap_or_else(Rational::zero))
    }

    pub fn self_int(&self, x: &str) -> Result<Rational> {
        self.intersect(x, x)
    }

    /// Classes meeting `x` with nonzero intersection, `x` itself excluded.
    pub fn neighbors(&self, x: &str) -> Result<Vec<(String, Rational)>> {
        Ok(self
            .row(x)?
            .iter()
            .filter(|(n, _)| n.as_str() != x)
            .map(|(n, v)| (n.clone(), v.clone()))
            .collect())
    }

    /// Constant divisor pairing.
    pub fn dot(&self, x: &DivisorExpr, y: &DivisorExpr) -> Result<Rational> {
        Ok(self.dot_poly(x, y)?.coeff(0))
    }

    /// Pairing of two families; the result is a polynomial in the family parameter.
    pub fn dot_poly(&self, x: &DivisorExpr, y: &DivisorExpr) -> Result<Poly> {
        for cy in y.coefficients.keys() {
            self.row(cy)?;
        }
        let mut out = Poly::zero();
        for (cx, px) in &x.coefficients {
            for (cy, v) in self.row(cx)? {
                if let Some(py) = y.coefficients.get(cy) {
                    out = &out + &(px * py).scale(v);
                }
            }
        }
        Ok(out)
    }

    /// Pairing at a fixed parameter value.
    pub fn dot_at(&self, x: &DivisorExpr, y: &DivisorExpr, t: &Rational) -> Result<Rational> {
        Ok(self.dot_poly(x, y)?.eval(t))
    }

    /// The submatrix on `names`, in the given order.
    pub fn submatrix(&self, names: &[String]) -> Result<Vec<Vec<Rational>>> {
        names
            .iter()
            .map(|x| names.iter().map(|y| self.intersect(x, y)).collect())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// A rational combination of named classes, with coefficients polynomial in a
/// family parameter `t`. Constant divisors have constant coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DivisorExpr {
    pub coefficients: BTreeMap<String, Poly>,
}

impl DivisorExpr {
    pub fn zero() -> Self {
        DivisorExpr::default()
    }

    pub fn curve(name: &str) -> Self {
        DivisorExpr::zero().with(name, Poly::constant(Rational::one()))
    }

    pub fn from_constants<'a, I: IntoIterator<Item = (&'a str, Rational)>>(terms: I) -> Self {
        terms
            .into_iter()
            .fold(DivisorExpr::zero(), |d, (n, c)| d.with(n, Poly::constant(c)))
    }

    /// Adds `p * name`.
    pub fn with(mut self, name: &str, p: Poly) -> Self {
        let entry = self.coefficients.entry(name.to_string()).or_default();
        *entry = &*entry + &p;
        if entry.is_zero() {
            self.coefficients.remove(name);
        }
        self
    }

    pub fn coeff(&self, name: &str) -> Poly {
        self.coefficients.get(name).cloned().unwrap_or_default()
    }

    pub fn coeff_at(&self, name: &str, t: &Rational) -> Rational {
        self.coeff(name).eval(t)
    }

    /// Specializes the family at `t`.
    pub fn at(&self, t: &Rational) -> DivisorExpr {
        self.coefficients
            .iter()
            .fold(DivisorExpr::zero(), |d, (n, p)| d.with(n, Poly::constant(p.eval(t))))
    }

    pub fn support(&self) -> Vec<String> {
        self.coefficients.keys().cloned().collect()
    }

    pub fn scale(&self, c: &Rational) -> DivisorExpr {
        self.coefficients
            .iter()
            .fold(DivisorExpr::zero(), |d, (n, p)| d.with(n, p.scale(c)))
    }

    pub fn add(&self, other: &DivisorExpr) -> DivisorExpr {
        other
            .coefficients
            .iter()
            .fold(self.clone(), |d, (n, p)| d.with(n, p.clone()))
    }

    pub fn sub(&self, other: &DivisorExpr) -> DivisorExpr {
        self.add(&other.scale(&Rational::integer(-1)))
    }

    /// Drops a class, as when pushing forward along its contraction.
    pub fn without(&self, name: &str) -> DivisorExpr {
        let mut d = self.clone();
        d.coefficients.remove(name);
        d
    }
}

impl fmt::Display for DivisorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coefficients
            .iter()
            .map(|(n, p)| format!("[{p}]*{n}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The weighted blowup surface with curves `E`, `L~`, `D~`.
pub fn build_wbu_config(a: u64, b: u64) -> Result<SurfaceConfig> {
    let w = Weights::in_chamber(a, b)?;
    Ok(wbu_config(&w))
}

/// Intersection data for any coprime weights, without the chamber check. Outside
/// the chamber the numbers are still meaningful but the Zariski chambers of the
/// anticanonical family change shape.
pub fn wbu_config(w: &Weights) -> SurfaceConfig {
    let (a, b) = (w.ar(), w.br());
    let one = Rational::one();
    SurfaceConfig::from_pairs(
        &[
            (E.into(), -(&a * &b).recip().expect("positive")),
            (L_TILDE.into(), -(&a + &b) / &b),
            (D_TILDE.into(), Rational::integer(3) - Rational::integer(4) * &b / &a),
        ],
        &[
            (L_TILDE.into(), E.into(), one.clone() / &b),
            (D_TILDE.into(), E.into(), Rational::integer(2) / &a),
            (D_TILDE.into(), L_TILDE.into(), one),
        ],
    )
    .expect("well-formed")
}

/// `1/2 L~ + 1/2 D~ + ((a+2b)/2 - t) E`, the pullback of `-K_X` minus `tE`.
pub fn anticanonical_family(config: &SurfaceConfig, a: u64, b: u64) -> Result<DivisorExpr> {
    let w = Weights::new(a, b)?;
    for c in [E, L_TILDE, D_TILDE] {
        config.index(c)?;
    }
    let half = Rational::new(1, 2);
    Ok(DivisorExpr::zero()
        .with(L_TILDE, Poly::constant(half.clone()))
        .with(D_TILDE, Poly::constant(half))
        .with(E, Poly::linear(w.tau(), Rational::integer(-1))))
}

pub fn log_discrepancy_e(a: u64, b: u64) -> Result<Rational> {
    let w = Weights::new(a, b)?;
    Ok(w.ar() + w.br())
}

/// Contracts the (-1)-class `curve`: `C.C' += (C.X)(C'.X)` for the rest.
pub fn blowdown_update(config: &SurfaceConfig, curve: &str) -> Result<SurfaceConfig> {
    let s = config.self_int(curve)?;
    if s != Rational::integer(-1) {
        return Err(Error::NotContractible {
            curve: curve.to_string(),
            self_int: s.to_string(),
        });
    }
    let near = config.neighbors(curve)?;
    let mut out = config.clone();
    out.curves.retain(|c| c != curve);
    out.rows.remove(curve);
    for (c, _) in &near {
        out.rows.get_mut(c).expect("neighbor").remove(curve);
    }
    for (k, (c, cx)) in near.iter().enumerate() {
        for (c2, c2x) in &near[k..] {
            let v = out.intersect(c, c2)? + cx * c2x;
            out.set(c, c2, v);
        }
    }
    Ok(out)
}

/// The weighted blowup with its anticanonical family.
#[derive(Clone, Debug, Serialize)]
pub struct WeightedBlowup {
    pub weights: Weights,
    pub config: SurfaceConfig,
    pub family: DivisorExpr,
    pub tau: Rational,
    pub log_discrepancy: Rational,
}

impl WeightedBlowup {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        Ok(WeightedBlowup::from_weights(Weights::in_chamber(a, b)?))
    }

    /// No chamber check.
    pub fn from_weights(weights: Weights) -> Self {
        let (a, b) = (weights.a(), weights.b());
        let config = wbu_config(&weights);
        let family = anticanonical_family(&config, a, b).expect("config has E, L~, D~");
        WeightedBlowup {
            weights,
            tau: weights.tau(),
            log_discrepancy: weights.ar() + weights.br(),
            config,
            family,
        }
    }

    pub fn a(&self) -> u64 {
        self.weights.a()
    }

    pub fn b(&self) -> u64 {
        self.weights.b()
    }

    /// Pullback of `-K_X`.
    pub fn pullback_anticanonical(&self) -> DivisorExpr {
        self.family.at(&Rational::zero())
    }
}
