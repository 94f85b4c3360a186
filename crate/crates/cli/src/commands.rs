//! One function per subcommand, each returning a [`ReportEnvelope`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use dpdelta::azflag::{
    default_direction, entry_form, generic_s_from_volumes, h_function, lambda, limit_entry, masses_conserved,
    sample_rows, theorem_report_with, Convention, EntryId, Flag, FlagPoint, FlagRecord, PointId,
};
use dpdelta::exactnum::{quad_compare, QuadExt, Rational};
use dpdelta::hjchain::{contraction_plan, multiplicity_of_d, reconcile_lengths, resolve, verify_selfint_lemmas};
use dpdelta::lattice::{chamber_pairs, log_discrepancy_e, Weights};
use dpdelta::svalues::{main_minimum, ratio_f, ratio_grid, s_value_e_detail, volume_profile};
use dpdelta::zariski::{closed_form, cross_validate, family_for};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::envelope::{shadow, ReportEnvelope, Table};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(dpdelta::Error),
}

impl CliError {
    /// 2 for bad input, 1 for anything that went wrong inside a computation.
    pub fn exit_code(&self) -> i32 {
        use dpdelta::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(
                E::InvalidWeights { .. } | E::ChamberViolation { .. } | E::Parse { .. } | E::Domain(_),
            ) => 2,
            CliError::Core(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dpdelta::Error> for CliError {
    fn from(e: dpdelta::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn params<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("exact types serialize")
}

fn check(failures: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

pub fn cmd_resolve(a: u64, b: u64) -> CliResult<ReportEnvelope> {
    let res = resolve(a, b)?;
    let lemmas = verify_selfint_lemmas(a, b)?;
    let plan = contraction_plan(a, b)?;
    let mult = multiplicity_of_d(a, b)?;
    let lengths = reconcile_lengths(a, b)?;
    let mut failures = Vec::new();
    check(&mut failures, lemmas.passed, || "self-intersection lemmas".into());
    check(&mut failures, plan.passed, || {
        format!("contraction plan: {}", plan.mismatch.as_deref().unwrap_or("final state"))
    });
    check(&mut failures, mult == Rational::from(2 * b), || format!("multiplicity of D is {mult}, expected {}", 2 * b));
    if let Err(m) = &lengths {
        failures.push(format!("chain lengths: {m}"));
    }
    let chain: Vec<Value> = res
        .chain_selfints
        .iter()
        .map(|(c, s)| json!({"curve": c, "self_int": s}))
        .collect();
    let discrepancies: Vec<Value> = res
        .log_discrepancies()
        .iter()
        .map(|(c, v)| json!({"curve": c, "log_discrepancy": v}))
        .collect();
    let results = json!({
        "a": res.a,
        "b": res.b,
        "i0": res.i0,
        "j0": res.j0,
        "p_chain": res.d_seq,
        "q_chain": res.c_seq,
        "chain": chain,
        "log_discrepancies": discrepancies,
        "lemmas": value(&lemmas),
        "contraction": {
            "order": plan.order,
            "count": plan.steps.len(),
            "expected_count": plan.expected_count,
            "final_curve": plan.final_curve,
            "final_self_int": plan.final_self_int,
            "final_anticanonical_square": plan.final_anticanonical_square,
            "adjunction_holds": plan.adjunction_holds,
            "passed": plan.passed,
        },
        "multiplicity_of_d": mult,
        "lengths_consistent": lengths.is_ok(),
    });
    Ok(ReportEnvelope::new("resolve", params([("a", a.to_string()), ("b", b.to_string())]), results)
        .with_failures(failures))
}

pub fn cmd_zariski(a: u64, b: u64, samples: usize) -> CliResult<ReportEnvelope> {
    let (config, z) = family_for(a, b)?;
    let cf = closed_form(a, b)?;
    let cv = cross_validate(&config, a, b, samples)?;
    let vol = volume_profile(a, b)?;
    let vchecks = vol.checks()?;
    let mut failures = Vec::new();
    check(&mut failures, z == cf, || "symbolic family differs from the closed form".into());
    failures.extend(cv.mismatches.iter().map(|m| format!("sample check: {m}")));
    check(&mut failures, vchecks.all(), || format!("volume checks: {vchecks:?}"));
    let regions: Vec<Value> = z
        .regions
        .iter()
        .map(|r| {
            let negative: BTreeMap<&String, String> =
                r.negative.coefficients.iter().map(|(c, p)| (c, p.to_string())).collect();
            json!({"lo": r.lo, "hi": r.hi, "support": r.support, "negative": negative})
        })
        .collect();
    let results = json!({
        "a": a,
        "b": b,
        "tau": z.tau,
        "breakpoints": z.breakpoints(),
        "regions": regions,
        "volume": vol.vol.pieces().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "restricted_volume": vol.vol_restricted.pieces().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "volume_checks": value(&vchecks),
        "samples_per_region": samples,
        "samples_checked": cv.samples.len(),
        "certificates_hold": cv.samples.iter().all(|s| s.certificate.holds()),
        "family_matches_closed_form": z == cf,
        "continuous_at_breakpoints": cv.continuous_at_breakpoints,
    });
    Ok(ReportEnvelope::new(
        "zariski",
        params([("a", a.to_string()), ("b", b.to_string()), ("samples", samples.to_string())]),
        results,
    )
    .with_failures(failures))
}

/// `lo:hi:n` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub lo: Rational,
    pub hi: Rational,
    pub n: usize,
}

impl std::str::FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("grid {s:?} is not lo:hi:n"));
        };
        let lo: Rational = lo.parse().map_err(|e| format!("{e}"))?;
        let hi: Rational = hi.parse().map_err(|e| format!("{e}"))?;
        let n: usize = n.parse().map_err(|_| format!("grid size {n:?} is not a count"))?;
        if n < 2 || lo >= hi || !lo.is_positive() {
            return Err(format!("grid {s:?} needs 0 < lo < hi and n >= 2"));
        }
        Ok(GridSpec { lo, hi, n })
    }
}

fn minimum_json() -> CliResult<(Value, Vec<String>)> {
    let m = main_minimum()?;
    let mut failures = Vec::new();
    check(&mut failures, ratio_f(&m.argmin)? == m.min, || "f(argmin) differs from the reported minimum".into());
    let v = json!({
        "interval": [m.lo, m.hi],
        "argmin": m.argmin,
        "argmin_pretty": m.argmin.pretty(),
        "min": m.min,
        "min_pretty": m.min.pretty(),
        "derivative_numerator": m.derivative_numerator.to_string(),
        "critical_points": m.critical_points,
        "certificate": m.certificate,
    });
    Ok((v, failures))
}

pub fn cmd_delta(pair: Option<(u64, u64)>, grid: Option<&GridSpec>, minimize: bool) -> CliResult<ReportEnvelope> {
    if pair.is_none() && grid.is_none() && !minimize {
        return Err(CliError::Usage("delta needs --a and --b, --grid, or --minimize".into()));
    }
    let mut parameters = BTreeMap::new();
    let mut results = serde_json::Map::new();
    let mut failures = Vec::new();
    let mut table = None;
    if let Some((a, b)) = pair {
        Weights::in_chamber(a, b)?;
        parameters.insert("a".into(), a.to_string());
        parameters.insert("b".into(), b.to_string());
        let s = s_value_e_detail(a, b)?;
        check(&mut failures, s.consistent(), || format!("S integrals disagree: {s:?}"));
        let big_a = log_discrepancy_e(a, b)?;
        let ratio = &big_a / &s.via_volume;
        results.insert(
            "pair".into(),
            json!({
                "a": a,
                "b": b,
                "s_value": s.via_volume,
                "s_value_restricted_form": s.via_restricted,
                "s_value_closed_form": s.closed_form,
                "log_discrepancy": big_a,
                "a_over_s": ratio,
            }),
        );
    }
    if let Some(g) = grid {
        parameters.insert("grid".into(), format!("{}:{}:{}", g.lo, g.hi, g.n));
        let rows = ratio_grid(&g.lo, &g.hi, g.n)?;
        let min_idx = (0..rows.len()).min_by(|&i, &j| rows[i].1.cmp(&rows[j].1)).expect("n >= 2");
        let json_rows: Vec<Value> = rows
            .iter()
            .enumerate()
            .map(|(i, (mu, f))| json!({"mu": mu, "f": f, "grid_min": i == min_idx}))
            .collect();
        results.insert("grid".into(), Value::Array(json_rows));
        table = Some(Table {
            header: ["mu", "f", "mu_decimal", "f_decimal", "grid_min"].map(String::from).to_vec(),
            rows: rows
                .iter()
                .enumerate()
                .map(|(i, (mu, f))| {
                    vec![
                        mu.to_string(),
                        f.to_string(),
                        shadow(mu.to_f64()),
                        shadow(f.to_f64()),
                        (i == min_idx).to_string(),
                    ]
                })
                .collect(),
        });
    }
    if minimize || grid.is_some() {
        let (m, f) = minimum_json()?;
        results.insert("minimum".into(), m);
        failures.extend(f);
    }
    if minimize {
        parameters.insert("minimize".into(), "true".into());
    }
    let env = ReportEnvelope::new("delta", parameters, Value::Object(results)).with_failures(failures);
    Ok(match table {
        Some(t) => env.with_table(t),
        None => env,
    })
}

pub fn cmd_svalues(a: u64, b: u64, conventions: &[Convention]) -> CliResult<ReportEnvelope> {
    let w = Weights::in_chamber(a, b)?;
    let rows = sample_rows(&w, conventions)?;
    let mut failures = Vec::new();
    let mut flags = Vec::new();
    for r in &rows {
        check(&mut failures, r.oracle_s.is_positive(), || format!("S({}) = {} is not positive", r.point, r.oracle_s));
        if r.flag != Flag::Match {
            flags.push(FlagRecord {
                subject: format!("S({}), {} masses", r.point, r.convention),
                flag: r.flag,
                detail: format!("integral gives {}, closed form gives {}", r.oracle_s, r.reference_s),
            });
        }
    }
    for &c in conventions {
        check(&mut failures, masses_conserved(&w, c), || format!("{c} masses do not add up to C.E"));
    }
    let generic = generic_s_from_volumes(a, b)?;
    let generic_row = rows.iter().find(|r| r.point == PointId::Generic).expect("generic row");
    check(&mut failures, generic == generic_row.oracle_s, || {
        format!("generic S from volumes {generic} differs from the h integral {}", generic_row.oracle_s)
    });
    let mut h = serde_json::Map::new();
    for &c in conventions {
        let mut per = serde_json::Map::new();
        for id in PointId::ALL {
            let hf = h_function(a, b, &FlagPoint::new(&w, id, c))?;
            per.insert(id.to_string(), json!(hf.pieces().iter().map(|p| p.to_string()).collect::<Vec<_>>()));
        }
        h.insert(c.to_string(), Value::Object(per));
    }
    let s_e = s_value_e_detail(a, b)?;
    let results = json!({
        "a": a,
        "b": b,
        "s_value_e": s_e.via_volume,
        "a_over_s": log_discrepancy_e(a, b)? / &s_e.via_volume,
        "points": value(&rows),
        "h_pieces": h,
        "generic_s_from_volumes": generic,
    });
    let label = conventions.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
    Ok(ReportEnvelope::new(
        "svalues",
        params([("a", a.to_string()), ("b", b.to_string()), ("convention", label)]),
        results,
    )
    .with_flags(flags)
    .with_failures(failures))
}

#[derive(Clone, Debug, Serialize)]
pub struct PairOutcome {
    pub a: u64,
    pub b: u64,
    pub s_value: Option<Rational>,
    pub a_over_s: Option<Rational>,
    pub checks: BTreeMap<&'static str, bool>,
    pub failures: Vec<String>,
}

fn verify_pair(w: &Weights) -> PairOutcome {
    let (a, b) = (w.a(), w.b());
    let mut checks = BTreeMap::new();
    let mut failures = Vec::new();
    let mut record = |name: &'static str, r: dpdelta::Result<bool>| {
        let ok = match r {
            Ok(ok) => ok,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                false
            }
        };
        if !ok && !failures.iter().any(|f| f.starts_with(name)) {
            failures.push(name.to_string());
        }
        checks.insert(name, ok);
    };
    record("resolution", dpdelta::hjchain::check_pair(a, b).map(|_| true));
    record("zariski_closed_form", (|| Ok(family_for(a, b)?.1 == closed_form(a, b)?))());
    record("zariski_samples", (|| {
        let (config, _) = family_for(a, b)?;
        Ok(cross_validate(&config, a, b, 3)?.passed())
    })());
    record("volume", (|| Ok(volume_profile(a, b)?.checks()?.all()))());
    let s = s_value_e_detail(a, b);
    record("s_value", s.clone().map(|s| s.consistent()));
    record("refinement", (|| {
        let mut ok = Convention::ALL.iter().all(|&c| masses_conserved(w, c));
        let rows = sample_rows(w, &Convention::ALL)?;
        ok &= rows.iter().all(|r| r.oracle_s.is_positive());
        let generic = generic_s_from_volumes(a, b)?;
        ok &= rows.iter().filter(|r| r.point == PointId::Generic).all(|r| r.oracle_s == generic);
        Ok(ok)
    })());
    let s_value = s.ok().map(|s| s.via_volume);
    let a_over_s = s_value.as_ref().map(|s| Rational::from(a + b) / s);
    PairOutcome {
        a,
        b,
        s_value,
        a_over_s,
        checks,
        failures,
    }
}

pub fn cmd_verify(max: u64) -> CliResult<ReportEnvelope> {
    if max < 2 {
        return Err(CliError::Usage(format!("--max must be at least 2, got {max}")));
    }
    let pairs = chamber_pairs(max);
    // rayon keeps the input order when collecting
    let outcomes: Vec<PairOutcome> = pairs.par_iter().map(verify_pair).collect();
    let mut failures: Vec<String> = outcomes
        .iter()
        .flat_map(|o| o.failures.iter().map(move |f| format!("({}, {}): {f}", o.a, o.b)))
        .collect();
    let (minimum, min_failures) = minimum_json()?;
    failures.extend(min_failures);
    let mut degrees = BTreeMap::new();
    let mut flags = Vec::new();
    for id in EntryId::ALL {
        let (_, d) = limit_entry(&entry_form(id), &default_direction())?;
        degrees.insert(id.to_string(), d);
        if d != 0 {
            flags.push(FlagRecord {
                subject: format!("limit of {id}"),
                flag: Flag::DivergesAlongSequences,
                detail: format!("entry is homogeneous of degree {d}"),
            });
        }
    }
    let table = Table {
        header: ["a", "b", "s_value", "a_over_s", "passed"].map(String::from).to_vec(),
        rows: outcomes
            .iter()
            .map(|o| {
                let opt = |x: &Option<Rational>| x.as_ref().map(|r| r.to_string()).unwrap_or_default();
                vec![
                    o.a.to_string(),
                    o.b.to_string(),
                    opt(&o.s_value),
                    opt(&o.a_over_s),
                    o.failures.is_empty().to_string(),
                ]
            })
            .collect(),
    };
    let results = json!({
        "max": max,
        "pair_count": outcomes.len(),
        "pairs_passed": outcomes.iter().filter(|o| o.failures.is_empty()).count(),
        "pairs": value(&outcomes),
        "minimum": minimum,
        "homogeneity_degrees": degrees,
    });
    Ok(ReportEnvelope::new("verify", params([("max", max.to_string())]), results)
        .with_flags(flags)
        .with_failures(failures)
        .with_table(table))
}

/// Values of `delta_p` in the other cases of the classification, with the
/// conditions on `p`.
pub const REFERENCE_TABLE: [(u8, &str, Option<&str>); 9] = [
    (1, "blowing up p gives a del Pezzo surface of degree 1", Some("36/17")),
    (2, "p on the ramification quartic, C_p irreducible nodal", Some("2")),
    (3, "p on the ramification quartic, C_p irreducible cuspidal", Some("15/8")),
    (4, "p on the ramification quartic, C_p two (-1)-curves meeting transversally", Some("2")),
    (5, "p on the ramification quartic, C_p two (-1)-curves tangent at p", Some("9/5")),
    (6, "p off the ramification quartic, on exactly one (-1)-curve", None),
    (7, "p off the ramification quartic, on two (-1)-curves", Some("48/23")),
    (8, "p off the ramification quartic, on three (-1)-curves", Some("72/35")),
    (9, "p a generalized Eckardt point", Some("2")),
];

pub const CASE6_BRACKET: (&str, &str) = ("60/31", "40/19");

pub fn cmd_report(conventions: &[Convention]) -> CliResult<ReportEnvelope> {
    let report = theorem_report_with(&default_direction(), conventions, 3000)?;
    let (minimum, mut failures) = minimum_json()?;
    let lam = lambda();
    let lo: Rational = CASE6_BRACKET.0.parse()?;
    let hi: Rational = CASE6_BRACKET.1.parse()?;
    let in_bracket = quad_compare(&QuadExt::from(lo.clone()), &lam) == Ordering::Less
        && quad_compare(&lam, &QuadExt::from(hi.clone())) == Ordering::Less;
    check(&mut failures, in_bracket, || format!("{} is outside [{lo}, {hi}]", lam.pretty()));
    check(&mut failures, main_minimum()?.min == lam, || "computed minimum of A/S differs from lambda".into());
    let table: Vec<Value> = REFERENCE_TABLE
        .iter()
        .map(|(case, condition, v)| match v {
            Some(v) => json!({"case": case, "condition": condition, "delta": v}),
            None => json!({"case": case, "condition": condition, "lower": lo, "upper": hi, "computed": lam}),
        })
        .collect();
    let label = conventions.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
    let results = json!({
        "lambda": lam,
        "lambda_pretty": lam.pretty(),
        "case6_bracket": {"lower": lo, "upper": hi, "lambda_inside": in_bracket},
        "reference_table": table,
        "minimum": minimum,
        "svalue_report": value(&report),
    });
    Ok(ReportEnvelope::new("report", params([("convention", label)]), results)
        .with_flags(report.flags.clone())
        .with_failures(failures))
}
