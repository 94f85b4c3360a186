//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

use std::cmp::Ordering;
use std::process::{Command, ExitCode};
use std::time::Instant;

use dpdelta::azflag::{
    default_direction, entry_form, h_function, limit_entry, s_value_point, reference_s_form, theorem_report, Convention,
    EntryId, Flag, FlagPoint, PointId,
};
use dpdelta::exactnum::{quad_compare, QuadExt, Rational};
use dpdelta::hjchain::{contraction_plan, multiplicity_of_d, verify_selfint_lemmas};
use dpdelta::lattice::{chamber_pairs, Weights};
use dpdelta::svalues::{main_minimum, mu0, ratio_f, s_value_e_detail, volume_profile};
use dpdelta::zariski::{cross_validate, family_for};
use dpdelta_cli::commands::cmd_report;
use num_integer::Integer;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// `(p/q)(r + s sqrt(3))`.
fn scaled(p: i64, qd: i64, r: i64, s: i64) -> QuadExt {
    QuadExt::sqrt3(q(p * r, qd), q(p * s, qd))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ac1() -> Outcome {
    let pairs = chamber_pairs(50);
    for w in &pairs {
        let s = s_value_e_detail(w.a(), w.b()).map_err(|e| e.to_string())?;
        let (a, b) = (w.ar(), w.br());
        let expected = (q(15, 1) * &a * &a + q(34, 1) * &a * &b + q(8, 1) * &b * &b)
            / (q(12, 1) * (q(3, 1) * &a + q(2, 1) * &b));
        ensure(s.via_volume == expected, || format!("{w}: integral {} vs {expected}", s.via_volume))?;
        ensure(s.via_restricted == s.via_volume, || format!("{w}: integral forms disagree"))?;
    }
    ensure(pairs.contains(&Weights::new(1, 1).unwrap()), || "(1, 1) missing".into())?;
    Ok(format!("{} pairs", pairs.len()))
}

fn ac2() -> Outcome {
    let m = main_minimum().map_err(|e| e.to_string())?;
    let lambda = scaled(6, 71, 11, 8);
    ensure(m.argmin == mu0(), || format!("argmin {}", m.argmin))?;
    ensure(m.argmin == QuadExt::sqrt3(q(0, 1), q(2, 3)), || "argmin is not 2/sqrt(3)".into())?;
    ensure(m.min == lambda, || format!("min {}", m.min))?;
    ensure(m.certificate.starts_with("f' < 0 on the interval"), || m.certificate.clone())?;
    let f = |x: Rational| ratio_f(&x).map_err(|e| e.to_string());
    ensure(f(q(1, 1))? == q(40, 19), || "f(1) != 40/19".into())?;
    ensure(f(q(2, 3))? == q(15, 7), || "f(2/3) != 15/7".into())?;
    let lo = QuadExt::from(q(60, 31));
    let hi = QuadExt::from(q(40, 19));
    ensure(
        quad_compare(&lo, &lambda) == Ordering::Less && quad_compare(&lambda, &hi) == Ordering::Less,
        || "lambda outside (60/31, 40/19)".into(),
    )?;
    Ok(format!("min {} at {}", m.min.pretty(), m.argmin.pretty()))
}

fn ac3() -> Outcome {
    let mut count = 0;
    for a in 2..=200u64 {
        for b in (1..a).filter(|b| a.gcd(b) == 1) {
            let l = verify_selfint_lemmas(a, b).map_err(|e| e.to_string())?;
            ensure(l.chain_ends_at_one, || format!("({a}, {b}): d_i0 or c_j0 is not 1"))?;
            ensure(l.after_p_side == l.expected_after_p_side, || format!("({a}, {b}): E^2 after p side"))?;
            ensure(l.expected_after_p_side == -Rational::integer(resolve_mu(a, b)) / Rational::from(a), || {
                format!("({a}, {b}): -mu/a")
            })?;
            ensure(l.after_q_side == Rational::integer(-1), || format!("({a}, {b}): E^2 = {}", l.after_q_side))?;
            ensure(l.determinant == 1, || format!("({a}, {b}): determinant {}", l.determinant))?;
            let m = multiplicity_of_d(a, b).map_err(|e| e.to_string())?;
            ensure(m == Rational::from(2 * b), || format!("({a}, {b}): multiplicity {m}"))?;
            let p = contraction_plan(a, b).map_err(|e| e.to_string())?;
            ensure(p.passed, || format!("({a}, {b}): plan {:?}", p.mismatch))?;
            ensure(p.steps.iter().all(|s| s.self_int == Rational::integer(-1)), || {
                format!("({a}, {b}): contracted a curve that is not a (-1)-curve")
            })?;
            ensure(p.final_self_int == Some(Rational::integer(-1)), || format!("({a}, {b}): final curve"))?;
            count += 1;
        }
    }
    Ok(format!("{count} pairs"))
}

fn resolve_mu(a: u64, b: u64) -> i64 {
    let r = dpdelta::hjchain::resolve(a, b).unwrap();
    r.mu(r.i0)
}

fn ac4() -> Outcome {
    let mut samples = 0;
    let pairs = chamber_pairs(30);
    for w in &pairs {
        let (a, b) = (w.a(), w.b());
        let (config, z) = family_for(a, b).map_err(|e| e.to_string())?;
        let cv = cross_validate(&config, a, b, 20).map_err(|e| e.to_string())?;
        ensure(cv.passed(), || format!("{w}: {:?}", cv.mismatches))?;
        ensure(cv.family_matches_closed_form, || format!("{w}: family differs from closed form"))?;
        for s in &cv.samples {
            ensure(s.certificate.holds() && s.matches_closed_form, || format!("{w}: t = {}", s.t))?;
        }
        ensure(cv.samples.len() == 20 * z.regions.len(), || format!("{w}: {} samples", cv.samples.len()))?;
        samples += cv.samples.len();
        let v = volume_profile(a, b).map_err(|e| e.to_string())?;
        for t in &z.breakpoints()[1..z.breakpoints().len() - 1] {
            let i = z.regions.iter().position(|r| &r.hi == t).unwrap();
            let (l, r) = (v.vol.pieces()[i].eval(t), v.vol.pieces()[i + 1].eval(t));
            ensure(l == r, || format!("{w}: vol jumps at {t}"))?;
        }
        ensure(v.vol.eval(&v.tau).unwrap().is_zero(), || format!("{w}: vol(tau) != 0"))?;
        ensure(v.vol.eval(&q(0, 1)).unwrap() == q(2, 1), || format!("{w}: vol(0) != 2"))?;
    }
    Ok(format!("{} pairs, {samples} samples", pairs.len()))
}

fn ac5() -> Outcome {
    let w = Weights::new(1, 1).unwrap();
    let s = |id, c| s_value_point(1, 1, &FlagPoint::new(&w, id, c)).map_err(|e| e.to_string());
    let cases = [
        (PointId::P1, Convention::Concentrated, q(149, 300)),
        (PointId::Generic, Convention::Concentrated, q(13, 30)),
        (PointId::P2, Convention::EqualSplit, q(133, 300)),
        (PointId::P2, Convention::Concentrated, q(136, 300)),
    ];
    for (id, c, expected) in cases {
        let got = s(id, c)?;
        ensure(got == expected, || format!("S({id}), {c}: {got}"))?;
        let h = h_function(1, 1, &FlagPoint::new(&w, id, c)).map_err(|e| e.to_string())?;
        ensure(h.integrate_all() == expected, || format!("S({id}), {c}: integral of h"))?;
    }
    let closed = reference_s_form(PointId::P2).eval(&q(1, 1), &q(1, 1)).map_err(|e| e.to_string())?;
    ensure(closed == q(34, 75) && closed == q(136, 300), || format!("closed form {closed}"))?;
    Ok("149/300, 13/30, 133/300, 136/300".into())
}

fn ac6() -> Outcome {
    let cases = [
        (EntryId::P1, scaled(6, 47, 11, 3), 0),
        (EntryId::P2, scaled(6, 37, 8, 3), 0),
        (EntryId::P3, scaled(12, 37, 8, 3), 1),
        (EntryId::Generic, scaled(12, 37, 8, 3), 1),
        (EntryId::AOverS, scaled(6, 71, 11, 8), 0),
    ];
    let mut shown = Vec::new();
    for (id, expected, degree) in cases {
        let (v, d) = limit_entry(&entry_form(id), &default_direction()).map_err(|e| e.to_string())?;
        ensure(v == expected, || format!("{id}: {v}"))?;
        ensure(v.to_string() == expected.to_string(), || format!("{id}: not canonical"))?;
        ensure(d == degree, || format!("{id}: degree {d}"))?;
        shown.push(format!("{id} {} (deg {d})", v.pretty()));
    }
    Ok(shown.join(", "))
}

fn ac7() -> Outcome {
    let p1 = scaled(6, 47, 11, 3);
    let lambda = scaled(6, 71, 11, 8);
    ensure(quad_compare(&p1, &lambda) == Ordering::Less, || "P1 limit is not below lambda".into())?;
    let r = theorem_report(&default_direction()).map_err(|e| e.to_string())?;
    ensure(r.computed_min == p1, || format!("computed min {}", r.computed_min))?;
    let flag = r
        .flags
        .iter()
        .find(|f| f.subject == "claimed minimum")
        .ok_or("no flag on the claimed minimum")?;
    ensure(flag.flag == Flag::FormulaMismatch, || format!("flag {}", flag.flag))?;
    let env = cmd_report(&Convention::ALL).map_err(|e| e.to_string())?;
    ensure(env.passed(), || format!("report failed: {:?}", env.failures))?;
    let json = env.to_json();
    ensure(json.contains("\"FORMULA-MISMATCH\"") && json.contains("claimed minimum"), || {
        "flag missing from JSON".into()
    })?;
    let out = Command::new(env!("CARGO_BIN_EXE_dpdelta")).args(["report", "--json"]).output();
    let out = out.map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("report exited with {}", out.status))?;
    Ok(format!("{} < {}", p1.pretty(), lambda.pretty()))
}

fn ac8() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_dpdelta"))
            .args(["verify", "--max", "50", "--json"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (x, y) = (run()?, run()?);
    ensure(x.status.success() && y.status.success(), || format!("exit {} / {}", x.status, y.status))?;
    ensure(!x.stdout.is_empty() && x.stdout == y.stdout, || "payloads differ".into())?;
    Ok(format!("{} bytes", x.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1 exact S-formula over the chamber, a <= 50", ac1),
        ("AC2 minimum of A/S on [2/3, 2/sqrt(3)]", ac2),
        ("AC3 resolution lemmas, b < a <= 200", ac3),
        ("AC4 Zariski certificates, a <= 30", ac4),
        ("AC5 refinement anchors at (1, 1)", ac5),
        ("AC6 exact limits along (2, sqrt(3))", ac6),
        ("AC7 P1 limit below lambda is flagged", ac7),
        ("AC8 verify --max 50 --json is deterministic", ac8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let r = f();
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.2}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} [{secs:.2}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
