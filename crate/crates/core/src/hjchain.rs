//! Hirzebruch-Jung resolution of the two quotient singularities on `E`.
//!
//! For weights `b < a` the weighted blowup has a point of index `b` on `L~`
//! (the p-side) and a point of index `a` on `D~` (the q-side). Resolving both
//! gives a chain
//!
//! ```text
//! L - E1 - ... - E{i0} - E - F{j0} - ... - F1 - D
//! ```
//!
//! with `D` meeting `F1` twice and `L.D = 1`. Contracting every curve except
//! `F1` lands on the ordinary blowup of the point.
//!
//! The ceiling recursion ([`resolve`]) and the continued-fraction profile
//! ([`cf_profile`]) are computed independently and reconciled.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{solve, Rational};
use crate::lattice::{blowdown_update, DivisorExpr, SurfaceConfig, Weights};

pub const L_BAR: &str = "L";
pub const D_BAR: &str = "D";
pub const E_BAR: &str = "E";
/// Pullback of `-K_X`; not a curve, carried along so contractions update it.
pub const H: &str = "H";

pub fn e_name(k: usize) -> String {
    format!("E{k}")
}

pub fn f_name(k: usize) -> String {
    format!("F{k}")
}

/// Division chain `b = delta*i + g0`, `delta = g0*j + g1`,
/// `g_k = g_{k+1} j_{k+1} + g_{k+2}`, stopped at the first `g` equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CfProfile {
    pub a: u64,
    pub b: u64,
    pub delta: u64,
    pub i: u64,
    /// `None` when `g0 = 0`, which happens exactly for `delta = 1`.
    pub j: Option<u64>,
    pub j_list: Vec<u64>,
    pub gamma_list: Vec<u64>,
    pub k0: Option<usize>,
    /// `so[n] = j_1 + j_3 + ... + j_{2n-1}`, for every `n` with `2n - 1 <= k0`.
    pub so: Vec<u64>,
    /// `se[n] = j_2 + j_4 + ... + j_{2n}`, for every `n` with `2n <= k0`.
    pub se: Vec<u64>,
    pub trivial: bool,
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    P,
    Q,
}

impl CfProfile {
    /// Rebuilds `(a, b)` from the profile alone.
    pub fn reconstruct(&self) -> (u64, u64) {
        if self.trivial {
            return (1, 1);
        }
        let Some(j) = self.j else {
            let b = self.delta * self.i;
            return (b + self.delta, b);
        };
        let (g0, g1) = match self.k0 {
            Some(0) => (1, 0),
            _ => {
                // walk back from g_{k0} = 1, g_{k0+1} = 0
                let mut next = 0u64;
                let mut cur = 1u64;
                for jk in self.j_list.iter().rev() {
                    let prev = cur * jk + next;
                    next = cur;
                    cur = prev;
                }
                (cur, next)
            }
        };
        let delta = g0 * j + g1;
        let b = delta * self.i + g0;
        (b + delta, b)
    }

    /// `a/b = [1; i, j, j_1, ..., j_k0]` as alternating runs of p-side and
    /// q-side curves, in the order the ordinary blowups create them, with the
    /// last run shortened by one. The curve `F1` and the final `E` are not
    /// included.
    pub fn runs(&self) -> Vec<(Side, u64)> {
        if self.trivial {
            return Vec::new();
        }
        let mut quotients = vec![self.i];
        if let Some(j) = self.j {
            quotients.push(j);
            quotients.extend(&self.j_list);
        }
        let last = quotients.len() - 1;
        quotients[last] -= 1;
        quotients
            .iter()
            .enumerate()
            .map(|(k, &len)| (if k % 2 == 0 { Side::P } else { Side::Q }, len))
            .collect()
    }

    /// Number of curves contracted down to the ordinary blowup: `i + j + sum j_k`.
    pub fn contraction_count(&self) -> u64 {
        self.i + self.j.unwrap_or(0) + self.j_list.iter().sum::<u64>()
    }

    /// Chain lengths predicted by the parity of `k0`; `None` when `k0` is undefined.
    pub fn closed_form_lengths(&self) -> Option<(u64, u64)> {
        if self.trivial {
            return Some((0, 0));
        }
        let j = self.j?;
        let k0 = self.k0?;
        let n0 = k0 / 2;
        if k0 % 2 == 0 {
            Some((self.i + self.so[n0], j + self.se[n0]))
        } else {
            Some((self.i + self.so[n0 + 1] - 1, j + self.se[n0] + 1))
        }
    }
}

pub fn cf_profile(a: u64, b: u64) -> Result<CfProfile> {
    let w = Weights::ordered(a, b)?;
    let (a, b) = (w.a(), w.b());
    if a == b {
        return Ok(CfProfile {
            a,
            b,
            delta: 0,
            i: 0,
            j: None,
            j_list: Vec::new(),
            gamma_list: Vec::new(),
            k0: None,
            so: vec![0],
            se: vec![0],
            trivial: true,
            degenerate: false,
        });
    }
    let delta = a - b;
    let i = b / delta;
    let g0 = b % delta;
    if g0 == 0 {
        return Ok(CfProfile {
            a,
            b,
            delta,
            i,
            j: None,
            j_list: Vec::new(),
            gamma_list: vec![0],
            k0: None,
            so: vec![0],
            se: vec![0],
            trivial: false,
            degenerate: true,
        });
    }
    let j = delta / g0;
    let mut gammas = vec![g0];
    let mut j_list = Vec::new();
    if g0 != 1 {
        gammas.push(delta % g0);
        while *gammas.last().expect("non-empty") != 1 {
            let n = gammas.len();
            j_list.push(gammas[n - 2] / gammas[n - 1]);
            gammas.push(gammas[n - 2] % gammas[n - 1]);
        }
        let n = gammas.len();
        j_list.push(gammas[n - 2]);
    }
    let k0 = gammas.len() - 1;
    let jk = |k: usize| j_list[k - 1];
    let so = (0..=k0.div_ceil(2))
        .map(|n| (1..=n).map(|m| jk(2 * m - 1)).sum())
        .collect();
    let se = (0..=k0 / 2).map(|n| (1..=n).map(|m| jk(2 * m)).sum()).collect();
    Ok(CfProfile {
        a,
        b,
        delta,
        i,
        j: Some(j),
        j_list,
        gamma_list: gammas,
        k0: Some(k0),
        so,
        se,
        trivial: false,
        degenerate: false,
    })
}

/// Both chains from the ceiling recursion.
///
/// p-side: `d_{-1} = a`, `d_0 = b`, `d_k = m_k d_{k-1} - d_{k-2}` with
/// `m_k = ceil(d_{k-2}/d_{k-1})`, and `d_k = mu_k b + lambda_k a`.
/// q-side: `c_{-1} = b`, `c_0 = a`, same rule with `n_k`, and
/// `c_k = beta_k b + alpha_k a`. Sequences are stored from index 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HJResolution {
    pub a: u64,
    pub b: u64,
    pub d_seq: Vec<i64>,
    pub m_seq: Vec<i64>,
    pub mu_seq: Vec<i64>,
    pub lambda_seq: Vec<i64>,
    pub c_seq: Vec<i64>,
    pub n_seq: Vec<i64>,
    pub alpha_seq: Vec<i64>,
    pub beta_seq: Vec<i64>,
    pub i0: usize,
    pub j0: usize,
    /// Self-intersections on the resolved surface, in chain order.
    pub chain_selfints: Vec<(String, Rational)>,
}

struct Chain {
    values: Vec<i64>,
    quotients: Vec<i64>,
    coeff_b: Vec<i64>,
    coeff_a: Vec<i64>,
}

/// Runs `x_k = q_k x_{k-1} - x_{k-2}` from the two seeds until it reaches 1,
/// tracking `x_k = cb_k * b + ca_k * a`.
fn ceiling_chain(seed: [i64; 2], seed_b: [i64; 2], seed_a: [i64; 2]) -> Chain {
    let mut chain = Chain {
        values: Vec::new(),
        quotients: Vec::new(),
        coeff_b: Vec::new(),
        coeff_a: Vec::new(),
    };
    let (mut x2, mut x1) = (seed[0], seed[1]);
    let (mut b2, mut b1) = (seed_b[0], seed_b[1]);
    let (mut a2, mut a1) = (seed_a[0], seed_a[1]);
    while x1 != 1 {
        let q = (x2 + x1 - 1) / x1;
        let x = q * x1 - x2;
        let cb = q * b1 - b2;
        let ca = q * a1 - a2;
        chain.values.push(x);
        chain.quotients.push(q);
        chain.coeff_b.push(cb);
        chain.coeff_a.push(ca);
        (x2, x1, b2, b1, a2, a1) = (x1, x, b1, cb, a1, ca);
    }
    chain
}

impl HJResolution {
    /// `d_k` for `k >= -1`.
    pub fn d(&self, k: isize) -> i64 {
        match k {
            -1 => self.a as i64,
            0 => self.b as i64,
            _ => self.d_seq[k as usize - 1],
        }
    }

    pub fn c(&self, k: isize) -> i64 {
        match k {
            -1 => self.b as i64,
            0 => self.a as i64,
            _ => self.c_seq[k as usize - 1],
        }
    }

    pub fn mu(&self, k: usize) -> i64 {
        if k == 0 {
            1
        } else {
            self.mu_seq[k - 1]
        }
    }

    pub fn lambda(&self, k: usize) -> i64 {
        if k == 0 {
            0
        } else {
            self.lambda_seq[k - 1]
        }
    }

    pub fn alpha(&self, k: usize) -> i64 {
        if k == 0 {
            1
        } else {
            self.alpha_seq[k - 1]
        }
    }

    pub fn beta(&self, k: usize) -> i64 {
        if k == 0 {
            0
        } else {
            self.beta_seq[k - 1]
        }
    }

    /// Toric weights `(nu(x), nu(y))` of `E^{(k)}`, where `L = {x = 0}`.
    pub fn e_ray(&self, k: usize) -> (i64, i64) {
        (self.mu(k), -self.lambda(k))
    }

    pub fn f_ray(&self, k: usize) -> (i64, i64) {
        (-self.beta(k), self.alpha(k))
    }

    pub fn selfint(&self, name: &str) -> Option<&Rational> {
        self.chain_selfints.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    /// Log discrepancies over `X` of every exceptional curve.
    pub fn log_discrepancies(&self) -> Vec<(String, Rational)> {
        let mut out: Vec<(String, Rational)> = (1..=self.i0)
            .map(|k| {
                let (x, y) = self.e_ray(k);
                (e_name(k), Rational::integer(x + y))
            })
            .collect();
        out.push((E_BAR.into(), Rational::from(self.a + self.b)));
        out.extend((1..=self.j0).map(|k| {
            let (x, y) = self.f_ray(k);
            (f_name(k), Rational::integer(x + y))
        }));
        out
    }

    /// Chain order `L, E1.., E, F{j0}.., F1, D`.
    pub fn chain_names(&self) -> Vec<String> {
        let mut names = vec![L_BAR.to_string()];
        names.extend((1..=self.i0).map(e_name));
        names.push(E_BAR.into());
        names.extend((1..=self.j0).rev().map(f_name));
        names.push(D_BAR.into());
        names
    }

    /// The resolved surface, with the pullback `H` of `-K_X` as an extra class.
    pub fn resolved_config(&self) -> SurfaceConfig {
        let names = self.chain_names();
        let mut selfints = self.chain_selfints.clone();
        selfints.push((H.into(), Rational::integer(2)));
        let one = Rational::one();
        let mut pairs: Vec<(String, String, Rational)> = names[..names.len() - 1]
            .windows(2)
            .map(|w| (w[0].clone(), w[1].clone(), one.clone()))
            .collect();
        let last = &names[names.len() - 2];
        pairs.push((last.clone(), D_BAR.into(), Rational::integer(2)));
        pairs.push((L_BAR.into(), D_BAR.into(), one.clone()));
        pairs.push((H.into(), L_BAR.into(), one));
        pairs.push((H.into(), D_BAR.into(), Rational::integer(3)));
        SurfaceConfig::from_pairs(&selfints, &pairs).expect("well-formed chain")
    }

    /// `-K` of the resolved surface: `H - sum (A_C - 1) C`.
    pub fn anticanonical(&self) -> DivisorExpr {
        self.log_discrepancies()
            .into_iter()
            .fold(DivisorExpr::curve(H), |d, (name, a)| {
                d.with(&name, crate::exactnum::Poly::constant(Rational::one() - a))
            })
    }
}

pub fn resolve(a: u64, b: u64) -> Result<HJResolution> {
    let w = Weights::ordered(a, b)?;
    let (ai, bi) = (w.a() as i64, w.b() as i64);
    let p = if bi == 1 {
        ceiling_chain([ai, 1], [0, 1], [1, 0])
    } else {
        ceiling_chain([ai, bi], [0, 1], [1, 0])
    };
    let q = if ai == 1 {
        ceiling_chain([bi, 1], [1, 0], [0, 1])
    } else {
        ceiling_chain([bi, ai], [1, 0], [0, 1])
    };
    let i0 = p.values.len();
    let j0 = q.values.len();
    let mut res = HJResolution {
        a: w.a(),
        b: w.b(),
        d_seq: p.values,
        m_seq: p.quotients,
        mu_seq: p.coeff_b,
        lambda_seq: p.coeff_a,
        c_seq: q.values,
        n_seq: q.quotients,
        alpha_seq: q.coeff_a,
        beta_seq: q.coeff_b,
        i0,
        j0,
        chain_selfints: Vec::new(),
    };
    let int = |n: i64| Rational::integer(n);
    let mut s = Vec::new();
    let l_self = if i0 > 0 { -(1 + res.m_seq[0]) } else { -(1 + ai) };
    s.push((L_BAR.to_string(), int(l_self)));
    for k in 1..=i0 {
        let v = if k < i0 { -res.m_seq[k] } else { -res.d(k as isize - 1) };
        s.push((e_name(k), int(v)));
    }
    s.push((E_BAR.to_string(), int(-1)));
    for k in (1..=j0).rev() {
        let v = if k < j0 { -res.n_seq[k] } else { -res.c(k as isize - 1) };
        s.push((f_name(k), int(v)));
    }
    s.push((D_BAR.to_string(), int(-1)));
    res.chain_selfints = s;
    Ok(res)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub a: u64,
    pub b: u64,
    /// `E^2` after adding the p-side corrections to `-1/(ab)`.
    pub after_p_side: Rational,
    pub expected_after_p_side: Rational,
    pub after_q_side: Rational,
    pub chain_ends_at_one: bool,
    /// `alpha_{j0} mu_{i0} - beta_{j0} lambda_{i0}`.
    pub determinant: i64,
    pub linear_relations_hold: bool,
    pub quotients_at_least_two: bool,
    pub passed: bool,
}

pub fn verify_selfint_lemmas(a: u64, b: u64) -> Result<LemmaReport> {
    let r = resolve(a, b)?;
    let (ar, br) = (Rational::from(r.a), Rational::from(r.b));
    let mut e2 = -(&ar * &br).recip()?;
    for k in 0..r.i0 as isize {
        e2 -= &Rational::new(1, r.d(k) * r.d(k + 1));
    }
    let after_p_side = e2.clone();
    let expected_after_p_side = -Rational::integer(r.mu(r.i0)) / &ar;
    for k in 0..r.j0 as isize {
        e2 -= &Rational::new(1, r.c(k) * r.c(k + 1));
    }
    let chain_ends_at_one = r.d(r.i0 as isize) == 1 && r.c(r.j0 as isize) == 1;
    let determinant = r.alpha(r.j0) * r.mu(r.i0) - r.beta(r.j0) * r.lambda(r.i0);
    let (ai, bi) = (r.a as i64, r.b as i64);
    let linear_relations_hold = (1..=r.i0).all(|k| r.mu(k) * bi + r.lambda(k) * ai == r.d(k as isize))
        && (1..=r.j0).all(|k| r.beta(k) * bi + r.alpha(k) * ai == r.c(k as isize));
    let quotients_at_least_two = r.m_seq.iter().all(|&m| m >= 2)
        && r.n_seq.iter().enumerate().all(|(k, &n)| if k == 0 { n == 1 } else { n >= 2 });
    let passed = after_p_side == expected_after_p_side
        && e2 == Rational::integer(-1)
        && chain_ends_at_one
        && determinant == 1
        && linear_relations_hold
        && quotients_at_least_two;
    Ok(LemmaReport {
        a: r.a,
        b: r.b,
        after_p_side,
        expected_after_p_side,
        after_q_side: e2,
        chain_ends_at_one,
        determinant,
        linear_relations_hold,
        quotients_at_least_two,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionStep {
    pub curve: String,
    pub self_int: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractionPlan {
    pub a: u64,
    pub b: u64,
    pub order: Vec<String>,
    pub steps: Vec<ContractionStep>,
    pub expected_count: u64,
    pub chain_count: u64,
    /// Length pair from the parity formulas, when `k0` is defined.
    pub closed_form_lengths: Option<(u64, u64)>,
    pub lengths_match: Option<bool>,
    /// Surviving exceptional curve, `F1` (or `E` for `(1, 1)`).
    pub final_curve: String,
    pub final_self_int: Option<Rational>,
    pub final_anticanonical_square: Option<Rational>,
    pub final_l_self_int: Option<Rational>,
    pub final_d_self_int: Option<Rational>,
    pub adjunction_holds: bool,
    pub mismatch: Option<String>,
    pub passed: bool,
}

/// Orders the contractions from the continued-fraction runs: `E` first, then
/// each run in reverse, last run first.
pub fn plan_order(profile: &CfProfile) -> Vec<String> {
    let mut created = Vec::new();
    let (mut e, mut f) = (0usize, 1usize);
    for (side, len) in profile.runs() {
        for _ in 0..len {
            match side {
                Side::P => {
                    e += 1;
                    created.push(e_name(e));
                }
                Side::Q => {
                    f += 1;
                    created.push(f_name(f));
                }
            }
        }
    }
    if !profile.trivial {
        created.push(E_BAR.to_string());
    }
    created.reverse();
    created
}

/// `(-K).C = 2 + C^2` for each listed curve.
fn adjunction_holds<'a>(
    config: &SurfaceConfig,
    k: &DivisorExpr,
    curves: impl IntoIterator<Item = &'a String>,
) -> Result<bool> {
    for c in curves.into_iter().filter(|c| *c != H) {
        let lhs = config.dot(k, &DivisorExpr::curve(c))?;
        if lhs != Rational::integer(2) + config.self_int(c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn contraction_plan(a: u64, b: u64) -> Result<ContractionPlan> {
    let profile = cf_profile(a, b)?;
    let res = resolve(a, b)?;
    let order = plan_order(&profile);
    let mut config = res.resolved_config();
    let mut k = res.anticanonical();
    let mut adjunction = adjunction_holds(&config, &k, config.curves())?;
    let mut steps = Vec::new();
    let mut mismatch = None;
    for curve in &order {
        let s = match config.self_int(curve) {
            Ok(s) => s,
            Err(_) => {
                mismatch = Some(format!("planned curve {curve} is not on the surface"));
                break;
            }
        };
        steps.push(ContractionStep {
            curve: curve.clone(),
            self_int: s.clone(),
        });
        let near: Vec<String> = config.neighbors(curve)?.into_iter().map(|(n, _)| n).collect();
        match blowdown_update(&config, curve) {
            Ok(next) => config = next,
            Err(e) => {
                mismatch = Some(e.to_string());
                break;
            }
        }
        // only the neighbours of the contracted curve change
        k = k.without(curve);
        adjunction &= adjunction_holds(&config, &k, &near)?;
    }
    let final_curve = if res.j0 > 0 { f_name(1) } else { E_BAR.to_string() };
    let done = mismatch.is_none();
    adjunction &= adjunction_holds(&config, &k, config.curves())?;
    let final_self_int = done.then(|| config.self_int(&final_curve).ok()).flatten();
    let final_anticanonical_square = done.then(|| config.dot(&k, &k).ok()).flatten();
    let final_l_self_int = done.then(|| config.self_int(L_BAR).ok()).flatten();
    let final_d_self_int = done.then(|| config.self_int(D_BAR).ok()).flatten();
    let survivors_ok = done && config.len() == 4;
    let chain_count = (res.i0 + res.j0) as u64;
    let closed = profile.closed_form_lengths();
    let lengths_match = closed.map(|(i0, j0)| (i0, j0) == (res.i0 as u64, res.j0 as u64));
    let minus_one = Some(Rational::integer(-1));
    let passed = done
        && survivors_ok
        && adjunction
        && steps.iter().all(|s| s.self_int == Rational::integer(-1))
        && order.len() as u64 == chain_count
        && profile.contraction_count() == chain_count
        && lengths_match != Some(false)
        && final_self_int == minus_one
        && final_anticanonical_square == Some(Rational::one())
        && final_l_self_int == Some(Rational::integer(-2))
        && final_d_self_int == minus_one;
    Ok(ContractionPlan {
        a: res.a,
        b: res.b,
        order,
        steps,
        expected_count: profile.contraction_count(),
        chain_count,
        closed_form_lengths: closed,
        lengths_match,
        final_curve,
        final_self_int,
        final_anticanonical_square,
        final_l_self_int,
        final_d_self_int,
        adjunction_holds: adjunction,
        mismatch,
        passed,
    })
}

/// Coefficient of `E` in the pullback of `D`, from the run recurrence
/// `e_k = k f_1` on the first run, `f_{1+k} = f_1 + k e_i` on the second, then
/// alternating `e_{i+so_n+k} = e_{i+so_n} + k f_{j+se_n+1}` and
/// `f_{j+se_n+k+1} = k e_{i+so_{n+1}} + f_{j+se_n+1}`.
pub fn multiplicity_of_d(a: u64, b: u64) -> Result<Rational> {
    let p = cf_profile(a, b)?;
    if p.trivial {
        return Ok(Rational::integer(2));
    }
    let f1 = 2u64;
    let mut e: Vec<u64> = (0..=p.i).map(|k| k * f1).collect();
    let Some(j) = p.j else {
        return Ok(Rational::from(e[(p.i - 1) as usize] + f1));
    };
    // f[0] is unused so that f[k] is f_k
    let mut f: Vec<u64> = vec![0];
    f.extend((0..=j).map(|k| f1 + k * e[p.i as usize]));
    let k0 = p.k0.expect("defined with j");
    for (idx, &jk) in p.j_list.iter().enumerate() {
        let n = idx / 2;
        if idx % 2 == 0 {
            let base = (p.i + p.so[n]) as usize;
            let fb = f[(j + p.se[n] + 1) as usize];
            let eb = e[base];
            e.truncate(base + 1);
            e.extend((1..=jk).map(|k| eb + k * fb));
        } else {
            let base = (j + p.se[n] + 1) as usize;
            let eb = e[(p.i + p.so[n + 1]) as usize];
            let fb = f[base];
            f.truncate(base + 1);
            f.extend((1..=jk).map(|k| k * eb + fb));
        }
    }
    let n0 = k0 / 2;
    let value = if k0 % 2 == 0 {
        e[(p.i + p.so[n0]) as usize] + f[(j + p.se[n0]) as usize]
    } else {
        e[(p.i + p.so[n0 + 1] - 1) as usize] + f[(j + p.se[n0] + 1) as usize]
    };
    Ok(Rational::from(value))
}

/// Coefficients of the pullback of `D` along the resolution, by solving
/// `(D + sum x_C C).C' = 0` over the exceptional curves.
pub fn pullback_of_d(res: &HJResolution) -> Result<Vec<(String, Rational)>> {
    let config = res.resolved_config();
    let exceptional: Vec<String> = res
        .chain_names()
        .into_iter()
        .filter(|n| n != L_BAR && n != D_BAR)
        .collect();
    let m = config.submatrix(&exceptional)?;
    let rhs: Vec<Rational> = exceptional
        .iter()
        .map(|c| config.intersect(D_BAR, c).map(|v| -v))
        .collect::<Result<_>>()?;
    let x = solve(&m, &rhs)?;
    Ok(exceptional.into_iter().zip(x).collect())
}

/// Checks that the closed-form chain lengths agree with the recursion, or
/// explains why they cannot be compared.
pub fn reconcile_lengths(a: u64, b: u64) -> Result<std::result::Result<(), String>> {
    let p = cf_profile(a, b)?;
    let r = resolve(a, b)?;
    if p.contraction_count() != (r.i0 + r.j0) as u64 {
        return Ok(Err(format!(
            "i + j + sum j_k = {} but i0 + j0 = {}",
            p.contraction_count(),
            r.i0 + r.j0
        )));
    }
    match p.closed_form_lengths() {
        Some(pair) if pair != (r.i0 as u64, r.j0 as u64) => Ok(Err(format!(
            "closed forms give (i0, j0) = {pair:?}, recursion gives ({}, {})",
            r.i0, r.j0
        ))),
        _ => Ok(Ok(())),
    }
}

/// Rejects pairs whose chain check fails, with a reason.
pub fn check_pair(a: u64, b: u64) -> Result<()> {
    let lemmas = verify_selfint_lemmas(a, b)?;
    if !lemmas.passed {
        return Err(Error::Inconsistent(format!("self-intersection lemmas fail at ({a}, {b})")));
    }
    let plan = contraction_plan(a, b)?;
    if !plan.passed {
        return Err(Error::Inconsistent(format!(
            "contraction plan fails at ({a}, {b}): {}",
            plan.mismatch.as_deref().unwrap_or("final state check")
        )));
    }
    let e = multiplicity_of_d(a, b)?;
    if e != Rational::from(2 * b) {
        return Err(Error::Inconsistent(format!("multiplicity of D at ({a}, {b}) is {e}")));
    }
    if let Err(msg) = reconcile_lengths(a, b)? {
        return Err(Error::Inconsistent(msg));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::q;

    #[test]
    fn profile_five_four_is_degenerate() {
        let p = cf_profile(5, 4).unwrap();
        assert!(p.degenerate);
        assert_eq!((p.delta, p.i, p.j, p.k0), (1, 4, None, None));
        assert_eq!(p.gamma_list, vec![0]);
        assert_eq!(p.reconstruct(), (5, 4));
    }

    #[test]
    fn profile_seven_five() {
        let p = cf_profile(7, 5).unwrap();
        assert_eq!((p.delta, p.i, p.j, p.k0), (2, 2, Some(2), Some(0)));
        assert_eq!(p.gamma_list, vec![1]);
        assert_eq!(p.reconstruct(), (7, 5));
    }

    #[test]
    fn profile_twelve_seven() {
        let p = cf_profile(12, 7).unwrap();
        assert_eq!((p.delta, p.i, p.j, p.k0), (5, 1, Some(2), Some(1)));
        assert_eq!(p.gamma_list, vec![2, 1]);
        assert_eq!(p.j_list, vec![2]);
        assert_eq!(p.reconstruct(), (12, 7));
    }

    #[test]
    fn profile_rejects_common_factor() {
        assert!(matches!(cf_profile(4, 2), Err(Error::InvalidWeights { .. })));
    }

    #[test]
    fn resolve_five_four() {
        let r = resolve(5, 4).unwrap();
        assert_eq!(r.d_seq, vec![3, 2, 1]);
        assert_eq!(r.m_seq, vec![2, 2, 2]);
        assert_eq!(r.mu_seq, vec![2, 3, 4]);
        assert_eq!((r.i0, r.j0), (3, 1));
        assert_eq!(r.c_seq, vec![1]);
        assert_eq!(r.n_seq, vec![1]);
        assert_eq!(r.alpha(1) * r.mu(3) - r.beta(1) * r.lambda(3), 1);
        assert_eq!(r.selfint("L"), Some(&q(-3, 1)));
        assert_eq!(r.selfint("F1"), Some(&q(-5, 1)));
    }

    #[test]
    fn resolve_seven_six() {
        let r = resolve(7, 6).unwrap();
        assert_eq!(r.d_seq, vec![5, 4, 3, 2, 1]);
        assert_eq!(r.m_seq, vec![2; 5]);
        assert_eq!((r.i0, r.j0), (5, 1));
        assert_eq!((r.mu(5), r.lambda(5), r.alpha(1), r.beta(1)), (6, -5, 1, -1));
    }

    #[test]
    fn resolve_one_one_is_empty() {
        let r = resolve(1, 1).unwrap();
        assert_eq!((r.i0, r.j0), (0, 0));
        assert!(r.d_seq.is_empty() && r.c_seq.is_empty());
        assert_eq!(r.selfint("E"), Some(&q(-1, 1)));
        assert_eq!(r.selfint("L"), Some(&q(-2, 1)));
    }

    #[test]
    fn lemmas_five_four() {
        let rep = verify_selfint_lemmas(5, 4).unwrap();
        assert_eq!(rep.after_p_side, q(-4, 5));
        assert_eq!(rep.after_q_side, q(-1, 1));
        assert!(rep.passed);
    }

    #[test]
    fn lemmas_seven_six() {
        let rep = verify_selfint_lemmas(7, 6).unwrap();
        assert_eq!(rep.determinant, 1);
        assert!(rep.passed);
    }

    #[test]
    fn plans() {
        let p = contraction_plan(5, 4).unwrap();
        assert_eq!(p.order.len(), 4);
        assert_eq!(p.order[0], "E");
        assert_eq!(p.final_self_int, Some(q(-1, 1)));
        assert!(p.passed, "{p:?}");
        let p = contraction_plan(1, 1).unwrap();
        assert!(p.order.is_empty());
        assert_eq!(p.final_curve, "E");
        assert!(p.passed, "{p:?}");
        let p = contraction_plan(7, 6).unwrap();
        assert_eq!(p.order.len(), 6);
        assert!(p.passed, "{p:?}");
    }

    #[test]
    fn multiplicities() {
        assert_eq!(multiplicity_of_d(1, 1).unwrap(), q(2, 1));
        assert_eq!(multiplicity_of_d(5, 4).unwrap(), q(8, 1));
        assert_eq!(multiplicity_of_d(12, 7).unwrap(), q(14, 1));
        assert_eq!(multiplicity_of_d(7, 5).unwrap(), q(10, 1));
    }

    #[test]
    fn pullback_coefficient_of_e() {
        for (a, b) in [(5, 4), (12, 7), (5, 2), (2, 1), (1, 1)] {
            let r = resolve(a, b).unwrap();
            let coeffs = pullback_of_d(&r).unwrap();
            let e = coeffs.iter().find(|(n, _)| n == "E").unwrap();
            assert_eq!(e.1, Rational::from(2 * b), "({a}, {b})");
        }
    }

    #[test]
    fn small_sweep() {
        for a in 1..=40u64 {
            for b in 1..=a {
                if Weights::new(a, b).is_ok() {
                    check_pair(a, b).unwrap();
                }
            }
        }
    }
}
