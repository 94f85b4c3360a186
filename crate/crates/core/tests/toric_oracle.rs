//! Chain self-intersections against a brute-force toric model.
//!
//! The weighted blowup of the plane with weights `(a, b)` is the fan with rays
//! `(1, 0)`, `(a, b)`, `(0, 1)`. Its minimal resolution inserts the lattice
//! points on the compact boundary of the convex hull of the nonzero lattice
//! points of each cone. A ray `v` with neighbours `u`, `w` then carries a
//! curve of self-intersection `-c` where `u + w = c v`.

use dpdelta::exactnum::Rational;
use dpdelta::hjchain::{e_name, f_name, resolve, E_BAR};
use num_integer::Integer;

type V = (i64, i64);

fn cross(o: V, p: V, q: V) -> i64 {
    (p.0 - o.0) * (q.1 - o.1) - (p.1 - o.1) * (q.0 - o.0)
}

/// Boundary rays from `u` to `w`, both included, for a strictly convex cone.
fn boundary(u: V, w: V) -> Vec<V> {
    let det = u.0 * w.1 - u.1 * w.0;
    assert!(det > 0);
    let (lo0, hi0) = (u.0.min(w.0).min(0), u.0.max(w.0).max(0));
    let (lo1, hi1) = (u.1.min(w.1).min(0), u.1.max(w.1).max(0));
    let mut pts = Vec::new();
    for x in lo0..=hi0 {
        for y in lo1..=hi1 {
            // p = s u + t w with s, t >= 0 and s + t <= 1
            let s = x * w.1 - y * w.0;
            let t = u.0 * y - u.1 * x;
            if (x, y) != (0, 0) && s >= 0 && t >= 0 && s + t <= det {
                pts.push((x, y));
            }
        }
    }
    // sort by angle from u, ties by distance
    pts.sort_by(|p, q| {
        let c = p.0 * q.1 - p.1 * q.0;
        0.cmp(&c).then((p.0 * p.0 + p.1 * p.1).cmp(&(q.0 * q.0 + q.1 * q.1)))
    });
    let mut hull: Vec<V> = Vec::new();
    for p in pts {
        if let Some(&last) = hull.last() {
            if last.0 * p.1 - last.1 * p.0 == 0 {
                continue;
            }
        }
        // keep the chain convex toward the origin; collinear points stay
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) > 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

fn self_ints(rays: &[V]) -> Vec<i64> {
    rays.windows(3)
        .map(|w| {
            let (u, v, x) = (w[0], w[1], w[2]);
            let s = (u.0 + x.0, u.1 + x.1);
            let c = if v.0 != 0 { s.0 / v.0 } else { s.1 / v.1 };
            assert_eq!((c * v.0, c * v.1), s, "neighbour sum not a multiple");
            -c
        })
        .collect()
}

fn toric_chain(a: i64, b: i64) -> Vec<i64> {
    let e = (a, b);
    let mut rays = boundary((1, 0), e);
    rays.pop();
    rays.extend(boundary(e, (0, 1)));
    self_ints(&rays)
}

#[test]
fn hull_of_standard_cone() {
    // A_1 singularity: a single (-2)-curve
    assert_eq!(self_ints(&boundary((1, 0), (1, 2))), vec![-2]);
    assert_eq!(boundary((1, 0), (-1, 2)), vec![(1, 0), (0, 1), (-1, 2)]);
    assert_eq!(self_ints(&boundary((1, 0), (-1, 2))), vec![-2]);
}

#[test]
fn chains_match_toric_model() {
    for a in 2..=40i64 {
        for b in 1..a {
            if a.gcd(&b) != 1 {
                continue;
            }
            let r = resolve(a as u64, b as u64).unwrap();
            let mut names = (1..=r.i0).map(e_name).collect::<Vec<_>>();
            names.push(E_BAR.to_string());
            names.extend((1..=r.j0).rev().map(f_name));
            let ours: Vec<Rational> = names.iter().map(|n| r.selfint(n).unwrap().clone()).collect();
            let oracle: Vec<Rational> = toric_chain(a, b).into_iter().map(Rational::integer).collect();
            assert_eq!(ours, oracle, "({a}, {b})");
        }
    }
}
