//! Brute-force reference implementations, written against the defining
//! equations only, for cross-checking the library.
#![allow(dead_code)]

use brauer4_core::quadform::SubfamilySurface;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

fn small(x: &BigInt) -> i128 {
    x.to_i128().expect("coefficient fits in i128")
}

/// `(y^2 - p x^2 - M uv, z^2 - p x^2 - (Au + Bv)(Cu + Dv))`.
pub fn residuals(s: &SubfamilySurface, c: &[BigInt; 5]) -> [BigInt; 2] {
    let [u, v, x, y, z] = c;
    let p = BigInt::from(s.p);
    let px2 = &p * x * x;
    let l1 = &s.a * u + &s.b * v;
    let l2 = &s.c * u + &s.d * v;
    [y * y - &px2 - &s.m * u * v, z * z - &px2 - l1 * l2]
}

/// Does a primitive solution of both equations exist modulo `q^k`?
///
/// Some coordinate of a primitive solution is a unit and may be scaled to 1.
/// It cannot be `y` or `z` alone: if `q | u, v, x` both right-hand sides
/// vanish mod `q`. So it suffices to run over `u = 1`, then `q | u, v = 1`,
/// then `q | u, v, x = 1`, looking `y` and `z` up in a table of squares.
pub fn has_primitive_solution_mod(s: &SubfamilySurface, q: u64, k: u32) -> bool {
    let m = (q as i128).pow(k);
    let mut is_square = vec![false; m as usize];
    for y in 0..m {
        is_square[(y * y % m) as usize] = true;
    }
    let (a, b, c, d, mm) = (small(&s.a), small(&s.b), small(&s.c), small(&s.d), small(&s.m));
    let p = s.p as i128;
    let solves = |u: i128, v: i128, x: i128| {
        let px2 = p * x % m * x % m;
        let ry = (mm * u % m * v % m + px2).rem_euclid(m);
        let rz = ((a * u + b * v).rem_euclid(m) * (c * u + d * v).rem_euclid(m) % m + px2) % m;
        is_square[ry as usize] && is_square[rz as usize]
    };
    let all = || 0..m;
    let non_units = || (0..m).step_by(q as usize);
    all().any(|v| all().any(|x| solves(1, v, x)))
        || non_units().any(|u| all().any(|x| solves(u, 1, x)))
        || non_units().any(|u| non_units().any(|v| solves(u, v, 1)))
}

fn valuation(x: &BigInt, q: u64) -> u32 {
    if x.is_zero() {
        return u32::MAX;
    }
    let q = BigInt::from(q);
    let mut x = x.clone();
    let mut v = 0;
    while x.is_multiple_of(&q) {
        x /= &q;
        v += 1;
    }
    v
}

/// `coords` is a primitive solution modulo `q^k` at which some 2x2 minor of
/// the Jacobian has valuation `e` with `2e < k`, so it lifts to `Q_q`.
pub fn hensel_liftable(s: &SubfamilySurface, coords: &[BigInt; 5], q: u64, k: u32) -> bool {
    let qk = BigInt::from(q).pow(k);
    if coords.iter().all(|c| c.is_multiple_of(&BigInt::from(q))) {
        return false;
    }
    if residuals(s, coords).iter().any(|r| !r.is_multiple_of(&qk)) {
        return false;
    }
    let [u, v, x, y, z] = coords;
    let p = BigInt::from(s.p);
    let l1 = &s.a * u + &s.b * v;
    let l2 = &s.c * u + &s.d * v;
    let zero = BigInt::zero();
    let j0 = [-&s.m * v, -&s.m * u, -(&p * x * BigInt::from(2)), y * BigInt::from(2), zero.clone()];
    let j1 = [
        -(&s.a * &l2 + &s.c * &l1),
        -(&s.b * &l2 + &s.d * &l1),
        -(&p * x * BigInt::from(2)),
        zero,
        z * BigInt::from(2),
    ];
    let mut best = u32::MAX;
    for i in 0..5 {
        for j in i + 1..5 {
            let minor = &j0[i] * &j1[j] - &j0[j] * &j1[i];
            best = best.min(valuation(&minor.mod_floor(&qk), q));
        }
    }
    best != u32::MAX && 2 * best < k
}

/// Determinant by cofactor expansion along the first row.
pub fn det_laplace(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][j] * det_laplace(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Hilbert symbol `(a, b)_q` by searching for a primitive solution of
/// `z^2 = a x^2 + b y^2` modulo `q^k`. Exact when `a`, `b` have
/// valuation at most 1 and `k >= 2` (`k >= 5` for `q = 2`).
pub fn hilbert_by_search(a: i64, b: i64, q: u64, k: u32) -> i8 {
    let m = (q as i128).pow(k);
    let qi = q as i128;
    let mut roots: Vec<Vec<i128>> = vec![Vec::new(); m as usize];
    for z in 0..m {
        roots[(z * z % m) as usize].push(z);
    }
    let (a, b) = (a as i128, b as i128);
    for x in 0..m {
        for y in 0..m {
            let r = ((a * x % m * x + b * y % m * y) % m + m) % m;
            let xy_unit = x % qi != 0 || y % qi != 0;
            if roots[r as usize].iter().any(|z| xy_unit || z % qi != 0) {
                return 1;
            }
        }
    }
    -1
}

/// Euler's criterion by repeated multiplication.
pub fn euler(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let mut r = 1u64;
    for _ in 0..(p - 1) / 2 {
        r = r * a % p;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// `(#zero, #square, #non-square)` of `a + b y` over nonzero squares `y`,
/// counting each `y` once by running over all `t` in `1..p` and halving.
pub fn residue_counts(p: u64, a: i64, b: i64) -> (u64, u64, u64) {
    let (a, b) = (a.rem_euclid(p as i64) as u64, b.rem_euclid(p as i64) as u64);
    let mut c = (0, 0, 0);
    for t in 1..p {
        match euler((a + b * (t * t % p)) % p, p) {
            0 => c.0 += 1,
            1 => c.1 += 1,
            _ => c.2 += 1,
        }
    }
    (c.0 / 2, c.1 / 2, c.2 / 2)
}

fn split(x: &BigInt, q: u64) -> (u32, BigInt) {
    let v = valuation(x, q);
    (v, x / BigInt::from(q).pow(v))
}

/// `(a, b)_q` for nonzero integers by the explicit local formulas.
pub fn hilbert_formula(a: &BigInt, b: &BigInt, q: u64) -> i8 {
    let (al, u) = split(a, q);
    let (be, v) = split(b, q);
    if q == 2 {
        let m8 = |x: &BigInt| x.mod_floor(&BigInt::from(8)).to_u64().unwrap();
        let eps = |x: u64| (x - 1) / 2 % 2;
        let omega = |x: u64| (x * x - 1) / 8 % 2;
        let (u, v) = (m8(&u), m8(&v));
        let e = eps(u) * eps(v) + al as u64 * omega(v) + be as u64 * omega(u);
        return if e % 2 == 0 { 1 } else { -1 };
    }
    let leg = |x: &BigInt| euler(x.mod_floor(&BigInt::from(q)).to_u64().unwrap(), q);
    let mut s = if (al * be) % 2 == 1 && q % 4 == 3 { -1 } else { 1 };
    if be % 2 == 1 {
        s *= leg(&u);
    }
    if al % 2 == 1 {
        s *= leg(&v);
    }
    s
}

/// The six linear forms `u, v, Au+Bv, Cu+Dv, z-y, z+y`.
pub fn linear_forms(s: &SubfamilySurface, c: &[BigInt; 5]) -> [BigInt; 6] {
    let [u, v, _, y, z] = c;
    [u.clone(), v.clone(), &s.a * u + &s.b * v, &s.c * u + &s.d * v, z - y, z + y]
}

/// Representations `(p, constant * prod forms[i])` of the three classes,
/// written out from their definitions.
pub fn class_reps(s: &SubfamilySurface, tag: char) -> Vec<(BigInt, Vec<usize>)> {
    let one = BigInt::from(1);
    let ac = &s.a * &s.c;
    match tag {
        'A' => vec![(one, vec![0, 2]), (s.m.clone(), vec![1, 2])],
        'B' => vec![(one, vec![4, 0]), (ac, vec![5, 0])],
        _ => vec![
            (one, vec![2, 4]),
            (ac.clone(), vec![2, 5]),
            (s.m.clone(), vec![1, 2, 4, 0]),
            (ac * &s.m, vec![1, 2, 5, 0]),
        ],
    }
}

/// `inv_q` of a class at a point known modulo `q^k`, as 0 or 1 (for 1/2),
/// from the first representation whose square class the digits determine.
pub fn invariant_at(s: &SubfamilySurface, tag: char, coords: &[BigInt; 5], q: u64, k: u32) -> Option<u8> {
    let forms = linear_forms(s, coords);
    let need = if q == 2 { 3 } else { 1 };
    let p = BigInt::from(s.p);
    'reps: for (constant, idx) in class_reps(s, tag) {
        if constant.is_zero() {
            continue;
        }
        let mut f = constant;
        for &i in &idx {
            if valuation(&forms[i], q).saturating_add(need) > k {
                continue 'reps;
            }
            f *= &forms[i];
        }
        return Some(if hilbert_formula(&p, &f, q) == 1 { 0 } else { 1 });
    }
    None
}
