//! The `Y` and `S` families, their predicted verdicts, rational point search
//! and census rows.

#![allow(non_snake_case)]

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{is_prime_u64, legendre_u64};
use crate::brauer::{bm_verdict, BrauerBudget, ClassTag, ObstructionReport};
use crate::error::{Error, Result};
use crate::quadform::{RationalPoint, SubfamilySurface};

/// Verdict predicted by a closed-form criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prediction {
    ObstructedBy(ClassTag),
    NoObstruction,
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prediction::ObstructedBy(t) => write!(f, "obstructed by {t}"),
            Prediction::NoObstruction => f.write_str("no obstruction"),
        }
    }
}

/// `p = 1 mod 4` prime and `ab = p - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct YParams {
    pub p: u64,
    pub a: i64,
    pub b: i64,
}

impl YParams {
    pub fn new(p: u64, a: i64, b: i64) -> Result<Self> {
        if !is_prime_u64(p) || p % 4 != 1 {
            crate::bail!(Precondition, "{p} is not a prime congruent to 1 mod 4");
        }
        if i128::from(a) * i128::from(b) != i128::from(p) - 1 {
            crate::bail!(Precondition, "{a}*{b} != {}", p - 1);
        }
        Ok(YParams { p, a, b })
    }

    /// Every `(a, b)` with `a, b > 0` and `ab = p - 1`.
    pub fn all_positive(p: u64) -> Result<Vec<Self>> {
        let n = p as i64 - 1;
        (1..=n).filter(|a| n % a == 0).map(|a| YParams::new(p, a, n / a)).collect()
    }
}

impl fmt::Display for YParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Y_{{{},{},{}}}", self.p, self.a, self.b)
    }
}

/// `Y_{p,a,b}`: `y^2 - p x^2 = uv`, `z^2 - p x^2 = (au - pv)(u - bv)`.
pub fn make_Y(params: YParams) -> Result<SubfamilySurface> {
    let YParams { p, a, b } = params;
    let s = SubfamilySurface::new(p, a, -(p as i64), 1, -b, 1, 2);
    s.require_valid()?;
    Ok(s)
}

/// The predicted verdict and whether `p = 5 mod 8` with `a, b` even, which
/// must agree with `(a/p) = -1`.
pub fn predict_Y(params: YParams) -> (Prediction, bool) {
    let YParams { p, a, b } = params;
    let residue = legendre_u64(a.rem_euclid(p as i64) as u64, p) == -1;
    let parity = p % 8 == 5 && a % 2 == 0 && b % 2 == 0;
    assert_eq!(residue, parity, "criteria disagree for {params}");
    let pred = if residue { Prediction::ObstructedBy(ClassTag::A) } else { Prediction::NoObstruction };
    (pred, parity)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SParams {
    pub p: u64,
    pub a: BigInt,
    pub b: BigInt,
}

/// Which of the four defining conditions hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SConditions {
    /// `(a + b - 1)^2 - 4ab = p`.
    pub discriminant: bool,
    /// `4a = 4b = 1 mod p`.
    pub quarter: bool,
    /// `a, b` odd.
    pub odd: bool,
    /// `a = 1 mod 8`.
    pub a_mod_8: bool,
}

impl SConditions {
    pub fn all(&self) -> bool {
        self.discriminant && self.quarter && self.odd && self.a_mod_8
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.discriminant {
            out.push("condition 1: (a+b-1)^2 - 4ab != p");
        }
        if !self.quarter {
            out.push("condition 2: 4a or 4b is not 1 mod p");
        }
        if !self.odd {
            out.push("condition 3: a or b is even");
        }
        if !self.a_mod_8 {
            out.push("condition 4: a is not 1 mod 8");
        }
        out
    }
}

impl SParams {
    pub fn conditions(p: u64, a: &BigInt, b: &BigInt) -> SConditions {
        let pb = BigInt::from(p);
        let e: BigInt = a + b - 1;
        let one_mod = |x: &BigInt| {
            let t: BigInt = x * 4 - 1;
            t.mod_floor(&pb).is_zero()
        };
        SConditions {
            discriminant: &e * &e - a * b * 4 == pb,
            quarter: one_mod(a) && one_mod(b),
            odd: a.is_odd() && b.is_odd(),
            a_mod_8: a.mod_floor(&BigInt::from(8)) == BigInt::from(1),
        }
    }

    pub fn new(p: u64, a: BigInt, b: BigInt) -> Result<Self> {
        if !is_prime_u64(p) || p == 2 {
            crate::bail!(Precondition, "{p} is not an odd prime");
        }
        let c = Self::conditions(p, &a, &b);
        if !c.all() {
            crate::bail!(Precondition, "S_{{{p},{a},{b}}}: {}", c.failures().join("; "));
        }
        Ok(SParams { p, a, b })
    }
}

impl fmt::Display for SParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S_{{{},{},{}}}", self.p, self.a, self.b)
    }
}

/// `S_{p,a,b}`: `y^2 - p x^2 = uv`, `z^2 - p x^2 = (u + v)(au + bv)`.
pub fn make_S(params: &SParams) -> Result<SubfamilySurface> {
    let s = SubfamilySurface {
        p: params.p,
        a: 1.into(),
        b: 1.into(),
        c: params.a.clone(),
        d: params.b.clone(),
        m: 1.into(),
        n: 1.into(),
    };
    s.require_valid()?;
    Ok(s)
}

/// `a_t = t^2 p^2 - tp - (p-1)/4`, `b_t = t^2 p^2 + tp - (p-1)/4` for
/// `p = 5 mod 8` and `t = 3(p-1)/4 mod 8`.
pub fn s_from_t(p: u64, t: i64) -> Result<SParams> {
    if !is_prime_u64(p) || p % 8 != 5 {
        crate::bail!(Precondition, "{p} is not a prime congruent to 5 mod 8");
    }
    let r = (3 * (p - 1) / 4) % 8;
    if t.rem_euclid(8) as u64 != r {
        crate::bail!(Precondition, "t = {t} is not {r} mod 8");
    }
    let (pb, tb) = (BigInt::from(p), BigInt::from(t));
    let sq = &tb * &tb * &pb * &pb;
    let q = BigInt::from((p - 1) / 4);
    let a = &sq - &tb * &pb - &q;
    let b = &sq + &tb * &pb - &q;
    let c = SParams::conditions(p, &a, &b);
    assert!(c.all(), "s_from_t({p}, {t}) fails {:?}", c.failures());
    Ok(SParams { p, a, b })
}

/// The first `count` positive admissible `t` for `p`.
pub fn admissible_t(p: u64, count: usize) -> Vec<i64> {
    let r = ((3 * (p - 1) / 4) % 8) as i64;
    let first = if r == 0 { 8 } else { r };
    (0..count as i64).map(|i| first + 8 * i).collect()
}

pub fn predict_S(params: &SParams) -> Prediction {
    debug_assert!(SParams::conditions(params.p, &params.a, &params.b).all());
    Prediction::ObstructedBy(ClassTag::B)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    Y(YParams),
    S(SParams),
}

impl Family {
    pub fn prediction(&self) -> Prediction {
        match self {
            Family::Y(y) => predict_Y(*y).0,
            Family::S(s) => predict_S(s),
        }
    }

    pub fn surface(&self) -> Result<SubfamilySurface> {
        match self {
            Family::Y(y) => make_Y(*y),
            Family::S(s) => make_S(s),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Y(y) => y.fmt(f),
            Family::S(s) => s.fmt(f),
        }
    }
}

/// The family a surface belongs to, if its coefficients match one exactly.
pub fn recognize(s: &SubfamilySurface) -> Option<Family> {
    let one = BigInt::from(1);
    let p = s.p_big();
    if s.c == one && s.b == -&p && s.m == one && s.n.abs() == BigInt::from(2) {
        let (a, b) = (s.a.to_i64()?, (-&s.d).to_i64()?);
        if let Ok(y) = YParams::new(s.p, a, b) {
            return Some(Family::Y(y));
        }
    }
    if s.a == one && s.b == one && s.m == one && s.n.abs() == one {
        if let Ok(sp) = SParams::new(s.p, s.c.clone(), s.d.clone()) {
            return Some(Family::S(sp));
        }
    }
    None
}

fn isqrt_exact(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

/// Points with `u = u0` and every other coordinate in `[-bound, bound]`,
/// up to the signs of `x, y, z` (and of `(u, v)` when `u0 = 0`).
pub fn point_search_shell(s: &SubfamilySurface, bound: u64, u0: i64) -> Result<Vec<RationalPoint>> {
    let conv = |x: &BigInt| x.to_i128().ok_or_else(|| Error::InvalidArgument(format!("coefficient {x} too large")));
    let (a, b, c, d, m) = (conv(&s.a)?, conv(&s.b)?, conv(&s.c)?, conv(&s.d)?, conv(&s.m)?);
    let p = i128::from(s.p);
    let h = i128::from(bound);
    let h2 = h * h;
    let u = i128::from(u0);
    let mut out = Vec::new();
    let v_start = if u0 == 0 { 1 } else { -h };
    for v in v_start..=h {
        let (muv, l) = match (m.checked_mul(u * v), a.checked_mul(u).zip(b.checked_mul(v))) {
            (Some(x), Some((au, bv))) => (x, (au + bv).checked_mul(c * u + d * v)),
            _ => continue,
        };
        let Some(l) = l else { continue };
        for x in 0..=h {
            let px2 = p * x * x;
            let (y2, z2) = (muv + px2, l + px2);
            if y2 > h2 || z2 > h2 {
                break;
            }
            let (Some(y), Some(z)) = (isqrt_exact(y2), isqrt_exact(z2)) else { continue };
            let pt = RationalPoint::new([u, v, x, y, z].map(BigInt::from))?;
            if pt.coords() != &[u, v, x, y, z].map(BigInt::from) {
                continue;
            }
            debug_assert!(s.quadrics().contains(&pt));
            out.push(pt);
        }
    }
    Ok(out)
}

/// All primitive points of height at most `bound`, as sign-canonical
/// representatives, sorted.
pub fn point_search(s: &SubfamilySurface, bound: u64) -> Result<Vec<RationalPoint>> {
    let mut out = Vec::new();
    for u in 0..=bound as i64 {
        out.extend(point_search_shell(s, bound, u)?);
    }
    out.sort();
    Ok(out)
}

/// One surface of a census.
#[derive(Debug, Clone)]
pub struct CensusRow {
    pub family: Family,
    pub predicted: Prediction,
    pub report: Result<ObstructionReport>,
    pub height_bound: u64,
    pub points: Vec<RationalPoint>,
    pub agrees: bool,
}

impl CensusRow {
    pub fn id(&self) -> String {
        format!("{}", self.family)
    }

    pub fn computed(&self) -> Option<Prediction> {
        self.report.as_ref().ok().map(|r| r.verdict())
    }
}

pub fn census_row(family: Family, height_bound: u64, budget: &BrauerBudget) -> Result<CensusRow> {
    let s = family.surface()?;
    let predicted = family.prediction();
    let report = bm_verdict(&s, budget);
    let points = point_search(&s, height_bound)?;
    let agrees = report.as_ref().is_ok_and(|r| r.verdict() == predicted);
    Ok(CensusRow { family, predicted, report, height_bound, points, agrees })
}
