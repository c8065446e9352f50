//! Two points of `X(Q_p)` on which one of `A`, `B`, `C` takes different
//! invariants.
//!
//! The construction first normalises the coefficients at `p`, handles the
//! sign-flip situations, and otherwise dispatches on `v_p(M)` and
//! `m = max v_p(A, B, C, D)`. Cases 5 to 8 change variables and reduce to
//! Cases 1 to 4. Points are built in the working coordinates modulo `p^K`,
//! pulled back to the input surface and checked by evaluation.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use super::classes::{evaluate_local, BrauerClass, ClassTag, InvariantValue};
use super::quadres::quadres_witnesses;
use crate::arith::modular::{legendre_u64, valuation, PowerModulus};
use crate::arith::{hilbert_symbol_int, Place};
use crate::error::{Error, Result};
use crate::localsolve::search::below;
use crate::localsolve::{
    decide_Qq, lift_certificate, newton_lift, sample_local_points, InsolubilityProof, LocalBudget, LocalModel,
    PadicApproxPoint, SolubilityVerdict,
};
use crate::quadform::SubfamilySurface;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseStep {
    /// `p | A, C, M`: divide them by `p`.
    ReduceACM,
    /// `p | B, D, M`: divide them by `p`.
    ReduceBDM,
    /// `p^2 | A, B, M`: divide them by `p^2`.
    ReduceABM,
    /// `p^2 | C, D, M`: divide them by `p^2`.
    ReduceCDM,
    SwapUV,
    SwapFactors,
    /// `p = 3 mod 4`: `(u:v:x:y:z)` against `(u:v:x:-y:-z)`.
    FlipYZ,
    /// `(p, AC)_p = (p, BD)_p = -1`: `(u:v:x:y:z)` against `(u:v:x:-y:z)`.
    FlipY,
    /// The constructed pair was indeterminate; two sampled points were used.
    Resampled,
    Case(u8, Option<char>),
}

impl fmt::Display for CaseStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseStep::ReduceACM => f.write_str("reduce p|A,C,M"),
            CaseStep::ReduceBDM => f.write_str("reduce p|B,D,M"),
            CaseStep::ReduceABM => f.write_str("reduce p^2|A,B,M"),
            CaseStep::ReduceCDM => f.write_str("reduce p^2|C,D,M"),
            CaseStep::SwapUV => f.write_str("swap u,v"),
            CaseStep::SwapFactors => f.write_str("swap linear factors"),
            CaseStep::FlipYZ => f.write_str("p=3 mod 4 sign flip"),
            CaseStep::FlipY => f.write_str("(p,AC)=(p,BD)=-1 sign flip"),
            CaseStep::Resampled => f.write_str("resampled"),
            CaseStep::Case(n, None) => write!(f, "case {n}"),
            CaseStep::Case(n, Some(c)) => write!(f, "case {n}{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurjectivityWitness {
    pub class: ClassTag,
    pub points: [PadicApproxPoint; 2],
    pub values: [InvariantValue; 2],
    pub trace: Vec<CaseStep>,
}

#[derive(Debug, Clone)]
struct System {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
    m: BigInt,
    n: BigInt,
}

impl System {
    /// Coefficients with `N` recomputed from the condition
    /// `(AD + BC - M)^2 - 4ABCD = p N^2`.
    fn new(p: u64, a: BigInt, b: BigInt, c: BigInt, d: BigInt, m: BigInt) -> Result<Self> {
        let e = &a * &d + &b * &c - &m;
        let val: BigInt = &e * &e - (&a * &b * &c * &d) * 4;
        let (q, r) = val.div_rem(&BigInt::from(p));
        let n = q.sqrt();
        if !r.is_zero() || q.is_negative() || &n * &n != q || n.is_zero() {
            crate::bail!(Witness, "transformed coefficients violate the defining condition");
        }
        Ok(System { a, b, c, d, m, n })
    }

    fn vals(&self, p: u64) -> [u32; 4] {
        [&self.a, &self.b, &self.c, &self.d].map(|x| valuation(x, p).unwrap_or(u32::MAX))
    }
}

fn exact_div(x: &BigInt, p: u64, e: u32) -> Result<BigInt> {
    let d = BigInt::from(p).pow(e);
    let (q, r) = x.div_rem(&d);
    if !r.is_zero() {
        crate::bail!(Witness, "{x} is not divisible by {p}^{e}");
    }
    Ok(q)
}

fn divisible(x: &BigInt, p: u64, e: u32) -> bool {
    valuation(x, p).is_none_or(|v| v >= e)
}

/// Maps points of a transformed system back to the previous one.
#[derive(Debug, Clone)]
enum Transform {
    Scale([u32; 5]),
    SwapUV,
    /// `(Au+Bv)/Delta, p^o (Cu+Dv)/Delta, p^-k x, p^-k z, p^-k y` with the
    /// old coefficients and `o = 1` when `odd`.
    Linear {
        a: BigInt,
        b: BigInt,
        c: BigInt,
        d: BigInt,
        k: u32,
        odd: bool,
    },
}

impl Transform {
    fn apply(&self, pt: [u64; 5], pm: &PowerModulus) -> [u64; 5] {
        match self {
            Transform::Scale(e) => {
                let mut out = pt;
                for i in 0..5 {
                    out[i] = pm.mul(pt[i], pm.pow_q(e[i]));
                }
                out
            }
            Transform::SwapUV => [pt[1], pt[0], pt[2], pt[3], pt[4]],
            Transform::Linear { a, b, c, d, k, odd } => {
                let (a, b, c, d) = (pm.reduce(a), pm.reduce(b), pm.reduce(c), pm.reduce(d));
                let o = if *odd { pm.pow_q(1) } else { 1 };
                let s = pm.pow_q(k + u32::from(*odd));
                let u = pm.sub(pm.mul(pm.mul(o, d), pt[0]), pm.mul(b, pt[1]));
                let v = pm.sub(pm.mul(a, pt[1]), pm.mul(pm.mul(o, c), pt[0]));
                [u, v, pm.mul(s, pt[2]), pm.mul(s, pt[4]), pm.mul(s, pt[3])]
            }
        }
    }

    fn swaps_b_and_c(&self) -> bool {
        matches!(self, Transform::Linear { .. })
    }
}

/// Residue arithmetic modulo `p^K` for one working system.
struct Ctx {
    pm: PowerModulus,
    p: u64,
}

impl Ctx {
    fn r(&self, x: &BigInt) -> u64 {
        self.pm.reduce(x)
    }

    fn i(&self, x: u64) -> u64 {
        x % self.pm.m
    }

    fn inv(&self, x: u64) -> Result<u64> {
        self.pm.inv(x).ok_or_else(|| Error::Witness(alloc::format!("{x} is not a unit modulo {}", self.p)))
    }

    fn div(&self, x: u64, y: u64) -> Result<u64> {
        Ok(self.pm.mul(x, self.inv(y)?))
    }

    fn leg(&self, x: u64) -> i8 {
        legendre_u64(x % self.p, self.p)
    }

    fn sqrt(&self, x: u64, hint: Option<u64>) -> Result<u64> {
        if self.leg(x) != 1 {
            crate::bail!(Witness, "{x} is not a unit square modulo {}", self.p);
        }
        self.pm.sqrt_unit(x, hint).ok_or_else(|| Error::Witness("square root failed".into()))
    }

    fn half(&self, x: u64) -> Result<u64> {
        self.div(x, 2)
    }

    fn nonresidue(&self) -> u64 {
        (2..self.p).find(|&n| legendre_u64(n, self.p) == -1).expect("odd prime")
    }
}

type Pair = [[u64; 5]; 2];

fn case1(x: &Ctx, s: &System) -> Result<(char, Vec<Pair>)> {
    let pm = &x.pm;
    let (a, b, c, d, m) = (x.r(&s.a), x.r(&s.b), x.r(&s.c), x.r(&s.d), x.r(&s.m));
    let mut out = Vec::new();
    if d % x.p != 0 {
        let bd = pm.mul(b, d);
        let root = x.sqrt(pm.neg(bd), None)?;
        let y1 = x.sqrt(x.div(pm.neg(pm.mul(d, m)), c)?, None)?;
        let p1 = [x.div(pm.neg(d), c)?, 1, 0, y1, 0];
        for r in 1..x.p {
            if out.len() >= 6 {
                break;
            }
            if x.leg(pm.mul(r, root)) != -1 || (pm.mul(r, r) + bd) % x.p == 0 {
                continue;
            }
            let y2 = x.half(pm.sub(x.div(bd, r)?, r))?;
            let u2 = x.div(pm.mul(y2, y2), m)?;
            let zz = pm.mul(pm.add(pm.mul(a, u2), b), pm.add(pm.mul(c, u2), d));
            if zz % x.p == 0 || x.leg(zz) != 1 {
                continue;
            }
            out.push([p1, [u2, 1, 0, y2, x.sqrt(zz, None)?]]);
        }
        return Ok(('a', out));
    }
    let n = x.nonresidue();
    let point = |y: u64| -> Result<[u64; 5]> {
        let v = x.div(pm.mul(y, y), m)?;
        let zz = pm.mul(pm.add(a, pm.mul(b, v)), pm.add(c, pm.mul(d, v)));
        let z = x.sqrt(zz, Some(pm.neg(y)))?;
        Ok([1, v, 0, y, z])
    };
    for j in 1..=4u64 {
        let y1 = x.i(j * j);
        let y2 = pm.mul(n, y1);
        out.push([point(y1)?, point(y2)?]);
    }
    Ok(('b', out))
}

fn case2(x: &Ctx, s: &System) -> Result<(char, Vec<Pair>)> {
    let pm = &x.pm;
    let p = x.p;
    let (a1, b1, m1, n1) =
        (exact_div(&s.a, p, 1)?, exact_div(&s.b, p, 1)?, exact_div(&s.m, p, 1)?, exact_div(&s.n, p, 1)?);
    let e_big = &b1 * &s.c + &a1 * &s.d - &m1;
    let (a1, c, m1, n1, e) = (x.r(&a1), x.r(&s.c), x.r(&m1), x.r(&n1), x.r(&e_big));
    let ac = pm.mul(a1, c);
    let t = x.div(pm.mul(m1, e), pm.mul(2, ac))?;
    if x.leg(t) != 1 {
        return Err(Error::NotLocallySoluble(alloc::format!(
            "case 2b: M'(B'C+A'D-M')/(2A'C) is not a square modulo {p}, so X(Q_{p}) is empty"
        )));
    }
    let nr = x.nonresidue();
    let point = |r: u64| -> Result<[u64; 5]> {
        let q = x.div(ac, r)?;
        let y = pm.mul(x.half(pm.sub(q, r))?, n1);
        let z = pm.mul(x.half(pm.add(q, r))?, n1);
        let xx = pm.add(pm.mul(pm.mul(2, ac), pm.mul(m1, e)), pm.mul(x.i(p), pm.mul(z, z)));
        Ok([pm.neg(e), pm.mul(2, ac), x.sqrt(xx, None)?, pm.mul(x.i(p), z), pm.mul(x.i(p), y)])
    };
    let mut out = Vec::new();
    for j in 1..=4u64 {
        let r1 = x.i(j * j);
        out.push([point(r1)?, point(pm.mul(nr, r1))?]);
    }
    Ok(('a', out))
}

fn case3(x: &Ctx, s: &System) -> Result<(char, Vec<Pair>)> {
    let pm = &x.pm;
    let p = x.p;
    let (a, b, c, d, m) = (x.r(&s.a), x.r(&s.b), x.r(&s.c), x.r(&s.d), x.r(&s.m));
    let p1 = [1, 0, 0, 0, x.sqrt(pm.mul(a, c), None)?];
    if x.leg(pm.mul(pm.mul(a, b), m)) == -1 {
        return Ok(('a', alloc::vec![[p1, [0, 1, 0, 0, x.sqrt(pm.mul(b, d), None)?]]]));
    }
    let ma = pm.mul(m, a);
    let coeffs = [1, x.div(b, ma)?, x.div(c, a)?, x.div(d, ma)?].map(|v| v % p);
    let mut out = Vec::new();
    for y0 in quadres_witnesses(p, coeffs[0], coeffs[1], coeffs[2], coeffs[3])?.into_iter().take(4) {
        let y0 = x.i(y0);
        let y2 = pm.mul(y0, y0);
        let g = pm.add(x.div(c, a)?, x.div(pm.mul(d, y2), ma)?);
        let p2 = if g % p != 0 {
            let f = pm.add(1, x.div(pm.mul(b, y2), ma)?);
            [1, x.div(y2, m)?, 0, y0, pm.mul(a, x.sqrt(pm.mul(f, g), None)?)]
        } else {
            let y1 = x.sqrt(x.div(pm.neg(pm.mul(c, m)), d)?, Some(y0))?;
            [1, x.div(pm.mul(y1, y1), m)?, 0, y1, 0]
        };
        out.push([p1, p2]);
    }
    Ok(('b', out))
}

fn case4(x: &Ctx, s: &System, vm: u32) -> Result<(char, Vec<Pair>)> {
    let pm = &x.pm;
    let p = x.p;
    let k = (vm - 1) / 2;
    let m1 = x.r(&exact_div(&s.m, p, vm)?);
    let (a, b, c, d) = (x.r(&s.a), x.r(&s.b), x.r(&s.c), x.r(&s.d));
    let p1 = [1, 0, 0, 0, x.sqrt(pm.mul(a, c), None)?];
    let mut out = Vec::new();
    for x0 in 1..p {
        if out.len() >= 4 {
            break;
        }
        let x2 = pm.mul(x0, x0);
        let w = pm.sub(1, x.div(pm.mul(b, x2), pm.mul(m1, a))?);
        if x.leg(w) != -1 {
            continue;
        }
        let t = x.div(x2, m1)?;
        let zz = pm.add(pm.mul(pm.sub(a, pm.mul(b, t)), pm.sub(c, pm.mul(d, t))), pm.mul(pm.pow_q(2 * k + 1), x2));
        let p2 = [1, pm.neg(t), pm.mul(pm.pow_q(k), x0), 0, x.sqrt(zz, None)?];
        out.push([p1, p2]);
    }
    Ok((' ', out))
}

fn reduce_gcd(p: u64, sys: &mut System, chain: &mut Vec<Transform>, trace: &mut Vec<CaseStep>) -> Result<()> {
    loop {
        let s = sys.clone();
        let (next, scale, step) = if divisible(&s.a, p, 1) && divisible(&s.c, p, 1) && divisible(&s.m, p, 1) {
            (
                System::new(p, exact_div(&s.a, p, 1)?, s.b, exact_div(&s.c, p, 1)?, s.d, exact_div(&s.m, p, 1)?)?,
                [0, 1, 1, 1, 1],
                CaseStep::ReduceACM,
            )
        } else if divisible(&s.b, p, 1) && divisible(&s.d, p, 1) && divisible(&s.m, p, 1) {
            (
                System::new(p, s.a, exact_div(&s.b, p, 1)?, s.c, exact_div(&s.d, p, 1)?, exact_div(&s.m, p, 1)?)?,
                [1, 0, 1, 1, 1],
                CaseStep::ReduceBDM,
            )
        } else if divisible(&s.a, p, 2) && divisible(&s.b, p, 2) && divisible(&s.m, p, 2) {
            (
                System::new(p, exact_div(&s.a, p, 2)?, exact_div(&s.b, p, 2)?, s.c, s.d, exact_div(&s.m, p, 2)?)?,
                [0, 0, 1, 1, 1],
                CaseStep::ReduceABM,
            )
        } else if divisible(&s.c, p, 2) && divisible(&s.d, p, 2) && divisible(&s.m, p, 2) {
            (
                System::new(p, s.a, s.b, exact_div(&s.c, p, 2)?, exact_div(&s.d, p, 2)?, exact_div(&s.m, p, 2)?)?,
                [0, 0, 1, 1, 1],
                CaseStep::ReduceCDM,
            )
        } else {
            return Ok(());
        };
        *sys = next;
        chain.push(Transform::Scale(scale));
        trace.push(step);
    }
}

/// Moves a coefficient of maximal valuation into the `A` slot.
fn normalise_a(p: u64, sys: &mut System, chain: &mut Vec<Transform>, trace: &mut Vec<CaseStep>) {
    let v = sys.vals(p);
    let m = *v.iter().max().unwrap();
    let swap_uv = |s: &mut System, chain: &mut Vec<Transform>, trace: &mut Vec<CaseStep>| {
        core::mem::swap(&mut s.a, &mut s.b);
        core::mem::swap(&mut s.c, &mut s.d);
        chain.push(Transform::SwapUV);
        trace.push(CaseStep::SwapUV);
    };
    let swap_factors = |s: &mut System, trace: &mut Vec<CaseStep>| {
        core::mem::swap(&mut s.a, &mut s.c);
        core::mem::swap(&mut s.b, &mut s.d);
        trace.push(CaseStep::SwapFactors);
    };
    if v[0] == m {
    } else if v[1] == m {
        swap_uv(sys, chain, trace);
    } else if v[2] == m {
        swap_factors(sys, trace);
    } else {
        swap_uv(sys, chain, trace);
        swap_factors(sys, trace);
    }
}

fn linear(p: u64, s: &System, k: u32, odd: bool) -> Result<(System, Transform)> {
    let delta = &s.a * &s.d - &s.b * &s.c;
    let e = 2 * k + u32::from(odd);
    let next = System::new(
        p,
        exact_div(&(&s.m * &s.d), p, 2 * k)?,
        -exact_div(&(&s.m * &s.b), p, e)?,
        -s.c.clone(),
        if odd { exact_div(&s.a, p, 1)? } else { s.a.clone() },
        exact_div(&(&delta * &delta), p, e)?,
    )?;
    let t = Transform::Linear { a: s.a.clone(), b: s.b.clone(), c: s.c.clone(), d: s.d.clone(), k, odd };
    Ok((next, t))
}

fn sign_flip_witness(
    s: &SubfamilySurface,
    model: &LocalModel,
    both: bool,
    trace: Vec<CaseStep>,
    budget: &LocalBudget,
) -> Result<SurjectivityWitness> {
    let class = BrauerClass::new(ClassTag::B, s);
    let precision = model.top.k.min(8);
    let pts = sample_local_points(model, 32, precision, 0x5167, budget)?;
    for cp in pts {
        let k = cp.effective_precision();
        let pm = model.modulus(k)?;
        let c = cp.point.coords.map(|v| v % pm.m);
        let p1 = PadicApproxPoint { q: model.q, k, coords: c };
        let flipped = [c[0], c[1], c[2], pm.neg(c[3]), if both { pm.neg(c[4]) } else { c[4] }];
        let p2 = PadicApproxPoint { q: model.q, k, coords: flipped };
        if let (Ok(v1), Ok(v2)) = (evaluate_local(&class, s, &p1), evaluate_local(&class, s, &p2)) {
            if v1 != v2 {
                return Ok(SurjectivityWitness { class: ClassTag::B, points: [p1, p2], values: [v1, v2], trace });
            }
        }
    }
    crate::bail!(Witness, "no sampled point separates B under the sign flip")
}

/// `inv_p` at `pt`, or at a nearby point of `X(Q_p)` when every
/// representation is indeterminate at `pt` itself; `pt` is replaced by the
/// point actually used.
fn evaluate_near(
    class: &BrauerClass,
    s: &SubfamilySurface,
    model: &LocalModel,
    pt: &mut PadicApproxPoint,
) -> Result<InvariantValue> {
    let first = match evaluate_local(class, s, pt) {
        Err(Error::Indeterminate(m)) => Error::Indeterminate(m),
        r => return r,
    };
    let Some(cert) = lift_certificate(model, pt)? else { return Err(first) };
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e65_6172);
    let q = model.q;
    for round in 0..24 {
        let j = 2 * cert.e + 1 + round / 8;
        if j >= pt.k {
            break;
        }
        let low = model.modulus(j)?;
        let top = model.modulus(pt.k)?;
        let span = top.m / low.m;
        let mut coords = pt.coords.map(|c| c % low.m);
        for (i, c) in coords.iter_mut().enumerate() {
            if i != cert.minor.0 && i != cert.minor.1 {
                *c = top.add(*c, top.mul(low.m, below(&mut rng, span)));
            }
        }
        if coords.iter().all(|c| c % q == 0) {
            continue;
        }
        let Ok(near) = newton_lift(model, &PadicApproxPoint { q, k: j, coords }, cert, pt.k) else { continue };
        if let Ok(v) = evaluate_local(class, s, &near) {
            *pt = near;
            return Ok(v);
        }
    }
    Err(first)
}

/// Two sampled points of `X(Q_p)` on which `tag` takes different values.
fn sampled_witness(
    s: &SubfamilySurface,
    model: &LocalModel,
    tag: ClassTag,
    trace: Vec<CaseStep>,
    budget: &LocalBudget,
) -> Result<SurjectivityWitness> {
    let class = BrauerClass::new(tag, s);
    let pts = sample_local_points(model, 64, model.top.k, 0x7361_6d70, budget)?;
    let mut seen: [Option<PadicApproxPoint>; 2] = [None, None];
    for cp in pts {
        if let Ok(v) = evaluate_local(&class, s, &cp.point) {
            seen[usize::from(v == InvariantValue::Half)].get_or_insert(cp.point);
        }
        if let [Some(p0), Some(p1)] = &seen {
            let points = [p0.clone(), p1.clone()];
            return Ok(SurjectivityWitness {
                class: tag,
                points,
                values: [InvariantValue::Zero, InvariantValue::Half],
                trace,
            });
        }
    }
    crate::bail!(Witness, "no two sampled points separate {tag}")
}

/// Pulls a working-coordinate point back to the input surface.
fn pull_back(chain: &[Transform], pt: [u64; 5], pm: &PowerModulus, model: &LocalModel) -> Result<PadicApproxPoint> {
    let mut c = pt;
    for t in chain.iter().rev() {
        c = t.apply(c, pm);
    }
    let v = c.iter().map(|&x| pm.val(x)).min().unwrap();
    if v >= pm.k {
        crate::bail!(Witness, "pulled-back point vanishes modulo p^{}", pm.k);
    }
    let scale = pm.pow_q(v);
    let k = pm.k - v;
    let c = c.map(|x| x / scale);
    PadicApproxPoint::new(model, k, c)
}

/// A pair of `Q_p` points on which one of the classes takes both values,
/// with the sequence of reductions and cases used to build it.
pub fn surjectivity_witness(s: &SubfamilySurface, budget: &LocalBudget) -> Result<SurjectivityWitness> {
    s.require_valid()?;
    let p = s.p;
    let model = LocalModel::new(&s.quadrics(), p)?;
    match decide_Qq(&model, budget) {
        SolubilityVerdict::Soluble(_) => {}
        SolubilityVerdict::Insoluble(InsolubilityProof::EmptyLevel(k)) => {
            crate::bail!(NotLocallySoluble, "no primitive solution modulo {p}^{k}")
        }
        SolubilityVerdict::Insoluble(other) => crate::bail!(NotLocallySoluble, "{other:?}"),
        SolubilityVerdict::Inconclusive(msg) => crate::bail!(Inconclusive, "local solubility at {p}: {msg}"),
    }
    let mut trace = Vec::new();
    let mut chain = Vec::new();
    let mut sys =
        System { a: s.a.clone(), b: s.b.clone(), c: s.c.clone(), d: s.d.clone(), m: s.m.clone(), n: s.n.abs() };
    reduce_gcd(p, &mut sys, &mut chain, &mut trace)?;
    if p % 4 == 3 {
        trace.push(CaseStep::FlipYZ);
        return sign_flip_witness(s, &model, true, trace, budget);
    }
    let hp = |x: &BigInt| -> Result<i8> {
        let x: i64 = x.try_into().map_err(|_| Error::InvalidArgument("coefficient too large".into()))?;
        hilbert_symbol_int(p as i64, x, Place::Prime(p))
    };
    if hp(&(&sys.a * &sys.c))? == -1 && hp(&(&sys.b * &sys.d))? == -1 {
        trace.push(CaseStep::FlipY);
        return sign_flip_witness(s, &model, false, trace, budget);
    }
    let pm = model.top;
    let ctx = Ctx { pm, p };
    for _ in 0..16 {
        reduce_gcd(p, &mut sys, &mut chain, &mut trace)?;
        let vm = valuation(&sys.m, p).expect("M is nonzero");
        let m = *sys.vals(p).iter().max().unwrap();
        if m >= 1 {
            normalise_a(p, &mut sys, &mut chain, &mut trace);
        }
        let (case, tag, built) = match (vm, m) {
            (0, 0) => (3, ClassTag::A, case3(&ctx, &sys)?),
            (0, _) => (1, ClassTag::B, case1(&ctx, &sys)?),
            (1, 1) => (2, ClassTag::B, case2(&ctx, &sys)?),
            (v, 0) if v % 2 == 1 => (4, ClassTag::A, case4(&ctx, &sys, v)?),
            (1, _) => {
                trace.push(CaseStep::Case(5, None));
                sys = System::new(
                    p,
                    exact_div(&sys.a, p, 2)?,
                    exact_div(&sys.b, p, 1)?,
                    sys.c.clone(),
                    &sys.d * p,
                    exact_div(&sys.m, p, 1)?,
                )?;
                chain.push(Transform::Scale([0, 1, 1, 1, 1]));
                continue;
            }
            (v, _) => {
                let (case, odd) = match (v % 2 == 1, m == 0) {
                    (true, _) => (6, true),
                    (false, true) => (7, false),
                    (false, false) => (8, true),
                };
                trace.push(CaseStep::Case(case, None));
                let (next, t) = linear(p, &sys, v / 2, odd)?;
                sys = next;
                chain.push(t);
                continue;
            }
        };
        let (sub, pairs) = built;
        trace.push(CaseStep::Case(case, if sub == ' ' { None } else { Some(sub) }));
        let swaps = chain.iter().filter(|t| t.swaps_b_and_c()).count();
        let tag = match (tag, swaps % 2) {
            (ClassTag::B, 1) => ClassTag::C,
            (t, _) => t,
        };
        let class = BrauerClass::new(tag, s);
        let mut last_err = Error::Witness(alloc::format!("case {case} produced no candidate pair"));
        for pair in pairs {
            let mut pts = match (pull_back(&chain, pair[0], &pm, &model), pull_back(&chain, pair[1], &pm, &model)) {
                (Ok(a), Ok(b)) => [a, b],
                (Err(e), _) | (_, Err(e)) => {
                    last_err = e;
                    continue;
                }
            };
            match (evaluate_near(&class, s, &model, &mut pts[0]), evaluate_near(&class, s, &model, &mut pts[1])) {
                (Ok(v1), Ok(v2)) if v1 != v2 => {
                    return Ok(SurjectivityWitness { class: tag, points: pts, values: [v1, v2], trace });
                }
                (Ok(_), Ok(_)) => last_err = Error::Witness(alloc::format!("case {case}: invariants of {tag} agree")),
                (Err(e), _) | (_, Err(e)) => last_err = e,
            }
        }
        if let Error::Indeterminate(_) = last_err {
            trace.push(CaseStep::Resampled);
            return sampled_witness(s, &model, tag, trace, budget).map_err(|_| last_err);
        }
        return Err(last_err);
    }
    crate::bail!(
        Witness,
        "case dispatch did not terminate: {}",
        trace.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
    )
}
