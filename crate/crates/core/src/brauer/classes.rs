//! The classes `A`, `B`, `C` as quaternion symbols `(p, f)` and their local
//! invariants.
//!
//! A symbol `(p, f)` only depends on `f` up to squares, so a representation
//! is stored as a constant times a parity vector over six linear factors.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::hilbert::{hilbert_from_parts, local_data, LocalUnitData};
use crate::arith::{hilbert_symbol, PadicScalar, Place};
use crate::error::{Error, Result};
use crate::localsolve::{CertifiedPoint, LocalModel, PadicApproxPoint};
use crate::quadform::surface::{U, V, Y, Z};
use crate::quadform::{RationalPoint, SubfamilySurface};

/// Value of a local invariant in `(1/2)Z/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InvariantValue {
    Zero,
    Half,
}

impl InvariantValue {
    pub fn from_symbol(s: i8) -> Self {
        if s == 1 {
            InvariantValue::Zero
        } else {
            InvariantValue::Half
        }
    }
}

impl Add for InvariantValue {
    type Output = InvariantValue;
    fn add(self, rhs: InvariantValue) -> InvariantValue {
        if self == rhs {
            InvariantValue::Zero
        } else {
            InvariantValue::Half
        }
    }
}

impl fmt::Display for InvariantValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvariantValue::Zero => "0",
            InvariantValue::Half => "1/2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassTag {
    A,
    B,
    C,
}

impl ClassTag {
    pub const ALL: [ClassTag; 3] = [ClassTag::A, ClassTag::B, ClassTag::C];
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassTag::A => "A",
            ClassTag::B => "B",
            ClassTag::C => "C",
        })
    }
}

/// Linear forms on the surface, in bit order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    U,
    V,
    /// `A u + B v`
    L1,
    /// `C u + D v`
    L2,
    /// `z - y`
    ZMinusY,
    /// `z + y`
    ZPlusY,
}

impl Factor {
    pub const ALL: [Factor; 6] = [Factor::U, Factor::V, Factor::L1, Factor::L2, Factor::ZMinusY, Factor::ZPlusY];

    fn bit(self) -> u8 {
        1 << (self as u8)
    }

    fn name(self) -> &'static str {
        match self {
            Factor::U => "u",
            Factor::V => "v",
            Factor::L1 => "(Au+Bv)",
            Factor::L2 => "(Cu+Dv)",
            Factor::ZMinusY => "(z-y)",
            Factor::ZPlusY => "(z+y)",
        }
    }
}

/// `(p, constant * prod f_i)` up to squares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolRep {
    pub constant: BigInt,
    pub factors: u8,
}

impl SymbolRep {
    fn new(constant: BigInt, fs: &[Factor]) -> Self {
        SymbolRep { constant, factors: fs.iter().fold(0, |acc, f| acc ^ f.bit()) }
    }

    pub fn product(&self, other: &SymbolRep) -> SymbolRep {
        SymbolRep { constant: &self.constant * &other.constant, factors: self.factors ^ other.factors }
    }

    pub fn contains(&self, f: Factor) -> bool {
        self.factors & f.bit() != 0
    }
}

impl fmt::Display for SymbolRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p, {}", self.constant)?;
        for fac in Factor::ALL {
            if self.contains(fac) {
                write!(f, "*{}", fac.name())?;
            }
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrauerClass {
    pub tag: ClassTag,
    pub reps: Vec<SymbolRep>,
}

impl BrauerClass {
    /// `A = (p, u/(Au+Bv)) = (p, Mv/(Au+Bv))`,
    /// `B = (p, (z-y)/u) = (p, AC(z+y)/u)`,
    /// `C = (p, (Au+Bv)/(z-y))` together with every product of an `A`- and
    /// a `B`-representation.
    pub fn new(tag: ClassTag, s: &SubfamilySurface) -> Self {
        let one = BigInt::one();
        let a_reps = alloc::vec![
            SymbolRep::new(one.clone(), &[Factor::U, Factor::L1]),
            SymbolRep::new(s.m.clone(), &[Factor::V, Factor::L1])
        ];
        let b_reps = alloc::vec![
            SymbolRep::new(one.clone(), &[Factor::ZMinusY, Factor::U]),
            SymbolRep::new(&s.a * &s.c, &[Factor::ZPlusY, Factor::U]),
        ];
        let reps = match tag {
            ClassTag::A => a_reps,
            ClassTag::B => b_reps,
            ClassTag::C => {
                let mut r = alloc::vec![SymbolRep::new(one, &[Factor::L1, Factor::ZMinusY])];
                for a in &a_reps {
                    for b in &b_reps {
                        let prod = a.product(b);
                        if !r.contains(&prod) {
                            r.push(prod);
                        }
                    }
                }
                r
            }
        };
        BrauerClass { tag, reps }
    }

    pub fn all(s: &SubfamilySurface) -> [BrauerClass; 3] {
        ClassTag::ALL.map(|t| BrauerClass::new(t, s))
    }
}

fn factor_residue(f: Factor, s: &SubfamilySurface, c: &[u64; 5], m: u64) -> u64 {
    use crate::arith::modular::{add_mod, mul_mod, reduce_big, sub_mod};
    match f {
        Factor::U => c[U] % m,
        Factor::V => c[V] % m,
        Factor::L1 => add_mod(mul_mod(reduce_big(&s.a, m), c[U], m), mul_mod(reduce_big(&s.b, m), c[V], m), m),
        Factor::L2 => add_mod(mul_mod(reduce_big(&s.c, m), c[U], m), mul_mod(reduce_big(&s.d, m), c[V], m), m),
        Factor::ZMinusY => sub_mod(c[Z] % m, c[Y] % m, m),
        Factor::ZPlusY => add_mod(c[Z] % m, c[Y] % m, m),
    }
}

fn factor_exact(f: Factor, s: &SubfamilySurface, c: &[BigInt; 5]) -> BigInt {
    match f {
        Factor::U => c[U].clone(),
        Factor::V => c[V].clone(),
        Factor::L1 => &s.a * &c[U] + &s.b * &c[V],
        Factor::L2 => &s.c * &c[U] + &s.d * &c[V],
        Factor::ZMinusY => &c[Z] - &c[Y],
        Factor::ZPlusY => &c[Z] + &c[Y],
    }
}

/// Square-class data of a representation at an approximate `Q_q` point, or
/// `None` when the digits known do not determine it.
fn rep_local_data(rep: &SymbolRep, s: &SubfamilySurface, pt: &PadicApproxPoint) -> Option<LocalUnitData> {
    let (q, k) = (pt.q, pt.k);
    let m = crate::arith::modular::checked_pow(q, k)?;
    let cprec = if q == 2 { k.max(3) } else { k };
    let mut acc = PadicScalar::from_int(&rep.constant, q, cprec).ok()?;
    for f in Factor::ALL {
        if rep.contains(f) {
            let r = factor_residue(f, s, &pt.coords, m);
            let x = PadicScalar::from_residue(q, k, r).ok()?;
            if x.is_indeterminate() {
                return None;
            }
            acc = acc.mul(&x);
        }
    }
    acc.local_data().ok()
}

fn combine(values: impl Iterator<Item = Option<InvariantValue>>, what: impl Fn() -> String) -> Result<InvariantValue> {
    let mut first = None;
    for v in values.flatten() {
        match first {
            None => first = Some(v),
            Some(w) if w != v => {
                return Err(Error::RepresentationMismatch(alloc::format!("representations disagree at {}", what())));
            }
            _ => {}
        }
    }
    first.ok_or_else(|| Error::Indeterminate(alloc::format!("every representation is indeterminate at {}", what())))
}

fn eval_reps_local(reps: &[SymbolRep], s: &SubfamilySurface, pt: &PadicApproxPoint) -> Result<InvariantValue> {
    let p_data = local_data(&BigRational::from_integer(s.p_big()), pt.q)?;
    combine(
        reps.iter().map(|r| {
            rep_local_data(r, s, pt).map(|d| InvariantValue::from_symbol(hilbert_from_parts(pt.q, p_data, d)))
        }),
        || alloc::format!("{pt}"),
    )
}

/// `inv_q` of a class at a point known modulo `q^k`; the coordinates must
/// agree with a true `Q_q` point to that precision.
pub fn evaluate_local(class: &BrauerClass, s: &SubfamilySurface, pt: &PadicApproxPoint) -> Result<InvariantValue> {
    match class.tag {
        ClassTag::A | ClassTag::B => eval_reps_local(&class.reps, s, pt),
        ClassTag::C => {
            let direct = eval_reps_local(&class.reps, s, pt);
            let a = eval_reps_local(&BrauerClass::new(ClassTag::A, s).reps, s, pt);
            let b = eval_reps_local(&BrauerClass::new(ClassTag::B, s).reps, s, pt);
            match (a, b, direct) {
                (Ok(a), Ok(b), Ok(d)) if a + b != d => {
                    Err(Error::RepresentationMismatch(alloc::format!("C = {d} but A + B = {} at {pt}", a + b)))
                }
                (Ok(a), Ok(b), _) => Ok(a + b),
                (_, _, d) => d,
            }
        }
    }
}

/// Number of precision doublings tried before giving up.
pub const ESCALATIONS: u32 = 4;

/// `inv_q` at a sampled point, re-lifting to higher precision while every
/// representation is indeterminate.
pub fn evaluate_certified(
    class: &BrauerClass,
    s: &SubfamilySurface,
    model: &LocalModel,
    pt: &CertifiedPoint,
) -> Result<InvariantValue> {
    let mut current = pt.clone();
    for round in 0..=ESCALATIONS {
        let k = current.effective_precision();
        let pm = model.modulus(k)?;
        let exact = PadicApproxPoint { q: model.q, k, coords: current.point.coords.map(|c| c % pm.m) };
        match evaluate_local(class, s, &exact) {
            Err(Error::Indeterminate(msg)) => {
                let next = (current.point.k * 2).min(model.top.k.saturating_sub(current.cert.e));
                if round == ESCALATIONS || next <= current.point.k {
                    return Err(Error::Indeterminate(msg));
                }
                current = current.relift(model, next)?;
            }
            other => return other,
        }
    }
    unreachable!()
}

fn rep_rational(rep: &SymbolRep, s: &SubfamilySurface, pt: &RationalPoint) -> Option<BigRational> {
    let mut acc = rep.constant.clone();
    for f in Factor::ALL {
        if rep.contains(f) {
            let x = factor_exact(f, s, pt.coords());
            if x.is_zero() {
                return None;
            }
            acc *= x;
        }
    }
    Some(BigRational::from_integer(acc))
}

fn eval_reps_rational(
    reps: &[SymbolRep],
    s: &SubfamilySurface,
    pt: &RationalPoint,
    v: Place,
) -> Result<InvariantValue> {
    let p = BigRational::from_integer(s.p_big());
    let mut vals = Vec::new();
    for r in reps {
        vals.push(match rep_rational(r, s, pt) {
            Some(f) => Some(InvariantValue::from_symbol(hilbert_symbol(&p, &f, v)?)),
            None => None,
        });
    }
    combine(vals.into_iter(), || alloc::format!("{pt} at {v}"))
}

/// `inv_v` of a class at a rational point.
pub fn evaluate_rational(
    class: &BrauerClass,
    s: &SubfamilySurface,
    pt: &RationalPoint,
    v: Place,
) -> Result<InvariantValue> {
    if !s.quadrics().contains(pt) {
        crate::bail!(Precondition, "{pt} is not on the surface");
    }
    match class.tag {
        ClassTag::A | ClassTag::B => eval_reps_rational(&class.reps, s, pt, v),
        ClassTag::C => {
            let direct = eval_reps_rational(&class.reps, s, pt, v);
            let a = eval_reps_rational(&BrauerClass::new(ClassTag::A, s).reps, s, pt, v);
            let b = eval_reps_rational(&BrauerClass::new(ClassTag::B, s).reps, s, pt, v);
            match (a, b, direct) {
                (Ok(a), Ok(b), Ok(d)) if a + b != d => {
                    Err(Error::RepresentationMismatch(alloc::format!("C = {d} but A + B = {} at {pt}", a + b)))
                }
                (Ok(a), Ok(b), _) => Ok(a + b),
                (_, _, d) => d,
            }
        }
    }
}

/// Nonzero values of every representation at a rational point.
pub(crate) fn rational_rep_values(s: &SubfamilySurface, pt: &RationalPoint) -> Vec<BigInt> {
    let mut out = Vec::new();
    for c in BrauerClass::all(s) {
        for r in &c.reps {
            if let Some(v) = rep_rational(r, s, pt) {
                out.push(v.numer().clone());
            }
        }
    }
    out
}
