//! Solubility over `R`.
//!
//! Two real quadrics in five variables have a common nonzero zero unless
//! some member of their pencil is definite. Definiteness is constant on each
//! open arc of `P^1(R)` between real roots of the determinant, so one
//! rational sample per arc decides the question.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::search::{InsolubilityProof, SolubilityVerdict, SolubilityWitness};
use crate::quadform::linalg::{det, submatrix, IntMatrix};
use crate::quadform::{discriminant_quintic, GeneralSurface, PencilPoint, SubfamilySurface};

type Poly = Vec<BigRational>;

/// `(0:0:1:sqrt p:sqrt p)` lies on every subfamily surface.
#[allow(non_snake_case)]
pub fn decide_R(_s: &SubfamilySurface) -> SolubilityVerdict {
    SolubilityVerdict::Soluble(SolubilityWitness::RealSqrtP)
}

#[allow(non_snake_case)]
pub fn decide_R_general(g: &GeneralSurface) -> SolubilityVerdict {
    match definite_member(g) {
        Some(t) => SolubilityVerdict::Insoluble(InsolubilityProof::DefiniteMember(format!("{t}"))),
        None => SolubilityVerdict::Soluble(SolubilityWitness::RealIndefinitePencil),
    }
}

/// Sign of definiteness: `Some(true)` positive, `Some(false)` negative.
pub fn definiteness(m: &IntMatrix) -> Option<bool> {
    let n = m.len();
    let mut pos = true;
    let mut neg = true;
    for k in 1..=n {
        let idx: Vec<usize> = (0..k).collect();
        let d = det(&submatrix(m, &idx, &idx));
        if !d.is_positive() {
            pos = false;
        }
        let want_neg = if k % 2 == 1 { d.is_negative() } else { d.is_positive() };
        if !want_neg {
            neg = false;
        }
    }
    if pos {
        Some(true)
    } else if neg {
        Some(false)
    } else {
        None
    }
}

/// A definite member of the pencil, if any.
pub fn definite_member(g: &GeneralSurface) -> Option<PencilPoint> {
    arc_samples(g).into_iter().find(|t| definiteness(&g.member(t)).is_some())
}

/// `(0:1)` plus one rational point on each arc cut out by the real roots of
/// the determinant in the chart `(1 : t)`.
pub(crate) fn arc_samples(g: &GeneralSurface) -> Vec<PencilPoint> {
    let f = discriminant_quintic(g);
    let mut out = Vec::new();
    if let Ok(t) = PencilPoint::new(BigInt::zero(), BigInt::one()) {
        out.push(t);
    }
    // det(Mat + t Mat~) = sum c_i t^i with c_i the coefficient of kappa^(5-i) lambda^i.
    let poly: Poly = f.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let poly = trim(poly);
    if poly.is_empty() {
        return out;
    }
    let sq = squarefree(&poly);
    for t in samples_between_roots(&sq) {
        let (n, d) = (t.numer().clone(), t.denom().clone());
        if let Ok(pt) = PencilPoint::new(d, n) {
            out.push(pt);
        }
    }
    out
}

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn eval(p: &Poly, t: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * t + c)
}

fn derivative(p: &Poly) -> Poly {
    p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect()
}

fn rem(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    let lb = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let q = r.last().unwrap() / &lb;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &q * c;
        }
        r.pop();
        r = trim(r);
    }
    r
}

fn quot(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    let lb = b.last().unwrap().clone();
    let mut q = alloc::vec![BigRational::zero(); a.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let c = r.last().unwrap() / &lb;
        let shift = r.len() - b.len();
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &c * bc;
        }
        q[shift] = c;
        r.pop();
        r = trim(r);
    }
    q
}

fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn squarefree(p: &Poly) -> Poly {
    let d = derivative(p);
    if d.is_empty() {
        return p.clone();
    }
    let g = gcd(p, &d);
    if g.len() <= 1 {
        p.clone()
    } else {
        quot(p, &g)
    }
}

fn sturm_chain(p: &Poly) -> Vec<Poly> {
    let mut chain = alloc::vec![p.clone(), derivative(p)];
    while chain.last().is_some_and(|q| !q.is_empty()) {
        let n = chain.len();
        let r: Poly = rem(&chain[n - 2], &chain[n - 1]).into_iter().map(|c| -c).collect();
        if r.is_empty() {
            break;
        }
        chain.push(r);
    }
    chain.retain(|q| !q.is_empty());
    chain
}

fn sign_changes(chain: &[Poly], t: &BigRational) -> usize {
    let signs: Vec<bool> = chain.iter().map(|q| eval(q, t)).filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Rational non-roots: one left of all real roots, one between each
/// consecutive pair, one right of all.
fn samples_between_roots(p: &Poly) -> Vec<BigRational> {
    if p.len() <= 1 {
        return alloc::vec![BigRational::zero()];
    }
    let chain = sturm_chain(p);
    let lead = p.last().unwrap().abs();
    let bound = p.iter().map(|c| c.abs() / &lead).fold(BigRational::zero(), |a, b| if b > a { b } else { a })
        + BigRational::one();
    let lo = -bound.clone();
    let hi = bound;
    let total = sign_changes(&chain, &lo) - sign_changes(&chain, &hi);
    if total == 0 {
        return alloc::vec![BigRational::zero()];
    }
    let mut isolated: Vec<(BigRational, BigRational)> = Vec::new();
    let mut stack = alloc::vec![(lo, hi)];
    while let Some((a, b)) = stack.pop() {
        let n = sign_changes(&chain, &a) - sign_changes(&chain, &b);
        if n == 0 {
            continue;
        }
        if n == 1 {
            isolated.push((a, b));
            continue;
        }
        let m = non_root_near_mid(p, &a, &b);
        stack.push((a, m.clone()));
        stack.push((m, b));
    }
    isolated.sort_by(|x, y| x.0.cmp(&y.0));
    let mut out = alloc::vec![isolated[0].0.clone()];
    out.extend(isolated.iter().map(|iv| iv.1.clone()));
    out
}

fn non_root_near_mid(p: &Poly, a: &BigRational, b: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut m = (a + b) / &two;
    let mut k = 3i64;
    while eval(p, &m).is_zero() {
        m = a + (b - a) / BigRational::from_integer(BigInt::from(k));
        k += 2;
    }
    m
}
