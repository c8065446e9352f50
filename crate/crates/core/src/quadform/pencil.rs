//! The pencil `k Mat + l Mat~`, its discriminant quintic and the order-4
//! certificate built from three rank-4 members.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::linalg::{det, rank, submatrix, IntMatrix};
use super::surface::{QuadForm, QuadricPair, SubfamilySurface};
use crate::arith::{factor, prime_divisors, square_class_int, SquareClass};
use crate::error::{Error, Result};

/// A pencil given by two symmetric integer 5x5 matrices; the surface is
/// `x^T Mat x = x^T Mat~ x = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralSurface {
    pub mat: IntMatrix,
    pub mat_t: IntMatrix,
}

fn check_shape(m: &IntMatrix, name: &str) -> Result<()> {
    if m.len() != 5 || m.iter().any(|r| r.len() != 5) {
        crate::bail!(InvalidArgument, "{name} must be 5x5");
    }
    for i in 0..5 {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                crate::bail!(InvalidArgument, "{name} is not symmetric at ({i},{j})");
            }
        }
    }
    Ok(())
}

impl GeneralSurface {
    pub fn new(mat: IntMatrix, mat_t: IntMatrix) -> Result<Self> {
        check_shape(&mat, "Mat")?;
        check_shape(&mat_t, "Mat~")?;
        Ok(GeneralSurface { mat, mat_t })
    }

    /// Matrices of `2 Q0` and `2 Q1`, which are integral.
    pub fn from_quadrics(q: &QuadricPair) -> Self {
        GeneralSurface { mat: q.forms[0].gram2(), mat_t: q.forms[1].gram2() }
    }

    pub fn quadrics(&self) -> QuadricPair {
        QuadricPair { forms: [QuadForm::from_symmetric(&self.mat), QuadForm::from_symmetric(&self.mat_t)] }
    }

    /// `x^2 - 5y^2 = uv`, `x^2 - 5z^2 = (u + v)(u + 2v)`.
    pub fn bsd_example() -> Self {
        use super::surface::{U, V, X, Y, Z};
        let mut q0 = QuadForm::zero();
        q0.add_term(X, X, 1);
        q0.add_term(Y, Y, -5);
        q0.add_term(U, V, -1);
        let mut q1 = QuadForm::zero();
        q1.add_term(X, X, 1);
        q1.add_term(Z, Z, -5);
        q1.add_term(U, U, -1);
        q1.add_term(U, V, -3);
        q1.add_term(V, V, -2);
        Self::from_quadrics(&QuadricPair { forms: [q0, q1] })
    }

    pub fn member(&self, t: &PencilPoint) -> IntMatrix {
        (0..5).map(|i| (0..5).map(|j| &t.kappa * &self.mat[i][j] + &t.lambda * &self.mat_t[i][j]).collect()).collect()
    }
}

pub fn to_matrices(s: &SubfamilySurface) -> GeneralSurface {
    GeneralSurface::from_quadrics(&s.quadrics())
}

/// A point `(k:l)` of the pencil's base line, normalised with `l > 0`, or
/// `(1:0)`, and `gcd(k, l) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PencilPoint {
    pub kappa: BigInt,
    pub lambda: BigInt,
}

impl PencilPoint {
    pub fn new(kappa: BigInt, lambda: BigInt) -> Result<Self> {
        let g = kappa.gcd(&lambda);
        if g.is_zero() {
            crate::bail!(InvalidArgument, "(0:0) is not a point of P^1");
        }
        let (mut k, mut l) = (kappa / &g, lambda / &g);
        if l.is_negative() || (l.is_zero() && k.is_negative()) {
            k = -k;
            l = -l;
        }
        Ok(PencilPoint { kappa: k, lambda: l })
    }

    pub fn from_i64(k: i64, l: i64) -> Result<Self> {
        Self::new(k.into(), l.into())
    }
}

impl fmt::Display for PencilPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", self.kappa, self.lambda)
    }
}

/// Binary form `sum_i c_i k^(d-i) l^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryForm {
    pub coeffs: Vec<BigInt>,
}

impl BinaryForm {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, k: &BigInt, l: &BigInt) -> BigInt {
        let d = self.degree() as u32;
        self.coeffs.iter().enumerate().map(|(i, c)| c * k.pow(d - i as u32) * l.pow(i as u32)).sum()
    }

    /// `d/dk` and `d/dl`.
    pub fn partials(&self) -> (BinaryForm, BinaryForm) {
        let d = self.degree();
        let dk = (0..d).map(|i| &self.coeffs[i] * BigInt::from(d - i)).collect();
        let dl = (1..=d).map(|i| &self.coeffs[i] * BigInt::from(i)).collect();
        (BinaryForm { coeffs: dk }, BinaryForm { coeffs: dl })
    }

    /// Sylvester resultant.
    pub fn resultant(&self, other: &BinaryForm) -> BigInt {
        let (m, n) = (self.degree(), other.degree());
        let size = m + n;
        let mut s = alloc::vec![alloc::vec![BigInt::zero(); size]; size];
        for r in 0..n {
            for (i, c) in self.coeffs.iter().enumerate() {
                s[r][r + i] = c.clone();
            }
        }
        for r in 0..m {
            for (i, c) in other.coeffs.iter().enumerate() {
                s[n + r][r + i] = c.clone();
            }
        }
        det(&s)
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let parts: Vec<_> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| alloc::format!("({c})*k^{}*l^{i}", d - i))
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// `det(k Mat + l Mat~)` as a binary quintic, by interpolation at six values.
pub fn discriminant_quintic(g: &GeneralSurface) -> BinaryForm {
    let pts: Vec<(BigRational, BigRational)> = (0..6i64)
        .map(|t| {
            let m = g.member(&PencilPoint { kappa: BigInt::one(), lambda: t.into() });
            (BigRational::from_integer(t.into()), BigRational::from_integer(det(&m)))
        })
        .collect();
    // Lagrange basis polynomials expanded in t.
    let mut coeffs = alloc::vec![BigRational::zero(); 6];
    for (i, (ti, yi)) in pts.iter().enumerate() {
        let mut basis = alloc::vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, (tj, _)) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = alloc::vec![BigRational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b;
                next[k] -= b * tj;
            }
            basis = next;
            denom *= ti - tj;
        }
        let scale = yi / denom;
        for (k, b) in basis.iter().enumerate() {
            coeffs[k] += b * &scale;
        }
    }
    BinaryForm {
        coeffs: coeffs
            .into_iter()
            .map(|c| {
                assert!(c.is_integer(), "determinant polynomial has integer coefficients");
                c.to_integer()
            })
            .collect(),
    }
}

/// Degenerate member of the pencil at a rational root of the quintic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerateMember {
    pub t: PencilPoint,
    pub rank: usize,
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let ps = factor(&n.magnitude().clone())?;
    let mut divs = alloc::vec![BigInt::one()];
    let mut i = 0;
    while i < ps.len() {
        let mut j = i;
        while j < ps.len() && ps[j] == ps[i] {
            j += 1;
        }
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=(j - i) {
                next.push(d * &pk);
                pk *= ps[i];
            }
        }
        divs = next;
        i = j;
    }
    divs.sort();
    Ok(divs)
}

/// Rational roots of a nonzero binary form, each once, in a fixed order:
/// `(1:0)`, `(0:1)`, then increasing `k/l`.
pub fn rational_roots(f: &BinaryForm) -> Result<Vec<PencilPoint>> {
    if f.is_zero() {
        return Err(Error::Degenerate("binary form vanishes identically".into()));
    }
    let d = f.degree();
    let lo = f.coeffs.iter().take_while(|c| c.is_zero()).count();
    let hi = f.coeffs.iter().rev().take_while(|c| c.is_zero()).count();
    let mut out = Vec::new();
    if lo > 0 {
        out.push(PencilPoint::from_i64(1, 0)?);
    }
    if hi > 0 {
        out.push(PencilPoint::from_i64(0, 1)?);
    }
    let h: Vec<BigInt> = f.coeffs[lo..=d - hi].to_vec();
    let content = h.iter().fold(BigInt::zero(), |a, c| a.gcd(c));
    let h = BinaryForm { coeffs: h.into_iter().map(|c| c / &content).collect() };
    if h.degree() > 0 {
        let lead = &h.coeffs[0];
        let tail = &h.coeffs[h.degree()];
        let mut found = Vec::new();
        for s in divisors(lead)? {
            for r in divisors(tail)? {
                for r in [r.clone(), -r] {
                    if r.gcd(&s).is_one() && h.eval(&r, &s).is_zero() {
                        found.push(BigRational::new(r, s.clone()));
                    }
                }
            }
        }
        found.sort();
        found.dedup();
        for q in found {
            out.push(PencilPoint::new(q.numer().clone(), q.denom().clone())?);
        }
    }
    Ok(out)
}

pub fn degenerate_members(g: &GeneralSurface) -> Result<Vec<DegenerateMember>> {
    let f = discriminant_quintic(g);
    rational_roots(&f)?
        .into_iter()
        .map(|t| {
            let rank = rank(&g.member(&t));
            Ok(DegenerateMember { t, rank })
        })
        .collect()
}

/// Square class of the determinant of a rank-4 symmetric matrix restricted
/// to the span of the lexicographically first four coordinate vectors on
/// which it is nondegenerate.
pub fn restricted_discriminant(m: &IntMatrix) -> Result<SquareClass> {
    let r = rank(m);
    if r != 4 {
        crate::bail!(Rank, "member has rank {r}, expected 4");
    }
    for skip in (0..5).rev() {
        let idx: Vec<usize> = (0..5).filter(|&i| i != skip).collect();
        let d = det(&submatrix(m, &idx, &idx));
        if !d.is_zero() {
            return square_class_int(&d);
        }
    }
    unreachable!("a rank-4 symmetric matrix has a nonzero principal 4x4 minor")
}

#[allow(non_snake_case)]
pub fn epsilon_T(g: &GeneralSurface, t: &PencilPoint) -> Result<SquareClass> {
    restricted_discriminant(&g.member(t))
}

/// Three rank-4 members sharing a non-square discriminant class `eps`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VavCertificate {
    pub eps: SquareClass,
    pub members: [PencilPoint; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VavReport {
    pub quintic: BinaryForm,
    pub members: Vec<(DegenerateMember, Option<SquareClass>)>,
    pub certificate: Option<VavCertificate>,
}

impl VavReport {
    pub fn certified(&self) -> bool {
        self.certificate.is_some()
    }
}

pub fn vav_order4_test(g: &GeneralSurface) -> Result<VavReport> {
    let quintic = discriminant_quintic(g);
    let mut members = Vec::new();
    for m in degenerate_members(g)? {
        let eps = if m.rank == 4 { Some(epsilon_T(g, &m.t)?) } else { None };
        members.push((m, eps));
    }
    let mut certificate = None;
    for (i, (_, e)) in members.iter().enumerate() {
        let Some(e) = e else { continue };
        if e.is_square() {
            continue;
        }
        let same: Vec<&PencilPoint> =
            members[i..].iter().filter(|(_, f)| f.as_ref() == Some(e)).map(|(m, _)| &m.t).collect();
        if same.len() >= 3 {
            certificate =
                Some(VavCertificate { eps: e.clone(), members: [same[0].clone(), same[1].clone(), same[2].clone()] });
            break;
        }
    }
    Ok(VavReport { quintic, members, certificate })
}

/// `Res(df/dk, df/dl)`; nonzero iff the quintic is squarefree.
pub fn quintic_discriminant(g: &GeneralSurface) -> BigInt {
    let (a, b) = discriminant_quintic(g).partials();
    a.resultant(&b)
}

/// Primes outside which the pencil has squarefree quintic reduction
/// (a proxy for smooth reduction): those dividing `2 * 5 * Res(f_k, f_l)`.
pub fn bad_primes(g: &GeneralSurface) -> Result<Vec<u64>> {
    let r = quintic_discriminant(g);
    if r.is_zero() {
        crate::bail!(Degenerate, "discriminant quintic is not squarefree");
    }
    let mut ps = prime_divisors(&(r * 10))?;
    ps.sort();
    Ok(ps)
}
