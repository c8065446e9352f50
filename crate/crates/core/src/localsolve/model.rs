//! Residue models of a pair of quadrics modulo `q^K`, approximate local
//! points and Hensel certificates.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::arith::modular::{sqrt_mod_u64, PowerModulus};
use crate::error::{Error, Result};
use crate::quadform::surface::{QuadricPair, X, Y, Z};

type Terms = Vec<(usize, usize, u64)>;

/// `c_y y^2 + R_0(u, v, x)` and `c_z z^2 + R_1(u, v, x)`.
#[derive(Debug, Clone)]
pub(crate) struct SplitShape {
    pub cy: u64,
    pub cz: u64,
    pub rest: [Terms; 2],
}

/// Both quadrics reduced modulo `q^K` for the largest `K` with `q^K < 2^63`.
#[derive(Debug, Clone)]
pub struct LocalModel {
    pub q: u64,
    pub top: PowerModulus,
    forms: [Terms; 2],
    pub(crate) split: Option<SplitShape>,
}

impl LocalModel {
    pub fn new(pair: &QuadricPair, q: u64) -> Result<Self> {
        if !crate::arith::is_prime_u64(q) {
            crate::bail!(InvalidArgument, "{q} is not prime");
        }
        let top = PowerModulus::new(q, PowerModulus::max_exponent(q))?;
        let reduce = |t: &[(usize, usize, BigInt)]| -> Terms {
            t.iter().map(|(i, j, c)| (*i, *j, top.reduce(c))).filter(|t| t.2 != 0).collect()
        };
        let t0 = pair.forms[0].terms();
        let t1 = pair.forms[1].terms();
        let forms = [reduce(&t0), reduce(&t1)];
        let split = Self::detect_split(&t0, &t1).map(|(cy, cz)| SplitShape {
            cy: top.reduce(&cy),
            cz: top.reduce(&cz),
            rest: [
                reduce(&t0.iter().filter(|t| t.0 < Y && t.1 < Y).cloned().collect::<Vec<_>>()),
                reduce(&t1.iter().filter(|t| t.0 < Y && t.1 < Y).cloned().collect::<Vec<_>>()),
            ],
        });
        Ok(LocalModel { q, top, forms, split })
    }

    /// `y` only as `y^2` in the first form, `z` only as `z^2` in the second.
    fn detect_split(t0: &[(usize, usize, BigInt)], t1: &[(usize, usize, BigInt)]) -> Option<(BigInt, BigInt)> {
        let ok = |t: &[(usize, usize, BigInt)], keep: usize| -> Option<BigInt> {
            let mut c = None;
            for (i, j, v) in t {
                if *i >= Y || *j >= Y {
                    if (*i, *j) == (keep, keep) {
                        c = Some(v.clone());
                    } else {
                        return None;
                    }
                }
            }
            c
        };
        Some((ok(t0, Y)?, ok(t1, Z)?))
    }

    pub fn modulus(&self, k: u32) -> Result<PowerModulus> {
        if k > self.top.k {
            crate::bail!(
                InsufficientPrecision,
                "precision {k} exceeds the word-sized bound {} at q = {}",
                self.top.k,
                self.q
            );
        }
        Ok(self.top.truncate(k))
    }

    pub(crate) fn eval_terms(terms: &Terms, x: &[u64; 5], pm: &PowerModulus) -> u64 {
        let mut s = 0u64;
        for &(i, j, c) in terms {
            let t = pm.mul(pm.mul(c % pm.m, x[i] % pm.m), x[j] % pm.m);
            s = pm.add(s, t);
        }
        s
    }

    pub fn eval(&self, x: &[u64; 5], pm: &PowerModulus) -> [u64; 2] {
        [Self::eval_terms(&self.forms[0], x, pm), Self::eval_terms(&self.forms[1], x, pm)]
    }

    pub fn jacobian(&self, x: &[u64; 5], pm: &PowerModulus) -> [[u64; 5]; 2] {
        let mut jac = [[0u64; 5]; 2];
        for (r, terms) in self.forms.iter().enumerate() {
            for &(i, j, c) in terms {
                let c = c % pm.m;
                if i == j {
                    jac[r][i] = pm.add(jac[r][i], pm.mul(pm.mul(2, c), x[i] % pm.m));
                } else {
                    jac[r][i] = pm.add(jac[r][i], pm.mul(c, x[j] % pm.m));
                    jac[r][j] = pm.add(jac[r][j], pm.mul(c, x[i] % pm.m));
                }
            }
        }
        jac
    }

    /// Both residuals vanish modulo `q^k`.
    pub fn vanishes(&self, x: &[u64; 5], k: u32) -> Result<bool> {
        let pm = self.modulus(k)?;
        Ok(self.eval(x, &pm) == [0, 0])
    }
}

/// A primitive tuple of residues modulo `q^k` on both quadrics.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PadicApproxPoint {
    pub q: u64,
    pub k: u32,
    pub coords: [u64; 5],
}

impl PadicApproxPoint {
    pub fn new(model: &LocalModel, k: u32, coords: [u64; 5]) -> Result<Self> {
        let pm = model.modulus(k)?;
        let coords = coords.map(|c| c % pm.m);
        if coords.iter().all(|c| c % model.q == 0) {
            crate::bail!(Precondition, "tuple is not primitive modulo {}", model.q);
        }
        if model.eval(&coords, &pm) != [0, 0] {
            crate::bail!(Precondition, "tuple is not a solution modulo {}^{k}", model.q);
        }
        Ok(PadicApproxPoint { q: model.q, k, coords })
    }

    /// The same point modulo `q^j` for `j <= k`.
    pub fn truncate(&self, j: u32) -> Result<Self> {
        if j > self.k || j == 0 {
            crate::bail!(InvalidArgument, "cannot truncate a point modulo {}^{} to precision {j}", self.q, self.k);
        }
        let m = crate::arith::modular::checked_pow(self.q, j).expect("below the stored precision");
        Ok(PadicApproxPoint { q: self.q, k: j, coords: self.coords.map(|c| c % m) })
    }

    /// Primitive integer lift with coordinates in `[0, q^k)`.
    pub fn to_bigint(&self) -> [BigInt; 5] {
        self.coords.map(BigInt::from)
    }
}

impl fmt::Display for PadicApproxPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [u, v, x, y, z] = self.coords;
        write!(f, "({u}:{v}:{x}:{y}:{z}) mod {}^{}", self.q, self.k)
    }
}

/// A 2x2 minor of the Jacobian with valuation `e` at a point whose residuals
/// vanish modulo `q^(2e+1)`; the point then lifts to `Q_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LiftCertificate {
    pub minor: (usize, usize),
    pub e: u32,
}

fn minor(jac: &[[u64; 5]; 2], a: usize, b: usize, pm: &PowerModulus) -> u64 {
    pm.sub(pm.mul(jac[0][a], jac[1][b]), pm.mul(jac[0][b], jac[1][a]))
}

/// Smallest-valuation minor (lexicographically first among ties), if it
/// satisfies the Hensel condition at the point's precision.
pub fn lift_certificate(model: &LocalModel, pt: &PadicApproxPoint) -> Result<Option<LiftCertificate>> {
    if pt.coords.iter().all(|c| c % model.q == 0) {
        crate::bail!(Precondition, "tuple is not primitive");
    }
    let pm = model.modulus(pt.k)?;
    if model.eval(&pt.coords, &pm) != [0, 0] {
        crate::bail!(Precondition, "residuals do not vanish modulo {}^{}", model.q, pt.k);
    }
    Ok(certificate_at(model, &pt.coords, &pm))
}

pub(crate) fn certificate_at(model: &LocalModel, x: &[u64; 5], pm: &PowerModulus) -> Option<LiftCertificate> {
    let jac = model.jacobian(x, pm);
    let mut best: Option<LiftCertificate> = None;
    for a in 0..5 {
        for b in a + 1..5 {
            let e = pm.val(minor(&jac, a, b, pm));
            if e < pm.k && best.is_none_or(|c| e < c.e) {
                best = Some(LiftCertificate { minor: (a, b), e });
            }
        }
    }
    best.filter(|c| 2 * c.e < pm.k)
}

/// Newton iteration on the two certificate coordinates until both residuals
/// vanish modulo `q^target`. The result agrees with the input modulo
/// `q^(k - e)`.
pub fn newton_lift(
    model: &LocalModel,
    pt: &PadicApproxPoint,
    cert: LiftCertificate,
    target: u32,
) -> Result<PadicApproxPoint> {
    if target <= pt.k {
        let pm = model.modulus(target)?;
        return Ok(PadicApproxPoint { q: pt.q, k: target, coords: pt.coords.map(|c| c % pm.m) });
    }
    let work = model.modulus(target + cert.e)?;
    let out = model.modulus(target)?;
    let qe = work.pow_q(cert.e);
    let (a, b) = cert.minor;
    let mut x = pt.coords;
    for _ in 0..64 {
        let f = model.eval(&x, &work);
        if f.iter().all(|r| r % out.m == 0) {
            return Ok(PadicApproxPoint { q: pt.q, k: target, coords: x.map(|c| c % out.m) });
        }
        let jac = model.jacobian(&x, &work);
        let d = minor(&jac, a, b, &work);
        if work.val(d) != cert.e {
            crate::bail!(Witness, "minor valuation changed during Newton iteration");
        }
        let w = out.inv(d / qe).expect("unit part of the minor");
        // adj(J_ab) * F, divided by q^e.
        let ra = work.sub(work.mul(jac[1][b], f[0]), work.mul(jac[0][b], f[1]));
        let rb = work.sub(work.mul(jac[0][a], f[1]), work.mul(jac[1][a], f[0]));
        if ra % qe != 0 || rb % qe != 0 {
            crate::bail!(Witness, "Hensel condition fails during Newton iteration");
        }
        let da = out.mul(ra / qe, w);
        let db = out.mul(rb / qe, w);
        x[a] = out.sub(x[a] % out.m, da);
        x[b] = out.sub(x[b] % out.m, db);
    }
    Err(Error::Witness("Newton iteration did not converge".into()))
}

/// Points `(0:0:1:s:s)` with `s^2 = p` in `Q_q`, when `p` is a `q`-adic
/// unit square; these lie on every subfamily surface with parameter `p`.
pub fn sqrt_p_point(model: &LocalModel, p: u64, k: u32) -> Result<Option<PadicApproxPoint>> {
    let q = model.q;
    if q == p {
        return Ok(None);
    }
    let pm = model.modulus(k.max(1))?;
    let s = if q == 2 {
        if p % 8 != 1 {
            return Ok(None);
        }
        let wide = model.modulus((k + 1).max(3))?;
        wide.sqrt_unit(p % wide.m, None).map(|r| r % pm.m)
    } else {
        match sqrt_mod_u64(p % q, q) {
            None => return Ok(None),
            Some(r0) => pm.sqrt_unit(p % pm.m, Some(r0)),
        }
    };
    let Some(s) = s else { return Ok(None) };
    let mut c = [0u64; 5];
    c[X] = 1;
    c[Y] = s;
    c[Z] = s;
    PadicApproxPoint::new(model, k, c).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::SubfamilySurface;

    #[test]
    fn newton_doubles() {
        let s = SubfamilySurface::new(13, 2, -13, 1, -6, 1, 2);
        let m = LocalModel::new(&s.quadrics(), 3).unwrap();
        let pm = m.modulus(1).unwrap();
        let x = super::super::residue_points(&m, &Default::default())
            .unwrap()
            .into_iter()
            .find(|x| certificate_at(&m, x, &pm).is_some_and(|c| c.e == 0))
            .unwrap();
        let pt = PadicApproxPoint::new(&m, 1, x).unwrap();
        let c = lift_certificate(&m, &pt).unwrap().unwrap();
        assert_eq!(c.e, 0);
        let lifted = newton_lift(&m, &pt, c, 12).unwrap();
        assert!(m.vanishes(&lifted.coords, 12).unwrap());
    }

    #[test]
    fn zero_tuple_rejected() {
        let s = SubfamilySurface::new(13, 2, -13, 1, -6, 1, 2);
        let m = LocalModel::new(&s.quadrics(), 3).unwrap();
        let pt = PadicApproxPoint { q: 3, k: 2, coords: [0, 0, 0, 0, 0] };
        assert!(matches!(lift_certificate(&m, &pt), Err(Error::Precondition(_))));
    }

    #[test]
    fn sqrt_witness() {
        let s = SubfamilySurface::new(13, 2, -13, 1, -6, 1, 2);
        let m = LocalModel::new(&s.quadrics(), 3).unwrap();
        let pt = sqrt_p_point(&m, 13, 6).unwrap().unwrap();
        assert!(m.vanishes(&pt.coords, 6).unwrap());
        let m = LocalModel::new(&s.quadrics(), 5).unwrap();
        assert!(sqrt_p_point(&m, 13, 4).unwrap().is_none());
    }
}
