use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::modular::{is_prime_u64, legendre_u64, reduce_big, split_valuation};
use crate::error::{Error, Result};

/// A place of `Q`: a finite prime or the real place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Prime(u64),
    Infinite,
}

impl Place {
    /// Certified prime place.
    pub fn prime(q: u64) -> Result<Self> {
        if !is_prime_u64(q) {
            crate::bail!(InvalidArgument, "{q} is not prime");
        }
        Ok(Place::Prime(q))
    }

    pub fn as_prime(&self) -> Option<u64> {
        match self {
            Place::Prime(q) => Some(*q),
            Place::Infinite => None,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(q) => write!(f, "{q}"),
            Place::Infinite => f.write_str("inf"),
        }
    }
}

/// A nonzero element of `Q_q` described by its valuation and the residue of
/// its unit part: modulo `q` for odd `q`, modulo 8 for `q = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalUnitData {
    pub valuation: i64,
    pub unit: u64,
}

/// Hilbert symbol at a finite prime from valuation/unit data.
pub fn hilbert_from_parts(q: u64, a: LocalUnitData, b: LocalUnitData) -> i8 {
    let (alpha, beta) = (a.valuation.rem_euclid(2) as u64, b.valuation.rem_euclid(2) as u64);
    if q == 2 {
        let eps = |u: u64| ((u % 8) - 1) / 2 % 2;
        let omega = |u: u64| {
            let u = u % 8;
            ((u * u - 1) / 8) % 2
        };
        let e = eps(a.unit) * eps(b.unit) + alpha * omega(b.unit) + beta * omega(a.unit);
        return if e % 2 == 0 { 1 } else { -1 };
    }
    let mut s: i8 = 1;
    if alpha * beta % 2 == 1 && q % 4 == 3 {
        s = -s;
    }
    if beta == 1 {
        s *= legendre_u64(a.unit, q);
    }
    if alpha == 1 {
        s *= legendre_u64(b.unit, q);
    }
    s
}

fn unit_modulus(q: u64) -> u64 {
    if q == 2 {
        8
    } else {
        q
    }
}

/// Valuation and unit residue of a nonzero rational at the prime `q`.
pub fn local_data(x: &BigRational, q: u64) -> Result<LocalUnitData> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    let (vn, un) = split_valuation(x.numer(), q).expect("nonzero numerator");
    let (vd, ud) = split_valuation(x.denom(), q).expect("nonzero denominator");
    let m = unit_modulus(q);
    let un = reduce_big(&un, m);
    let ud = reduce_big(&ud, m);
    let inv = super::modular::inv_mod(ud, m).expect("unit denominator");
    Ok(LocalUnitData { valuation: vn as i64 - vd as i64, unit: super::modular::mul_mod(un, inv, m) })
}

/// Local Hilbert symbol `(a, b)_v` of two nonzero rationals.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, v: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput);
    }
    match v {
        Place::Infinite => Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 }),
        Place::Prime(q) => {
            if !is_prime_u64(q) {
                crate::bail!(InvalidArgument, "{q} is not prime");
            }
            Ok(hilbert_from_parts(q, local_data(a, q)?, local_data(b, q)?))
        }
    }
}

/// Integer convenience wrapper around [`hilbert_symbol`].
pub fn hilbert_symbol_int(a: i64, b: i64, v: Place) -> Result<i8> {
    hilbert_symbol(&BigRational::from_integer(BigInt::from(a)), &BigRational::from_integer(BigInt::from(b)), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(hilbert_symbol_int(-1, -1, Place::Infinite).unwrap(), -1);
        assert_eq!(hilbert_symbol_int(13, 2, Place::Prime(13)).unwrap(), -1);
        assert_eq!(hilbert_symbol_int(5, -1, Place::Prime(5)).unwrap(), 1);
        assert_eq!(hilbert_symbol_int(-1, -1, Place::Prime(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol_int(2, 5, Place::Prime(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol_int(0, 5, Place::Prime(2)), Err(Error::ZeroInput));
        assert!(hilbert_symbol_int(3, 5, Place::Prime(9)).is_err());
    }

    #[test]
    fn place_display() {
        assert_eq!(alloc::format!("{}", Place::Prime(13)), "13");
        assert_eq!(alloc::format!("{}", Place::Infinite), "inf");
    }
}
