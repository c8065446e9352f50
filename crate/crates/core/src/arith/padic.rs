//! Fixed-precision elements of `Q_q`.

use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::hilbert::LocalUnitData;
use super::modular::{split_valuation, PowerModulus};
use crate::error::{Error, Result};

/// `q^valuation * unit` with the unit known modulo `q^precision`.
///
/// `precision == 0` encodes the indeterminate zero `O(q^valuation)`: a value
/// whose every known digit vanishes. Its square class is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicScalar {
    q: u64,
    valuation: i64,
    unit: u64,
    precision: u32,
}

impl PadicScalar {
    /// From a residue modulo `q^k` (absolute precision `k`).
    pub fn from_residue(q: u64, k: u32, r: u64) -> Result<Self> {
        let pm = PowerModulus::new(q, k)?;
        let r = r % pm.m;
        if r == 0 {
            return Ok(Self::indeterminate(q, k as i64));
        }
        let e = pm.val(r);
        let unit = r / pm.pow_q(e);
        Ok(PadicScalar { q, valuation: e as i64, unit, precision: k - e })
    }

    /// From an exact rational, keeping `precision` unit digits.
    pub fn from_rational(x: &BigRational, q: u64, precision: u32) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::ZeroInput);
        }
        let pm = PowerModulus::new(q, precision)?;
        let (vn, un) = split_valuation(x.numer(), q).expect("nonzero");
        let (vd, ud) = split_valuation(x.denom(), q).expect("nonzero");
        let inv = pm.inv(pm.reduce(&ud)).expect("unit denominator");
        Ok(PadicScalar { q, valuation: vn as i64 - vd as i64, unit: pm.mul(pm.reduce(&un), inv), precision })
    }

    pub fn from_int(n: &BigInt, q: u64, precision: u32) -> Result<Self> {
        Self::from_rational(&BigRational::from_integer(n.clone()), q, precision)
    }

    pub fn indeterminate(q: u64, abs_precision: i64) -> Self {
        PadicScalar { q, valuation: abs_precision, unit: 0, precision: 0 }
    }

    pub fn one(q: u64, precision: u32) -> Self {
        PadicScalar { q, valuation: 0, unit: 1, precision }
    }

    pub fn prime(&self) -> u64 {
        self.q
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn unit(&self) -> u64 {
        self.unit
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_indeterminate(&self) -> bool {
        self.precision == 0
    }

    /// Valuation and unit residue as needed by the Hilbert symbol.
    pub fn local_data(&self) -> Result<LocalUnitData> {
        let need = if self.q == 2 { 3 } else { 1 };
        if self.precision < need {
            crate::bail!(
                InsufficientPrecision,
                "square class of O({}^{}) needs {need} unit digits, have {}",
                self.q,
                self.valuation,
                self.precision
            );
        }
        let m = if self.q == 2 { 8 } else { self.q };
        Ok(LocalUnitData { valuation: self.valuation, unit: self.unit % m })
    }

    fn modulus(&self) -> PowerModulus {
        PowerModulus::new(self.q, self.precision).expect("precision already validated")
    }

    pub fn mul(&self, other: &PadicScalar) -> PadicScalar {
        debug_assert_eq!(self.q, other.q);
        let valuation = self.valuation + other.valuation;
        let precision = self.precision.min(other.precision);
        if precision == 0 {
            let abs = match (self.is_indeterminate(), other.is_indeterminate()) {
                (true, true) => valuation,
                (true, false) => valuation,
                (false, true) => valuation,
                (false, false) => unreachable!(),
            };
            return Self::indeterminate(self.q, abs);
        }
        let pm = PowerModulus::new(self.q, precision).unwrap();
        PadicScalar { q: self.q, valuation, unit: pm.mul(self.unit, other.unit), precision }
    }

    pub fn neg(&self) -> PadicScalar {
        if self.is_indeterminate() {
            return *self;
        }
        PadicScalar { unit: self.modulus().neg(self.unit), ..*self }
    }

    /// Multiplicative inverse; fails on the indeterminate zero.
    pub fn inv(&self) -> Result<PadicScalar> {
        if self.is_indeterminate() {
            crate::bail!(InsufficientPrecision, "inverse of an indeterminate zero");
        }
        let unit = self.modulus().inv(self.unit).expect("unit");
        Ok(PadicScalar { valuation: -self.valuation, unit, ..*self })
    }

    /// Absolute precision: the value is known modulo `q^(valuation + precision)`.
    pub fn absolute_precision(&self) -> i64 {
        self.valuation + self.precision as i64
    }

    pub fn add(&self, other: &PadicScalar) -> PadicScalar {
        debug_assert_eq!(self.q, other.q);
        let abs = self.absolute_precision().min(other.absolute_precision());
        let base = self.valuation.min(other.valuation);
        if abs <= base {
            return Self::indeterminate(self.q, abs);
        }
        // Work with integers q^(v - base) * unit modulo q^(abs - base).
        let pm = PowerModulus::new(self.q, (abs - base) as u32).unwrap();
        let lift = |s: &PadicScalar| -> u64 {
            if s.is_indeterminate() || s.valuation >= abs {
                return 0;
            }
            pm.mul(pm.pow_q((s.valuation - base) as u32), s.unit % pm.m)
        };
        let sum = pm.add(lift(self), lift(other));
        if sum == 0 {
            return Self::indeterminate(self.q, abs);
        }
        let e = pm.val(sum);
        PadicScalar { q: self.q, valuation: base + e as i64, unit: sum / pm.pow_q(e), precision: pm.k - e }
    }

    pub fn sub(&self, other: &PadicScalar) -> PadicScalar {
        self.add(&other.neg())
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_indeterminate() {
            write!(f, "O({}^{})", self.q, self.valuation)
        } else {
            write!(f, "{}^{} * {} + O({}^{})", self.q, self.valuation, self.unit, self.q, self.absolute_precision())
        }
    }
}

/// Square root of `a` with `target_precision` unit digits.
///
/// For odd `q` the root is the lift of [`super::sqrt_mod`]'s residue.
/// For `q = 2` a root is determined modulo `2^(n-1)` by `a` modulo `2^n`,
/// so the input needs one digit more than the target.
pub fn hensel_sqrt(a: &PadicScalar, target_precision: u32) -> Result<PadicScalar> {
    if a.is_indeterminate() {
        crate::bail!(InsufficientPrecision, "square root of {a}");
    }
    if a.valuation.rem_euclid(2) != 0 {
        crate::bail!(NotASquare, "odd valuation {}", a.valuation);
    }
    let q = a.q;
    let need = if q == 2 { (target_precision + 1).max(3) } else { target_precision };
    if a.precision < need {
        crate::bail!(InsufficientPrecision, "need {need} digits of the radicand, have {}", a.precision);
    }
    let pm = PowerModulus::new(q, need)?;
    if q == 2 && a.unit % 8 != 1 {
        crate::bail!(NotASquare, "unit {} is not 1 mod 8", a.unit % 8);
    }
    let hint = if q == 2 { None } else { super::modular::sqrt_mod_u64(a.unit % q, q) };
    let r = pm
        .sqrt_unit(a.unit % pm.m, hint)
        .ok_or_else(|| Error::NotASquare(alloc::format!("unit {} mod {q}", a.unit % q)))?;
    let out = PowerModulus::new(q, target_precision)?;
    Ok(PadicScalar { q, valuation: a.valuation / 2, unit: r % out.m, precision: target_precision })
}
