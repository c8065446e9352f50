//! Trial division followed by Brent's variant of Pollard rho.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::modular::{is_prime_u64, mul_mod};
use crate::error::{Error, Result};

/// Trial division bound.
pub const TRIAL_BOUND: u64 = 1_000_000;

/// Iteration budget shared by all rho attempts of one factorisation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBudget {
    pub rho_iterations: u64,
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget { rho_iterations: 4_000_000 }
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn rho_brent(n: u64, c: u64, budget: &mut u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let m = 128;
    let (mut x, mut ys);
    let mut g = 1;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += m;
            *budget = budget.saturating_sub(m);
            if *budget == 0 {
                return None;
            }
            if g != 1 {
                if g == n {
                    // Backtrack one step at a time.
                    loop {
                        ys = f(ys);
                        g = gcd_u64(x.abs_diff(ys), n);
                        if g > 1 {
                            break;
                        }
                    }
                }
                return if g == n { None } else { Some(g) };
            }
        }
        r *= 2;
    }
}

fn split_u64(n: u64, out: &mut Vec<u64>, budget: &mut u64) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime_u64(n) {
        out.push(n);
        return Ok(());
    }
    if let Some(r) = perfect_square_root(n) {
        split_u64(r, out, budget)?;
        return split_u64(r, out, budget);
    }
    for c in 1..64 {
        if *budget == 0 {
            break;
        }
        if let Some(d) = rho_brent(n, c, budget) {
            split_u64(d, out, budget)?;
            return split_u64(n / d, out, budget);
        }
    }
    Err(Error::FactorBudget(alloc::format!("{n}")))
}

fn perfect_square_root(n: u64) -> Option<u64> {
    let r = num_integer::Roots::sqrt(&n);
    (r * r == n).then_some(r)
}

/// Prime factors of `n >= 1` with multiplicity, in increasing order.
///
/// Deterministic for `n < 2^64`. Larger inputs succeed only when trial
/// division leaves a cofactor below `2^64`.
pub fn factor_with(n: &BigUint, budget: FactorBudget) -> Result<Vec<u64>> {
    if n.is_zero() {
        crate::bail!(InvalidArgument, "cannot factor zero");
    }
    let mut out = Vec::new();
    let mut rest = n.clone();
    // Small primes with BigUint arithmetic only while the cofactor is big.
    let mut d: u64 = 2;
    while rest.to_u64().is_none() && d <= TRIAL_BOUND {
        let db = BigUint::from(d);
        loop {
            let (qt, r) = rest.div_rem(&db);
            if !r.is_zero() {
                break;
            }
            out.push(d);
            rest = qt;
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    let Some(mut m) = rest.to_u64() else {
        return Err(Error::FactorBudget(alloc::format!("{n}")));
    };
    while d <= TRIAL_BOUND && d.saturating_mul(d) <= m {
        while m % d == 0 {
            out.push(d);
            m /= d;
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    let mut iters = budget.rho_iterations;
    split_u64(m, &mut out, &mut iters)?;
    out.sort_unstable();
    Ok(out)
}

pub fn factor(n: &BigUint) -> Result<Vec<u64>> {
    factor_with(n, FactorBudget::default())
}

/// Distinct prime divisors of a nonzero integer.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<u64>> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut ps = factor(&n.magnitude().clone())?;
    ps.dedup();
    Ok(ps)
}

/// A nonzero rational modulo squares, stored as its squarefree integer
/// representative (sign included).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquareClass(BigInt);

impl SquareClass {
    pub fn one() -> Self {
        SquareClass(BigInt::one())
    }

    /// Wrap an integer already known to be squarefree.
    pub fn from_squarefree(rep: BigInt) -> Self {
        SquareClass(rep)
    }

    pub fn rep(&self) -> &BigInt {
        &self.0
    }

    pub fn is_square(&self) -> bool {
        self.0.is_one()
    }

    /// Product in the group of square classes.
    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let g = self.0.gcd(&other.0);
        SquareClass((&self.0 * &other.0) / (&g * &g))
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Squarefree kernel of a nonzero integer.
pub fn squarefree_part(n: &BigInt) -> Result<BigInt> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let ps = factor(&n.magnitude().clone())?;
    let mut rep = BigInt::one();
    let mut i = 0;
    while i < ps.len() {
        let mut j = i;
        while j < ps.len() && ps[j] == ps[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            rep *= ps[i];
        }
        i = j;
    }
    if n.sign() == Sign::Minus {
        rep = -rep;
    }
    Ok(rep)
}

/// Square class of a nonzero rational.
pub fn square_class(x: &BigRational) -> Result<SquareClass> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    let a = squarefree_part(x.numer())?;
    let b = squarefree_part(x.denom())?;
    let c = SquareClass(a).mul(&SquareClass(b.abs()));
    Ok(c)
}

pub fn square_class_int(x: &BigInt) -> Result<SquareClass> {
    square_class(&BigRational::from_integer(x.clone()))
}
