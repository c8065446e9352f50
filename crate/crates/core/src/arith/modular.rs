//! Word-sized modular arithmetic.
//!
//! Moduli stay below `2^63` so that every product fits in a `u128`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest modulus accepted by [`PowerModulus`].
pub const MAX_MODULUS: u64 = 1 << 63;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        (m - (b - a) % m) % m
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// Reduce an arbitrary integer modulo `m` into `[0, m)`.
pub fn reduce_big(a: &BigInt, m: u64) -> u64 {
    let r = a.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits in u64")
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality of an arbitrary-size integer; only inputs below `2^64` are
/// decided, larger ones are rejected as out of scope.
pub fn is_prime_big(n: &BigUint) -> Result<bool> {
    match n.to_u64() {
        Some(v) => Ok(is_prime_u64(v)),
        None => Err(Error::FactorBudget(alloc::format!("primality of {n} (beyond 64 bits)"))),
    }
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime_u64(p) {
        crate::bail!(InvalidArgument, "{p} is not an odd prime");
    }
    Ok(())
}

/// Legendre symbol of a residue already reduced modulo the odd prime `p`.
pub fn legendre_u64(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    // Jacobi-style reciprocity loop; faster than Euler's criterion.
    let (mut a, mut n) = (a, p);
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        core::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre(a: &BigInt, p: u64) -> Result<i8> {
    check_odd_prime(p)?;
    Ok(legendre_u64(reduce_big(a, p), p))
}

/// Tonelli-Shanks on a reduced residue; `p` odd prime, `a` a nonzero square.
fn tonelli_shanks(a: u64, p: u64) -> u64 {
    if p % 4 == 3 {
        return pow_mod(a, (p + 1) / 4, p);
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre_u64(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// Square root of a reduced residue modulo the prime `p` (including `p = 2`),
/// normalised into `[0, p/2]`.
pub fn sqrt_mod_u64(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if p == 2 || a == 0 {
        return Some(a);
    }
    if legendre_u64(a, p) != 1 {
        return None;
    }
    let r = tonelli_shanks(a, p);
    Some(r.min(p - r))
}

/// Square root of `a` modulo the odd prime `p`: the root in `[0, p/2]`, or
/// `None` when `a` is a non-residue.
pub fn sqrt_mod(a: &BigInt, p: u64) -> Result<Option<u64>> {
    check_odd_prime(p)?;
    Ok(sqrt_mod_u64(reduce_big(a, p), p))
}

/// The ring `Z / q^k` for a prime `q` and `q^k < 2^63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PowerModulus {
    pub q: u64,
    pub k: u32,
    pub m: u64,
}

impl PowerModulus {
    pub fn new(q: u64, k: u32) -> Result<Self> {
        let m = checked_pow(q, k)
            .filter(|&m| m < MAX_MODULUS)
            .ok_or_else(|| Error::InvalidArgument(alloc::format!("{q}^{k} exceeds the word-sized modulus bound")))?;
        Ok(PowerModulus { q, k, m })
    }

    /// Largest exponent with `q^k < 2^63`.
    pub fn max_exponent(q: u64) -> u32 {
        let mut k = 0;
        let mut m: u64 = 1;
        while let Some(next) = m.checked_mul(q) {
            if next >= MAX_MODULUS {
                break;
            }
            m = next;
            k += 1;
        }
        k
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.m)
    }
    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        add_mod(a, b, self.m)
    }
    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        sub_mod(a, b, self.m)
    }
    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        sub_mod(0, a, self.m)
    }

    pub fn reduce(&self, a: &BigInt) -> u64 {
        reduce_big(a, self.m)
    }

    pub fn reduce_i128(&self, a: i128) -> u64 {
        a.rem_euclid(self.m as i128) as u64
    }

    /// Valuation of a residue, capped at `k` for zero.
    pub fn val(&self, mut a: u64) -> u32 {
        a %= self.m;
        if a == 0 {
            return self.k;
        }
        let mut v = 0;
        while a % self.q == 0 {
            a /= self.q;
            v += 1;
        }
        v
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        inv_mod(a, self.m)
    }

    pub fn pow_q(&self, e: u32) -> u64 {
        checked_pow(self.q, e).map(|v| v % self.m).unwrap_or(0)
    }

    /// Coarser ring `Z / q^j` with `j <= k`.
    pub fn truncate(&self, j: u32) -> PowerModulus {
        let j = j.min(self.k);
        PowerModulus { q: self.q, k: j, m: checked_pow(self.q, j).unwrap() }
    }

    /// Square root of a unit residue, returning a root congruent to `hint`
    /// modulo `q` when a hint is given. For `q = 2` the unit must be
    /// `1 mod 8` and the root is correct modulo `2^(k-1)`.
    pub fn sqrt_unit(&self, a: u64, hint: Option<u64>) -> Option<u64> {
        let q = self.q;
        if a % q == 0 {
            return None;
        }
        if q == 2 {
            if self.k >= 3 && a % 8 != 1 {
                return None;
            }
            if self.k >= 2 && a % 4 != 1 {
                return None;
            }
            // Bitwise lifting: r^2 = a mod 2^(j+1) determines r mod 2^j.
            let mut r: u64 = 1;
            for j in 3..self.k.max(3) {
                let mj = 1u64 << (j + 1);
                if mul_mod(r, r, mj) != a % mj {
                    r += 1 << (j - 1);
                }
            }
            let r = r % self.m;
            return Some(match hint {
                Some(h) if (h % 4) != (r % 4) && self.k >= 2 => self.neg(r),
                _ => r,
            });
        }
        let r0 = sqrt_mod_u64(a % q, q)?;
        let r0 = match hint {
            Some(h) if h % q == (q - r0) % q => (q - r0) % q,
            _ => r0,
        };
        // Newton: r <- r - (r^2 - a) / (2r), doubling the precision each step.
        let mut r = r0;
        let mut prec = 1;
        while prec < self.k {
            prec = (prec * 2).min(self.k);
            let sub = self.truncate(prec);
            let f = sub.sub(sub.mul(r, r), a % sub.m);
            let inv2r = sub.inv(sub.mul(2, r)).expect("2r is a unit");
            r = sub.sub(r, sub.mul(f, inv2r));
        }
        Some(r % self.m)
    }
}

pub fn checked_pow(q: u64, k: u32) -> Option<u64> {
    let mut m: u64 = 1;
    for _ in 0..k {
        m = m.checked_mul(q)?;
    }
    Some(m)
}

/// `q`-adic valuation of a nonzero integer.
pub fn valuation(a: &BigInt, q: u64) -> Option<u32> {
    if a.is_zero() {
        return None;
    }
    let qb = BigInt::from(q);
    let mut a = a.clone();
    let mut v = 0;
    loop {
        let (d, r) = a.div_rem(&qb);
        if !r.is_zero() {
            return Some(v);
        }
        a = d;
        v += 1;
    }
}

/// Split a nonzero integer as `q^v * w` with `q` not dividing `w`.
pub fn split_valuation(a: &BigInt, q: u64) -> Option<(u32, BigInt)> {
    let v = valuation(a, q)?;
    let w = a / BigInt::from(q).pow(v);
    Some((v, w))
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.sign() == Sign::Minus {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}
