//! Quadratic-residue statistics of the sets `S(a, b) = {a + b y : y a nonzero square}`.

use crate::arith::modular::{is_prime_u64, legendre_u64, mul_mod};
use crate::error::Result;

fn check_prime_1_mod_4(p: u64) -> Result<()> {
    if !is_prime_u64(p) || p % 4 != 1 {
        crate::bail!(InvalidArgument, "{p} is not a prime congruent to 1 mod 4");
    }
    Ok(())
}

/// `(|S_0|, |S_1|, |S_-1|)`: how many elements of `S(a, b)` are zero,
/// nonzero squares and non-squares modulo `p`.
pub fn quadres_counts(p: u64, a: i64, b: i64) -> Result<(u64, u64, u64)> {
    check_prime_1_mod_4(p)?;
    let a = a.rem_euclid(p as i64) as u64;
    let b = b.rem_euclid(p as i64) as u64;
    if a == 0 || b == 0 {
        crate::bail!(Precondition, "a and b must be units modulo {p}");
    }
    let mut counts = (0, 0, 0);
    // y = t^2 for t in 1..=(p-1)/2 runs over each nonzero square once.
    for t in 1..=(p - 1) / 2 {
        let y = mul_mod(t, t, p);
        match legendre_u64((a + mul_mod(b, y, p)) % p, p) {
            0 => counts.0 += 1,
            1 => counts.1 += 1,
            _ => counts.2 += 1,
        }
    }
    Ok(counts)
}

fn residue(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// All `y0` in `1..p` with `a + b y0^2` a non-square and `c + d y0^2`
/// either a non-square or zero, in increasing order.
pub fn quadres_witnesses(p: u64, a: u64, b: u64, c: u64, d: u64) -> Result<alloc::vec::Vec<u64>> {
    check_prime_1_mod_4(p)?;
    for x in [a, b, c, d] {
        if legendre_u64(x % p, p) != 1 {
            crate::bail!(Precondition, "{x} is not a nonzero square modulo {p}");
        }
    }
    Ok((1..p)
        .filter(|&y| {
            let y2 = mul_mod(y, y, p);
            let first = legendre_u64((a + mul_mod(b, y2, p)) % p, p);
            let second = legendre_u64((c + mul_mod(d, y2, p)) % p, p);
            first == -1 && second != 1
        })
        .collect())
}

/// Smallest positive `y0` with `a + b y0^2` a non-square and `c + d y0^2` a
/// non-square or zero.
pub fn quadres_witness(p: u64, a: i64, b: i64, c: i64, d: i64) -> Result<u64> {
    let w = quadres_witnesses(p, residue(a, p), residue(b, p), residue(c, p), residue(d, p))?;
    Ok(*w.first().expect("a witness always exists for p = 1 mod 4"))
}
