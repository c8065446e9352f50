//! Exact dense linear algebra over `Z` and `Q`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

/// Determinant by Bareiss fraction-free elimination.
pub fn det(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, r);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Reduced row echelon form over `Q`; returns the matrix and pivot columns.
pub fn rref(m: &[Vec<BigRational>]) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut a = m.to_vec();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for j in c..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn to_rational(m: &IntMatrix) -> Vec<Vec<BigRational>> {
    m.iter().map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

pub fn rank(m: &IntMatrix) -> usize {
    rref(&to_rational(m)).1.len()
}

/// Basis of the right kernel, each vector scaled to a primitive integer vector.
pub fn kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let cols = m.first().map_or(0, |r| r.len());
    let (a, pivots) = rref(&to_rational(m));
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = alloc::vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free].clone();
        }
        out.push(primitive_integer(&v));
    }
    out
}

/// Clear denominators and divide by the content.
pub fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn submatrix(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> IntMatrix {
    rows.iter().map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect()).collect()
}

/// `B^T M B` for a matrix `B` given by its columns.
pub fn congruence(m: &IntMatrix, basis: &[Vec<BigInt>]) -> IntMatrix {
    let n = m.len();
    let mb: Vec<Vec<BigInt>> =
        basis.iter().map(|b| (0..n).map(|i| (0..n).map(|j| &m[i][j] * &b[j]).sum()).collect()).collect();
    basis.iter().map(|bi| mb.iter().map(|mbj: &Vec<BigInt>| (0..n).map(|k| &bi[k] * &mbj[k]).sum()).collect()).collect()
}
