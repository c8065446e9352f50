//! Collapse of a triple `(P0, P1, P2)` with `P_i` on the members at
//! `(1:0)`, `(0:1)`, `(-1:1)` and a rank-2 gradient matrix to a single
//! rational point of the surface.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::linalg::{kernel, rank, IntMatrix};
use super::surface::{NormalFormSurface, QuadForm, RationalPoint, U, V, X, Y, Z};
use crate::error::Result;

fn members(n: &NormalFormSurface) -> [QuadForm; 3] {
    let [q0, q1] = n.quadrics().forms;
    let q2 = QuadForm::lin_comb(&-BigInt::one(), &q0, &BigInt::one(), &q1);
    [q0, q1, q2]
}

/// The 3x5 matrix whose row `i` is the gradient of `Q_(T_i)` at `P_i`.
pub fn gradient_matrix(n: &NormalFormSurface, pts: [&RationalPoint; 3]) -> IntMatrix {
    let qs = members(n);
    (0..3).map(|i| qs[i].gradient(pts[i].coords()).to_vec()).collect()
}

/// Returns the common point, as the representative of its class under
/// `(u:v:x:y:z) ~ (u:v:±x:±y:±z)` with first nonzero of `(u, v)` positive
/// and `x, y, z >= 0`.
pub fn collapse_triple(n: &NormalFormSurface, pts: [&RationalPoint; 3]) -> Result<RationalPoint> {
    let report = n.check();
    if !report.valid() {
        crate::bail!(Precondition, "normal form fails its conditions: {report:?}");
    }
    let qs = members(n);
    for (i, (q, p)) in qs.iter().zip(pts).enumerate() {
        if !q.eval(p.coords()).is_zero() {
            crate::bail!(Precondition, "P{i} = {p} is not on Q_T{i}");
        }
    }
    let m = gradient_matrix(n, pts);
    let r = rank(&m);
    if r != 2 {
        crate::bail!(Rank, "gradient matrix has rank {r}, expected 2");
    }
    let mt: IntMatrix = (0..5).map(|j| (0..3).map(|i| m[i][j].clone()).collect()).collect();
    let ker = kernel(&mt);
    debug_assert_eq!(ker.len(), 1);
    let (k, l, mu) = (&ker[0][0], &ker[0][1], &ker[0][2]);
    if k.is_zero() || l.is_zero() || mu.is_zero() {
        crate::bail!(Degenerate, "kernel vector ({k}, {l}, {mu}) has a zero coordinate");
    }
    let scale = |p: &RationalPoint, s: &BigInt| -> Vec<BigInt> { p.coords().iter().map(|c| c * s).collect() };
    let p0 = scale(pts[0], k);
    let p1 = scale(pts[1], &-l);
    let p2 = scale(pts[2], mu);
    if !(p0[U] == p1[U] && p1[U] == p2[U] && p0[V] == p1[V] && p1[V] == p2[V]) {
        crate::bail!(Degenerate, "rescaled triple does not share (u, v)");
    }
    let out = RationalPoint::new([p0[U].clone(), p0[V].clone(), p0[X].clone(), p0[Y].clone(), p1[Z].clone()])?;
    if !n.quadrics().contains(&out) {
        crate::bail!(Degenerate, "collapsed point {out} is not on the surface");
    }
    Ok(out.sign_canonical())
}
