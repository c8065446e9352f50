//! Search over `(u:v:x)` for points where both `y^2` and `z^2` are forced
//! to be nonzero squares of `Q_q`.
//!
//! For a split model `c_y y^2 = R_0(u,v,x)`, `c_z z^2 = R_1(u,v,x)` with
//! `c_y, c_z` units, a residue class of `(u:v:x)` modulo `q^j` fixes `R_i`
//! modulo `q^(j + c_i)`, `q^(c_i)` being the content of `R_i`, and so fixes
//! the square class of `R_i / c_i` once its valuation `w` satisfies
//! `w + 1 <= j + c_i` (`w + 3 <= j + c_i` for `q = 2`). Classes where both are squares carry
//! `Q_q`-points; classes where one is a non-square carry none. Refining the
//! rest either finds a point or exhausts `P^2(Z_q)`, which proves
//! `X(Q_q)` empty.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;

use super::model::{certificate_at, LocalModel};
use super::search::{below, shuffle, CertifiedPoint};
use crate::arith::modular::{legendre_u64, PowerModulus};
use crate::error::Result;
use crate::localsolve::PadicApproxPoint;

/// A class `(u:v:x) mod q^level` on which both right-hand sides are squares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SquareClass {
    pub rep: [u64; 3],
    pub level: u32,
}

pub(crate) struct SquareSearch {
    /// Every class was decided before the depth or node limit.
    pub complete: bool,
    pub found: Vec<SquareClass>,
    /// Deepest level reached.
    pub depth: u32,
}

enum Status {
    Square,
    NonSquare,
    Undetermined,
}

/// `c^-1 R(u,v,x)` modulo `q^K` for both equations.
fn rhs(model: &LocalModel, uvx: &[u64; 3], pm: &PowerModulus) -> Option<[u64; 2]> {
    let sp = model.split.as_ref()?;
    let x = [uvx[0], uvx[1], uvx[2], 0, 0];
    let iy = pm.inv(sp.cy % pm.m)?;
    let iz = pm.inv(sp.cz % pm.m)?;
    let r0 = pm.neg(LocalModel::eval_terms(&sp.rest[0], &x, pm));
    let r1 = pm.neg(LocalModel::eval_terms(&sp.rest[1], &x, pm));
    Some([pm.mul(r0, iy), pm.mul(r1, iz)])
}

/// Square class of `r` when it is known modulo `q^prec`.
fn status(r: u64, q: u64, prec: u32, pm: &PowerModulus) -> Status {
    let w = pm.val(r);
    if w >= prec {
        return Status::Undetermined;
    }
    if w % 2 == 1 {
        return Status::NonSquare;
    }
    let need = if q == 2 { 3 } else { 1 };
    if w + need > prec {
        return Status::Undetermined;
    }
    let unit = r / pm.pow_q(w);
    let square = if q == 2 { unit % 8 == 1 } else { legendre_u64(unit % q, q) == 1 };
    if square {
        Status::Square
    } else {
        Status::NonSquare
    }
}

/// Valuations of the contents of `R_0` and `R_1`.
fn contents(model: &LocalModel) -> [u32; 2] {
    let sp = model.split.as_ref().expect("split model");
    sp.rest.each_ref().map(|t| t.iter().map(|&(_, _, c)| model.top.val(c)).min().unwrap_or(model.top.k))
}

/// The split shape with unit coefficients on `y^2` and `z^2`.
pub(crate) fn applicable(model: &LocalModel) -> bool {
    model.split.as_ref().is_some_and(|sp| sp.cy % model.q != 0 && sp.cz % model.q != 0)
}

fn roots(q: u64) -> Vec<[u64; 3]> {
    let mut out = Vec::new();
    for v in 0..q {
        for x in 0..q {
            out.push([1, v, x]);
        }
    }
    for x in 0..q {
        out.push([0, 1, x]);
    }
    out.push([0, 0, 1]);
    out
}

/// Breadth-first refinement, so the shallowest classes come first. With
/// `rng` the order within a level is randomised. Stops after `want` classes.
pub(crate) fn search(
    model: &LocalModel,
    max_level: u32,
    node_budget: u64,
    want: usize,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Result<SquareSearch> {
    let q = model.q;
    let top = model.top;
    let max_level = max_level.min(top.k - 1);
    let mut first: Vec<([u64; 3], u32)> = roots(q).into_iter().map(|r| (r, 1)).collect();
    if let Some(r) = rng.as_deref_mut() {
        shuffle(&mut first, r);
    }
    let mut queue = VecDeque::from(first);
    let mut out = SquareSearch { complete: true, found: Vec::new(), depth: 1 };
    let content = contents(model);
    let mut nodes = 0u64;
    while let Some((rep, j)) = queue.pop_front() {
        nodes += 1;
        if nodes > node_budget {
            out.complete = false;
            break;
        }
        out.depth = out.depth.max(j);
        let Some([r0, r1]) = rhs(model, &rep, &top) else {
            out.complete = false;
            break;
        };
        let prec = |c: u32| (j + c).min(top.k);
        match (status(r0, q, prec(content[0]), &top), status(r1, q, prec(content[1]), &top)) {
            (Status::NonSquare, _) | (_, Status::NonSquare) => continue,
            (Status::Square, Status::Square) => {
                out.found.push(SquareClass { rep, level: j });
                if out.found.len() >= want {
                    out.complete = false;
                    break;
                }
                continue;
            }
            _ => {}
        }
        // The representative itself may already lift.
        // When sampling, keep the class open so later draws randomise the
        // free digits; some draws fail and are retried by the caller.
        let exact = SquareClass { rep, level: if rng.is_some() { j } else { top.k } };
        if class_point(model, &exact, rng.as_deref_mut())?.is_some() {
            out.found.push(exact);
            if out.found.len() >= want {
                out.complete = false;
                break;
            }
            continue;
        }
        if j >= max_level {
            out.complete = false;
            continue;
        }
        let ch = rep.iter().position(|c| c % q != 0).expect("primitive");
        let qj = top.pow_q(j);
        let mut kids = Vec::with_capacity((q * q) as usize);
        for a in 0..q {
            for b in 0..q {
                let mut c = rep;
                let mut it = [a, b].into_iter();
                for (i, ci) in c.iter_mut().enumerate() {
                    if i != ch {
                        *ci += qj * it.next().unwrap();
                    }
                }
                kids.push((c, j + 1));
            }
        }
        if let Some(r) = rng.as_deref_mut() {
            shuffle(&mut kids, r);
        }
        queue.extend(kids);
    }
    Ok(out)
}

/// A certified point of `X(Q_q)` modulo `q^K` in the class, with the free
/// digits of `(u, v, x)` beyond the class level drawn from `rng` when given.
pub(crate) fn class_point(
    model: &LocalModel,
    class: &SquareClass,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<Option<CertifiedPoint>> {
    let q = model.q;
    let top = model.top;
    let mut rep = class.rep;
    if let Some(r) = rng.filter(|_| class.level < top.k) {
        let ch = rep.iter().position(|c| c % q != 0).expect("primitive");
        let qj = top.pow_q(class.level);
        let span = top.m / qj;
        for (i, c) in rep.iter_mut().enumerate() {
            if i != ch {
                *c = top.add(*c, top.mul(qj, below(r, span)));
            }
        }
    }
    let Some(vals) = rhs(model, &rep, &top) else { return Ok(None) };
    let mut yz = [0u64; 2];
    for (out, r) in yz.iter_mut().zip(vals) {
        let w = top.val(r);
        if w >= top.k || w % 2 == 1 {
            return Ok(None);
        }
        let pm = top.truncate(top.k - w);
        let Some(s) = pm.sqrt_unit((r / top.pow_q(w)) % pm.m, None) else { return Ok(None) };
        *out = top.mul(top.pow_q(w / 2), s);
    }
    let coords = [rep[0], rep[1], rep[2], yz[0], yz[1]];
    debug_assert!(model.vanishes(&coords, top.k)?);
    Ok(certificate_at(model, &coords, &top)
        .map(|cert| CertifiedPoint { point: PadicApproxPoint { q, k: top.k, coords }, cert }))
}

/// Random exact representatives `(u:v:x)`, one coordinate 1 and the
/// others divisible by a random small power of `q`. Reaches classes deep in
/// the tree when the reduction is very singular and breadth-first
/// refinement would have to expand every sibling first.
pub(crate) fn probe(model: &LocalModel, rng: &mut ChaCha8Rng, tries: usize) -> Result<Option<CertifiedPoint>> {
    let top = model.top;
    for i in 0..tries {
        let mut rep = [1u64; 3];
        for (j, c) in rep.iter_mut().enumerate() {
            if j != i % 3 {
                let e = [0, 0, 1, 2, 3][below(rng, 5) as usize].min(top.k - 1);
                *c = top.mul(top.pow_q(e), below(rng, top.m));
            }
        }
        if let Some(cp) = class_point(model, &SquareClass { rep, level: top.k }, None)? {
            return Ok(Some(cp));
        }
    }
    Ok(None)
}
