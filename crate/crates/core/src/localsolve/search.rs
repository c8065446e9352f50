//! Residue enumeration, iterative deepening and seeded sampling over `Z_q`.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::model::{certificate_at, newton_lift, LiftCertificate, LocalModel, PadicApproxPoint};
use super::squares;
use crate::arith::modular::{inv_mod, mul_mod, sqrt_mod_u64, sub_mod, PowerModulus};
use crate::error::{Error, Result};

/// Limits for local searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalBudget {
    /// Deepest level `k` explored modulo `q^k`.
    pub max_level: u32,
    /// Total candidate residues generated while deepening.
    pub max_expansions: u64,
    /// Largest `q` for exhaustive residue enumeration.
    pub enumeration_limit: u64,
}

impl Default for LocalBudget {
    fn default() -> Self {
        LocalBudget { max_level: 9, max_expansions: 10_000_000, enumeration_limit: 10_000 }
    }
}

/// Index of the first unit coordinate.
pub(crate) fn chart(q: u64, x: &[u64; 5]) -> usize {
    x.iter().position(|c| c % q != 0).expect("primitive tuple")
}

/// Roots of `c t^2 = r` in `F_q`.
fn scaled_roots(c: u64, r: u64, q: u64) -> Vec<u64> {
    let (c, r) = (c % q, r % q);
    if c == 0 {
        return if r == 0 { (0..q).collect() } else { Vec::new() };
    }
    let t = mul_mod(r, inv_mod(c, q).unwrap(), q);
    match sqrt_mod_u64(t, q) {
        None => Vec::new(),
        Some(0) => alloc::vec![0],
        Some(s) if q == 2 => alloc::vec![s],
        Some(s) => alloc::vec![s, q - s],
    }
}

/// All points of both quadrics over `F_q`, normalised so that the first
/// unit coordinate equals 1.
pub fn residue_points(model: &LocalModel, budget: &LocalBudget) -> Result<Vec<[u64; 5]>> {
    let q = model.q;
    if q > budget.enumeration_limit {
        crate::bail!(EnumerationBudget, "q = {q} exceeds the enumeration limit {}", budget.enumeration_limit);
    }
    let pm = model.modulus(1)?;
    let mut out = Vec::new();
    if let Some(sp) = &model.split {
        let mut heads: Vec<[u64; 3]> = Vec::new();
        for v in 0..q {
            for x in 0..q {
                heads.push([1, v, x]);
            }
        }
        for x in 0..q {
            heads.push([0, 1, x]);
        }
        heads.push([0, 0, 1]);
        for h in heads {
            let base = [h[0], h[1], h[2], 0, 0];
            let r0 = pm.neg(LocalModel::eval_terms(&sp.rest[0], &base, &pm));
            let r1 = pm.neg(LocalModel::eval_terms(&sp.rest[1], &base, &pm));
            let ys = scaled_roots(sp.cy, r0, q);
            if ys.is_empty() {
                continue;
            }
            for z in scaled_roots(sp.cz, r1, q) {
                for &y in &ys {
                    out.push([h[0], h[1], h[2], y, z]);
                }
            }
        }
        // (0:0:0:y:z)
        if sp.cy % q == 0 {
            for z in scaled_roots(sp.cz, 0, q) {
                out.push([0, 0, 0, 1, z]);
            }
        }
        if sp.cz % q == 0 {
            out.push([0, 0, 0, 0, 1]);
        }
    } else {
        let total = (0..5).map(|i| q.saturating_pow(4 - i)).fold(0u64, |a, b| a.saturating_add(b));
        if total > budget.max_expansions {
            crate::bail!(EnumerationBudget, "{total} projective points over F_{q}");
        }
        for lead in 0..5 {
            let free = 4 - lead;
            let n = q.pow(free as u32);
            for idx in 0..n {
                let mut x = [0u64; 5];
                x[lead] = 1;
                let mut t = idx;
                for c in x.iter_mut().skip(lead + 1) {
                    *c = t % q;
                    t /= q;
                }
                if model.eval(&x, &pm) == [0, 0] {
                    out.push(x);
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Solutions `t` over `F_q` of `J t = rhs` for a 2 x n system.
fn solve_mod_q(jac: &[Vec<u64>; 2], rhs: [u64; 2], q: u64) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let n = jac[0].len();
    let mut rows: Vec<(Vec<u64>, u64)> = (0..2).map(|r| (jac[r].iter().map(|c| c % q).collect(), rhs[r] % q)).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == 2 {
            break;
        }
        let Some(p) = (r..2).find(|&i| rows[i].0[c] != 0) else { continue };
        rows.swap(r, p);
        let inv = inv_mod(rows[r].0[c], q).unwrap();
        for j in 0..n {
            rows[r].0[j] = mul_mod(rows[r].0[j], inv, q);
        }
        rows[r].1 = mul_mod(rows[r].1, inv, q);
        for i in 0..2 {
            if i != r && rows[i].0[c] != 0 {
                let f = rows[i].0[c];
                for j in 0..n {
                    let t = mul_mod(f, rows[r].0[j], q);
                    rows[i].0[j] = sub_mod(rows[i].0[j], t, q);
                }
                let t = mul_mod(f, rows[r].1, q);
                rows[i].1 = sub_mod(rows[i].1, t, q);
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| row.1 != 0) {
        return None;
    }
    let mut part = alloc::vec![0u64; n];
    for (i, &c) in pivots.iter().enumerate() {
        part[c] = rows[i].1;
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = alloc::vec![0u64; n];
        v[free] = 1;
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = sub_mod(0, rows[i].0[free], q);
        }
        basis.push(v);
    }
    Some((part, basis))
}

/// Affine space of lifts of `x` from `q^k` to `q^(k+1)`: a particular
/// solution and a basis over `F_q`, in the non-chart coordinates.
struct LiftSpace {
    x: [u64; 5],
    free: Vec<usize>,
    part: Vec<u64>,
    basis: Vec<Vec<u64>>,
    next: PowerModulus,
    qk: u64,
}

impl LiftSpace {
    fn new(model: &LocalModel, x: &[u64; 5], k: u32) -> Result<Option<Self>> {
        let q = model.q;
        let next = model.modulus(k + 1)?;
        let qk = next.pow_q(k);
        let ch = chart(q, x);
        let f = model.eval(x, &next);
        debug_assert!(f.iter().all(|r| r % qk == 0));
        let rhs = [sub_mod(0, (f[0] / qk) % q, q), sub_mod(0, (f[1] / qk) % q, q)];
        let jac = model.jacobian(x, &next);
        let free: Vec<usize> = (0..5).filter(|&j| j != ch).collect();
        let jf = [free.iter().map(|&j| jac[0][j] % q).collect(), free.iter().map(|&j| jac[1][j] % q).collect()];
        Ok(solve_mod_q(&jf, rhs, q).map(|(part, basis)| LiftSpace { x: *x, free, part, basis, next, qk }))
    }

    fn size(&self) -> Option<u64> {
        self.next.q.checked_pow(self.basis.len() as u32)
    }

    fn lift(&self, coeffs: impl Iterator<Item = u64>) -> [u64; 5] {
        let q = self.next.q;
        let mut t = self.part.clone();
        for (c, b) in coeffs.zip(&self.basis) {
            for (tj, bj) in t.iter_mut().zip(b) {
                *tj = (*tj + mul_mod(c, *bj, q)) % q;
            }
        }
        let mut y = self.x;
        for (pos, &j) in self.free.iter().enumerate() {
            y[j] = self.next.add(self.x[j] % self.next.m, self.next.mul(self.qk, t[pos]));
        }
        y
    }
}

/// All normalised solutions modulo `q^(k+1)` reducing to `x` modulo `q^k`.
pub(crate) fn children(model: &LocalModel, x: &[u64; 5], k: u32) -> Result<Vec<[u64; 5]>> {
    let Some(space) = LiftSpace::new(model, x, k)? else {
        return Ok(Vec::new());
    };
    let q = model.q;
    let count = space.size().ok_or_else(|| Error::EnumerationBudget("child count overflow".into()))?;
    let dim = space.basis.len();
    Ok((0..count)
        .map(|idx| {
            let mut rest = idx;
            space.lift((0..dim).map(|_| {
                let c = rest % q;
                rest /= q;
                c
            }))
        })
        .collect())
}

/// Up to `n` distinct random lifts of `x` to `q^(k+1)`.
fn random_children(model: &LocalModel, x: &[u64; 5], k: u32, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<[u64; 5]>> {
    let Some(space) = LiftSpace::new(model, x, k)? else {
        return Ok(Vec::new());
    };
    if space.size().is_some_and(|s| s <= n as u64) {
        let mut all = children(model, x, k)?;
        shuffle(&mut all, rng);
        return Ok(all);
    }
    let q = model.q;
    let dim = space.basis.len();
    let mut out: Vec<[u64; 5]> = Vec::with_capacity(n);
    for _ in 0..4 * n {
        if out.len() == n {
            break;
        }
        let y = space.lift((0..dim).map(|_| below(rng, q)).collect::<Vec<_>>().into_iter());
        if !out.contains(&y) {
            out.push(y);
        }
    }
    Ok(out)
}

/// Why a place has no local points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InsolubilityProof {
    /// No primitive solution exists modulo `q^level`.
    EmptyLevel(u32),
    /// Every class of `(u:v:x)` modulo `q^depth` forces a non-square on one
    /// of the two right-hand sides.
    NonSquareValues(u32),
    /// A member of the pencil is definite over `R` at `(1 : t)` or `(0 : 1)`.
    DefiniteMember(String),
}

/// How a place was shown to have local points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolubilityWitness {
    Padic {
        point: PadicApproxPoint,
        certificate: LiftCertificate,
    },
    /// `(0:0:1:sqrt p:sqrt p)` over `R`.
    RealSqrtP,
    /// No member of the pencil is definite, so the quadrics share a real zero.
    RealIndefinitePencil,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolubilityVerdict {
    Soluble(SolubilityWitness),
    Insoluble(InsolubilityProof),
    Inconclusive(String),
}

impl SolubilityVerdict {
    pub fn is_soluble(&self) -> bool {
        matches!(self, SolubilityVerdict::Soluble(_))
    }

    pub fn is_insoluble(&self) -> bool {
        matches!(self, SolubilityVerdict::Insoluble(_))
    }
}

/// Iterative deepening over primitive solutions modulo `q^k`.
#[allow(non_snake_case)]
pub fn decide_Qq(model: &LocalModel, budget: &LocalBudget) -> SolubilityVerdict {
    match decide_inner(model, budget) {
        Ok(v) => v,
        Err(e) => SolubilityVerdict::Inconclusive(alloc::format!("{e}")),
    }
}

fn decide_inner(model: &LocalModel, budget: &LocalBudget) -> Result<SolubilityVerdict> {
    let q = model.q;
    if q > budget.enumeration_limit {
        return Ok(match random_certified(model, 0x5eed, 4096)? {
            Some((x, cert)) => SolubilityVerdict::Soluble(SolubilityWitness::Padic {
                point: PadicApproxPoint { q, k: 1, coords: x },
                certificate: cert,
            }),
            None => SolubilityVerdict::Inconclusive(alloc::format!("no smooth residue point found at q = {q}")),
        });
    }
    let max_level = budget.max_level.min(model.top.k - 1);
    let mut nodes = residue_points(model, budget)?;
    if nodes.is_empty() {
        return Ok(SolubilityVerdict::Insoluble(InsolubilityProof::EmptyLevel(1)));
    }
    let mut squares_exhausted = None;
    if squares::applicable(model) {
        let r = squares::search(model, max_level, budget.max_expansions / 8, 1, None)?;
        for class in &r.found {
            if let Some(cp) = squares::class_point(model, class, None)? {
                return Ok(SolubilityVerdict::Soluble(SolubilityWitness::Padic {
                    point: cp.point,
                    certificate: cp.cert,
                }));
            }
        }
        if r.complete {
            squares_exhausted = Some(r.depth);
        } else if let Some(cp) = squares::probe(model, &mut rng_for(0x7072_6f62, q), 20_000)? {
            return Ok(SolubilityVerdict::Soluble(SolubilityWitness::Padic { point: cp.point, certificate: cp.cert }));
        }
    }
    // A few random descents find a smooth point long before the full tree
    // has been expanded; the exhaustive pass below is only needed to prove
    // emptiness.
    let mut rng = rng_for(0x5eed, q);
    let mut order = nodes.clone();
    shuffle(&mut order, &mut rng);
    for r in order.into_iter().take(64) {
        if let Some((x, k, cert)) = descend(model, r, &mut rng, 512, max_level)? {
            return Ok(SolubilityVerdict::Soluble(SolubilityWitness::Padic {
                point: PadicApproxPoint { q, k, coords: x },
                certificate: cert,
            }));
        }
    }
    let mut expansions = nodes.len() as u64;
    let mut level = 1;
    loop {
        if nodes.is_empty() {
            return Ok(SolubilityVerdict::Insoluble(InsolubilityProof::EmptyLevel(level)));
        }
        let pm = model.modulus(level)?;
        for x in &nodes {
            if let Some(cert) = certificate_at(model, x, &pm) {
                return Ok(SolubilityVerdict::Soluble(SolubilityWitness::Padic {
                    point: PadicApproxPoint { q, k: level, coords: *x },
                    certificate: cert,
                }));
            }
        }
        if level >= max_level {
            if let Some(d) = squares_exhausted {
                return Ok(SolubilityVerdict::Insoluble(InsolubilityProof::NonSquareValues(d)));
            }
            return Ok(SolubilityVerdict::Inconclusive(alloc::format!(
                "{} uncertified solutions modulo {q}^{level}",
                nodes.len()
            )));
        }
        let mut next = Vec::new();
        for x in &nodes {
            let ch = children(model, x, level)?;
            expansions += ch.len() as u64;
            if expansions > budget.max_expansions {
                if let Some(d) = squares_exhausted {
                    return Ok(SolubilityVerdict::Insoluble(InsolubilityProof::NonSquareValues(d)));
                }
                return Ok(SolubilityVerdict::Inconclusive(alloc::format!(
                    "expansion budget {} exhausted at level {}",
                    budget.max_expansions,
                    level + 1
                )));
            }
            next.extend(ch);
        }
        nodes = next;
        level += 1;
    }
}

/// Number of normalised solutions modulo `q^k` for `k = 1..=levels`,
/// counted through the same tree as [`decide_Qq`].
pub fn level_counts(model: &LocalModel, levels: u32, budget: &LocalBudget) -> Result<Vec<usize>> {
    let mut nodes = residue_points(model, budget)?;
    let mut out = alloc::vec![nodes.len()];
    for k in 1..levels {
        let mut next = Vec::new();
        for x in &nodes {
            next.extend(children(model, x, k)?);
            if next.len() as u64 > budget.max_expansions {
                crate::bail!(EnumerationBudget, "level {} too large", k + 1);
            }
        }
        nodes = next;
        out.push(nodes.len());
    }
    Ok(out)
}

/// A sampled local point with its Hensel certificate; the true `Q_q` point
/// it approximates agrees with it modulo `q^(k - e)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedPoint {
    pub point: PadicApproxPoint,
    pub cert: LiftCertificate,
}

impl CertifiedPoint {
    pub fn effective_precision(&self) -> u32 {
        self.point.k - self.cert.e
    }

    /// The same approximation carried to higher precision by Newton steps.
    pub fn relift(&self, model: &LocalModel, target: u32) -> Result<CertifiedPoint> {
        let point = newton_lift(model, &self.point, self.cert, target)?;
        let pm = model.modulus(point.k)?;
        let cert = certificate_at(model, &point.coords, &pm)
            .ok_or_else(|| Error::Witness(alloc::format!("relifted point {point} lost its certificate")))?;
        Ok(CertifiedPoint { point, cert })
    }

    pub fn certify(model: &LocalModel, point: PadicApproxPoint) -> Result<CertifiedPoint> {
        let cert = super::model::lift_certificate(model, &point)?
            .ok_or_else(|| Error::Witness(alloc::format!("{point} carries no Hensel certificate")))?;
        Ok(CertifiedPoint { point, cert })
    }
}

fn rng_for(seed: u64, q: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ q.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub(crate) fn below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    // Rejection sampling keeps the draw uniform.
    let zone = u64::MAX - u64::MAX % n;
    loop {
        let r = rng.next_u64();
        if r < zone {
            return r % n;
        }
    }
}

/// Random smooth residue point, for `q` too large to enumerate.
fn random_certified(model: &LocalModel, seed: u64, tries: u32) -> Result<Option<([u64; 5], LiftCertificate)>> {
    let mut rng = rng_for(seed, model.q);
    random_certified_with(model, &mut rng, tries)
}

fn random_certified_with(
    model: &LocalModel,
    rng: &mut ChaCha8Rng,
    tries: u32,
) -> Result<Option<([u64; 5], LiftCertificate)>> {
    let q = model.q;
    let Some(sp) = &model.split else {
        crate::bail!(EnumerationBudget, "random residue search needs the split shape (q = {q})");
    };
    let pm = model.modulus(1)?;
    for _ in 0..tries {
        let head = [1, below(rng, q), below(rng, q)];
        let base = [head[0], head[1], head[2], 0, 0];
        let r0 = pm.neg(LocalModel::eval_terms(&sp.rest[0], &base, &pm));
        let r1 = pm.neg(LocalModel::eval_terms(&sp.rest[1], &base, &pm));
        let ys = scaled_roots(sp.cy, r0, q);
        let zs = scaled_roots(sp.cz, r1, q);
        if ys.is_empty() || zs.is_empty() || ys.len() as u64 == q || zs.len() as u64 == q {
            continue;
        }
        let y = ys[below(rng, ys.len() as u64) as usize];
        let z = zs[below(rng, zs.len() as u64) as usize];
        let x = [head[0], head[1], head[2], y, z];
        if let Some(c) = certificate_at(model, &x, &pm) {
            return Ok(Some((x, c)));
        }
    }
    Ok(None)
}

/// Depth-first search below a residue point for a certified descendant.
fn descend(
    model: &LocalModel,
    root: [u64; 5],
    rng: &mut ChaCha8Rng,
    node_budget: usize,
    max_level: u32,
) -> Result<Option<([u64; 5], u32, LiftCertificate)>> {
    let mut stack = alloc::vec![(root, 1u32)];
    let mut seen = 0;
    while let Some((x, k)) = stack.pop() {
        seen += 1;
        if seen > node_budget {
            return Ok(None);
        }
        let pm = model.modulus(k)?;
        if let Some(c) = certificate_at(model, &x, &pm) {
            return Ok(Some((x, k, c)));
        }
        if k < max_level {
            let ch = random_children(model, &x, k, 8, rng)?;
            stack.extend(ch.into_iter().map(|c| (c, k + 1)));
        }
    }
    Ok(None)
}

pub(crate) fn shuffle<T>(v: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..v.len()).rev() {
        let j = below(rng, i as u64 + 1) as usize;
        v.swap(i, j);
    }
}

/// Above this `q` sampling draws random residues instead of enumerating.
pub const SAMPLING_ENUMERATION_LIMIT: u64 = 97;

/// `count` distinct certified points modulo `q^precision`, spread over
/// residue classes modulo `q`. Deterministic in `seed`.
pub fn sample_local_points(
    model: &LocalModel,
    count: usize,
    precision: u32,
    seed: u64,
    budget: &LocalBudget,
) -> Result<Vec<CertifiedPoint>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let q = model.q;
    let mut rng = rng_for(seed, q);
    let max_level = budget.max_level.min(model.top.k - 1);
    let mut bases: Vec<([u64; 5], u32, LiftCertificate)> = Vec::new();
    if q > SAMPLING_ENUMERATION_LIMIT && model.split.is_some() {
        for _ in 0..count.min(256) {
            if let Some((x, c)) = random_certified_with(model, &mut rng, 4096)? {
                bases.push((x, 1, c));
            }
        }
    } else if squares::applicable(model) {
        let want = 4 * count.max(16);
        let r = squares::search(model, max_level, budget.max_expansions / 8, want, Some(&mut rng))?;
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for attempt in 0..8 * want {
            if out.len() >= count || r.found.is_empty() {
                break;
            }
            let class = r.found[attempt % r.found.len()];
            let Some(cp) = squares::class_point(model, &class, Some(&mut rng))? else { continue };
            let target = precision.max(2 * cp.cert.e + 1).min(cp.point.k);
            let cp = CertifiedPoint::certify(model, cp.point.truncate(target)?)?;
            if seen.insert(cp.point.coords) {
                out.push(cp);
            }
        }
        if out.len() < count {
            crate::bail!(Inconclusive, "only {} of {count} sampled points at q = {q}", out.len());
        }
        return Ok(out);
    } else {
        let mut roots = residue_points(model, budget)?;
        shuffle(&mut roots, &mut rng);
        for r in roots.into_iter().take(4 * count.max(16)) {
            if let Some(b) = descend(model, r, &mut rng, 4096, max_level)? {
                bases.push(b);
            }
        }
    }
    if bases.is_empty() {
        crate::bail!(Inconclusive, "no certified point found at q = {q}");
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 40 * count + 100 {
            crate::bail!(EnumerationBudget, "only {} of {count} distinct points at q = {q}", out.len());
        }
        let (x, j, cert) = bases[(attempts - 1) % bases.len()];
        let target = precision.max(2 * cert.e + 1).max(j);
        let full = model.modulus(target)?;
        let mut y = x;
        if target > j {
            let qj = full.pow_q(j);
            let span = full.m / qj;
            let ch = chart(q, &x);
            for (i, c) in y.iter_mut().enumerate() {
                if i != ch {
                    *c = full.add(*c, full.mul(qj, below(&mut rng, span)));
                }
            }
        }
        let start = PadicApproxPoint { q, k: j, coords: y };
        let pt = newton_lift(model, &start, cert, target)?;
        if seen.insert(pt.coords) {
            let pm: PowerModulus = model.modulus(pt.k)?;
            let cert =
                certificate_at(model, &pt.coords, &pm).ok_or_else(|| Error::Witness("lost certificate".into()))?;
            out.push(CertifiedPoint { point: pt, cert });
        }
    }
    Ok(out)
}
