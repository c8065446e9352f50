//! Local solubility over `R` and every `Q_q`, with certificates, and seeded
//! sampling of local points.

pub mod model;
pub mod real;
pub mod search;
mod squares;

use alloc::vec::Vec;

use num_integer::Integer;

pub use model::{lift_certificate, newton_lift, sqrt_p_point, LiftCertificate, LocalModel, PadicApproxPoint};
pub use real::{decide_R, decide_R_general, definite_member, definiteness};
pub use search::{
    decide_Qq, level_counts, residue_points, sample_local_points, CertifiedPoint, InsolubilityProof, LocalBudget,
    SolubilityVerdict, SolubilityWitness,
};

use crate::arith::{legendre, prime_divisors, Place};
use crate::error::Result;
use crate::quadform::{bad_primes, GeneralSurface, SubfamilySurface};

/// How a place was settled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlaceMethod {
    /// `(0:0:1:sqrt p:sqrt p)` with `p` a `q`-adic square.
    SqrtWitness(PadicApproxPoint),
    /// An explicit search or real analysis.
    Decided(SolubilityVerdict),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceEntry {
    pub place: Place,
    pub method: PlaceMethod,
}

impl PlaceEntry {
    /// `Some(true)` soluble, `Some(false)` insoluble, `None` undecided.
    pub fn status(&self) -> Option<bool> {
        match &self.method {
            PlaceMethod::SqrtWitness(_) => Some(true),
            PlaceMethod::Decided(SolubilityVerdict::Soluble(_)) => Some(true),
            PlaceMethod::Decided(SolubilityVerdict::Insoluble(_)) => Some(false),
            PlaceMethod::Decided(SolubilityVerdict::Inconclusive(_)) => None,
        }
    }
}

/// Per-place solubility. Places without an entry are primes `q` outside
/// `{2, p}` not dividing `N`; these have points either through
/// `(0:0:1:sqrt p:sqrt p)` or, when `p` is not a `q`-adic square, by the
/// structure theorem for the subfamily. For general surfaces the unlisted
/// primes are those of good reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSolubilityReport {
    pub entries: Vec<PlaceEntry>,
}

impl LocalSolubilityReport {
    pub fn verdict(&self) -> Option<bool> {
        let mut all = Some(true);
        for e in &self.entries {
            match e.status() {
                Some(false) => return Some(false),
                None => all = None,
                Some(true) => {}
            }
        }
        all
    }

    /// Places where a search was run.
    pub fn decided_places(&self) -> Vec<Place> {
        self.entries
            .iter()
            .filter(|e| matches!(e.method, PlaceMethod::Decided(_)) && e.place != Place::Infinite)
            .map(|e| e.place)
            .collect()
    }

    pub fn entry(&self, place: Place) -> Option<&PlaceEntry> {
        self.entries.iter().find(|e| e.place == place)
    }
}

/// Local solubility of a subfamily surface at every place.
pub fn everywhere_locally_soluble(s: &SubfamilySurface, budget: &LocalBudget) -> Result<LocalSolubilityReport> {
    s.require_valid()?;
    let pair = s.quadrics();
    let mut entries = alloc::vec![PlaceEntry { place: Place::Infinite, method: PlaceMethod::Decided(decide_R(s)) }];
    let mut explicit = alloc::vec![2, s.p];
    for q in prime_divisors(&s.n)? {
        if q != 2 && q != s.p {
            explicit.push(q);
        }
    }
    explicit.sort_unstable();
    explicit.dedup();
    for q in explicit {
        let model = LocalModel::new(&pair, q)?;
        let method = if q != 2 && q != s.p && legendre(&s.p_big(), q)? == 1 {
            let k = 2.min(model.top.k);
            match sqrt_p_point(&model, s.p, k)? {
                Some(pt) => PlaceMethod::SqrtWitness(pt),
                None => PlaceMethod::Decided(decide_Qq(&model, budget)),
            }
        } else {
            PlaceMethod::Decided(decide_Qq(&model, budget))
        };
        entries.push(PlaceEntry { place: Place::Prime(q), method });
    }
    debug_assert!(s.n.is_odd() || entries.iter().any(|e| e.place == Place::Prime(2)));
    Ok(LocalSolubilityReport { entries })
}

/// Local solubility of a general pencil: the real place and every prime of
/// bad reduction are decided explicitly.
pub fn everywhere_locally_soluble_general(g: &GeneralSurface, budget: &LocalBudget) -> Result<LocalSolubilityReport> {
    let pair = g.quadrics();
    let mut entries =
        alloc::vec![PlaceEntry { place: Place::Infinite, method: PlaceMethod::Decided(decide_R_general(g)) }];
    for q in bad_primes(g)? {
        let model = LocalModel::new(&pair, q)?;
        entries.push(PlaceEntry { place: Place::Prime(q), method: PlaceMethod::Decided(decide_Qq(&model, budget)) });
    }
    Ok(LocalSolubilityReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_example_everywhere_soluble() {
        let s = SubfamilySurface::new(13, 2, -13, 1, -6, 1, 2);
        let r = everywhere_locally_soluble(&s, &LocalBudget::default()).unwrap();
        assert_eq!(r.verdict(), Some(true));
        assert_eq!(r.decided_places(), alloc::vec![Place::Prime(2), Place::Prime(13)]);
    }

    #[test]
    fn s_example_everywhere_soluble() {
        let s = SubfamilySurface::new(13, 1, 1, 153, 179, 1, 1);
        let r = everywhere_locally_soluble(&s, &LocalBudget::default()).unwrap();
        assert_eq!(r.verdict(), Some(true));
        assert_eq!(r.decided_places(), alloc::vec![Place::Prime(2), Place::Prime(13)]);
    }
}
