//! Invariant images per place and the resulting obstruction verdicts.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::classes::{
    evaluate_certified, evaluate_rational, rational_rep_values, BrauerClass, ClassTag, InvariantValue,
};
use super::witness::{surjectivity_witness, SurjectivityWitness};
use crate::arith::{legendre_u64, prime_divisors, Place};
use crate::error::{Error, Result};
use crate::families::{recognize, Family, Prediction};
use crate::localsolve::{everywhere_locally_soluble, sample_local_points, LocalBudget, LocalModel};
use crate::quadform::{RationalPoint, SubfamilySurface};

/// How a per-place image was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    Theorem(String),
    /// Union over this many evaluated sample points.
    Sampled(usize),
    WitnessPair,
    /// No value could be determined.
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceImage {
    pub place: Place,
    /// Sorted, without repetitions.
    pub image: Vec<InvariantValue>,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassReport {
    pub tag: ClassTag,
    pub places: Vec<PlaceImage>,
    /// `None` when some image is unknown.
    pub obstructs: Option<bool>,
}

impl ClassReport {
    pub fn image_at(&self, place: Place) -> Option<&PlaceImage> {
        self.places.iter().find(|p| p.place == place)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionReport {
    pub classes: Vec<ClassReport>,
    pub hp_obstructed_by: Vec<ClassTag>,
    pub wa_failure: bool,
    pub family: Option<Family>,
    pub witness: SurjectivityWitness,
}

impl ObstructionReport {
    pub fn class(&self, tag: ClassTag) -> &ClassReport {
        self.classes.iter().find(|c| c.tag == tag).expect("every class is reported")
    }

    pub fn verdict(&self) -> Prediction {
        match self.hp_obstructed_by.first() {
            Some(t) => Prediction::ObstructedBy(*t),
            None => Prediction::NoObstruction,
        }
    }

    /// All images determined.
    pub fn complete(&self) -> bool {
        self.classes.iter().all(|c| c.obstructs.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrauerBudget {
    /// Sample points per place.
    pub samples: usize,
    /// Sampling precision at odd places; `q = 2` gets two more digits.
    pub precision: u32,
    pub seed: u64,
    /// Also sample where a theorem fixes the image, and fail on disagreement.
    pub check_theorems: bool,
    pub local: LocalBudget,
}

impl Default for BrauerBudget {
    fn default() -> Self {
        BrauerBudget {
            samples: 64,
            precision: 8,
            seed: 0x4272_6175_6572,
            check_theorems: false,
            local: LocalBudget::default(),
        }
    }
}

/// `{2, p}` and the primes dividing `M N (AD - BC) A B C D`, sorted.
pub fn relevant_primes(s: &SubfamilySurface) -> Result<Vec<u64>> {
    let mut out = BTreeSet::from([2, s.p]);
    for x in [&s.m, &s.n, &s.delta(), &s.a, &s.b, &s.c, &s.d] {
        out.extend(prime_divisors(x)?);
    }
    Ok(out.into_iter().collect())
}

fn p_is_local_square(p: u64, q: u64) -> bool {
    if q == 2 {
        p % 8 == 1
    } else {
        q != p && legendre_u64(p % q, q) == 1
    }
}

/// The values taken by each class on sampled points of `X(Q_q)`.
pub fn sampled_images(
    s: &SubfamilySurface,
    q: u64,
    tags: &[ClassTag],
    budget: &BrauerBudget,
) -> Result<Vec<(BTreeSet<InvariantValue>, usize)>> {
    let model = LocalModel::new(&s.quadrics(), q)?;
    let precision = (budget.precision + if q == 2 { 2 } else { 0 }).min(model.top.k);
    let pts = sample_local_points(&model, budget.samples, precision, budget.seed ^ q, &budget.local)?;
    if pts.is_empty() {
        crate::bail!(Inconclusive, "no local points sampled at {q}");
    }
    let mut out = Vec::new();
    for &tag in tags {
        let class = BrauerClass::new(tag, s);
        let mut image = BTreeSet::new();
        let mut n = 0;
        for pt in &pts {
            match evaluate_certified(&class, s, &model, pt) {
                Ok(v) => {
                    image.insert(v);
                    n += 1;
                }
                Err(Error::Indeterminate(_)) => {}
                Err(e) => return Err(e),
            }
        }
        out.push((image, n));
    }
    Ok(out)
}

fn theorem(place: Place, why: &str) -> PlaceImage {
    PlaceImage { place, image: alloc::vec![InvariantValue::Zero], evidence: Evidence::Theorem(why.into()) }
}

/// Per-class invariant images at every relevant place, the classes that
/// obstruct the Hasse principle and whether weak approximation fails.
///
/// Places outside [`relevant_primes`] have good reduction and contribute
/// `{0}`. For recognised families the closed-form prediction is compared
/// with the computed verdict; a disagreement is an error.
pub fn bm_verdict(s: &SubfamilySurface, budget: &BrauerBudget) -> Result<ObstructionReport> {
    s.require_valid()?;
    match everywhere_locally_soluble(s, &budget.local)?.verdict() {
        Some(true) => {}
        Some(false) => crate::bail!(NotLocallySoluble, "the surface is not everywhere locally soluble"),
        None => crate::bail!(Inconclusive, "local solubility undecided"),
    }
    let p = s.p;
    let family = recognize(s);
    let is_y = matches!(family, Some(Family::Y(_)));
    let witness = surjectivity_witness(s, &budget.local)?;
    let mut per_class: Vec<Vec<PlaceImage>> =
        ClassTag::ALL.iter().map(|_| alloc::vec![theorem(Place::Infinite, "p > 0 is a square in R")]).collect();
    for q in relevant_primes(s)? {
        let place = Place::Prime(q);
        if p_is_local_square(p, q) {
            for imgs in per_class.iter_mut() {
                imgs.push(theorem(place, "p is a square in Q_q"));
            }
            continue;
        }
        let a_theorem = is_y && q != p;
        let sample_tags: Vec<ClassTag> = ClassTag::ALL
            .iter()
            .copied()
            .filter(|&t| budget.check_theorems || !(a_theorem && t == ClassTag::A))
            .collect();
        let sampled = match sampled_images(s, q, &sample_tags, budget) {
            Ok(v) => v.into_iter().map(Ok).collect::<Vec<_>>(),
            Err(e @ (Error::Inconclusive(_) | Error::EnumerationBudget(_))) => {
                sample_tags.iter().map(|_| Err(format!("{e}"))).collect()
            }
            Err(e) => return Err(e),
        };
        for (i, &tag) in ClassTag::ALL.iter().enumerate() {
            let found = sample_tags.iter().position(|&t| t == tag).map(|j| &sampled[j]);
            let entry = if q == p && tag == witness.class {
                PlaceImage {
                    place,
                    image: alloc::vec![InvariantValue::Zero, InvariantValue::Half],
                    evidence: Evidence::WitnessPair,
                }
            } else if a_theorem && tag == ClassTag::A {
                if let Some(Ok((vals, _))) = found {
                    if vals.iter().any(|v| *v != InvariantValue::Zero) {
                        crate::bail!(TheoremMismatch, "sampled inv_{q} A takes 1/2 on a Y-family surface");
                    }
                }
                theorem(place, "inv_v A vanishes on the Y family for v != p")
            } else {
                match found.expect("sampled") {
                    Ok((vals, n)) if *n > 0 => {
                        PlaceImage { place, image: vals.iter().copied().collect(), evidence: Evidence::Sampled(*n) }
                    }
                    Ok(_) => PlaceImage {
                        place,
                        image: Vec::new(),
                        evidence: Evidence::Unknown("every evaluation indeterminate".into()),
                    },
                    Err(msg) => PlaceImage { place, image: Vec::new(), evidence: Evidence::Unknown(msg.clone()) },
                }
            };
            per_class[i].push(entry);
        }
    }
    let classes: Vec<ClassReport> = ClassTag::ALL
        .iter()
        .zip(per_class)
        .map(|(&tag, places)| {
            let obstructs = if places.iter().any(|p| p.image.is_empty()) {
                None
            } else {
                let singletons = places.iter().all(|p| p.image.len() == 1);
                let sum = places.iter().fold(InvariantValue::Zero, |acc, p| acc + p.image[0]);
                Some(singletons && sum == InvariantValue::Half)
            };
            ClassReport { tag, places, obstructs }
        })
        .collect();
    let hp_obstructed_by: Vec<ClassTag> = classes.iter().filter(|c| c.obstructs == Some(true)).map(|c| c.tag).collect();
    if hp_obstructed_by.len() > 1 {
        crate::bail!(TheoremMismatch, "more than one class obstructs: {hp_obstructed_by:?}");
    }
    let wa_failure = classes.iter().any(|c| c.places.iter().any(|p| p.image.len() == 2));
    let report = ObstructionReport { classes, hp_obstructed_by, wa_failure, family, witness };
    if let Some(f) = &report.family {
        if report.complete() && report.verdict() != f.prediction() {
            crate::bail!(TheoremMismatch, "{f}: predicted {} but computed {}", f.prediction(), report.verdict());
        }
    }
    Ok(report)
}

/// Checks that each class has invariants summing to zero at a rational
/// point, over `{inf, 2, p}` and every prime dividing a representation value.
pub fn reciprocity_check(s: &SubfamilySurface, pt: &RationalPoint) -> Result<bool> {
    let mut primes = BTreeSet::from([2, s.p]);
    for v in rational_rep_values(s, pt) {
        primes.extend(prime_divisors(&v)?);
    }
    let mut places: Vec<Place> = primes.into_iter().map(Place::Prime).collect();
    places.push(Place::Infinite);
    for class in BrauerClass::all(s) {
        let mut sum = InvariantValue::Zero;
        for &v in &places {
            sum = sum + evaluate_rational(&class, s, pt, v)?;
        }
        if sum != InvariantValue::Zero {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `inv_v` at a rational point for every class and place used by
/// [`reciprocity_check`].
pub fn rational_invariants(s: &SubfamilySurface, pt: &RationalPoint) -> Result<Vec<(ClassTag, Place, InvariantValue)>> {
    let mut primes = BTreeSet::from([2, s.p]);
    for v in rational_rep_values(s, pt) {
        primes.extend(prime_divisors(&v)?);
    }
    let mut out = Vec::new();
    for class in BrauerClass::all(s) {
        for v in primes.iter().map(|&q| Place::Prime(q)).chain([Place::Infinite]) {
            out.push((class.tag, v, evaluate_rational(&class, s, pt, v)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_13_2_6() {
        let s = SubfamilySurface::new(13, 2, -13, 1, -6, 1, 2);
        let r = bm_verdict(&s, &BrauerBudget::default()).unwrap();
        assert_eq!(r.hp_obstructed_by, [ClassTag::A]);
        assert!(r.wa_failure);
        let a13 = r.class(ClassTag::A).image_at(Place::Prime(13)).unwrap();
        assert_eq!(a13.image, [InvariantValue::Half]);
    }

    #[test]
    fn reciprocity_examples() {
        let s = SubfamilySurface::new(13, 1, -13, 1, -12, 1, 2);
        assert!(reciprocity_check(&s, &RationalPoint::from_i64([1, 0, 0, 0, 1]).unwrap()).unwrap());
        let s = SubfamilySurface::new(13, 12, -13, 1, -1, 1, 2);
        assert!(reciprocity_check(&s, &RationalPoint::from_i64([1, -3, 2, 7, 16]).unwrap()).unwrap());
    }
}
