mod oracles;

use brauer4_core::brauer::{
    bm_verdict, evaluate_local, quadres_counts, surjectivity_witness, BrauerBudget, BrauerClass, ClassTag,
    InvariantValue,
};
use brauer4_core::families::{admissible_t, make_S, make_Y, predict_Y, s_from_t, YParams};
use brauer4_core::localsolve::{
    decide_Qq, sample_local_points, InsolubilityProof, LocalBudget, LocalModel, SolubilityVerdict,
};
use brauer4_core::quadform::SubfamilySurface;
use brauer4_core::Error;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn bit(v: InvariantValue) -> u8 {
    match v {
        InvariantValue::Zero => 0,
        InvariantValue::Half => 1,
    }
}

fn tag_char(t: ClassTag) -> char {
    match t {
        ClassTag::A => 'A',
        ClassTag::B => 'B',
        ClassTag::C => 'C',
    }
}

fn grid() -> Vec<SubfamilySurface> {
    let vals = [-13i64, -5, -3, -2, -1, 1, 2, 3, 5, 6, 13];
    let mut out = Vec::new();
    for p in [3u64, 5, 7, 13, 17] {
        for (i, &a) in vals.iter().enumerate() {
            for &b in vals.iter().skip(i % 2).step_by(2) {
                for &c in vals.iter().step_by(3) {
                    for &d in &vals {
                        for n in [1i64, 2, p as i64] {
                            out.extend(SubfamilySurface::solve_m(p, a.into(), b.into(), c.into(), d.into(), n.into()));
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn oracle_hilbert_agrees_with_enumeration() {
    for q in [2u64, 3, 5] {
        let k = if q == 2 { 5 } else { 2 };
        for a in [-10i64, -6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10] {
            for b in [-5i64, -3, -2, -1, 1, 2, 3, 5, 7] {
                let by_formula = oracles::hilbert_formula(&a.into(), &b.into(), q);
                assert_eq!(by_formula, oracles::hilbert_by_search(a, b, q, k), "({a}, {b})_{q}");
            }
        }
    }
}

#[test]
fn klein_four_and_oracle_agreement() {
    let budget = LocalBudget::default();
    let (mut points, mut compared) = (0, 0);
    for s in grid().iter().step_by(5) {
        for q in [2, s.p] {
            let model = LocalModel::new(&s.quadrics(), q).unwrap();
            if !decide_Qq(&model, &budget).is_soluble() {
                continue;
            }
            let pts = sample_local_points(&model, 8, 6, 11, &budget).unwrap();
            let classes = BrauerClass::all(s);
            for cp in &pts {
                points += 1;
                let coords = cp.point.to_bigint();
                let vals: Vec<Option<u8>> = classes
                    .iter()
                    .map(|c| match evaluate_local(c, s, &cp.point) {
                        Ok(v) => Some(bit(v)),
                        Err(Error::Indeterminate(_)) => None,
                        Err(e) => panic!("{s} at {}: {e}", cp.point),
                    })
                    .collect();
                if let [Some(a), Some(b), Some(c)] = vals[..] {
                    assert_eq!(c, a ^ b, "{s} at {}", cp.point);
                }
                for (cl, v) in classes.iter().zip(&vals) {
                    let expect = oracles::invariant_at(s, tag_char(cl.tag), &coords, q, cp.point.k);
                    if let (Some(v), Some(e)) = (v, expect) {
                        compared += 1;
                        assert_eq!(*v, e, "class {} on {s} at {}", cl.tag, cp.point);
                    }
                }
            }
        }
    }
    assert!(points > 200 && compared > 500, "{points} points, {compared} comparisons");
}

#[test]
fn witnesses_take_both_values() {
    let budget = LocalBudget::default();
    let mut built = 0;
    for s in grid().iter().step_by(3) {
        let w = match surjectivity_witness(s, &budget) {
            Ok(w) => w,
            Err(Error::NotLocallySoluble(_)) => continue,
            Err(e) => panic!("{s}: {e}"),
        };
        built += 1;
        assert_ne!(w.values[0], w.values[1]);
        let tag = tag_char(w.class);
        let mut seen = Vec::new();
        for (pt, v) in w.points.iter().zip(w.values) {
            let coords = pt.to_bigint();
            assert!(oracles::hensel_liftable(s, &coords, s.p, pt.k), "{s}: {pt}");
            if let Some(e) = oracles::invariant_at(s, tag, &coords, s.p, pt.k) {
                assert_eq!(e, bit(v), "{s}: class {tag} at {pt}");
                seen.push(e);
            }
        }
        if seen.len() == 2 {
            assert_ne!(seen[0], seen[1]);
        }
    }
    assert!(built > 50, "{built}");
}

#[test]
fn quadres_counts_match_enumeration() {
    for p in [13u64, 17, 29, 37] {
        for a in 1..p as i64 {
            for b in 1..p as i64 {
                assert_eq!(quadres_counts(p, a, b).unwrap(), oracles::residue_counts(p, a, b), "p={p} a={a} b={b}");
            }
        }
    }
}

#[test]
fn quadres_counts_closed_forms() {
    // Points of s^2 - b t^2 = a with s, t nonzero come in fours, one four
    // per nonzero square y = t^2 with a + b y a nonzero square.
    for p in [13u64, 17, 29, 37] {
        let leg = |x: i64| oracles::euler(x.rem_euclid(p as i64) as u64, p) as i64;
        for a in 1..p as i64 {
            for b in 1..p as i64 {
                let zero = u64::from(leg(a * b) == 1);
                let sq = ((p as i64 - leg(b) - 2 - leg(a) - leg(a * b)) / 4) as u64;
                let expect = (zero, sq, (p - 1) / 2 - zero - sq);
                assert_eq!(quadres_counts(p, a, b).unwrap(), expect, "p={p} a={a} b={b}");
                if leg(a) == 1 && leg(b) == 1 {
                    assert_eq!(expect, (1, (p - 5) / 4, (p - 1) / 4));
                } else if leg(a) * leg(b) == -1 {
                    assert_eq!(expect, (0, (p - 1) / 4, (p - 1) / 4));
                }
            }
        }
    }
}

#[test]
fn y_family_images_are_constant() {
    let budget = BrauerBudget { samples: 24, check_theorems: true, ..BrauerBudget::default() };
    for p in [5u64, 13, 17] {
        for y in YParams::all_positive(p).unwrap() {
            let s = make_Y(y).unwrap();
            let r = bm_verdict(&s, &budget).unwrap();
            assert!(r.complete(), "{y}");
            assert_eq!(r.verdict(), predict_Y(y).0, "{y}");
            assert!(r.wa_failure, "{y}");
        }
    }
}

#[test]
fn s_family_b_is_half_at_p() {
    let budget = LocalBudget::default();
    let mut determined = 0;
    for p in [13u64, 29] {
        for t in admissible_t(p, 2) {
            let s = make_S(&s_from_t(p, t).unwrap()).unwrap();
            let model = LocalModel::new(&s.quadrics(), p).unwrap();
            for cp in sample_local_points(&model, 24, 6, 3, &budget).unwrap() {
                if let Some(v) = oracles::invariant_at(&s, 'B', &cp.point.to_bigint(), p, cp.point.k) {
                    determined += 1;
                    assert_eq!(v, 1, "{s} at {}", cp.point);
                }
            }
        }
    }
    assert!(determined > 40, "{determined}");
}

/// Valid surfaces with `p | A, B, M, N` and `M'(B'C + A'D - M')/(2A'C)` a
/// non-residue, primes denoting division by `p`.
fn case_2b_surfaces() -> Vec<SubfamilySurface> {
    let mut out = Vec::new();
    for p in [5u64, 13] {
        let pi = p as i64;
        let leg = |x: &BigInt| oracles::euler(x.mod_floor(&BigInt::from(p)).to_u64().unwrap(), p);
        for a in [1i64, 2, 3, -1, -2] {
            for b in [1i64, 2, 3, -1, -3] {
                for c in [1i64, 2, 3, -1, -2, 5] {
                    for d in [1i64, 2, 3, -1, -2, -3] {
                        for n in [1i64, 2] {
                            let (a, b, c, d, n) = (a * pi, b * pi, c.into(), d.into(), (n * pi).into());
                            for s in SubfamilySurface::solve_m(p, a.into(), b.into(), c, d, n) {
                                if !s.m.is_multiple_of(&BigInt::from(p)) {
                                    continue;
                                }
                                let (a1, b1, m1) = (&s.a / pi, &s.b / pi, &s.m / pi);
                                let num = &m1 * (&b1 * &s.c + &a1 * &s.d - &m1);
                                let den = a1 * &s.c * 2;
                                if leg(&den) != 0 && leg(&num) * leg(&den) == -1 {
                                    out.push(s);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn case_2b_is_insoluble_at_p() {
    let cases = case_2b_surfaces();
    assert!(!cases.is_empty());
    for s in &cases {
        let model = LocalModel::new(&s.quadrics(), s.p).unwrap();
        let verdict = decide_Qq(&model, &LocalBudget::default());
        let SolubilityVerdict::Insoluble(InsolubilityProof::EmptyLevel(k)) = verdict else {
            panic!("{s} should have an empty level at {}: {verdict:?}", s.p);
        };
        assert!(matches!(surjectivity_witness(s, &LocalBudget::default()), Err(Error::NotLocallySoluble(_))));
        assert!(!oracles::has_primitive_solution_mod(s, s.p, k), "{s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn invariants_of_classes_are_additive(idx in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let surfaces = grid();
        let s = idx.get(&surfaces);
        let model = LocalModel::new(&s.quadrics(), s.p).unwrap();
        let budget = LocalBudget::default();
        prop_assume!(decide_Qq(&model, &budget).is_soluble());
        let classes = BrauerClass::all(s);
        for cp in sample_local_points(&model, 4, 6, seed, &budget).unwrap() {
            let v: Vec<_> = classes.iter().map(|c| evaluate_local(c, s, &cp.point).ok()).collect();
            if let [Some(a), Some(b), Some(c)] = v[..] {
                prop_assert_eq!(c, a + b);
            }
        }
    }
}
