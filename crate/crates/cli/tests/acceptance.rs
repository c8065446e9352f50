//! The acceptance criteria, each printed as one PASS/FAIL line with its
//! running time against its limit.

#[path = "../../core/tests/oracles/mod.rs"]
mod oracles;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use brauer4::census::{self, CensusSpec, FamilyKind};
use brauer4::commands;
use brauer4::config::RunConfig;
use brauer4_core::arith::{hilbert_symbol_int, legendre_u64, prime_divisors, sqrt_mod_u64, Place};
use brauer4_core::brauer::{
    bm_verdict, evaluate_local, quadres_counts, relevant_primes, surjectivity_witness, BrauerBudget, BrauerClass,
    CaseStep, ClassTag, InvariantValue,
};
use brauer4_core::families::{
    admissible_t, make_S, make_Y, point_search, s_from_t, CensusRow, Family, Prediction, SParams, YParams,
};
use brauer4_core::localsolve::{
    decide_Qq, everywhere_locally_soluble, everywhere_locally_soluble_general, sample_local_points, InsolubilityProof,
    LocalBudget, LocalModel, SolubilityVerdict, SolubilityWitness,
};
use brauer4_core::quadform::{collapse_triple, vav_order4_test, GeneralSurface, RationalPoint, SubfamilySurface};
use brauer4_core::Error;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(r: brauer4_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Runs one criterion, catching panics, and prints its line.
fn criterion(n: u32, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    let elapsed = start.elapsed();
    let result = match result {
        Ok(d) if elapsed > limit => Err(format!("{d}; took {elapsed:.1?}, over the limit")),
        r => r,
    };
    let (tag, detail) = match &result {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("criterion {n} [{name}]: {tag} in {:.1}s (limit {}s): {detail}", elapsed.as_secs_f64(), limit.as_secs());
    result.is_ok()
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn y(p: u64, a: i64, b: i64) -> SubfamilySurface {
    make_Y(YParams::new(p, a, b).unwrap()).unwrap()
}

fn worked_examples() -> Outcome {
    let budget = BrauerBudget::default();
    let local = LocalBudget::default();

    let y1326 = y(13, 2, 6);
    ensure(core(everywhere_locally_soluble(&y1326, &local))?.verdict() == Some(true), || "Y_13_2_6 not ELS".into())?;
    let r = core(bm_verdict(&y1326, &budget))?;
    ensure(r.hp_obstructed_by == [ClassTag::A], || format!("Y_13_2_6 obstructed by {:?}", r.hp_obstructed_by))?;
    let img = r.class(ClassTag::A).image_at(Place::Prime(13)).ok_or("no image at 13")?;
    ensure(img.image == [InvariantValue::Half], || format!("inv_13 A image {:?}", img.image))?;
    let pts = core(point_search(&y1326, 200))?;
    ensure(pts.is_empty(), || format!("Y_13_2_6 has points {pts:?}"))?;

    for (a, b, pt, h) in [(1, 12, [1, 0, 0, 0, 1], 1), (12, 1, [1, -3, 2, 7, 16], 16)] {
        let s = y(13, a, b);
        let r = core(bm_verdict(&s, &budget))?;
        ensure(r.hp_obstructed_by.is_empty(), || format!("Y_13_{a}_{b} obstructed by {:?}", r.hp_obstructed_by))?;
        let want = RationalPoint::from_i64(pt).unwrap();
        let found = core(point_search(&s, h))?;
        ensure(found.iter().any(|p| p.sign_equivalent(&want)), || format!("Y_13_{a}_{b}: {want} not found"))?;
        ensure(want.height() <= BigInt::from(h), || format!("{want} above height {h}"))?;
    }

    let s = make_S(&SParams::new(13, 153.into(), 179.into()).unwrap()).unwrap();
    ensure(core(everywhere_locally_soluble(&s, &local))?.verdict() == Some(true), || "S_13_153_179 not ELS".into())?;
    let r = core(bm_verdict(&s, &budget))?;
    ensure(r.hp_obstructed_by == [ClassTag::B], || format!("S_13_153_179 obstructed by {:?}", r.hp_obstructed_by))?;

    let bsd = GeneralSurface::bsd_example();
    let r = core(everywhere_locally_soluble_general(&bsd, &local))?;
    ensure(r.verdict() == Some(true), || "BSD surface not ELS".into())?;
    ensure(!core(vav_order4_test(&bsd))?.certified(), || "BSD surface certified".into())?;

    let cli = commands::verify_examples(&RunConfig::default()).map_err(|e| e.to_string())?;
    ensure(cli.value["examples"].as_array().is_some_and(|e| e.iter().all(|x| x["status"] == "pass")), || {
        format!("verify-paper reports {}", cli.value)
    })?;
    Ok("five examples match exactly".into())
}

fn lemma_counts() -> Outcome {
    let mut checked = 0;
    for p in [13u64, 17, 29, 37] {
        let leg = |x: i64| legendre_u64(x.rem_euclid(p as i64) as u64, p);
        for a in 1..p as i64 {
            for b in 1..p as i64 {
                let counts = core(quadres_counts(p, a, b))?;
                ensure(counts == oracles::residue_counts(p, a, b), || format!("p={p} a={a} b={b}: {counts:?}"))?;
                let expect = match (leg(a), leg(b)) {
                    (1, 1) => Some((1, (p - 5) / 4, (p - 1) / 4)),
                    (1, -1) | (-1, 1) => Some((0, (p - 1) / 4, (p - 1) / 4)),
                    _ => None,
                };
                if let Some(e) = expect {
                    ensure(counts == e, || format!("p={p} a={a} b={b}: {counts:?} != {e:?}"))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (a, b) pairs match both closed forms and enumeration"))
}

fn census_y(rows: &mut Vec<CensusRow>) -> Outcome {
    let spec = CensusSpec { family: FamilyKind::Y, p_min: 3, p_max: 99, per_prime: 0 };
    let c = census::run(&spec, &RunConfig::default()).map_err(|e| e.to_string())?;
    let mut obstructed = 0;
    for (row, _) in &c.rows {
        let Family::Y(YParams { p, a, b }) = row.family else { return Err(format!("{} is not a Y row", row.id())) };
        let r = row.report.as_ref().map_err(|e| format!("{}: {e}", row.id()))?;
        ensure(r.complete() && row.agrees, || {
            format!("{}: computed {}, predicted {}", row.id(), r.verdict(), row.predicted)
        })?;
        let expect = p % 8 == 5 && a % 2 == 0 && b % 2 == 0;
        ensure(expect == !r.hp_obstructed_by.is_empty(), || {
            format!("{}: obstruction {:?}", row.id(), r.hp_obstructed_by)
        })?;
        ensure(r.hp_obstructed_by.len() <= 1, || format!("{}: {:?}", row.id(), r.hp_obstructed_by))?;
        ensure(r.wa_failure, || format!("{}: weak approximation holds", row.id()))?;
        obstructed += usize::from(expect);
    }
    let n = c.rows.len();
    rows.extend(c.rows.into_iter().map(|(r, _)| r));
    Ok(format!("{n} surfaces agree, {obstructed} obstructed by A"))
}

fn s_generation() -> Outcome {
    let mut verdicts = 0;
    for p in [13u64, 29, 37, 53] {
        let ts = admissible_t(p, 3);
        ensure(ts.len() == 3, || format!("p={p}: t = {ts:?}"))?;
        for (i, t) in ts.into_iter().enumerate() {
            let params = core(s_from_t(p, t))?;
            let cond = SParams::conditions(p, &params.a, &params.b);
            ensure(cond.all(), || format!("{params}: fails {:?}", cond.failures()))?;
            let samples = if i < 2 { 64 } else { 16 };
            let r = core(bm_verdict(&core(make_S(&params))?, &BrauerBudget { samples, ..BrauerBudget::default() }))?;
            ensure(r.verdict() == Prediction::ObstructedBy(ClassTag::B), || format!("{params}: {}", r.verdict()))?;
            verdicts += 1;
        }
    }
    Ok(format!("12 parameter sets valid, {verdicts} obstructed by B"))
}

const SMALL_PRIMES: [u64; 14] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

fn random_surface(rng: &mut ChaCha8Rng) -> Option<SubfamilySurface> {
    let p = SMALL_PRIMES[rng.gen_range(0..SMALL_PRIMES.len())];
    let coef = |rng: &mut ChaCha8Rng| {
        let unit = rng.gen_range(1..=9i64) * if rng.gen_bool(0.5) { -1 } else { 1 };
        let e = [0, 0, 0, 0, 1, 1, 2][rng.gen_range(0..7)];
        BigInt::from(unit) * BigInt::from(p).pow(e)
    };
    let (a, b, c, d) = (coef(rng), coef(rng), coef(rng), coef(rng));
    let n = BigInt::from(rng.gen_range(1..=4)) * if rng.gen_bool(0.3) { BigInt::from(p) } else { BigInt::from(1) };
    let mut found = SubfamilySurface::solve_m(p, a, b, c, d, n);
    (!found.is_empty()).then(|| found.swap_remove(rng.gen_range(0..found.len())))
}

fn route_kinds(trace: &[CaseStep]) -> Vec<&'static str> {
    trace
        .iter()
        .filter_map(|t| match t {
            CaseStep::FlipYZ => Some("p=3 mod 4"),
            CaseStep::Case(1, _) => Some("case 1"),
            CaseStep::Case(3, _) => Some("case 3"),
            CaseStep::Case(5..=8, _) => Some("cases 5-8"),
            _ => None,
        })
        .collect()
}

fn bit(v: InvariantValue) -> u8 {
    u8::from(v == InvariantValue::Half)
}

fn witness_pairs() -> Outcome {
    let local = LocalBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let required = ["p=3 mod 4", "case 1", "case 3", "cases 5-8"];
    let mut covered: Vec<&str> = Vec::new();
    let mut chosen = Vec::new();
    for _ in 0..200_000 {
        if chosen.len() == 25 {
            break;
        }
        let Some(s) = random_surface(&mut rng) else { continue };
        let w = match surjectivity_witness(&s, &local) {
            Ok(w) => w,
            Err(Error::NotLocallySoluble(_)) => continue,
            Err(e) => return Err(format!("{s}: {e}")),
        };
        let kinds = route_kinds(&w.trace);
        let new = kinds.iter().any(|k| !covered.contains(k));
        let missing = required.iter().filter(|r| !covered.contains(r)).count();
        if new || chosen.len() + missing < 25 {
            covered.extend(kinds);
            chosen.push((s, w));
        }
    }
    ensure(chosen.len() == 25, || format!("only {} surfaces", chosen.len()))?;
    for r in required {
        ensure(covered.contains(&r), || format!("no surface took {r}"))?;
    }
    let mut klein = 0;
    for (s, w) in &chosen {
        let cl = BrauerClass::new(w.class, s);
        let v = [0, 1].map(|i| evaluate_local(&cl, s, &w.points[i]));
        let v = [core(v[0].clone())?, core(v[1].clone())?];
        ensure(v[0] != v[1] && v == w.values, || format!("{s}: values {v:?}"))?;
        let tag = ['A', 'B', 'C'][w.class as usize];
        for (pt, val) in w.points.iter().zip(v) {
            if let Some(e) = oracles::invariant_at(s, tag, &pt.to_bigint(), s.p, pt.k) {
                ensure(e == bit(val), || format!("{s}: oracle disagrees at {pt}"))?;
            }
        }
        let classes = BrauerClass::all(s);
        for q in [2, s.p] {
            let model = core(LocalModel::new(&s.quadrics(), q))?;
            if !decide_Qq(&model, &local).is_soluble() {
                continue;
            }
            for cp in core(sample_local_points(&model, 8, 6, 17, &local))? {
                let vals: Vec<_> = classes.iter().map(|c| evaluate_local(c, s, &cp.point).ok()).collect();
                if let [Some(a), Some(b), Some(c)] = vals[..] {
                    ensure(c == a + b, || format!("{s}: Klein four fails at {}", cp.point))?;
                    klein += 1;
                }
            }
        }
    }
    ensure(klein >= 200, || format!("only {klein} sampled points fully evaluated"))?;
    Ok(format!("25 surfaces covering {}; Klein four at {klein} points", required.join(", ")))
}

/// Strips `q^2` factors so the valuation is at most 1; the square class,
/// and with it the symbol, is unchanged.
fn reduce(mut a: i64, q: i64) -> i64 {
    while a % (q * q) == 0 {
        a /= q * q;
    }
    a
}

fn arithmetic_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let nonzero = |rng: &mut ChaCha8Rng| loop {
        let a = rng.gen_range(-500i64..=500);
        if a != 0 {
            return a;
        }
    };
    for (q, k) in [(2u64, 6u32), (3, 3), (5, 2), (13, 2)] {
        for _ in 0..200 {
            let (a, b) = (nonzero(&mut rng), nonzero(&mut rng));
            let lib = core(hilbert_symbol_int(a, b, Place::Prime(q)))?;
            let search = oracles::hilbert_by_search(reduce(a, q as i64), reduce(b, q as i64), q, k);
            ensure(lib == search, || format!("({a}, {b})_{q}: {lib} vs {search}"))?;
        }
    }
    for _ in 0..200 {
        let (a, b) = (nonzero(&mut rng), nonzero(&mut rng));
        let mut places = vec![Place::Infinite, Place::Prime(2)];
        let primes = core(prime_divisors(&BigInt::from(a * b)))?;
        places.extend(primes.into_iter().filter(|&q| q != 2).map(Place::Prime));
        let prod: i8 = places.iter().map(|v| hilbert_symbol_int(a, b, *v).unwrap()).product();
        ensure(prod == 1, || format!("product formula fails for ({a}, {b})"))?;
    }
    let mut residues = 0;
    for p in (3..=101u64).filter(|&p| (2..p).all(|d| p % d != 0)) {
        for a in 0..p {
            let l = legendre_u64(a, p);
            ensure(l == oracles::euler(a, p), || format!("legendre({a}, {p})"))?;
            match sqrt_mod_u64(a, p) {
                Some(r) => ensure(l != -1 && r * r % p == a, || format!("sqrt({a}) mod {p} = {r}"))?,
                None => ensure(l == -1, || format!("no sqrt of {a} mod {p}"))?,
            }
            residues += 1;
        }
    }
    Ok(format!("800 Hilbert symbols, 200 product formulas, {residues} residues"))
}

fn soundness_surfaces() -> Vec<SubfamilySurface> {
    let vals = [-13i64, -9, -5, -3, -2, -1, 1, 2, 3, 5, 13, 39];
    let mut out = Vec::new();
    for p in [3u64, 5, 7, 13] {
        for (i, &a) in vals.iter().enumerate() {
            for &b in vals.iter().skip(i % 4).step_by(4) {
                for &c in vals.iter().step_by(3) {
                    for &d in vals.iter().skip(1).step_by(5) {
                        for n in [1i64, 3, p as i64] {
                            out.extend(SubfamilySurface::solve_m(p, a.into(), b.into(), c.into(), d.into(), n.into()));
                        }
                    }
                }
            }
        }
    }
    out
}

fn local_soundness() -> Outcome {
    let budget = LocalBudget::default();
    let (mut soluble, mut insoluble) = (0, 0);
    for s in soundness_surfaces() {
        for q in core(relevant_primes(&s))? {
            let model = core(LocalModel::new(&s.quadrics(), q))?;
            match decide_Qq(&model, &budget) {
                SolubilityVerdict::Soluble(SolubilityWitness::Padic { point, certificate }) => {
                    let coords = point.to_bigint();
                    let res = oracles::residuals(&s, &coords);
                    let qk = BigInt::from(q).pow(point.k);
                    ensure(res.iter().all(|r| (r % &qk) == BigInt::from(0)), || {
                        format!("{s}: {point} is off the surface")
                    })?;
                    ensure(2 * certificate.e < point.k && oracles::hensel_liftable(&s, &coords, q, point.k), || {
                        format!("{s}: {point} is not Hensel-certified")
                    })?;
                    soluble += 1;
                }
                SolubilityVerdict::Insoluble(
                    InsolubilityProof::EmptyLevel(k) | InsolubilityProof::NonSquareValues(k),
                ) => {
                    ensure((q as f64).powi(k as i32) <= 1e6, || format!("{s}: level {q}^{k} is beyond enumeration"))?;
                    ensure(!oracles::has_primitive_solution_mod(&s, q, k), || format!("{s} has points mod {q}^{k}"))?;
                    insoluble += 1;
                }
                v => return Err(format!("{s} at {q}: {v:?}")),
            }
        }
    }
    ensure(soluble > 100 && insoluble >= 5, || format!("{soluble} soluble, {insoluble} insoluble"))?;
    Ok(format!("{soluble} soluble verdicts re-verified, {insoluble} insoluble verdicts re-enumerated"))
}

fn triple_collapse(rows: &[CensusRow]) -> Outcome {
    let mut done = 0;
    for row in rows.iter().filter(|r| r.computed() == Some(Prediction::NoObstruction)) {
        let s = core(row.family.surface())?;
        let nf = s.to_normal_form();
        for pt in row.points.iter().take(2) {
            let p = s.point_to_normal_form(pt);
            let out = core(collapse_triple(&nf, [&p, &p, &p]))?;
            ensure(out.sign_equivalent(&p), || format!("{}: diagonal at {pt} gives {out}", row.id()))?;
            let flipped =
                [p.with_signs(false, false, true), p.with_signs(false, true, false), p.with_signs(true, false, false)];
            let out = core(collapse_triple(&nf, [&flipped[0], &flipped[1], &flipped[2]]))?;
            ensure(out.sign_equivalent(&p), || format!("{}: flipped triple at {pt} gives {out}", row.id()))?;
            done += 1;
            if done == 20 {
                return Ok("20 points recovered from diagonal and sign-flipped triples".into());
            }
        }
    }
    Err(format!("only {done} points available"))
}

#[test]
fn acceptance() {
    let mut rows = Vec::new();
    let results = [
        criterion(1, "worked examples", secs(60), worked_examples),
        criterion(2, "residue counts", secs(5), lemma_counts),
        criterion(3, "Y census", secs(600), || census_y(&mut rows)),
        criterion(4, "S generation", secs(30), s_generation),
        criterion(5, "witness pairs", secs(120), witness_pairs),
        criterion(6, "arithmetic oracles", secs(30), arithmetic_oracles),
        criterion(7, "local soundness", secs(120), local_soundness),
        criterion(8, "triple collapse", secs(10), || triple_collapse(&rows)),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "criteria {failed:?} failed");
}
