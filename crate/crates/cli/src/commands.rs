use brauer4_core::arith::Place;
use brauer4_core::brauer::{bm_verdict, rational_invariants, reciprocity_check, ClassTag, InvariantValue};
use brauer4_core::families::{point_search, point_search_shell, recognize};
use brauer4_core::localsolve::{everywhere_locally_soluble, everywhere_locally_soluble_general};
use brauer4_core::quadform::{to_matrices, vav_order4_test, RationalPoint, SubfamilySurface};
use brauer4_core::Error;
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{CliError, RunConfig, Status};
use crate::examples::{self, Expectation};
use crate::input::Surface;
use crate::render;

/// A command's report and the worst status met while producing it.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub value: Value,
    pub status: Status,
}

impl Outcome {
    fn new(value: Value) -> Self {
        Outcome { value, status: Status::Ok }
    }

    fn worsen(&mut self, s: Status) {
        self.status = self.status.max(s);
    }
}

fn valid_subfamily(s: &SubfamilySurface) -> Result<(), CliError> {
    let r = s.check();
    if r.valid() {
        Ok(())
    } else {
        Err(CliError::Input(format!("invalid subfamily surface: {}", r.failures().join("; "))))
    }
}

pub(crate) fn pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Input(format!("cannot start {jobs} workers: {e}")))
}

/// Brauer section of a report; `None` status means no error.
fn brauer_section(s: &SubfamilySurface, cfg: &RunConfig) -> (Value, Option<Status>) {
    match bm_verdict(s, &cfg.brauer_budget()) {
        Ok(r) => {
            let st = (!r.complete()).then_some(Status::Inconclusive);
            (render::obstruction(&r), st)
        }
        Err(Error::NotLocallySoluble(m)) => {
            (json!({ "skipped": format!("not everywhere locally soluble: {m}") }), None)
        }
        Err(e) => {
            let st = Status::of_error(&e);
            (render::error(&e), Some(st))
        }
    }
}

/// Validity, local solubility, invariant images, verdict and witness.
pub fn analyze(surface: &Surface, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match surface {
        Surface::Subfamily(s) => {
            valid_subfamily(s)?;
            let check = s.check();
            let mut out = Outcome::new(Value::Null);
            let sol = match everywhere_locally_soluble(s, &cfg.local) {
                Ok(r) => {
                    if r.verdict().is_none() {
                        out.worsen(Status::Inconclusive);
                    }
                    render::solubility(&r)
                }
                Err(e) => {
                    out.worsen(Status::of_error(&e));
                    render::error(&e)
                }
            };
            let (brauer, st) = brauer_section(s, cfg);
            if let Some(st) = st {
                out.worsen(st);
            }
            out.value = json!({
                "surface": render::subfamily(s),
                "validity": render::validity(&check),
                "family": recognize(s).as_ref().map(render::family),
                "local_solubility": sol,
                "brauer": brauer,
            });
            Ok(out)
        }
        Surface::General(g) => {
            let mut out = Outcome::new(Value::Null);
            let sol = match everywhere_locally_soluble_general(g, &cfg.local) {
                Ok(r) => {
                    if r.verdict().is_none() {
                        out.worsen(Status::Inconclusive);
                    }
                    render::solubility(&r)
                }
                Err(e) => {
                    out.worsen(Status::of_error(&e));
                    render::error(&e)
                }
            };
            let vav = vav_order4_test(g)?;
            out.value = json!({
                "matrices": render::matrices(g),
                "classification": render::vav(&vav),
                "local_solubility": sol,
            });
            Ok(out)
        }
    }
}

/// Degenerate members, their discriminant classes and the order-4 test.
pub fn classify(surface: &Surface) -> Result<Outcome, CliError> {
    let g = match surface {
        Surface::Subfamily(s) => {
            valid_subfamily(s)?;
            to_matrices(s)
        }
        Surface::General(g) => g.clone(),
    };
    Ok(Outcome::new(json!({ "matrices": render::matrices(&g), "classification": render::vav(&vav_order4_test(&g)?) })))
}

pub fn solubility(surface: &Surface, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = match surface {
        Surface::Subfamily(s) => {
            valid_subfamily(s)?;
            everywhere_locally_soluble(s, &cfg.local)?
        }
        Surface::General(g) => everywhere_locally_soluble_general(g, &cfg.local)?,
    };
    let mut out = Outcome::new(render::solubility(&r));
    if r.verdict().is_none() {
        out.worsen(Status::Inconclusive);
    }
    Ok(out)
}

fn subfamily_only<'a>(surface: &'a Surface, what: &str) -> Result<&'a SubfamilySurface, CliError> {
    match surface {
        Surface::Subfamily(s) => {
            valid_subfamily(s)?;
            Ok(s)
        }
        Surface::General(_) => Err(CliError::Input(format!("{what} needs a subfamily surface"))),
    }
}

/// Parses `u:v:x:y:z` or a JSON array of five integers.
pub fn parse_point(text: &str) -> Result<RationalPoint, CliError> {
    let t = text.trim();
    let parts: Vec<String> = if t.starts_with('[') {
        let v: Vec<crate::input::Int> =
            serde_json::from_str(t).map_err(|e| CliError::Input(format!("point {t:?}: {e}")))?;
        v.into_iter().map(|x| x.0.to_string()).collect()
    } else {
        t.trim_matches(|c| c == '(' || c == ')').split(':').map(|s| s.trim().to_string()).collect()
    };
    if parts.len() != 5 {
        return Err(CliError::Input(format!("point {t:?} must have five coordinates")));
    }
    let mut c: [BigInt; 5] = Default::default();
    for (ci, s) in c.iter_mut().zip(&parts) {
        *ci = s.parse().map_err(|_| CliError::Input(format!("coordinate {s:?} of point {t:?} is not an integer")))?;
    }
    RationalPoint::new(c).map_err(|e| CliError::Input(format!("point {t:?}: {e}")))
}

/// Local invariants at a rational point with the reciprocity sums, or the
/// per-place images over `X(Q_v)` without one.
pub fn invariants(surface: &Surface, point: Option<&RationalPoint>, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let s = subfamily_only(surface, "invariants")?;
    let Some(pt) = point else {
        let (brauer, st) = brauer_section(s, cfg);
        let mut out = Outcome::new(json!({ "surface": render::subfamily(s), "brauer": brauer }));
        if let Some(st) = st {
            out.worsen(st);
        }
        return Ok(out);
    };
    if !s.quadrics().contains(pt) {
        return Err(CliError::Input(format!("{pt} does not lie on the surface")));
    }
    let inv = rational_invariants(s, pt)?;
    let mut rows = Vec::new();
    for tag in ClassTag::ALL {
        let mut sum = InvariantValue::Zero;
        let mut places = serde_json::Map::new();
        for (_, place, v) in inv.iter().filter(|(t, _, _)| *t == tag) {
            sum = sum + *v;
            places.insert(place.to_string(), json!(v.to_string()));
        }
        rows.push(json!({ "class": tag.to_string(), "invariants": places, "sum": sum.to_string() }));
    }
    let holds = reciprocity_check(s, pt)?;
    let mut out = Outcome::new(json!({
        "surface": render::subfamily(s),
        "point": render::rational_point(pt),
        "classes": rows,
        "reciprocity": holds,
    }));
    if !holds {
        out.worsen(Status::Mismatch);
    }
    Ok(out)
}

/// Primitive points of height at most `cfg.height`, one worker per shell
/// `u = u0`; the result is sorted by height and then by coordinates, so it
/// does not depend on `--jobs`.
pub fn search_points(s: &SubfamilySurface, cfg: &RunConfig) -> Result<Vec<RationalPoint>, CliError> {
    let shells: Vec<i64> = (0..=cfg.height as i64).collect();
    let found: Result<Vec<Vec<RationalPoint>>, Error> =
        pool(cfg.jobs)?.install(|| shells.par_iter().map(|&u| point_search_shell(s, cfg.height, u)).collect());
    let mut pts: Vec<RationalPoint> = found?.into_iter().flatten().collect();
    pts.sort_by_cached_key(|p| (p.height(), p.clone()));
    Ok(pts)
}

pub fn search(surface: &Surface, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let s = subfamily_only(surface, "search")?;
    let pts = search_points(s, cfg)?;
    Ok(Outcome::new(json!({
        "surface": render::subfamily(s),
        "height_bound": cfg.height,
        "count": pts.len(),
        "points": pts.iter().map(|p| json!({ "point": render::rational_point(p), "height": render::big(&p.height()) })).collect::<Vec<_>>(),
    })))
}

struct Check {
    name: &'static str,
    result: Result<bool, Error>,
}

fn run_example(ex: &examples::Example, cfg: &RunConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    match (&ex.surface, &ex.expect) {
        (Surface::Subfamily(s), Expectation::Obstructed { by, a13_image_half, empty_below }) => {
            let r = bm_verdict(s, &cfg.brauer_budget());
            checks.push(Check {
                name: "everywhere locally soluble",
                result: r.as_ref().map(|_| true).map_err(Clone::clone),
            });
            checks.push(Check {
                name: "obstructed by exactly the expected class",
                result: r.as_ref().map(|r| r.hp_obstructed_by == [*by]).map_err(Clone::clone),
            });
            if *a13_image_half {
                checks.push(Check {
                    name: "inv_13 A takes only 1/2",
                    result: r
                        .as_ref()
                        .map(|r| {
                            r.class(ClassTag::A)
                                .image_at(Place::Prime(13))
                                .is_some_and(|i| i.image == [InvariantValue::Half])
                        })
                        .map_err(Clone::clone),
                });
            }
            if let Some(h) = empty_below {
                checks.push(Check {
                    name: "no point of small height",
                    result: point_search(s, *h).map(|v| v.is_empty()),
                });
            }
        }
        (Surface::Subfamily(s), Expectation::Unobstructed { point, height }) => {
            let r = bm_verdict(s, &cfg.brauer_budget());
            checks.push(Check {
                name: "no obstruction",
                result: r.map(|r| r.hp_obstructed_by.is_empty() && r.complete()),
            });
            checks.push(Check {
                name: "point found by search",
                result: point_search(s, *height).map(|v| v.contains(&point.sign_canonical())),
            });
        }
        (Surface::General(g), Expectation::LocallySolubleNotCertified) => {
            checks.push(Check {
                name: "everywhere locally soluble",
                result: everywhere_locally_soluble_general(g, &cfg.local).and_then(|r| match r.verdict() {
                    Some(v) => Ok(v),
                    None => Err(Error::Inconclusive("local solubility undecided".into())),
                }),
            });
            checks
                .push(Check { name: "order-4 test not certified", result: vav_order4_test(g).map(|r| !r.certified()) });
        }
        _ => unreachable!("example {} pairs a surface with the wrong expectation", ex.name),
    }
    checks
}

/// Runs every built-in example through the pipeline and checks the
/// expected conclusions.
pub fn verify_examples(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let all = examples::all();
    let results: Vec<Vec<Check>> = pool(cfg.jobs)?.install(|| all.par_iter().map(|ex| run_example(ex, cfg)).collect());
    let mut out = Outcome::new(Value::Null);
    let mut rows = Vec::new();
    let mut passed = 0;
    for (ex, checks) in all.iter().zip(results) {
        let mut st = Status::Ok;
        let mut items = Vec::new();
        for c in &checks {
            let (s, detail) = match &c.result {
                Ok(true) => (Status::Ok, Value::Null),
                Ok(false) => (Status::Mismatch, Value::Null),
                Err(e) => (Status::of_error(e), json!(e.to_string())),
            };
            st = st.max(s);
            items.push(json!({ "check": c.name, "status": status_name(s), "detail": detail }));
        }
        if st == Status::Ok {
            passed += 1;
        }
        out.worsen(st);
        rows.push(
            json!({ "example": ex.name, "description": ex.description, "status": status_name(st), "checks": items }),
        );
    }
    out.value = json!({ "passed": passed, "total": all.len(), "examples": rows });
    Ok(out)
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Ok => "pass",
        Status::Mismatch => "fail",
        Status::Inconclusive => "inconclusive",
    }
}

/// The named example surfaces as specs, for `--help`-style listings.
pub fn example_list() -> Value {
    Value::Array(
        examples::all()
            .iter()
            .map(|e| {
                let spec = match &e.surface {
                    Surface::Subfamily(s) => render::subfamily(s),
                    Surface::General(g) => json!({ "matrices": render::matrices(g) }),
                };
                json!({ "name": e.name, "description": e.description, "spec": spec })
            })
            .collect(),
    )
}
