//! JSON encodings of core results and a plain-text table renderer.
//!
//! JSON objects use `serde_json`'s default sorted maps, so identical inputs
//! give byte-identical output.

use brauer4_core::brauer::{ClassReport, Evidence, ObstructionReport, PlaceImage, SurjectivityWitness};
use brauer4_core::families::{CensusRow, Family};
use brauer4_core::localsolve::{
    InsolubilityProof, LocalSolubilityReport, PadicApproxPoint, PlaceEntry, PlaceMethod, SolubilityVerdict,
    SolubilityWitness,
};
use brauer4_core::quadform::{GeneralSurface, RationalPoint, SubfamilyReport, SubfamilySurface, VavReport};
use brauer4_core::Error;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

/// A number when it fits in 64 bits, a decimal string otherwise.
pub fn big(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn error(e: &Error) -> Value {
    json!({ "error": e.to_string() })
}

pub fn subfamily(s: &SubfamilySurface) -> Value {
    json!({
        "p": s.p, "A": big(&s.a), "B": big(&s.b), "C": big(&s.c), "D": big(&s.d), "M": big(&s.m), "N": big(&s.n),
    })
}

pub fn matrices(g: &GeneralSurface) -> Value {
    let m = |m: &Vec<Vec<BigInt>>| Value::Array(m.iter().map(|r| Value::Array(r.iter().map(big).collect())).collect());
    json!([m(&g.mat), m(&g.mat_t)])
}

pub fn validity(r: &SubfamilyReport) -> Value {
    json!({
        "valid": r.valid(),
        "p_odd_prime": r.p_odd_prime,
        "c1_value": big(&r.c1_value),
        "c1": r.c1,
        "c2": r.c2,
        "failures": r.failures(),
    })
}

pub fn rational_point(pt: &RationalPoint) -> Value {
    Value::Array(pt.coords().iter().map(big).collect())
}

pub fn padic_point(pt: &PadicApproxPoint) -> Value {
    json!({ "q": pt.q, "k": pt.k, "coords": pt.coords })
}

fn verdict(v: &SolubilityVerdict) -> (Value, Value, Value) {
    match v {
        SolubilityVerdict::Soluble(SolubilityWitness::Padic { point, certificate }) => (
            json!(true),
            json!("hensel"),
            json!({ "point": padic_point(point), "minor": [certificate.minor.0, certificate.minor.1], "e": certificate.e }),
        ),
        SolubilityVerdict::Soluble(SolubilityWitness::RealSqrtP) => (json!(true), json!("sqrt_p_point"), Value::Null),
        SolubilityVerdict::Soluble(SolubilityWitness::RealIndefinitePencil) => {
            (json!(true), json!("indefinite_pencil"), Value::Null)
        }
        SolubilityVerdict::Insoluble(InsolubilityProof::EmptyLevel(k)) => {
            (json!(false), json!("empty_level"), json!({ "level": k }))
        }
        SolubilityVerdict::Insoluble(InsolubilityProof::NonSquareValues(k)) => {
            (json!(false), json!("non_square_values"), json!({ "depth": k }))
        }
        SolubilityVerdict::Insoluble(InsolubilityProof::DefiniteMember(m)) => {
            (json!(false), json!("definite_member"), json!({ "member": m }))
        }
        SolubilityVerdict::Inconclusive(m) => (Value::Null, json!("inconclusive"), json!({ "reason": m })),
    }
}

fn place_entry(e: &PlaceEntry) -> Value {
    let (soluble, method, detail) = match &e.method {
        PlaceMethod::SqrtWitness(pt) => (json!(true), json!("sqrt_p_point"), json!({ "point": padic_point(pt) })),
        PlaceMethod::Decided(v) => verdict(v),
    };
    json!({ "place": e.place.to_string(), "soluble": soluble, "method": method, "detail": detail })
}

pub fn solubility(r: &LocalSolubilityReport) -> Value {
    json!({
        "everywhere_locally_soluble": r.verdict(),
        "places": r.entries.iter().map(place_entry).collect::<Vec<_>>(),
    })
}

fn evidence(e: &Evidence) -> Value {
    match e {
        Evidence::Theorem(why) => json!({ "kind": "theorem", "reason": why }),
        Evidence::Sampled(n) => json!({ "kind": "sampled", "points": n }),
        Evidence::WitnessPair => json!({ "kind": "witness_pair" }),
        Evidence::Unknown(why) => json!({ "kind": "unknown", "reason": why }),
    }
}

fn place_image(p: &PlaceImage) -> Value {
    json!({
        "place": p.place.to_string(),
        "image": p.image.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "evidence": evidence(&p.evidence),
    })
}

fn class_report(c: &ClassReport) -> Value {
    json!({
        "class": c.tag.to_string(),
        "obstructs": c.obstructs,
        "places": c.places.iter().map(place_image).collect::<Vec<_>>(),
    })
}

pub fn witness(w: &SurjectivityWitness) -> Value {
    json!({
        "class": w.class.to_string(),
        "points": w.points.iter().map(padic_point).collect::<Vec<_>>(),
        "values": w.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "trace": w.trace.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
    })
}

pub fn family(f: &Family) -> Value {
    json!({ "name": f.to_string(), "prediction": f.prediction().to_string() })
}

pub fn obstruction(r: &ObstructionReport) -> Value {
    json!({
        "verdict": r.verdict().to_string(),
        "hp_obstructed_by": r.hp_obstructed_by.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "wa_failure": r.wa_failure,
        "complete": r.complete(),
        "family": r.family.as_ref().map(family),
        "classes": r.classes.iter().map(class_report).collect::<Vec<_>>(),
        "witness": witness(&r.witness),
    })
}

pub fn vav(r: &VavReport) -> Value {
    json!({
        "quintic": r.quintic.to_string(),
        "quintic_coefficients": r.quintic.coeffs.iter().map(big).collect::<Vec<_>>(),
        "degenerate_members": r.members.iter().map(|(m, eps)| json!({
            "t": m.t.to_string(),
            "rank": m.rank,
            "eps": eps.as_ref().map(|e| big(e.rep())),
        })).collect::<Vec<_>>(),
        "certified": r.certified(),
        "certificate": r.certificate.as_ref().map(|c| json!({
            "eps": big(c.eps.rep()),
            "members": c.members.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        })),
    })
}

pub fn census_row(row: &CensusRow) -> Value {
    let computed = match &row.report {
        Ok(r) => json!(r.verdict().to_string()),
        Err(e) => error(e),
    };
    let (wa, obstructing) = match &row.report {
        Ok(r) => (json!(r.wa_failure), json!(r.hp_obstructed_by.iter().map(|t| t.to_string()).collect::<Vec<_>>())),
        Err(_) => (Value::Null, Value::Null),
    };
    json!({
        "id": row.id(),
        "predicted": row.predicted.to_string(),
        "computed": computed,
        "agrees": row.agrees,
        "hp_obstructed_by": obstructing,
        "wa_failure": wa,
        "height_bound": row.height_bound,
        "points_found": row.points.len(),
        "first_point": row.points.first().map(rational_point),
    })
}

/// Renders a JSON value as aligned text: scalars as `key  value` lines,
/// arrays of flat objects as column tables, nested objects indented.
pub fn table(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(a.iter().map(|x| scalar(x).unwrap()).collect::<Vec<_>>().join(", "))
        }
        Value::Array(a)
            if a.iter().all(|x| x.as_array().is_some_and(|r| r.iter().all(|y| !y.is_object() && !y.is_array()))) =>
        {
            Some(a.iter().map(|x| format!("({})", scalar(x).unwrap())).collect::<Vec<_>>().join(" "))
        }
        _ => None,
    }
}

fn flat(m: &Map<String, Value>) -> bool {
    m.values().all(|v| scalar(v).is_some())
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => {
            let width = m.iter().filter(|(_, x)| scalar(x).is_some()).map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, x) in m {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k:width$}  {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_value(out, x, indent + 2);
                    }
                }
            }
        }
        Value::Array(a) if !a.is_empty() && a.iter().all(|x| x.as_object().is_some_and(flat)) => {
            let mut cols: Vec<&String> = Vec::new();
            for x in a {
                for k in x.as_object().unwrap().keys() {
                    if !cols.contains(&k) {
                        cols.push(k);
                    }
                }
            }
            let rows: Vec<Vec<String>> = a
                .iter()
                .map(|x| {
                    cols.iter().map(|k| x.get(k.as_str()).and_then(scalar).unwrap_or_else(|| "-".into())).collect()
                })
                .collect();
            let widths: Vec<usize> = cols
                .iter()
                .enumerate()
                .map(|(i, c)| rows.iter().map(|r| r[i].len()).max().unwrap_or(0).max(c.len()))
                .collect();
            let line = |cells: Vec<&str>| {
                let s: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:w$}")).collect();
                format!("{pad}{}\n", s.join("  ").trim_end())
            };
            out.push_str(&line(cols.iter().map(|c| c.as_str()).collect()));
            for r in &rows {
                out.push_str(&line(r.iter().map(|c| c.as_str()).collect()));
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}[{i}] {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        write_value(out, x, indent + 2);
                    }
                }
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar(x).unwrap())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_numbers_become_strings() {
        assert_eq!(big(&BigInt::from(-7)), json!(-7));
        let huge: BigInt = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(big(&huge), json!("123456789012345678901234567890"));
    }

    #[test]
    fn table_layout() {
        let v = json!({
            "name": "x",
            "rows": [{"a": 1, "bb": "long value"}, {"a": 22, "bb": null}],
            "nested": {"k": [1, 2]},
        });
        let t = table(&v);
        assert_eq!(t, "name  x\nnested:\n  k  1, 2\nrows:\n  a   bb\n  1   long value\n  22  -\n");
    }
}
