//! Surface specifications as JSON.
//!
//! ```json
//! {"family": "subfamily", "p": 13, "A": 2, "B": -13, "C": 1, "D": -6, "M": 1, "N": 2}
//! {"family": "Y", "p": 13, "a": 2, "b": 6}
//! {"family": "S", "p": 13, "a": 153, "b": 179}
//! {"family": "S", "p": 13, "t": 1}
//! {"matrices": [[[...5 rows...]], [[...5 rows...]]]}
//! ```
//!
//! Integers may be JSON numbers or decimal strings; strings are required
//! beyond 53 bits.

use std::fmt;
use std::path::Path;

use brauer4_core::families::{make_S, make_Y, s_from_t, SParams, YParams};
use brauer4_core::quadform::{GeneralSurface, SubfamilySurface};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

/// An exact integer read from a JSON number or string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Int;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Int, E> {
                Err(E::custom(format!("{v} is not an exact integer; use a decimal string")))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
                v.trim().parse::<BigInt>().map(Int).map_err(|_| E::custom(format!("{v:?} is not a decimal integer")))
            }
        }
        d.deserialize_any(V)
    }
}

fn small(x: &Int, name: &str) -> Result<i64, InputError> {
    x.0.to_i64().ok_or_else(|| InputError::Field(format!("{name} = {} does not fit in 64 bits", x.0)))
}

fn prime(x: &Int) -> Result<u64, InputError> {
    x.0.to_u64().ok_or_else(|| InputError::Field(format!("p = {} must be a positive 64-bit integer", x.0)))
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", deny_unknown_fields)]
enum FamilySpec {
    #[serde(rename = "subfamily")]
    Subfamily {
        p: Int,
        #[serde(rename = "A")]
        a: Int,
        #[serde(rename = "B")]
        b: Int,
        #[serde(rename = "C")]
        c: Int,
        #[serde(rename = "D")]
        d: Int,
        #[serde(rename = "M")]
        m: Int,
        #[serde(rename = "N")]
        n: Int,
    },
    Y {
        p: Int,
        a: Int,
        b: Int,
    },
    S {
        p: Int,
        a: Option<Int>,
        b: Option<Int>,
        t: Option<Int>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixSpec {
    matrices: [Vec<Vec<Int>>; 2],
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawSpec {
    Family(FamilySpec),
    Matrices(MatrixSpec),
}

/// A parsed surface.
#[derive(Debug, Clone)]
pub enum Surface {
    Subfamily(SubfamilySurface),
    General(GeneralSurface),
}

#[derive(Debug)]
pub enum InputError {
    Io(String),
    Json(String),
    Field(String),
    Invalid(String),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Io(m) => write!(f, "cannot read input: {m}"),
            InputError::Json(m) => write!(f, "malformed surface spec: {m}"),
            InputError::Field(m) => write!(f, "bad field: {m}"),
            InputError::Invalid(m) => write!(f, "invalid surface: {m}"),
        }
    }
}

impl std::error::Error for InputError {}

/// Parses a spec from JSON text.
pub fn parse_surface(text: &str) -> Result<Surface, InputError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))?;
    // Try the tagged shape first for precise field diagnostics.
    let raw = if value.get("family").is_some() {
        RawSpec::Family(serde_json::from_value(value).map_err(|e| InputError::Field(e.to_string()))?)
    } else if value.get("matrices").is_some() {
        RawSpec::Matrices(serde_json::from_value(value).map_err(|e| InputError::Field(e.to_string()))?)
    } else {
        return Err(InputError::Field("expected a \"family\" or \"matrices\" key".into()));
    };
    let invalid = |e: brauer4_core::Error| InputError::Invalid(e.to_string());
    match raw {
        RawSpec::Family(FamilySpec::Subfamily { p, a, b, c, d, m, n }) => {
            let s = SubfamilySurface { p: prime(&p)?, a: a.0, b: b.0, c: c.0, d: d.0, m: m.0, n: n.0 };
            Ok(Surface::Subfamily(s))
        }
        RawSpec::Family(FamilySpec::Y { p, a, b }) => {
            let y = YParams::new(prime(&p)?, small(&a, "a")?, small(&b, "b")?).map_err(invalid)?;
            Ok(Surface::Subfamily(make_Y(y).map_err(invalid)?))
        }
        RawSpec::Family(FamilySpec::S { p, a, b, t }) => {
            let p = prime(&p)?;
            let params = match (a, b, t) {
                (Some(a), Some(b), None) => SParams::new(p, a.0, b.0).map_err(invalid)?,
                (None, None, Some(t)) => s_from_t(p, small(&t, "t")?).map_err(invalid)?,
                _ => return Err(InputError::Field("the S family takes either a and b, or t".into())),
            };
            Ok(Surface::Subfamily(make_S(&params).map_err(invalid)?))
        }
        RawSpec::Matrices(MatrixSpec { matrices }) => {
            let [m0, m1] = matrices.map(|m| m.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect());
            Ok(Surface::General(GeneralSurface::new(m0, m1).map_err(invalid)?))
        }
    }
}

/// `spec` is inline JSON when it starts with `{`, the name of a built-in
/// example when it starts with `example:`, and a file path otherwise.
pub fn load_surface(spec: &str) -> Result<Surface, InputError> {
    let t = spec.trim_start();
    if t.starts_with('{') {
        return parse_surface(t);
    }
    if let Some(name) = t.strip_prefix("example:") {
        return crate::examples::by_name(name).map(|e| e.surface.clone()).ok_or_else(|| {
            InputError::Field(format!("unknown example {name:?}; try one of {}", crate::examples::names()))
        });
    }
    let text = std::fs::read_to_string(Path::new(spec)).map_err(|e| InputError::Io(format!("{spec}: {e}")))?;
    parse_surface(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_shape() {
        let s = parse_surface(r#"{"family":"subfamily","p":13,"A":2,"B":-13,"C":1,"D":-6,"M":1,"N":2}"#).unwrap();
        let Surface::Subfamily(s) = s else { panic!() };
        assert_eq!(s, SubfamilySurface::new(13, 2, -13, 1, -6, 1, 2));
        let Surface::Subfamily(y) = parse_surface(r#"{"family":"Y","p":13,"a":2,"b":6}"#).unwrap() else { panic!() };
        assert_eq!(y, s);
        let Surface::Subfamily(t) = parse_surface(r#"{"family":"S","p":13,"t":1}"#).unwrap() else { panic!() };
        let Surface::Subfamily(ab) = parse_surface(r#"{"family":"S","p":13,"a":"153","b":179}"#).unwrap() else {
            panic!()
        };
        assert_eq!(t, ab);
    }

    #[test]
    fn diagnostics() {
        let e = parse_surface("{\"family\": \"Y\",\n \"p\": 13,").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = parse_surface(r#"{"family":"Y","p":13,"a":2}"#).unwrap_err();
        assert!(e.to_string().contains("missing field `b`"), "{e}");
        let e = parse_surface(r#"{"family":"Y","p":13,"a":5,"b":2}"#).unwrap_err();
        assert!(matches!(e, InputError::Invalid(_)));
        let e = parse_surface(r#"{"family":"Y","p":13,"a":2.5,"b":2}"#).unwrap_err();
        assert!(e.to_string().contains("exact integer"), "{e}");
        let e = parse_surface(r#"{"matrices":[[[1]],[[1]]]}"#).unwrap_err();
        assert!(matches!(e, InputError::Invalid(_)));
    }
}
