//! Family censuses: one row per surface, computed in parallel and emitted
//! in a fixed order.

use std::str::FromStr;

use brauer4_core::arith::is_prime_u64;
use brauer4_core::families::{admissible_t, census_row, s_from_t, CensusRow, Family, YParams};
use brauer4_core::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::commands::{pool, status_name};
use crate::config::{CliError, RunConfig, Status};
use crate::render;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Y,
    S,
}

impl FromStr for FamilyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Y" | "y" => Ok(FamilyKind::Y),
            "S" | "s" => Ok(FamilyKind::S),
            _ => Err(format!("unknown family {s:?}; expected Y or S")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusSpec {
    pub family: FamilyKind,
    pub p_min: u64,
    pub p_max: u64,
    /// Surfaces per prime for the S family.
    pub per_prime: usize,
}

/// Surfaces of the census, ordered by `p` and then by parameters.
pub fn members(spec: &CensusSpec) -> Result<Vec<Family>, Error> {
    let mut out = Vec::new();
    for p in spec.p_min.max(3)..=spec.p_max {
        if !is_prime_u64(p) {
            continue;
        }
        match spec.family {
            FamilyKind::Y if p % 4 == 1 => out.extend(YParams::all_positive(p)?.into_iter().map(Family::Y)),
            FamilyKind::Y => {}
            FamilyKind::S if p % 8 == 5 => {
                for t in admissible_t(p, spec.per_prime) {
                    out.push(Family::S(s_from_t(p, t)?));
                }
            }
            FamilyKind::S => {}
        }
    }
    Ok(out)
}

pub fn row_status(row: &CensusRow) -> Status {
    match &row.report {
        Ok(r) if !r.complete() => Status::Inconclusive,
        Ok(_) if row.agrees => Status::Ok,
        Ok(_) => Status::Mismatch,
        Err(e) => Status::of_error(e),
    }
}

pub struct Census {
    pub header: Value,
    pub rows: Vec<(CensusRow, Status)>,
}

impl Census {
    pub fn status(&self) -> Status {
        self.rows.iter().map(|(_, s)| *s).max().unwrap_or(Status::Ok)
    }

    /// One JSON object per line: the header, then the rows.
    pub fn json_lines(&self) -> String {
        let mut out = format!("{}\n", self.header);
        for (row, st) in &self.rows {
            let mut v = render::census_row(row);
            v["status"] = json!(status_name(*st));
            out.push_str(&format!("{v}\n"));
        }
        out
    }

    pub fn table(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|(row, st)| {
                let computed = match &row.report {
                    Ok(r) => r.verdict().to_string(),
                    Err(e) => format!("error: {e}"),
                };
                json!({
                    "id": row.id(),
                    "predicted": row.predicted.to_string(),
                    "computed": computed,
                    "points": row.points.len(),
                    "status": status_name(*st),
                })
            })
            .collect();
        render::table(&json!({ "census": self.header, "rows": rows }))
    }
}

pub fn run(spec: &CensusSpec, cfg: &RunConfig) -> Result<Census, CliError> {
    if spec.p_min > spec.p_max {
        return Err(CliError::Input(format!("empty prime range {}..={}", spec.p_min, spec.p_max)));
    }
    let fams = members(spec)?;
    let budget = cfg.brauer_budget();
    let rows: Result<Vec<CensusRow>, Error> =
        pool(cfg.jobs)?.install(|| fams.into_par_iter().map(|f| census_row(f, cfg.height, &budget)).collect());
    let rows: Vec<(CensusRow, Status)> = rows?
        .into_iter()
        .map(|r| {
            let st = row_status(&r);
            (r, st)
        })
        .collect();
    let header = json!({
        "census": match spec.family { FamilyKind::Y => "Y", FamilyKind::S => "S" },
        "p_min": spec.p_min,
        "p_max": spec.p_max,
        "per_prime": spec.per_prime,
        "height_bound": cfg.height,
        "samples": cfg.samples,
        "precision": cfg.precision_max,
        "seed": cfg.seed,
        "rows": rows.len(),
    });
    Ok(Census { header, rows })
}
