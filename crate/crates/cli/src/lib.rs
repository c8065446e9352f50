//! Command line, JSON surface specs and report rendering for
//! [`brauer4_core`].

pub mod census;
pub mod commands;
pub mod config;
pub mod examples;
pub mod input;
pub mod render;

use config::Format;
use serde_json::Value;

/// Pretty JSON or a text table, with a trailing newline.
pub fn emit(value: &Value, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(value).expect("JSON values serialise")),
        Format::Table => render::table(value),
    }
}
