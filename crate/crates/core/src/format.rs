//! On-disk JSON format for model modules, one module per `<name>.qm.json`.
//!
//! Canonical output has sorted keys, two-space indentation and LF line
//! endings, so a parse/serialize pass is a fixpoint.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Entity, Evaluation, Factor, Impact, Instrument, Measure, ModuleDef};

pub const FORMAT_VERSION: &str = "1";
pub const FILE_SUFFIX: &str = ".qm.json";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleHeader {
    id: String,
    #[serde(default)]
    requires: BTreeSet<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct ModelFile {
    format_version: String,
    module: ModuleHeader,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    entities: Vec<Entity>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    factors: Vec<Factor>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    impacts: Vec<Impact>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    measures: Vec<Measure>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    instruments: Vec<Instrument>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    evaluations: Vec<Evaluation>,
}

fn classify(err: serde_json::Error) -> Error {
    let (line, column, message) = (err.line(), err.column(), err.to_string());
    // serde_json appends " at line X column Y"; position is reported separately
    let message = match message.rfind(" at line ") {
        Some(idx) => message[..idx].to_string(),
        None => message,
    };
    match err.classify() {
        serde_json::error::Category::Data => Error::Schema { line, column, message },
        _ => Error::Syntax { line, column, message },
    }
}

/// Parses one module file.
pub fn parse_module(bytes: &[u8]) -> Result<ModuleDef> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(classify)?;
    if let Some(version) = value.get("formatVersion") {
        match version.as_str() {
            Some(FORMAT_VERSION) => {}
            Some(other) => return Err(Error::FormatVersion(other.to_string())),
            None => return Err(Error::FormatVersion(version.to_string())),
        }
    }
    let file: ModelFile = serde_json::from_slice(bytes).map_err(classify)?;
    Ok(ModuleDef {
        id: file.module.id,
        requires: file.module.requires,
        entities: file.entities,
        factors: file.factors,
        impacts: file.impacts,
        measures: file.measures,
        instruments: file.instruments,
        evaluations: file.evaluations,
    })
}

/// Renders a module in canonical form.
pub fn serialize_module(module: &ModuleDef) -> String {
    let file = ModelFile {
        format_version: FORMAT_VERSION.to_string(),
        module: ModuleHeader { id: module.id.clone(), requires: module.requires.clone() },
        entities: module.entities.clone(),
        factors: module.factors.clone(),
        impacts: module.impacts.clone(),
        measures: module.measures.clone(),
        instruments: module.instruments.clone(),
        evaluations: module.evaluations.clone(),
    };
    to_canonical_json(&file)
}

/// Sorted keys, two-space indentation, trailing LF.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json::Value keeps object keys in a BTreeMap, which sorts them
    let value = serde_json::to_value(value).expect("in-memory values serialize");
    let mut text = serde_json::to_string_pretty(&value).expect("values serialize");
    text.push('\n');
    text
}
