#![allow(dead_code)]

pub mod oracles;
pub mod random_model;

use std::fs;
use std::path::{Path, PathBuf};

use qassess_core::assessment::MeasurementBundle;
use qassess_core::format::{parse_module, FILE_SUFFIX};
use qassess_core::model::{resolve, ModuleDef, QualityModel};

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn demo_dir() -> PathBuf {
    workspace_root().join("demo")
}

pub fn fixtures_dir() -> PathBuf {
    workspace_root().join("crates/core/tests/fixtures")
}

pub fn model_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(FILE_SUFFIX))
        .collect();
    files.sort();
    files
}

pub fn load_dir(dir: &Path) -> Vec<ModuleDef> {
    model_files(dir).iter().map(|p| parse_module(&fs::read(p).unwrap()).unwrap()).collect()
}

pub fn demo_modules() -> Vec<ModuleDef> {
    load_dir(&demo_dir())
}

pub fn demo_model() -> QualityModel {
    resolve(demo_modules()).unwrap()
}

pub fn demo_bundle(name: &str) -> MeasurementBundle {
    MeasurementBundle::from_json(&fs::read(demo_dir().join("bundles").join(name)).unwrap()).unwrap()
}

// One product factor evaluated by a NaN-test density (weight 0.25) and a
// second density whose utility is 0.89 at the value used below.
pub const WORKED: &str = r#"{
  "formatVersion": "1",
  "module": { "id": "w", "requires": [] },
  "entities": [{ "id": "w.code", "name": "Source code" }],
  "factors": [{ "id": "w.f", "name": "F", "kind": "ProductFactor", "entity": "w.code" }],
  "measures": [
    { "id": "w.loc", "name": "LoC", "type": "base-size", "factors": ["w.f"] },
    { "id": "w.nan", "name": "NaN tests", "type": "base-count", "factors": ["w.f"] },
    { "id": "w.other", "name": "Other", "type": "base-count", "factors": ["w.f"] },
    { "id": "w.m4", "name": "M4", "type": "derived-ratio", "numerator": "w.nan", "normalizedBy": "w.loc", "factors": ["w.f"] },
    { "id": "w.m5", "name": "M5", "type": "derived-ratio", "numerator": "w.other", "normalizedBy": "w.loc", "factors": ["w.f"] }
  ],
  "instruments": [
    { "id": "w.i.loc", "measure": "w.loc", "kind": "tool", "toolName": "T", "ruleId": "loc" },
    { "id": "w.i.nan", "measure": "w.nan", "kind": "tool", "toolName": "T", "ruleId": "nan" },
    { "id": "w.i.other", "measure": "w.other", "kind": "tool", "toolName": "T", "ruleId": "other" }
  ],
  "evaluations": [{ "factor": "w.f", "children": [
    { "ref": "w.m4", "refKind": "measure", "weight": 0.25, "utility": { "direction": "decreasing", "min": 0, "max": 8.5e-6 } },
    { "ref": "w.m5", "refKind": "measure", "weight": 0.75, "utility": { "direction": "decreasing", "min": 0, "max": 1e-4 } }
  ] }]
}"#;

pub const LOC: f64 = 2_759_369.0;

pub fn worked_model() -> QualityModel {
    resolve(vec![parse_module(WORKED.as_bytes()).unwrap()]).unwrap()
}

pub fn worked_bundle(other: Option<f64>) -> MeasurementBundle {
    let b = MeasurementBundle::new("s", "1").with_value("w.i.loc", LOC).with_value("w.i.nan", 6.0);
    match other {
        Some(v) => b.with_value("w.i.other", v),
        None => b,
    }
}
