//! Typed quality meta-model.
//!
//! A model is split into modules. Each module declares entities, factors,
//! impacts, measures, instruments and evaluations. Element identifiers are
//! qualified as `<module>.<local-name>`; the module part is everything before
//! the first dot.

mod diagnostic;
mod resolve;
mod trace;
mod validate;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use diagnostic::{Diagnostic, Severity};
pub use resolve::{resolve, QualityModel, ResolveError};
pub use trace::{trace, TraceEntry};
pub use validate::validate;

/// Returns the module part of a qualified identifier.
pub fn module_of(id: &str) -> &str {
    id.split_once('.').map_or(id, |(module, _)| module)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Entity {
    pub id: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub is_a: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub part_of: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FactorKind {
    QualityAspect,
    ProductFactor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Factor {
    pub id: String,
    pub name: String,
    pub kind: FactorKind,
    pub entity: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub refines: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

/// Qualitative influence of a product factor on a quality aspect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Impact {
    pub source: String,
    pub target: String,
    pub polarity: Polarity,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub justification: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureType {
    BaseCount,
    BaseSize,
    DerivedRatio,
}

/// A quantification rule. Derived ratios divide a numerator measure by a
/// size measure so that values are comparable across systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Measure {
    pub id: String,
    pub name: String,
    #[serde(rename = "type")]
    pub measure_type: MeasureType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized_by: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstrumentKind {
    Manual,
    Tool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Instrument {
    pub id: String,
    pub measure: String,
    pub kind: InstrumentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_id: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Linear utility function with two thresholds.
///
/// For a decreasing function `min` is the value at and below which utility is
/// 1 and `max` the value at and above which it is 0; increasing mirrors that.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityFunction {
    pub direction: Direction,
    pub min: f64,
    pub max: f64,
}

/// Utility annotation on an evaluation entry. Thresholds are absent until the
/// model has been calibrated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilitySpec {
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}

impl UtilitySpec {
    pub fn calibrated(direction: Direction, min: f64, max: f64) -> Self {
        UtilitySpec { direction, min: Some(min), max: Some(max) }
    }

    /// The complete function, if both thresholds are set.
    pub fn function(&self) -> Option<UtilityFunction> {
        Some(UtilityFunction { direction: self.direction, min: self.min?, max: self.max? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefKind {
    Measure,
    Factor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct EvaluationChild {
    #[serde(rename = "ref")]
    pub reference: String,
    pub ref_kind: RefKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility: Option<UtilitySpec>,
}

/// How a factor's utility is synthesised from its children.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Evaluation {
    pub factor: String,
    #[serde(default)]
    pub children: Vec<EvaluationChild>,
}

impl Evaluation {
    /// Weights used for aggregation: explicit weights when every child has
    /// one, equal weights when none has. `None` for a partial assignment.
    pub fn effective_weights(&self) -> Option<Vec<f64>> {
        let explicit: Vec<f64> = self.children.iter().filter_map(|c| c.weight).collect();
        if explicit.len() == self.children.len() {
            Some(explicit)
        } else if explicit.is_empty() {
            let n = self.children.len() as f64;
            Some(vec![1.0 / n; self.children.len()])
        } else {
            None
        }
    }
}

/// One model module and everything it declares.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModuleDef {
    pub id: String,
    pub requires: BTreeSet<String>,
    pub entities: Vec<Entity>,
    pub factors: Vec<Factor>,
    pub impacts: Vec<Impact>,
    pub measures: Vec<Measure>,
    pub instruments: Vec<Instrument>,
    pub evaluations: Vec<Evaluation>,
}

impl ModuleDef {
    pub fn new(id: impl Into<String>) -> Self {
        ModuleDef { id: id.into(), ..Default::default() }
    }
}
