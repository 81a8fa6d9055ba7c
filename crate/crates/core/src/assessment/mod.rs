//! Applies a quality model to measurement data.
//!
//! Instrument values are summed into base measures and normalized into
//! derived ratios, mapped to utilities by the per-entry utility functions,
//! aggregated bottom-up by weighted sums and interpreted as school grades.
//! Missing data never fails an assessment; it widens utility intervals.

mod bundle;
mod interval;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

pub use bundle::{MeasurementBundle, Provenance};
pub use interval::UtilityInterval;

use crate::error::{Error, Result};
use crate::model::{Direction, FactorKind, MeasureType, Polarity, QualityModel, RefKind, UtilityFunction};

/// Intervals wider than this are reported as low-confidence.
pub const LOW_CONFIDENCE_WIDTH: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase")]
pub enum MeasureValue {
    Present(f64),
    Missing,
}

impl MeasureValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            MeasureValue::Present(v) => Some(*v),
            MeasureValue::Missing => None,
        }
    }
}

/// Sums instrument values into base measures; derived ratios divide their
/// numerator by their normalization measure.
pub fn evaluate_measure(model: &QualityModel, bundle: &MeasurementBundle, measure_id: &str) -> Result<MeasureValue> {
    let measure = model.measure(measure_id).ok_or_else(|| Error::UnknownMeasure(measure_id.to_string()))?;
    if measure.measure_type == MeasureType::DerivedRatio {
        let (Some(num), Some(norm)) = (&measure.numerator, &measure.normalized_by) else {
            return Ok(MeasureValue::Missing);
        };
        let numerator = evaluate_measure(model, bundle, num)?;
        let normalizer = evaluate_measure(model, bundle, norm)?;
        return Ok(match (numerator, normalizer) {
            (MeasureValue::Present(n), MeasureValue::Present(d)) if d > 0.0 => MeasureValue::Present(n / d),
            _ => MeasureValue::Missing,
        });
    }
    let instruments = model.instruments_of(measure_id);
    if instruments.is_empty() {
        return Ok(MeasureValue::Missing);
    }
    let mut sum = 0.0;
    for id in instruments {
        match bundle.get(id) {
            Some(v) => sum += v,
            None => return Ok(MeasureValue::Missing),
        }
    }
    Ok(MeasureValue::Present(sum))
}

/// Piecewise-linear utility, clamped to `[0, 1]`.
pub fn utility(x: f64, f: &UtilityFunction) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    if f.min.partial_cmp(&f.max) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidUtility { min: f.min, max: f.max });
    }
    let u = match f.direction {
        Direction::Decreasing => (f.max - x) / (f.max - f.min),
        Direction::Increasing => (x - f.min) / (f.max - f.min),
    };
    Ok(u.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grade {
    /// 1 (best) to 6 (worst).
    pub continuous: f64,
    pub discrete: u8,
}

impl Grade {
    pub fn from_utility(u: f64) -> Self {
        let continuous = 6.0 - 5.0 * u;
        let discrete = continuous.floor().clamp(1.0, 6.0) as u8;
        Grade { continuous, discrete }
    }
}

/// Grade of an interval's midpoint.
pub fn interpret(u: &UtilityInterval) -> Grade {
    Grade::from_utility(u.midpoint())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FactorContribution {
    pub factor_id: String,
    pub weight: f64,
    pub polarity: Polarity,
    /// The child's utility as it enters the weighted sum, after polarity.
    pub utility: UtilityInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MeasureContribution {
    pub measure_id: String,
    pub weight: f64,
    pub value: MeasureValue,
    pub function: Option<UtilityFunction>,
    pub utility: UtilityInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FactorNode {
    pub factor_id: String,
    pub name: String,
    pub kind: FactorKind,
    pub utility: UtilityInterval,
    pub grade: Grade,
    /// Grade at the upper utility bound.
    pub best_grade: Grade,
    /// Grade at the lower utility bound.
    pub worst_grade: Grade,
    pub children: Vec<FactorContribution>,
    pub measures: Vec<MeasureContribution>,
}

impl FactorNode {
    pub fn low_confidence(&self) -> bool {
        self.utility.width() > LOW_CONFIDENCE_WIDTH
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AssessmentResult {
    pub system_name: String,
    pub system_version: String,
    pub models: Vec<String>,
    /// Evaluated factors that are not children of another evaluation.
    pub roots: Vec<String>,
    /// One node per evaluated factor.
    pub nodes: BTreeMap<String, FactorNode>,
}

impl AssessmentResult {
    pub fn node(&self, factor: &str) -> Option<&FactorNode> {
        self.nodes.get(factor)
    }
}

/// Per-assessment evaluation state. Memoizes factor results so shared
/// sub-factors are computed once.
struct Assessor<'a> {
    model: &'a QualityModel,
    bundle: &'a MeasurementBundle,
    done: BTreeMap<String, FactorNode>,
    active: BTreeSet<String>,
}

fn order_by_weight(a_weight: f64, a_id: &str, b_weight: f64, b_id: &str) -> std::cmp::Ordering {
    b_weight.total_cmp(&a_weight).then_with(|| a_id.cmp(b_id))
}

impl<'a> Assessor<'a> {
    fn new(model: &'a QualityModel, bundle: &'a MeasurementBundle) -> Self {
        Assessor { model, bundle, done: BTreeMap::new(), active: BTreeSet::new() }
    }

    fn factor(&mut self, id: &str) -> Result<UtilityInterval> {
        if let Some(node) = self.done.get(id) {
            return Ok(node.utility);
        }
        let factor = self.model.factor(id).ok_or_else(|| Error::UnknownFactor(id.to_string()))?;
        let ev = self.model.evaluation(id).ok_or_else(|| Error::NoEvaluation(id.to_string()))?;
        if !self.active.insert(id.to_string()) {
            return Err(Error::EvaluationCycle(id.to_string()));
        }
        let weights = ev.effective_weights().ok_or_else(|| Error::InvalidWeights(id.to_string()))?;

        let mut total = UtilityInterval::ZERO;
        let mut children = Vec::new();
        let mut measures = Vec::new();
        for (child, &weight) in ev.children.iter().zip(&weights) {
            match child.ref_kind {
                RefKind::Factor => {
                    let polarity = match factor.kind {
                        FactorKind::QualityAspect => self
                            .model
                            .impact_between(&child.reference, id)
                            .map_or(Polarity::Positive, |i| i.polarity),
                        FactorKind::ProductFactor => Polarity::Positive,
                    };
                    let raw = self.factor(&child.reference)?;
                    let seen = match polarity {
                        Polarity::Positive => raw,
                        Polarity::Negative => raw.complement(),
                    };
                    total = total + seen.scale(weight);
                    children.push(FactorContribution {
                        factor_id: child.reference.clone(),
                        weight,
                        polarity,
                        utility: seen,
                    });
                }
                RefKind::Measure => {
                    let value = evaluate_measure(self.model, self.bundle, &child.reference)?;
                    let function = child.utility.and_then(|u| u.function());
                    let u = match (value, function) {
                        (MeasureValue::Present(x), Some(f)) => UtilityInterval::point(utility(x, &f)?),
                        _ => UtilityInterval::UNKNOWN,
                    };
                    total = total + u.scale(weight);
                    measures.push(MeasureContribution {
                        measure_id: child.reference.clone(),
                        weight,
                        value,
                        function,
                        utility: u,
                    });
                }
            }
        }
        let utility = if ev.children.is_empty() { UtilityInterval::UNKNOWN } else { total.clamp_unit() };
        children.sort_by(|a, b| order_by_weight(a.weight, &a.factor_id, b.weight, &b.factor_id));
        measures.sort_by(|a, b| order_by_weight(a.weight, &a.measure_id, b.weight, &b.measure_id));

        self.active.remove(id);
        self.done.insert(
            id.to_string(),
            FactorNode {
                factor_id: id.to_string(),
                name: factor.name.clone(),
                kind: factor.kind,
                utility,
                grade: interpret(&utility),
                best_grade: Grade::from_utility(utility.hi),
                worst_grade: Grade::from_utility(utility.lo),
                children,
                measures,
            },
        );
        Ok(utility)
    }
}

/// Utility interval of one evaluated factor.
pub fn assess_factor(model: &QualityModel, bundle: &MeasurementBundle, factor_id: &str) -> Result<UtilityInterval> {
    Assessor::new(model, bundle).factor(factor_id)
}

/// Assesses every evaluated factor of the model.
pub fn assess(model: &QualityModel, bundle: &MeasurementBundle) -> Result<AssessmentResult> {
    let mut assessor = Assessor::new(model, bundle);
    for id in model.evaluations().keys() {
        assessor.factor(id)?;
    }
    Ok(AssessmentResult {
        system_name: bundle.system_name.clone(),
        system_version: bundle.system_version.clone(),
        models: model.module_ids().into_iter().map(String::from).collect(),
        roots: model.root_factors().into_iter().map(String::from).collect(),
        nodes: assessor.done,
    })
}
