use serde_json::{json, Map, Value};

use super::ReportMeta;
use crate::assessment::{AssessmentResult, FactorNode, Grade, MeasureValue, UtilityInterval};
use crate::format::to_canonical_json;

/// Rounds to four decimals; integral results are emitted as JSON integers.
pub fn round4(x: f64) -> Value {
    round_to(x, 1e4)
}

fn round_to(x: f64, scale: f64) -> Value {
    let r = (x * scale).round() / scale;
    if r == r.trunc() && r.abs() < 1e15 {
        json!(r as i64)
    } else {
        json!(r)
    }
}

fn interval(u: &UtilityInterval) -> Value {
    json!({ "lo": round4(u.lo), "hi": round4(u.hi) })
}

fn raw_interval(u: &UtilityInterval) -> Value {
    json!({ "lo": u.lo, "hi": u.hi })
}

fn grade(g: &Grade) -> Value {
    json!({ "continuous": round4(g.continuous), "discrete": g.discrete })
}

fn weight(w: f64) -> Value {
    round_to(w, 1e6)
}

fn node(n: &FactorNode) -> Value {
    let children: Vec<Value> = n
        .children
        .iter()
        .map(|c| {
            json!({
                "factorId": c.factor_id,
                "weight": weight(c.weight),
                "polarity": c.polarity,
                "utility": interval(&c.utility),
            })
        })
        .collect();
    let measures: Vec<Value> = n
        .measures
        .iter()
        .map(|m| {
            json!({
                "measureId": m.measure_id,
                "weight": weight(m.weight),
                "value": m.value.value(),
                "function": m.function,
                "utility": interval(&m.utility),
            })
        })
        .collect();
    json!({
        "name": n.name,
        "kind": n.kind,
        "utility": interval(&n.utility),
        "width": round4(n.utility.width()),
        "lowConfidence": n.low_confidence(),
        "grade": grade(&n.grade),
        "bestGrade": grade(&n.best_grade),
        "worstGrade": grade(&n.worst_grade),
        "children": children,
        "measures": measures,
        "raw": {
            "utility": raw_interval(&n.utility),
            "grade": n.grade.continuous,
        },
    })
}

/// The report as a JSON value: metadata, root list, one entry per evaluated
/// factor, and a flat table of measure contributions.
pub fn to_json_value(result: &AssessmentResult, meta: &ReportMeta) -> Value {
    let mut factors = Map::new();
    let mut contributions = Vec::new();
    for (id, n) in &result.nodes {
        factors.insert(id.clone(), node(n));
        for m in &n.measures {
            contributions.push(json!({
                "factorId": id,
                "measureId": m.measure_id,
                "weight": weight(m.weight),
                "status": match m.value { MeasureValue::Present(_) => "present", MeasureValue::Missing => "missing" },
                "value": m.value.value(),
                "utility": interval(&m.utility),
            }));
        }
    }
    json!({
        "metadata": {
            "system": result.system_name,
            "version": result.system_version,
            "models": result.models,
            "generatedAt": meta.generated_at,
        },
        "roots": result.roots,
        "factors": factors,
        "contributions": contributions,
    })
}

/// Canonical JSON report: sorted keys, two-space indentation, LF endings.
pub fn to_json(result: &AssessmentResult, meta: &ReportMeta) -> String {
    to_canonical_json(&to_json_value(result, meta))
}
