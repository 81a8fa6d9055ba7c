use std::collections::{BTreeMap, BTreeSet};

use super::{
    Diagnostic, Direction, FactorKind, InstrumentKind, MeasureType, QualityModel, RefKind, UtilitySpec,
};
use crate::calibration::{JUMP_MAX, JUMP_MIN};

/// Tolerance on the sum of evaluation weights.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-6;

/// Checks a resolved model against the structural and numeric rules of the
/// meta-model. Errors make the model unusable for assessment; warnings flag
/// modelling smells. The result is sorted.
pub fn validate(model: &QualityModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_entities(model, &mut out);
    check_factors(model, &mut out);
    check_impacts(model, &mut out);
    check_measures(model, &mut out);
    check_instruments(model, &mut out);
    check_evaluations(model, &mut out);
    check_unreferenced(model, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Nodes that can reach themselves through `edges`.
fn nodes_on_cycles<'a>(nodes: impl Iterator<Item = &'a str>, edges: &BTreeMap<&'a str, Vec<&'a str>>) -> Vec<&'a str> {
    nodes
        .filter(|start| {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<&str> = edges.get(start).cloned().unwrap_or_default();
            while let Some(n) = stack.pop() {
                if n == *start {
                    return true;
                }
                if seen.insert(n) {
                    if let Some(next) = edges.get(n) {
                        stack.extend(next.iter().copied());
                    }
                }
            }
            false
        })
        .collect()
}

fn check_entities(model: &QualityModel, out: &mut Vec<Diagnostic>) {
    let is_a: BTreeMap<&str, Vec<&str>> = model
        .entities()
        .values()
        .map(|e| (e.id.as_str(), e.is_a.iter().map(String::as_str).collect()))
        .collect();
    let part_of: BTreeMap<&str, Vec<&str>> = model
        .entities()
        .values()
        .map(|e| (e.id.as_str(), e.part_of.iter().map(String::as_str).collect()))
        .collect();
    for id in nodes_on_cycles(model.entities().keys().map(String::as_str), &is_a) {
        out.push(Diagnostic::error("entity-cycle", id, "is-a hierarchy contains a cycle"));
    }
    for id in nodes_on_cycles(model.entities().keys().map(String::as_str), &part_of) {
        out.push(Diagnostic::error("entity-cycle", id, "part-of hierarchy contains a cycle"));
    }
}

fn check_factors(model: &QualityModel, out: &mut Vec<Diagnostic>) {
    let factors = model.factors();
    let mut edges: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for f in factors.values() {
        for parent in &f.refines {
            let parent_kind = factors[parent].kind;
            if parent_kind != f.kind {
                out.push(Diagnostic::error(
                    "kind-mismatch",
                    &f.id,
                    format!("{:?} cannot refine {:?} '{parent}'", f.kind, parent_kind),
                ));
            }
        }
        edges.insert(&f.id, f.refines.iter().map(String::as_str).collect());
    }
    for id in nodes_on_cycles(factors.keys().map(String::as_str), &edges) {
        out.push(Diagnostic::error("refinement-cycle", id, "refinement hierarchy contains a cycle"));
    }
}

fn check_impacts(model: &QualityModel, out: &mut Vec<Diagnostic>) {
    let mut seen = BTreeSet::new();
    for i in model.impacts() {
        let label = format!("{}->{}", i.source, i.target);
        let source = model.factors()[&i.source].kind;
        let target = model.factors()[&i.target].kind;
        if source != FactorKind::ProductFactor || target != FactorKind::QualityAspect {
            out.push(Diagnostic::error(
                "impact-direction",
                &label,
                "impacts must lead from a product factor to a quality aspect",
            ));
        }
        if !seen.insert((i.source.as_str(), i.target.as_str())) {
            out.push(Diagnostic::error("duplicate-impact", &label, "impact declared more than once"));
        }
    }
}

fn check_measures(model: &QualityModel, out: &mut Vec<Diagnostic>) {
    for m in model.measures().values() {
        match m.measure_type {
            MeasureType::DerivedRatio => {
                match &m.numerator {
                    None => out.push(Diagnostic::error("measure-normalization", &m.id, "derived ratio needs a numerator")),
                    Some(n) if model.measures()[n].measure_type == MeasureType::DerivedRatio => out.push(
                        Diagnostic::error("measure-normalization", &m.id, "numerator must be a base measure"),
                    ),
                    Some(_) => {}
                }
                match &m.normalized_by {
                    None => out.push(Diagnostic::error(
                        "measure-normalization",
                        &m.id,
                        "derived ratio needs a normalization measure",
                    )),
                    Some(n) if model.measures()[n].measure_type != MeasureType::BaseSize => out.push(
                        Diagnostic::error("measure-normalization", &m.id, "normalization measure must be a base size"),
                    ),
                    Some(_) => {}
                }
            }
            _ => {
                if m.numerator.is_some() || m.normalized_by.is_some() {
                    out.push(Diagnostic::error(
                        "measure-normalization",
                        &m.id,
                        "only derived ratios carry a numerator or normalization measure",
                    ));
                }
            }
        }
        for f in &m.factors {
            if model.factors()[f].kind != FactorKind::ProductFactor {
                out.push(Diagnostic::error(
                    "kind-mismatch",
                    &m.id,
                    format!("measures quantify product factors, '{f}' is a quality aspect"),
                ));
            }
        }
    }
}

fn check_instruments(model: &QualityModel, out: &mut Vec<Diagnostic>) {
    for i in model.instruments().values() {
        let has_tool = i.tool_name.is_some() && i.rule_id.is_some();
        let has_any = i.tool_name.is_some() || i.rule_id.is_some();
        let ok = match i.kind {
            InstrumentKind::Tool => has_tool,
            InstrumentKind::Manual => !has_any,
        };
        if !ok {
            out.push(Diagnostic::error(
                "instrument-kind",
                &i.id,
                "tool instruments need toolName and ruleId; manual instruments have neither",
            ));
        }
    }
}

fn check_utility(factor: &str, measure: &str, spec: Option<&UtilitySpec>, out: &mut Vec<Diagnostic>) {
    let element = format!("{factor}/{measure}");
    let Some(spec) = spec else {
        out.push(Diagnostic::warning("uncalibrated", element, "measure entry has no utility function"));
        return;
    };
    let Some(f) = spec.function() else {
        out.push(Diagnostic::warning("uncalibrated", element, "utility thresholds not set"));
        return;
    };
    if !f.min.is_finite() || !f.max.is_finite() || f.min >= f.max {
        out.push(Diagnostic::error(
            "degenerate-utility",
            element,
            format!("utility thresholds need min < max, got min={} max={}", f.min, f.max),
        ));
    } else if f.direction == Direction::Increasing && f.min == JUMP_MIN && f.max == JUMP_MAX {
        out.push(Diagnostic::error(
            "jump-increasing",
            element,
            "jump-function thresholds are only allowed on decreasing utilities",
        ));
    }
}

fn check_evaluations(model: &QualityModel, out: &mut Vec<Diagnostic>) {
    for ev in model.evaluations().values() {
        let factor = &model.factors()[&ev.factor];
        if ev.children.is_empty() {
            out.push(Diagnostic::warning("empty-evaluation", &ev.factor, "evaluation has no measures and no sub-factors"));
            continue;
        }

        let mut seen = BTreeSet::new();
        for c in &ev.children {
            if !seen.insert((c.ref_kind, c.reference.as_str())) {
                out.push(Diagnostic::error("evaluation-child", &ev.factor, format!("'{}' listed twice", c.reference)));
            }
            if let Some(w) = c.weight {
                if !(w > 0.0 && w <= 1.0) {
                    out.push(Diagnostic::error(
                        "weight-range",
                        &ev.factor,
                        format!("weight {w} of '{}' is outside (0,1]", c.reference),
                    ));
                }
            }
            match (factor.kind, c.ref_kind) {
                (FactorKind::ProductFactor, RefKind::Measure) => {
                    if !model.measures()[&c.reference].factors.contains(&ev.factor) {
                        out.push(Diagnostic::error(
                            "evaluation-child",
                            &ev.factor,
                            format!("measure '{}' is not associated with this factor", c.reference),
                        ));
                    }
                    check_utility(&ev.factor, &c.reference, c.utility.as_ref(), out);
                }
                (FactorKind::QualityAspect, RefKind::Measure) => out.push(Diagnostic::error(
                    "evaluation-child",
                    &ev.factor,
                    format!("quality aspects cannot evaluate measure '{}' directly", c.reference),
                )),
                (kind, RefKind::Factor) => {
                    let child = &model.factors()[&c.reference];
                    let refines = child.refines.contains(&ev.factor) && child.kind == kind;
                    let impacts = kind == FactorKind::QualityAspect
                        && child.kind == FactorKind::ProductFactor
                        && model.impact_between(&child.id, &ev.factor).is_some();
                    if !refines && !impacts {
                        out.push(Diagnostic::error(
                            "evaluation-child",
                            &ev.factor,
                            format!("'{}' neither refines nor impacts this factor", c.reference),
                        ));
                    }
                    if model.evaluation(&c.reference).is_none() {
                        out.push(Diagnostic::error(
                            "missing-evaluation",
                            &c.reference,
                            format!("aggregated by '{}' but has no evaluation", ev.factor),
                        ));
                    }
                    if c.utility.is_some() {
                        out.push(Diagnostic::error(
                            "evaluation-child",
                            &ev.factor,
                            format!("utility functions belong on measure entries, not on '{}'", c.reference),
                        ));
                    }
                }
            }
        }

        match ev.effective_weights() {
            None => out.push(Diagnostic::error(
                "partial-weights",
                &ev.factor,
                "either every child or no child must carry a weight",
            )),
            Some(weights) => {
                let sum: f64 = weights.iter().sum();
                if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                    out.push(Diagnostic::error(
                        "weight-sum",
                        &ev.factor,
                        format!("child weights sum to {sum}, expected 1"),
                    ));
                }
            }
        }
    }
}

fn check_unreferenced(model: &QualityModel, out: &mut Vec<Diagnostic>) {
    let mut touched: BTreeSet<&str> = BTreeSet::new();
    for e in model.entities().values() {
        if !e.is_a.is_empty() || !e.part_of.is_empty() {
            touched.insert(&e.id);
        }
        touched.extend(e.is_a.iter().chain(&e.part_of).map(String::as_str));
    }
    for f in model.factors().values() {
        touched.insert(&f.entity);
        if !f.refines.is_empty() {
            touched.insert(&f.id);
        }
        touched.extend(f.refines.iter().map(String::as_str));
    }
    for i in model.impacts() {
        touched.insert(&i.source);
        touched.insert(&i.target);
    }
    for m in model.measures().values() {
        if !m.factors.is_empty() || m.numerator.is_some() || m.normalized_by.is_some() {
            touched.insert(&m.id);
        }
        touched.extend(m.factors.iter().chain(&m.numerator).chain(&m.normalized_by).map(String::as_str));
    }
    for ev in model.evaluations().values() {
        touched.insert(&ev.factor);
        touched.extend(ev.children.iter().map(|c| c.reference.as_str()));
    }

    let candidates = model
        .entities()
        .keys()
        .map(|id| ("entity", id))
        .chain(model.factors().keys().map(|id| ("factor", id)))
        .chain(model.measures().keys().map(|id| ("measure", id)));
    for (label, id) in candidates {
        if !touched.contains(id.as_str()) {
            out.push(Diagnostic::warning("unreferenced", id, format!("{label} is not connected to the rest of the model")));
        }
    }
}
