use std::collections::BTreeSet;

use serde::Serialize;

use super::{FactorKind, QualityModel};
use crate::error::Error;

/// One path from a quality aspect down to a data source: the product factor a
/// measure quantifies, the base measure the data feeds, and the instrument.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TraceEntry {
    pub product_factor: String,
    pub measure: String,
    pub instrument: String,
}

/// Follows refinement and impact edges from `aspect` down to instruments.
///
/// Product factors reached through impacts are expanded along their own
/// refinements. Derived measures are traced through their numerator and
/// normalization measures to the instruments that feed them.
pub fn trace(model: &QualityModel, aspect: &str) -> Result<BTreeSet<TraceEntry>, Error> {
    let factor = model.factor(aspect).ok_or_else(|| Error::UnknownFactor(aspect.to_string()))?;
    if factor.kind != FactorKind::QualityAspect {
        return Err(Error::NotAnAspect(aspect.to_string()));
    }

    let mut aspects = BTreeSet::new();
    let mut stack = vec![aspect];
    while let Some(a) = stack.pop() {
        if aspects.insert(a) {
            stack.extend(model.sub_factors(a));
        }
    }

    let mut product_factors = BTreeSet::new();
    let mut stack: Vec<&str> = aspects
        .iter()
        .flat_map(|a| model.impacts_on(a))
        .map(|i| i.source.as_str())
        .collect();
    while let Some(pf) = stack.pop() {
        if product_factors.insert(pf) {
            stack.extend(model.sub_factors(pf));
        }
    }

    let mut out = BTreeSet::new();
    for pf in product_factors {
        let mut measures: BTreeSet<&str> = model.measures_of(pf).collect();
        if let Some(ev) = model.evaluation(pf) {
            measures.extend(
                ev.children
                    .iter()
                    .filter(|c| c.ref_kind == super::RefKind::Measure)
                    .map(|c| c.reference.as_str()),
            );
        }
        let mut visited = BTreeSet::new();
        let mut stack: Vec<&str> = measures.into_iter().collect();
        while let Some(m) = stack.pop() {
            if !visited.insert(m) {
                continue;
            }
            for instrument in model.instruments_of(m) {
                out.insert(TraceEntry {
                    product_factor: pf.to_string(),
                    measure: m.to_string(),
                    instrument: instrument.clone(),
                });
            }
            if let Some(measure) = model.measure(m) {
                stack.extend(measure.numerator.iter().chain(&measure.normalized_by).map(String::as_str));
            }
        }
    }
    Ok(out)
}
