// Random single-module models with matching measurement bundles, used by the
// interval property tests. Every generated model resolves and validates
// without errors.

use std::collections::BTreeSet;

use qassess_core::assessment::MeasurementBundle;
use qassess_core::model::{
    Direction, Entity, Evaluation, EvaluationChild, Factor, FactorKind, Impact, Instrument, InstrumentKind, Measure,
    MeasureType, ModuleDef, Polarity, RefKind, UtilitySpec,
};
use rand::rngs::StdRng;
use rand::RngExt;

pub struct RandomCase {
    pub modules: Vec<ModuleDef>,
    pub bundle: MeasurementBundle,
    /// Every instrument of the model, including those absent from the bundle.
    pub instruments: Vec<String>,
}

fn weights(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|w| w / sum).collect()
}

fn utility(rng: &mut StdRng) -> UtilitySpec {
    let direction = if rng.random_bool(0.5) { Direction::Increasing } else { Direction::Decreasing };
    let min = rng.random_range(0.0..5.0);
    let max = min + rng.random_range(0.1..5.0);
    UtilitySpec::calibrated(direction, min, max)
}

fn child(reference: &str, kind: RefKind, weight: f64, utility: Option<UtilitySpec>) -> EvaluationChild {
    EvaluationChild { reference: reference.to_string(), ref_kind: kind, weight: Some(weight), utility }
}

/// Builds a model with 1-4 product factors, 0-3 sub-aspects below one root
/// aspect, up to 6 base measures (at least one per product factor) and 0-2
/// derived ratios. With `complete` every instrument has a value; otherwise
/// each is dropped with probability 0.4.
pub fn random_case(rng: &mut StdRng, complete: bool) -> RandomCase {
    let mut m = ModuleDef::new("m");
    m.entities.push(Entity {
        id: "m.e".into(),
        name: "E".into(),
        description: String::new(),
        is_a: vec![],
        part_of: vec![],
    });
    let factor = |id: String, kind, refines: Vec<String>| Factor {
        id: id.clone(),
        name: id,
        kind,
        entity: "m.e".into(),
        refines,
        description: String::new(),
    };

    let n_pf = rng.random_range(1..=4);
    let n_sub = rng.random_range(0..=3);
    let n_base = rng.random_range(n_pf..=6);
    let n_derived = if n_base >= 2 { rng.random_range(0..=2) } else { 0 };

    let aspects: Vec<String> = std::iter::once("m.q0".to_string())
        .chain((1..=n_sub).map(|i| format!("m.q{i}")))
        .collect();
    let pfs: Vec<String> = (0..n_pf).map(|i| format!("m.p{i}")).collect();
    m.factors.push(factor(aspects[0].clone(), FactorKind::QualityAspect, vec![]));
    for a in &aspects[1..] {
        m.factors.push(factor(a.clone(), FactorKind::QualityAspect, vec![aspects[0].clone()]));
    }
    for p in &pfs {
        m.factors.push(factor(p.clone(), FactorKind::ProductFactor, vec![]));
    }

    // measures, each owned by one product factor
    let mut owned: Vec<Vec<String>> = vec![Vec::new(); n_pf];
    let mut instruments = Vec::new();
    for j in 0..n_base + n_derived {
        let owner = if j < n_pf { j } else { rng.random_range(0..n_pf) };
        // m.b0 doubles as the size measure that derived ratios divide by
        let (id, measure_type, numerator, normalized_by) = if j == 0 {
            ("m.b0".to_string(), MeasureType::BaseSize, None, None)
        } else if j < n_base {
            (format!("m.b{j}"), MeasureType::BaseCount, None, None)
        } else {
            let num = rng.random_range(1..n_base);
            (format!("m.d{j}"), MeasureType::DerivedRatio, Some(format!("m.b{num}")), Some("m.b0".to_string()))
        };
        if j < n_base {
            let inst = format!("m.i{j}");
            m.instruments.push(Instrument {
                id: inst.clone(),
                measure: id.clone(),
                kind: InstrumentKind::Tool,
                tool_name: Some("T".into()),
                rule_id: Some(format!("R{j}")),
            });
            instruments.push(inst);
        }
        m.measures.push(Measure {
            id: id.clone(),
            name: id.clone(),
            measure_type,
            numerator,
            normalized_by,
            factors: vec![pfs[owner].clone()],
            description: String::new(),
        });
        owned[owner].push(id);
    }
    for (p, measures) in pfs.iter().zip(&owned) {
        let w = weights(rng, measures.len());
        let children = measures.iter().zip(w).map(|(id, w)| child(id, RefKind::Measure, w, Some(utility(rng)))).collect();
        m.evaluations.push(Evaluation { factor: p.clone(), children });
    }

    // impacts: every product factor influences at least one aspect and
    // every sub-aspect receives at least one impact
    let mut impacts: BTreeSet<(usize, usize)> = BTreeSet::new();
    for p in 0..n_pf {
        impacts.insert((p, rng.random_range(0..aspects.len())));
    }
    for a in 1..aspects.len() {
        if !impacts.iter().any(|(_, t)| *t == a) {
            impacts.insert((rng.random_range(0..n_pf), a));
        }
    }
    for &(p, a) in &impacts {
        let polarity = if rng.random_bool(0.3) { Polarity::Negative } else { Polarity::Positive };
        m.impacts.push(Impact {
            source: pfs[p].clone(),
            target: aspects[a].clone(),
            polarity,
            justification: String::new(),
        });
    }
    for (a, aspect) in aspects.iter().enumerate() {
        let mut refs: Vec<String> = impacts.iter().filter(|(_, t)| *t == a).map(|(p, _)| pfs[*p].clone()).collect();
        if a == 0 {
            refs.extend(aspects[1..].iter().cloned());
        }
        let w = weights(rng, refs.len());
        let children = refs.iter().zip(w).map(|(r, w)| child(r, RefKind::Factor, w, None)).collect();
        m.evaluations.push(Evaluation { factor: aspect.clone(), children });
    }

    let mut bundle = MeasurementBundle::new("random", "1");
    for inst in &instruments {
        if complete || rng.random_bool(0.6) {
            bundle = bundle.with_value(inst.clone(), rng.random_range(0.5..10.0));
        }
    }
    RandomCase { modules: vec![m], bundle, instruments }
}

/// Fills every instrument missing from `bundle` with a random value. Extreme
/// values are favoured so that utilities reach 0 and 1.
pub fn complete(rng: &mut StdRng, case: &RandomCase) -> MeasurementBundle {
    let mut b = case.bundle.clone();
    for inst in &case.instruments {
        if b.get(inst).is_none() {
            let v = match rng.random_range(0..4) {
                0 => 0.0,
                1 => 1e6,
                _ => rng.random_range(0.0..12.0),
            };
            b = b.with_value(inst.clone(), v);
        }
    }
    b
}
