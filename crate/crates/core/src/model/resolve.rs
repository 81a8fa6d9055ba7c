use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{module_of, Diagnostic, Entity, Evaluation, Factor, Impact, Instrument, Measure, ModuleDef, RefKind};

/// All structural problems found while resolving a set of modules.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolveError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ResolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model resolution failed with {} error(s)", self.diagnostics.len())?;
        for d in &self.diagnostics {
            write!(f, "\n  {d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ResolveError {}

/// A resolved, indexed quality model. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityModel {
    modules: Vec<ModuleDef>,
    entities: BTreeMap<String, Entity>,
    factors: BTreeMap<String, Factor>,
    measures: BTreeMap<String, Measure>,
    instruments: BTreeMap<String, Instrument>,
    impacts: Vec<Impact>,
    evaluations: BTreeMap<String, Evaluation>,
    sub_factors: BTreeMap<String, BTreeSet<String>>,
    instruments_by_measure: BTreeMap<String, Vec<String>>,
    measures_by_factor: BTreeMap<String, BTreeSet<String>>,
}

impl QualityModel {
    /// Modules in dependency order, root first.
    pub fn modules(&self) -> &[ModuleDef] {
        &self.modules
    }

    pub fn module_ids(&self) -> Vec<&str> {
        self.modules.iter().map(|m| m.id.as_str()).collect()
    }

    pub fn entities(&self) -> &BTreeMap<String, Entity> {
        &self.entities
    }

    pub fn factors(&self) -> &BTreeMap<String, Factor> {
        &self.factors
    }

    pub fn measures(&self) -> &BTreeMap<String, Measure> {
        &self.measures
    }

    pub fn instruments(&self) -> &BTreeMap<String, Instrument> {
        &self.instruments
    }

    pub fn impacts(&self) -> &[Impact] {
        &self.impacts
    }

    pub fn evaluations(&self) -> &BTreeMap<String, Evaluation> {
        &self.evaluations
    }

    pub fn factor(&self, id: &str) -> Option<&Factor> {
        self.factors.get(id)
    }

    pub fn measure(&self, id: &str) -> Option<&Measure> {
        self.measures.get(id)
    }

    pub fn evaluation(&self, factor: &str) -> Option<&Evaluation> {
        self.evaluations.get(factor)
    }

    /// Factors that directly refine `parent`.
    pub fn sub_factors(&self, parent: &str) -> impl Iterator<Item = &str> {
        self.sub_factors.get(parent).into_iter().flatten().map(String::as_str)
    }

    pub fn instruments_of(&self, measure: &str) -> &[String] {
        self.instruments_by_measure.get(measure).map_or(&[], Vec::as_slice)
    }

    /// Measures associated with a product factor.
    pub fn measures_of(&self, factor: &str) -> impl Iterator<Item = &str> {
        self.measures_by_factor.get(factor).into_iter().flatten().map(String::as_str)
    }

    pub fn impacts_on<'a>(&'a self, aspect: &'a str) -> impl Iterator<Item = &'a Impact> {
        self.impacts.iter().filter(move |i| i.target == aspect)
    }

    pub fn impact_between(&self, source: &str, target: &str) -> Option<&Impact> {
        self.impacts.iter().find(|i| i.source == source && i.target == target)
    }

    /// Evaluated factors that no other evaluation lists as a child.
    pub fn root_factors(&self) -> Vec<&str> {
        let referenced: BTreeSet<&str> = self
            .evaluations
            .values()
            .flat_map(|e| e.children.iter())
            .filter(|c| c.ref_kind == RefKind::Factor)
            .map(|c| c.reference.as_str())
            .collect();
        self.evaluations.keys().map(String::as_str).filter(|id| !referenced.contains(id)).collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ElementKind {
    Entity,
    Factor,
    Measure,
    Instrument,
}

impl ElementKind {
    fn label(self) -> &'static str {
        match self {
            ElementKind::Entity => "entity",
            ElementKind::Factor => "factor",
            ElementKind::Measure => "measure",
            ElementKind::Instrument => "instrument",
        }
    }
}

/// Resolves modules into a single model: orders them by their `requires`
/// relation, checks identifiers, and resolves every cross-reference.
pub fn resolve(modules: Vec<ModuleDef>) -> Result<QualityModel, ResolveError> {
    let mut diags = Vec::new();
    if modules.is_empty() {
        diags.push(Diagnostic::error("no-modules", "", "at least one module is required"));
        return Err(ResolveError { diagnostics: diags });
    }

    let mut by_id: BTreeMap<String, ModuleDef> = BTreeMap::new();
    for m in modules {
        if by_id.contains_key(&m.id) {
            diags.push(Diagnostic::error("duplicate-id", &m.id, "module declared more than once"));
            continue;
        }
        if m.id.is_empty() || m.id.contains('.') {
            diags.push(Diagnostic::error("invalid-id", &m.id, "module identifiers must be non-empty and contain no '.'"));
        }
        by_id.insert(m.id.clone(), m);
    }

    let roots: Vec<&str> = by_id.values().filter(|m| m.requires.is_empty()).map(|m| m.id.as_str()).collect();
    if roots.len() != 1 {
        diags.push(Diagnostic::error(
            "root-module",
            roots.join(","),
            format!("exactly one module must have no requires, found {}", roots.len()),
        ));
    }
    for m in by_id.values() {
        for r in &m.requires {
            if !by_id.contains_key(r) {
                diags.push(Diagnostic::error("unknown-module", &m.id, format!("requires unknown module '{r}'")));
            }
        }
    }

    let order = match topological_order(&by_id) {
        Ok(order) => order,
        Err(cyclic) => {
            for id in cyclic {
                diags.push(Diagnostic::error("requires-cycle", id, "module takes part in a requires cycle"));
            }
            return Err(ResolveError { diagnostics: diags });
        }
    };
    let closure = requires_closure(&by_id, &order);

    let modules: Vec<ModuleDef> = order.iter().map(|id| by_id.remove(id).expect("ordered module exists")).collect();

    let mut kinds: BTreeMap<String, ElementKind> = BTreeMap::new();
    let mut entities = BTreeMap::new();
    let mut factors = BTreeMap::new();
    let mut measures = BTreeMap::new();
    let mut instruments = BTreeMap::new();
    {
        let mut declare = |id: &str, module: &str, kind: ElementKind| -> bool {
            if module_of(id) != module || id.len() <= module.len() + 1 {
                diags.push(Diagnostic::error(
                    "foreign-id",
                    id,
                    format!("{} identifier must be qualified as '{module}.<name>'", kind.label()),
                ));
            }
            if kinds.contains_key(id) {
                diags.push(Diagnostic::error("duplicate-id", id, "identifier declared more than once"));
                return false;
            }
            kinds.insert(id.to_string(), kind);
            true
        };
        for m in &modules {
            for e in &m.entities {
                if declare(&e.id, &m.id, ElementKind::Entity) {
                    entities.insert(e.id.clone(), e.clone());
                }
            }
            for f in &m.factors {
                if declare(&f.id, &m.id, ElementKind::Factor) {
                    factors.insert(f.id.clone(), f.clone());
                }
            }
            for ms in &m.measures {
                if declare(&ms.id, &m.id, ElementKind::Measure) {
                    measures.insert(ms.id.clone(), ms.clone());
                }
            }
            for i in &m.instruments {
                if declare(&i.id, &m.id, ElementKind::Instrument) {
                    instruments.insert(i.id.clone(), i.clone());
                }
            }
        }
    }

    let mut check = |module: &str, owner: &str, target: &str, expected: ElementKind| match kinds.get(target) {
        Some(kind) if *kind == expected => {
            let target_module = module_of(target);
            if target_module != module && !closure[module].contains(target_module) {
                diags.push(Diagnostic::error(
                    "missing-requires",
                    owner,
                    format!("references '{target}' but module '{module}' does not require '{target_module}'"),
                ));
            }
        }
        _ => diags.push(Diagnostic::error(
            "dangling-reference",
            owner,
            format!("{} '{target}' does not exist", expected.label()),
        )),
    };

    let mut impacts = Vec::new();
    let mut evaluations: BTreeMap<String, Evaluation> = BTreeMap::new();
    let mut evaluation_dups = Vec::new();
    for m in &modules {
        let mid = m.id.as_str();
        for e in &m.entities {
            for r in e.is_a.iter().chain(&e.part_of) {
                check(mid, &e.id, r, ElementKind::Entity);
            }
        }
        for f in &m.factors {
            check(mid, &f.id, &f.entity, ElementKind::Entity);
            for r in &f.refines {
                check(mid, &f.id, r, ElementKind::Factor);
            }
        }
        for i in &m.impacts {
            let label = format!("{}->{}", i.source, i.target);
            check(mid, &label, &i.source, ElementKind::Factor);
            check(mid, &label, &i.target, ElementKind::Factor);
            impacts.push(i.clone());
        }
        for ms in &m.measures {
            for r in ms.numerator.iter().chain(&ms.normalized_by) {
                check(mid, &ms.id, r, ElementKind::Measure);
            }
            for r in &ms.factors {
                check(mid, &ms.id, r, ElementKind::Factor);
            }
        }
        for i in &m.instruments {
            check(mid, &i.id, &i.measure, ElementKind::Measure);
        }
        for ev in &m.evaluations {
            check(mid, &ev.factor, &ev.factor, ElementKind::Factor);
            for c in &ev.children {
                let kind = match c.ref_kind {
                    RefKind::Factor => ElementKind::Factor,
                    RefKind::Measure => ElementKind::Measure,
                };
                check(mid, &ev.factor, &c.reference, kind);
            }
            if evaluations.contains_key(&ev.factor) {
                evaluation_dups.push(ev.factor.clone());
            } else {
                evaluations.insert(ev.factor.clone(), ev.clone());
            }
        }
    }
    for f in evaluation_dups {
        diags.push(Diagnostic::error("duplicate-evaluation", f, "factor has more than one evaluation"));
    }

    if !diags.is_empty() {
        diags.sort();
        diags.dedup();
        return Err(ResolveError { diagnostics: diags });
    }

    let mut sub_factors: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for f in factors.values() {
        for parent in &f.refines {
            sub_factors.entry(parent.clone()).or_default().insert(f.id.clone());
        }
    }
    let mut instruments_by_measure: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for i in instruments.values() {
        instruments_by_measure.entry(i.measure.clone()).or_default().push(i.id.clone());
    }
    let mut measures_by_factor: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for ms in measures.values() {
        for f in &ms.factors {
            measures_by_factor.entry(f.clone()).or_default().insert(ms.id.clone());
        }
    }

    Ok(QualityModel {
        modules,
        entities,
        factors,
        measures,
        instruments,
        impacts,
        evaluations,
        sub_factors,
        instruments_by_measure,
        measures_by_factor,
    })
}

/// Kahn's algorithm over `requires`, smallest identifier first among ready
/// modules. On a cycle returns the modules that could not be ordered.
fn topological_order(modules: &BTreeMap<String, ModuleDef>) -> Result<Vec<String>, Vec<String>> {
    let mut pending: BTreeMap<&str, usize> = modules
        .values()
        .map(|m| (m.id.as_str(), m.requires.iter().filter(|r| modules.contains_key(*r)).count()))
        .collect();
    let mut ready: BTreeSet<&str> = pending.iter().filter(|(_, n)| **n == 0).map(|(id, _)| *id).collect();
    let mut order = Vec::with_capacity(modules.len());
    while let Some(id) = ready.pop_first() {
        pending.remove(id);
        order.push(id.to_string());
        for m in modules.values() {
            if m.requires.contains(id) {
                if let Some(n) = pending.get_mut(m.id.as_str()) {
                    *n -= 1;
                    if *n == 0 {
                        ready.insert(m.id.as_str());
                    }
                }
            }
        }
    }
    if pending.is_empty() {
        Ok(order)
    } else {
        Err(pending.keys().map(|s| s.to_string()).collect())
    }
}

fn requires_closure(modules: &BTreeMap<String, ModuleDef>, order: &[String]) -> BTreeMap<String, BTreeSet<String>> {
    let mut closure: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for id in order {
        let mut reach = BTreeSet::new();
        for r in &modules[id].requires {
            if let Some(inner) = closure.get(r) {
                reach.extend(inner.iter().cloned());
            }
            reach.insert(r.clone());
        }
        closure.insert(id.clone(), reach);
    }
    closure
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Factor, FactorKind};

    fn entity(id: &str) -> Entity {
        Entity { id: id.into(), name: id.into(), description: String::new(), is_a: vec![], part_of: vec![] }
    }

    fn factor(id: &str, kind: FactorKind, entity: &str, refines: &[&str]) -> Factor {
        Factor {
            id: id.into(),
            name: id.into(),
            kind,
            entity: entity.into(),
            refines: refines.iter().map(|s| s.to_string()).collect(),
            description: String::new(),
        }
    }

    fn module(id: &str, requires: &[&str]) -> ModuleDef {
        let mut m = ModuleDef::new(id);
        m.requires = requires.iter().map(|s| s.to_string()).collect();
        m
    }

    fn codes(err: ResolveError) -> Vec<&'static str> {
        err.diagnostics.iter().map(|d| d.code).collect()
    }

    #[test]
    fn single_root_module() {
        let model = resolve(vec![module("root", &[])]).unwrap();
        assert_eq!(model.module_ids(), vec!["root"]);
        assert!(model.factors().is_empty());
    }

    #[test]
    fn refinement_across_transitive_requires() {
        let mut root = module("root", &[]);
        root.entities.push(entity("root.product"));
        let mut oo = module("object-oriented", &["root"]);
        oo.factors.push(factor("object-oriented.complexity", FactorKind::ProductFactor, "root.product", &[]));
        let mut java = module("java", &["object-oriented"]);
        java.factors.push(factor(
            "java.method-complexity",
            FactorKind::ProductFactor,
            "root.product",
            &["object-oriented.complexity"],
        ));
        let model = resolve(vec![java, root, oo]).unwrap();
        assert_eq!(model.module_ids(), vec!["root", "object-oriented", "java"]);
        let subs: Vec<_> = model.sub_factors("object-oriented.complexity").collect();
        assert_eq!(subs, vec!["java.method-complexity"]);
    }

    #[test]
    fn reference_without_requires_edge() {
        let mut root = module("root", &[]);
        root.entities.push(entity("root.product"));
        root.factors.push(factor("root.quality", FactorKind::QualityAspect, "root.product", &[]));
        let mut other = module("other", &["root"]);
        other.entities.push(entity("other.thing"));
        let mut csharp = module("csharp", &["root"]);
        csharp.factors.push(factor("csharp.x", FactorKind::ProductFactor, "other.thing", &[]));
        let err = resolve(vec![root, other, csharp]).unwrap_err();
        assert_eq!(codes(err), vec!["missing-requires"]);
    }

    #[test]
    fn duplicate_and_dangling() {
        let mut root = module("root", &[]);
        root.entities.push(entity("root.product"));
        root.entities.push(entity("root.product"));
        root.factors.push(factor("root.q", FactorKind::QualityAspect, "root.nowhere", &[]));
        let err = resolve(vec![root]).unwrap_err();
        assert_eq!(codes(err), vec!["dangling-reference", "duplicate-id"]);
    }

    #[test]
    fn requires_cycle_detected() {
        let err = resolve(vec![module("root", &[]), module("a", &["b"]), module("b", &["a"])]).unwrap_err();
        assert_eq!(codes(err), vec!["requires-cycle", "requires-cycle"]);
    }

    #[test]
    fn needs_exactly_one_root() {
        let err = resolve(vec![module("a", &[]), module("b", &[])]).unwrap_err();
        assert_eq!(codes(err), vec!["root-module"]);
        assert_eq!(codes(resolve(vec![]).unwrap_err()), vec!["no-modules"]);
    }

    #[test]
    fn wrong_kind_reference_is_dangling() {
        let mut root = module("root", &[]);
        root.entities.push(entity("root.product"));
        root.factors.push(factor("root.q", FactorKind::QualityAspect, "root.product", &["root.product"]));
        let err = resolve(vec![root]).unwrap_err();
        assert_eq!(codes(err), vec!["dangling-reference"]);
    }

    #[test]
    fn unqualified_identifier_rejected() {
        let mut root = module("root", &[]);
        root.entities.push(entity("product"));
        let err = resolve(vec![root]).unwrap_err();
        assert_eq!(codes(err), vec!["foreign-id"]);
    }
}
