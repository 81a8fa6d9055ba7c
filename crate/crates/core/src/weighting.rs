//! Rank-Order-Centroid weights from importance rankings of sibling elements.

use std::collections::BTreeMap;
use std::io::Read;

use crate::error::{Error, Result};
use crate::model::ModuleDef;

/// ROC weights for `n` ranks: rank `k` gets `(1/n)·Σ_{i=k..n} 1/i`.
pub fn roc_weights(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyRanking);
    }
    let mut weights = vec![0.0; n];
    let mut tail = 0.0;
    for k in (1..=n).rev() {
        tail += 1.0 / k as f64;
        weights[k - 1] = tail / n as f64;
    }
    Ok(weights)
}

/// Elements with competition ranks (`1, 2, 2, 4`); equal ranks are ties.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub items: Vec<(String, usize)>,
}

impl Ranking {
    pub fn new(items: impl IntoIterator<Item = (impl Into<String>, usize)>) -> Self {
        Ranking { items: items.into_iter().map(|(id, r)| (id.into(), r)).collect() }
    }

    fn check(&self) -> Result<()> {
        if self.items.is_empty() {
            return Err(Error::EmptyRanking);
        }
        let mut ranks: Vec<usize> = self.items.iter().map(|(_, r)| *r).collect();
        ranks.sort_unstable();
        for (pos, &r) in ranks.iter().enumerate() {
            let expected = ranks.iter().position(|x| *x == r).unwrap() + 1;
            if r != expected {
                return Err(Error::MalformedRanking(format!(
                    "rank {r} at position {} should be {expected} under competition ranking",
                    pos + 1
                )));
            }
        }
        let mut ids: Vec<&str> = self.items.iter().map(|(id, _)| id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::MalformedRanking(format!("'{}' ranked twice", w[0])));
        }
        Ok(())
    }
}

/// Assigns ROC weights by rank; tied elements share the mean of the ROC
/// weights of the positions they span.
pub fn weights_from_ranking(ranking: &Ranking) -> Result<BTreeMap<String, f64>> {
    ranking.check()?;
    let n = ranking.items.len();
    let roc = roc_weights(n)?;
    let mut out = BTreeMap::new();
    for (id, rank) in &ranking.items {
        let tied = ranking.items.iter().filter(|(_, r)| r == rank).count();
        let span = &roc[rank - 1..rank - 1 + tied];
        out.insert(id.clone(), span.iter().sum::<f64>() / tied as f64);
    }
    Ok(out)
}

/// Reads a ranking CSV `parentId,childId,rank` grouped by parent.
pub fn read_ranking_csv<R: Read>(reader: R) -> Result<BTreeMap<String, Ranking>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["parentId", "childId", "rank"] {
        return Err(Error::Input("ranking CSV header must be 'parentId,childId,rank'".into()));
    }
    let mut out: BTreeMap<String, Ranking> = BTreeMap::new();
    for record in rdr.records() {
        let record = record?;
        let rank: usize = record[2]
            .parse()
            .map_err(|_| Error::Input(format!("rank '{}' is not a positive integer", &record[2])))?;
        out.entry(record[0].to_string())
            .or_insert_with(|| Ranking { items: Vec::new() })
            .items
            .push((record[1].to_string(), rank));
    }
    Ok(out)
}

/// What happened to one ranked evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeighOutcome {
    Applied,
    /// Every child already had an explicit weight, which wins.
    KeptExplicit,
}

/// Injects ranking-derived weights into the evaluations of `modules`.
///
/// A ranking must list exactly the children of its parent's evaluation.
/// Evaluations whose children all carry explicit weights keep them.
pub fn apply_rankings(
    modules: &mut [ModuleDef],
    rankings: &BTreeMap<String, Ranking>,
) -> Result<BTreeMap<String, WeighOutcome>> {
    let mut outcomes = BTreeMap::new();
    for (parent, ranking) in rankings {
        let ev = modules
            .iter_mut()
            .flat_map(|m| m.evaluations.iter_mut())
            .find(|e| &e.factor == parent)
            .ok_or_else(|| Error::Input(format!("ranking for '{parent}' which has no evaluation")))?;
        if ev.children.iter().all(|c| c.weight.is_some()) {
            outcomes.insert(parent.clone(), WeighOutcome::KeptExplicit);
            continue;
        }
        let weights = weights_from_ranking(ranking)?;
        let mut children: Vec<&str> = ev.children.iter().map(|c| c.reference.as_str()).collect();
        let mut ranked: Vec<&str> = weights.keys().map(String::as_str).collect();
        children.sort_unstable();
        ranked.sort_unstable();
        if children != ranked {
            return Err(Error::MalformedRanking(format!(
                "ranking for '{parent}' must list exactly its evaluation children"
            )));
        }
        for c in &mut ev.children {
            c.weight = Some(weights[&c.reference]);
        }
        outcomes.insert(parent.clone(), WeighOutcome::Applied);
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roc_small_cases() {
        assert_eq!(roc_weights(1).unwrap(), vec![1.0]);
        assert_eq!(roc_weights(2).unwrap(), vec![0.75, 0.25]);
        let w = roc_weights(3).unwrap();
        let expected = [(1.0 + 0.5 + 1.0 / 3.0) / 3.0, (0.5 + 1.0 / 3.0) / 3.0, 1.0 / 9.0];
        for (a, b) in w.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((w[0] - 0.6111).abs() < 1e-4 && (w[1] - 0.2778).abs() < 1e-4 && (w[2] - 0.1111).abs() < 1e-4);
        assert!(matches!(roc_weights(0), Err(Error::EmptyRanking)));
    }

    #[test]
    fn ranking_examples() {
        let w = weights_from_ranking(&Ranking::new([("a", 1), ("b", 2)])).unwrap();
        assert_eq!((w["a"], w["b"]), (0.75, 0.25));
        let w = weights_from_ranking(&Ranking::new([("a", 1), ("b", 1)])).unwrap();
        assert_eq!((w["a"], w["b"]), (0.5, 0.5));
        let w = weights_from_ranking(&Ranking::new([("a", 1), ("b", 2), ("c", 2)])).unwrap();
        assert!((w["a"] - 0.6111).abs() < 1e-4);
        assert!((w["b"] - 0.1944).abs() < 1e-4);
        assert_eq!(w["b"], w["c"]);
    }

    #[test]
    fn malformed_rankings() {
        for bad in [vec![("a", 2)], vec![("a", 1), ("b", 3)], vec![("a", 1), ("b", 1), ("c", 2)]] {
            assert!(matches!(weights_from_ranking(&Ranking::new(bad)), Err(Error::MalformedRanking(_))));
        }
        assert!(matches!(
            weights_from_ranking(&Ranking::new([("a", 1), ("a", 2)])),
            Err(Error::MalformedRanking(_))
        ));
        assert!(matches!(weights_from_ranking(&Ranking { items: vec![] }), Err(Error::EmptyRanking)));
    }

    #[test]
    fn ranking_csv_groups_by_parent() {
        let csv = "parentId,childId,rank\np,a,1\np,b,2\nq,c,1\n";
        let r = read_ranking_csv(csv.as_bytes()).unwrap();
        assert_eq!(r["p"], Ranking::new([("a", 1), ("b", 2)]));
        assert_eq!(r["q"].items.len(), 1);
        assert!(read_ranking_csv("parent,child,rank\n".as_bytes()).is_err());
    }
}
