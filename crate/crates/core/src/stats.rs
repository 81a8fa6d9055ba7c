//! Rank statistics for checking assessments against independent rankings.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Largest sample for which the permutation distribution is enumerated.
pub const EXACT_PERMUTATION_MAX_N: usize = 8;
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankOrder {
    /// Smallest score is best (rank 1), as with school grades.
    Ascending,
    /// Largest score is best.
    Descending,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    pub labels: Vec<String>,
    pub ranks: Vec<f64>,
}

impl RankVector {
    pub fn new(labels: Vec<String>, ranks: Vec<f64>) -> Self {
        RankVector { labels, ranks }
    }

    /// Ranks labelled `0..n` in input order.
    pub fn unlabelled(ranks: &[f64]) -> Self {
        RankVector { labels: (0..ranks.len()).map(|i| i.to_string()).collect(), ranks: ranks.to_vec() }
    }
}

/// Average ranks: the best score gets rank 1, tied scores share the mean of
/// the positions they span.
pub fn average_ranks(scores: &[f64], order: RankOrder) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::NonFinite(*bad));
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| match order {
        RankOrder::Ascending => scores[a].total_cmp(&scores[b]),
        RankOrder::Descending => scores[b].total_cmp(&scores[a]),
    });
    let mut ranks = vec![0.0; scores.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && scores[idx[end]] == scores[idx[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let mean = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = mean;
        }
        start = end;
    }
    Ok(ranks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueMethod {
    ExactPermutation,
    TApproximation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorrelationResult {
    pub r: f64,
    /// One-sided p-value for a positive association.
    pub p_one_sided: f64,
    pub n: usize,
    pub method: PValueMethod,
}

fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((cov / (va * vb).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation as the Pearson correlation of the rank
/// vectors, with a one-sided p-value for `r > 0`.
///
/// For `n <= 8` the p-value is the share of all `n!` rearrangements of `b`
/// whose correlation with `a` is at least the observed one; larger samples
/// use the t-approximation with `n - 2` degrees of freedom.
pub fn spearman(a: &RankVector, b: &RankVector) -> Result<CorrelationResult> {
    if a.ranks.len() != b.ranks.len() || a.labels.len() != a.ranks.len() || b.labels.len() != b.ranks.len() {
        return Err(Error::LengthMismatch(a.ranks.len(), b.ranks.len()));
    }
    // align b to a's label order
    let mut aligned = Vec::with_capacity(b.ranks.len());
    for label in &a.labels {
        let pos = b.labels.iter().position(|l| l == label).ok_or(Error::LabelMismatch)?;
        aligned.push(b.ranks[pos]);
    }
    let n = a.ranks.len();
    let r = pearson(&a.ranks, &aligned)?;
    if n <= EXACT_PERMUTATION_MAX_N {
        let p = exact_permutation_p(&a.ranks, &aligned, r);
        Ok(CorrelationResult { r, p_one_sided: p, n, method: PValueMethod::ExactPermutation })
    } else {
        Ok(CorrelationResult { r, p_one_sided: t_approximation_p(r, n), n, method: PValueMethod::TApproximation })
    }
}

fn exact_permutation_p(a: &[f64], b: &[f64], observed: f64) -> f64 {
    let mut perm = b.to_vec();
    let n = perm.len();
    let mut total = 0u64;
    let mut extreme = 0u64;
    let mut count = |p: &[f64]| {
        total += 1;
        // zero variance cannot occur: permutations keep b's multiset
        if pearson(a, p).is_ok_and(|r| r >= observed - TIE_EPS) {
            extreme += 1;
        }
    };
    // Heap's algorithm, iterative form
    let mut c = vec![0usize; n];
    count(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            count(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    extreme as f64 / total as f64
}

fn t_approximation_p(r: f64, n: usize) -> f64 {
    if n < 3 {
        return 1.0;
    }
    if r >= 1.0 {
        return 0.0;
    }
    if r <= -1.0 {
        return 1.0;
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    1.0 - dist.cdf(t)
}

/// Relative grade improvement in percent; positive when the grade shrinks.
pub fn improvement_percent(old_grade: f64, new_grade: f64) -> Result<f64> {
    for g in [old_grade, new_grade] {
        if !g.is_finite() {
            return Err(Error::NonFinite(g));
        }
    }
    if old_grade <= 0.0 {
        return Err(Error::Input(format!("baseline grade must be positive, got {old_grade}")));
    }
    Ok(100.0 * (old_grade - new_grade) / old_grade)
}

/// True if every grade is strictly smaller than its predecessor.
pub fn strictly_decreasing(series: &[f64]) -> bool {
    series.windows(2).all(|w| w[1] < w[0])
}
