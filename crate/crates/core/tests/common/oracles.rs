// Reference implementations written independently of the library code.

use qassess_core::assessment::{assess, UtilityInterval};
use qassess_core::model::resolve;
use rand::rngs::StdRng;

use super::random_model::{complete, RandomCase};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FenceOutcome {
    Jump,
    Fences(f64, f64),
    Degenerate,
}

/// Outlier-fence thresholds by exhaustive search over the sample.
pub fn fence_oracle(values: &[f64]) -> FenceOutcome {
    let mut nz: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
    if nz.len() < 5 {
        return FenceOutcome::Jump;
    }
    nz.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| {
        let h = (nz.len() - 1) as f64 * p;
        let i = h as usize;
        let f = h - i as f64;
        if i + 1 < nz.len() {
            nz[i] + f * (nz[i + 1] - nz[i])
        } else {
            nz[i]
        }
    };
    let (q1, q3) = (q(0.25), q(0.75));
    let iqr = q3 - q1;
    let mut max = None;
    let mut min = None;
    for &s in values {
        if s <= q3 + 1.5 * iqr && max.is_none_or(|m| s > m) {
            max = Some(s);
        }
        if s >= q1 - 1.5 * iqr && min.is_none_or(|m| s < m) {
            min = Some(s);
        }
    }
    let (min, max) = (min.unwrap(), max.unwrap());
    if min == max {
        FenceOutcome::Degenerate
    } else {
        FenceOutcome::Fences(min, max)
    }
}

/// Rank-Order-Centroid weight of rank `k` (1-based) among `n`.
pub fn roc_closed_form(k: usize, n: usize) -> f64 {
    (k..=n).map(|i| 1.0 / i as f64).sum::<f64>() / n as f64
}

/// Assesses `case`, then checks that `completions` random fillings of the
/// missing instruments land inside every reported interval. Returns the
/// first violation as text.
pub fn check_completions(case: &RandomCase, rng: &mut StdRng, completions: usize) -> Result<(), String> {
    let model = resolve(case.modules.clone()).map_err(|e| e.to_string())?;
    let reported = assess(&model, &case.bundle).map_err(|e| e.to_string())?;
    for _ in 0..completions {
        let filled = complete(rng, case);
        let point = assess(&model, &filled).map_err(|e| e.to_string())?;
        for (id, node) in &reported.nodes {
            let p = point.nodes[id].utility;
            if !contains(&node.utility, &p) {
                return Err(format!("{id}: completion {p:?} outside {:?}", node.utility));
            }
        }
    }
    Ok(())
}

fn contains(outer: &UtilityInterval, inner: &UtilityInterval) -> bool {
    const EPS: f64 = 1e-9;
    inner.lo >= outer.lo - EPS && inner.hi <= outer.hi + EPS
}
