//! Threshold calibration of utility functions from baseline systems.
//!
//! When fewer than five baseline values are positive the utility becomes a
//! jump function at zero. Otherwise the thresholds are the smallest and
//! largest baseline values inside the Tukey fences `Q1 - 1.5 IQR` and
//! `Q3 + 1.5 IQR`, with quartiles taken over the nonzero values.

use std::collections::BTreeMap;
use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Direction, ModuleDef, RefKind};

pub const JUMP_MIN: f64 = 0.0;
pub const JUMP_MAX: f64 = 1e-8;
pub const MIN_BASELINE_SYSTEMS: usize = 10;
/// Below this many positive values the jump function applies.
pub const MIN_NONZERO: usize = 5;
const FENCE_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSample {
    pub measure_id: String,
    /// One normalized value per baseline system.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DescriptiveStats {
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub n_nonzero: usize,
    pub min_value: f64,
    pub max_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Too few positive values; thresholds `(0, 1e-8)`.
    Jump,
    /// Outlier-trimmed extremes.
    Fences,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub min: f64,
    pub max: f64,
    pub branch: Branch,
    pub stats: DescriptiveStats,
}

/// Linear interpolation between order statistics at position `(n-1)·p`.
pub fn quartile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, p))
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * p;
    let lower = pos.floor() as usize;
    let frac = pos - lower as f64;
    match sorted.get(lower + 1) {
        Some(upper) if frac > 0.0 => sorted[lower] + frac * (upper - sorted[lower]),
        _ => sorted[lower],
    }
}

pub fn calibrate(sample: &CalibrationSample) -> Result<Thresholds> {
    let values = &sample.values;
    if values.len() < MIN_BASELINE_SYSTEMS {
        return Err(Error::TooFewSamples { min: MIN_BASELINE_SYSTEMS, got: values.len() });
    }
    for &v in values {
        if !v.is_finite() {
            return Err(Error::NonFinite(v));
        }
        if v < 0.0 {
            return Err(Error::NegativeSample(v));
        }
    }

    let mut nonzero: Vec<f64> = values.iter().copied().filter(|v| *v != 0.0).collect();
    nonzero.sort_by(f64::total_cmp);
    let (q1, q3) = if nonzero.is_empty() {
        (0.0, 0.0)
    } else {
        (quantile_sorted(&nonzero, 0.25), quantile_sorted(&nonzero, 0.75))
    };
    let iqr = q3 - q1;
    let positive = values.iter().filter(|v| **v > 0.0).count();
    let stats = DescriptiveStats {
        q1,
        q3,
        iqr,
        n_nonzero: positive,
        min_value: values.iter().copied().fold(f64::INFINITY, f64::min),
        max_value: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };

    if positive < MIN_NONZERO {
        return Ok(Thresholds { min: JUMP_MIN, max: JUMP_MAX, branch: Branch::Jump, stats });
    }

    let upper_fence = q3 + FENCE_FACTOR * iqr;
    let lower_fence = q1 - FENCE_FACTOR * iqr;
    let max = values.iter().copied().filter(|v| *v <= upper_fence).fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().filter(|v| *v >= lower_fence).fold(f64::INFINITY, f64::min);
    if min == max {
        return Err(Error::DegenerateThresholds { measure: sample.measure_id.clone(), value: min });
    }
    Ok(Thresholds { min, max, branch: Branch::Fences, stats })
}

/// One row of the calibration report handed to reviewers.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CalibrationRecord {
    pub measure_id: String,
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub branch: Branch,
    #[serde(flatten)]
    pub stats: DescriptiveStats,
    /// The interquartile range is computed over the nonzero values only.
    pub iqr_basis: &'static str,
}

impl CalibrationRecord {
    pub fn new(sample: &CalibrationSample, t: &Thresholds) -> Self {
        CalibrationRecord {
            measure_id: sample.measure_id.clone(),
            n: sample.values.len(),
            min: t.min,
            max: t.max,
            branch: t.branch,
            stats: t.stats,
            iqr_basis: "nonzero",
        }
    }
}

/// Reads a baseline CSV with header `system,<measureId>,...`. Empty cells
/// mean the system has no value for that measure.
pub fn read_baseline_csv<R: Read>(reader: R) -> Result<Vec<CalibrationSample>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("system") {
        return Err(Error::Input("baseline CSV must start with a 'system' column".into()));
    }
    let mut samples: Vec<CalibrationSample> = headers
        .iter()
        .skip(1)
        .map(|h| CalibrationSample { measure_id: h.to_string(), values: Vec::new() })
        .collect();
    for record in rdr.records() {
        let record = record?;
        for (sample, cell) in samples.iter_mut().zip(record.iter().skip(1)) {
            if cell.is_empty() {
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Input(format!("baseline value '{cell}' for '{}' is not a number", sample.measure_id)))?;
            sample.values.push(v);
        }
    }
    Ok(samples)
}

/// Writes calibrated thresholds into every evaluation entry that uses one of
/// the sampled measures and already declares a utility direction.
///
/// Returns one record per sample plus the measures that had no directed
/// evaluation entry to receive thresholds.
pub fn calibrate_modules(
    modules: &mut [ModuleDef],
    samples: &[CalibrationSample],
) -> Result<(Vec<CalibrationRecord>, Vec<String>)> {
    let mut results = BTreeMap::new();
    let mut records = Vec::new();
    for sample in samples {
        let t = calibrate(sample)?;
        records.push(CalibrationRecord::new(sample, &t));
        results.insert(sample.measure_id.as_str(), t);
    }

    let mut applied: BTreeMap<&str, bool> = results.keys().map(|k| (*k, false)).collect();
    for module in modules.iter_mut() {
        for ev in &mut module.evaluations {
            for child in &mut ev.children {
                if child.ref_kind != RefKind::Measure {
                    continue;
                }
                let (Some(t), Some(spec)) = (results.get(child.reference.as_str()), child.utility.as_mut()) else {
                    continue;
                };
                if t.branch == Branch::Jump && spec.direction == Direction::Increasing {
                    return Err(Error::Input(format!(
                        "measure '{}' calibrates to a jump function but '{}' uses it with an increasing utility",
                        child.reference, ev.factor
                    )));
                }
                spec.min = Some(t.min);
                spec.max = Some(t.max);
                if let Some(used) = applied.get_mut(child.reference.as_str()) {
                    *used = true;
                }
            }
        }
    }
    let unused = applied.into_iter().filter(|(_, used)| !used).map(|(m, _)| m.to_string()).collect();
    Ok((records, unused))
}
