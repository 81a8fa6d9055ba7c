use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Tool,
    Manual,
}

/// Measurement data of one system version, keyed by instrument identifier.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasurementBundle {
    pub system_name: String,
    pub system_version: String,
    pub values: BTreeMap<String, f64>,
    pub provenance: BTreeMap<String, Provenance>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemHeader {
    name: String,
    version: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleFile {
    system: SystemHeader,
    #[serde(default)]
    values: BTreeMap<String, f64>,
}

fn check_value(id: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::NonFinite(v));
    }
    if v < 0.0 {
        return Err(Error::Input(format!("measurement for '{id}' is negative ({v})")));
    }
    Ok(())
}

impl MeasurementBundle {
    pub fn new(name: impl Into<String>, version: impl Into<String>) -> Self {
        MeasurementBundle { system_name: name.into(), system_version: version.into(), ..Default::default() }
    }

    pub fn with_value(mut self, instrument: impl Into<String>, value: f64) -> Self {
        self.insert(instrument, value, Provenance::Tool);
        self
    }

    pub fn insert(&mut self, instrument: impl Into<String>, value: f64, provenance: Provenance) {
        let id = instrument.into();
        self.provenance.insert(id.clone(), provenance);
        self.values.insert(id, value);
    }

    pub fn get(&self, instrument: &str) -> Option<f64> {
        self.values.get(instrument).copied()
    }

    /// Parses `{"system":{"name","version"},"values":{instrumentId: number}}`.
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let file: BundleFile = serde_json::from_slice(bytes)
            .map_err(|e| Error::Input(format!("measurement bundle: {e}")))?;
        let mut bundle = MeasurementBundle::new(file.system.name, file.system.version);
        for (id, v) in file.values {
            check_value(&id, v)?;
            bundle.insert(id, v, Provenance::Tool);
        }
        Ok(bundle)
    }

    /// Merges manual results from a CSV `instrumentId,value`. Manual values
    /// replace tool values; the replaced instrument ids are returned.
    pub fn merge_manual_csv<R: Read>(&mut self, reader: R) -> Result<Vec<String>> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["instrumentId", "value"] {
            return Err(Error::Input("manual CSV header must be 'instrumentId,value'".into()));
        }
        let mut overridden = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let id = &record[0];
            let v: f64 = record[1]
                .parse()
                .map_err(|_| Error::Input(format!("manual value '{}' for '{id}' is not a number", &record[1])))?;
            check_value(id, v)?;
            if self.values.contains_key(id) {
                overridden.push(id.to_string());
            }
            self.insert(id, v, Provenance::Manual);
        }
        Ok(overridden)
    }
}
