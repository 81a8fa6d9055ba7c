//! Report rendering: canonical JSON and a self-contained HTML page.

mod html;
mod json;

pub use html::to_html;
pub use json::{round4, to_json, to_json_value};

/// Report metadata not derived from the assessment itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportMeta {
    /// UTC ISO-8601 timestamp.
    pub generated_at: String,
}

/// Field excluded when comparing reports across runs.
pub const TIMESTAMP_FIELD: &str = "generatedAt";
