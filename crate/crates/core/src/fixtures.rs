//! Bundled reference data.

use crate::error::Result;
use crate::io::parse_table;
use crate::metrics::MetricReport;

/// Joint-wise reference means over eight tasks (22 joints, both prompt
/// sources, three metrics), in the long table format.
pub const JOINTWISE_REFERENCE_CSV: &str = include_str!("../fixtures/jointwise_reference.csv");

/// The reference table as a single pseudo-task report.
pub fn jointwise_reference() -> Result<Vec<MetricReport>> {
    parse_table(JOINTWISE_REFERENCE_CSV.as_bytes())
}
