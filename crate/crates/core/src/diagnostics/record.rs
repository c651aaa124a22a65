use std::io::Write;

use serde::Serialize;

use super::DiagnosticReport;
use crate::error::{Error, Result};

/// One-line view of a [`DiagnosticReport`] for CSV and text output.
/// Witnesses are joined as `taxa|lhs|rhs` entries separated by `;`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatRecord {
    pub condition: &'static str,
    pub holds: bool,
    pub margin: f64,
    pub coverage: f64,
    pub checked: usize,
    pub violations: usize,
    pub sampled: bool,
    pub witness_count: usize,
    pub witnesses: String,
}

impl From<&DiagnosticReport> for FlatRecord {
    fn from(r: &DiagnosticReport) -> Self {
        let witnesses = r
            .witnesses
            .iter()
            .map(|w| format!("{}|{}|{}", w.taxa.join(","), w.lhs, w.rhs))
            .collect::<Vec<_>>()
            .join(";");
        FlatRecord {
            condition: r.condition.as_str(),
            holds: r.holds,
            margin: r.margin,
            coverage: r.coverage,
            checked: r.checked,
            violations: r.violations,
            sampled: r.sampled,
            witness_count: r.witnesses.len(),
            witnesses,
        }
    }
}

/// Writes one CSV row per report, with a header.
pub fn write_csv<W: Write>(reports: &[DiagnosticReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(FlatRecord::from(r))
            .map_err(|e| Error::InvalidParameter(format!("csv output failed: {e}")))?;
    }
    w.flush()
        .map_err(|e| Error::InvalidParameter(format!("csv output failed: {e}")))
}
