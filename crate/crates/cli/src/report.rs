//! Plot-ready CSV rows describing one update each.

use std::io::Write;

use phwarm::filtration::DiffStats;
use phwarm::{Error, OperationCounters, Result};

/// Cost and size of one update, optionally next to a scratch recomputation
/// of the same target.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub trial: usize,
    pub stats: DiffStats,
    pub counters: OperationCounters,
    pub scratch: Option<OperationCounters>,
    /// Informational only.
    pub wall_ms: f64,
    pub scratch_wall_ms: Option<f64>,
}

pub const HEADER: [&str; 19] = [
    "scenario",
    "trial",
    "d_k",
    "kendall_tau",
    "inserted",
    "deleted",
    "add_fraction",
    "del_fraction",
    "old_cells",
    "new_cells",
    "column_additions",
    "pivot_eliminations",
    "swaps",
    "field_operations",
    "total",
    "scratch_column_additions",
    "scratch_total",
    "wall_ms",
    "scratch_wall_ms",
];

impl RunReport {
    fn record(&self) -> Vec<String> {
        let s = &self.stats;
        let k = &self.counters;
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.scenario.clone(),
            self.trial.to_string(),
            format!("{:?}", s.normalized_kendall_tau),
            s.kendall_tau.to_string(),
            s.inserted.to_string(),
            s.deleted.to_string(),
            format!("{:?}", s.add_fraction()),
            format!("{:?}", s.delete_fraction()),
            s.old_cells.to_string(),
            s.new_cells.to_string(),
            k.column_additions.to_string(),
            k.pivot_eliminations.to_string(),
            k.swaps.to_string(),
            k.field_operations.to_string(),
            k.total().to_string(),
            opt(self.scratch.map(|c| c.column_additions)),
            opt(self.scratch.map(|c| c.total())),
            format!("{:.3}", self.wall_ms),
            self.scratch_wall_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
        ]
    }
}

/// Header plus one line per report, in the given order.
pub fn write_csv(reports: &[RunReport], out: impl Write) -> Result<()> {
    let io = |e: csv::Error| Error::Input(format!("cannot write report: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER).map_err(io)?;
    for r in reports {
        w.write_record(r.record()).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Input(format!("cannot write report: {e}")))
}
