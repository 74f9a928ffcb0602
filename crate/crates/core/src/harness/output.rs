//! File export: one CSV per `(policy, run)` and a JSON experiment summary.
//!
//! Per-run CSV columns:
//!
//! | column        | meaning                                              |
//! |---------------|------------------------------------------------------|
//! | `round`       | 1-based round                                        |
//! | `granted_ids` | granted tenant ids, increasing, separated by `;`     |
//! | `reward_sum`  | summed reward of the granted tenants                 |
//! | `utilization` | served fraction of capacity, `min(Σλ, C) / C`        |
//! | `cost_sum`    | PRBs charged by the decision                         |
//! | `violation`   | `1` when the used PRBs exceeded the capacity         |

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::seeds::RunSeeds;
use super::sim::SimulationTrace;
use crate::error::{Error, Result};
use crate::policies::PolicyKind;

pub const TRACE_HEADER: [&str; 6] = [
    "round",
    "granted_ids",
    "reward_sum",
    "utilization",
    "cost_sum",
    "violation",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_trace_csv<W: Write>(trace: &SimulationTrace, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER).map_err(csv_err)?;
    for r in &trace.rounds {
        let ids = r
            .granted
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.round.to_string(),
            ids,
            r.reward_sum.to_string(),
            r.utilization(trace.capacity).to_string(),
            r.cost_sum.to_string(),
            u8::from(r.violation).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// File name of the trace of `policy` in `run`.
pub fn trace_file_name(policy: PolicyKind, seeds: &RunSeeds) -> String {
    format!("{policy}_seed{:04}.csv", seeds.run)
}

pub fn write_trace_file(
    dir: &Path,
    policy: PolicyKind,
    seeds: &RunSeeds,
    trace: &SimulationTrace,
) -> Result<PathBuf> {
    let path = dir.join(trace_file_name(policy, seeds));
    let file = std::fs::File::create(&path)?;
    write_trace_csv(trace, std::io::BufWriter::new(file))?;
    Ok(path)
}

/// Serializes `value` as pretty JSON to `path`.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
