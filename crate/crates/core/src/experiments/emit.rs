//! CSV and JSON writers for sweep results.
//!
//! CSV columns, in this order:
//!
//! | column          | meaning                                      |
//! |-----------------|----------------------------------------------|
//! | `sweep_kind`    | `tradeoff`, `region` or `point`              |
//! | `coordinate`    | see [`super`] for the unit per kind          |
//! | `strategy`      | `RS`, `MULP` or `SCSIC`                      |
//! | `status`        | `ok`, `infeasible`, `unsupported`, `failed`  |
//! | `wsr`           | weighted sum rate, bit/s/Hz                  |
//! | `r1_tot`, `r2_tot` | `C_k + R_k` of IR-1 and IR-2              |
//! | `c1`, `c2`      | common-rate portions of IR-1 and IR-2        |
//! | `q_total_watts` | total harvested power                        |
//! | `p_c`, `p_1`, `p_2`, `p_er` | precoder powers in watts; `p_er` sums all ERs |
//! | `outer_iters`   | outer iterations of the winning start        |
//! | `wall_time_s`   | wall time of the winning start               |
//!
//! Numbers use the shortest round-trip form, switching to exponent notation
//! for very small or large values. Numeric fields are empty on rows without a
//! solution. The JSON form is the serialized [`SweepResult`], including
//! precoders and convergence traces.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SweepResult;
use crate::error::{Error, Result};

pub const CSV_COLUMNS: [&str; 16] = [
    "sweep_kind",
    "coordinate",
    "strategy",
    "status",
    "wsr",
    "r1_tot",
    "r2_tot",
    "c1",
    "c2",
    "q_total_watts",
    "p_c",
    "p_1",
    "p_2",
    "p_er",
    "outer_iters",
    "wall_time_s",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    let num = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:?}"));
    for row in &result.rows {
        let p = row.point.as_ref();
        let at = |v: Option<&Vec<f64>>, i: usize| num(v.and_then(|v| v.get(i).copied()));
        w.write_record([
            result.kind.name().to_string(),
            format!("{:?}", row.coordinate),
            row.strategy.name().to_string(),
            row.status.name().to_string(),
            num(p.map(|p| p.wsr)),
            at(p.map(|p| &p.per_ir_total_rates), 0),
            at(p.map(|p| &p.per_ir_total_rates), 1),
            at(p.map(|p| &p.common_rate_split.portions), 0),
            at(p.map(|p| &p.common_rate_split.portions), 1),
            num(p.map(|p| p.harvested_energy_total)),
            num(p.map(|p| p.power_breakdown.common)),
            at(p.map(|p| &p.power_breakdown.private), 0),
            at(p.map(|p| &p.power_breakdown.private), 1),
            num(p.map(|p| p.power_breakdown.energy)),
            p.map_or(String::new(), |p| p.iterations_outer.to_string()),
            num(p.map(|p| p.ledger.wall_time)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, result)?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<SweepResult> {
    Ok(serde_json::from_reader(input)?)
}

/// Write `result` to `path` in the given format.
pub fn emit(result: &SweepResult, format: OutputFormat, path: &Path) -> Result<()> {
    let file = File::create(path)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    match format {
        OutputFormat::Csv => write_csv(result, &mut out)?,
        OutputFormat::Json => write_json(result, &mut out)?,
    }
    out.flush()?;
    Ok(())
}
