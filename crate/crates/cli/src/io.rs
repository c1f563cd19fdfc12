//! Trace and scatter CSV files.
//!
//! Trace files have the header `t,r,e,u,y` and one row per sample. Values
//! are written in scientific notation with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::io::{Read, Write};

use yawtune::tuners::TuningResult;
use yawtune::SimTrace;

use crate::error::CliError;

pub const TRACE_HEADER: [&str; 5] = ["t", "r", "e", "u", "y"];
pub const SCATTER_HEADER: [&str; 4] = ["run", "kp", "ki", "cost"];

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace_csv<W: Write>(writer: W, trace: &SimTrace) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRACE_HEADER)?;
    for s in trace.samples() {
        w.write_record([fmt17(s.t), fmt17(s.r), fmt17(s.e), fmt17(s.u), fmt17(s.y)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace_csv<R: Read>(reader: R) -> Result<SimTrace, CliError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(CliError::Usage(format!(
            "expected trace header t,r,e,u,y, got {header:?}"
        )));
    }
    let mut cols: [Vec<f64>; 5] = Default::default();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        for (col, field) in cols.iter_mut().zip(record.iter()) {
            let v = field.parse::<f64>().map_err(|e| {
                CliError::Usage(format!("row {}: bad number {field:?}: {e}", line + 1))
            })?;
            col.push(v);
        }
    }
    let [t, r, e, u, y] = cols;
    if t.len() < 2 {
        return Err(CliError::Usage("trace needs at least two samples".into()));
    }
    let dt = t[1];
    Ok(SimTrace::from_columns(dt, t, r, e, u, y)?)
}

/// One row per run in seed order: `run` counts from 1.
pub fn write_scatter_csv<W: Write>(
    writer: W,
    runs_by_seed: &[&TuningResult],
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SCATTER_HEADER)?;
    for (i, run) in runs_by_seed.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            run.gains.kp().to_string(),
            run.gains.ki().to_string(),
            run.cost.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
