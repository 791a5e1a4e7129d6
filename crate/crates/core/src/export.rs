//! CSV export of run traces: header `n,t,x,d,e[,w_<i>...]`, one row per
//! sample, values in 17-significant-digit scientific notation. Weight columns
//! use 0-based tap indices.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::csvio::format_f64;
use crate::error::{AncError, Result};
use crate::sim::RunResult;

pub fn write_run_csv<W: Write>(result: &RunResult, mut out: W) -> Result<()> {
    let mut header = String::from("n,t,x,d,e");
    for i in result.weight_traces.keys() {
        header.push_str(&format!(",w_{i}"));
    }
    writeln!(out, "{header}")?;
    let x = result.reference_trace.samples();
    let d = result.disturbance_trace.samples();
    let e = result.error_trace.samples();
    let fs = result.reference_trace.sample_rate_hz();
    let mut row = String::new();
    for n in 0..x.len() {
        row.clear();
        row.push_str(&n.to_string());
        for v in [n as f64 / fs, x[n], d[n], e[n]] {
            row.push(',');
            row.push_str(&format_f64(v));
        }
        for trace in result.weight_traces.values() {
            row.push(',');
            row.push_str(&format_f64(trace.samples()[n]));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Parsed numeric CSV: column name to values, plus the header order.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub columns: BTreeMap<String, Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.get(name).map(Vec::as_slice)
    }
}

/// Reads a comma-separated table whose cells are all numeric.
pub fn read_csv_table<R: BufRead>(input: R) -> Result<CsvTable> {
    let mut lines = input.lines();
    let header: Vec<String> = match lines.next() {
        Some(line) => line?.trim().split(',').map(str::to_string).collect(),
        None => {
            return Err(AncError::Csv {
                line: 1,
                reason: "missing header".into(),
            })
        }
    };
    let mut data: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.trim().split(',').collect();
        if cells.len() != header.len() {
            return Err(AncError::Csv {
                line: i + 2,
                reason: format!("expected {} cells, found {}", header.len(), cells.len()),
            });
        }
        for (col, cell) in data.iter_mut().zip(cells) {
            col.push(cell.parse::<f64>().map_err(|e| AncError::Csv {
                line: i + 2,
                reason: e.to_string(),
            })?);
        }
    }
    let columns = header.iter().cloned().zip(data).collect();
    Ok(CsvTable { header, columns })
}
