//! Plain-text exchange format for paths and signals: one value per line under
//! a `# taps` or `# samples,<rate>` header.

use std::io::{BufRead, Write};

use crate::error::{AncError, Result};
use crate::signal::{FirPath, Signal};

/// Scientific notation with 17 significant digits; parses back bit-exactly.
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn write_path_csv<W: Write>(path: &FirPath, mut out: W) -> Result<()> {
    writeln!(out, "# taps")?;
    for c in path.coefficients() {
        writeln!(out, "{}", format_f64(*c))?;
    }
    Ok(())
}

pub fn write_signal_csv<W: Write>(signal: &Signal, mut out: W) -> Result<()> {
    writeln!(out, "# samples,{}", signal.sample_rate_hz())?;
    for v in signal.samples() {
        writeln!(out, "{}", format_f64(*v))?;
    }
    Ok(())
}

fn read_values<R: BufRead>(lines: std::io::Lines<R>) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value = trimmed.parse::<f64>().map_err(|e| AncError::Csv {
            line: i + 2,
            reason: e.to_string(),
        })?;
        values.push(value);
    }
    Ok(values)
}

fn header<R: BufRead>(lines: &mut std::io::Lines<R>) -> Result<String> {
    match lines.next() {
        Some(line) => Ok(line?.trim().to_string()),
        None => Err(AncError::Csv {
            line: 1,
            reason: "missing header".into(),
        }),
    }
}

pub fn read_path_csv<R: BufRead>(input: R) -> Result<FirPath> {
    let mut lines = input.lines();
    let head = header(&mut lines)?;
    if head != "# taps" {
        return Err(AncError::Csv {
            line: 1,
            reason: format!("expected `# taps`, found `{head}`"),
        });
    }
    FirPath::new(read_values(lines)?)
}

pub fn read_signal_csv<R: BufRead>(input: R) -> Result<Signal> {
    let mut lines = input.lines();
    let head = header(&mut lines)?;
    let rate = head
        .strip_prefix("# samples,")
        .and_then(|r| r.trim().parse::<f64>().ok())
        .ok_or_else(|| AncError::Csv {
            line: 1,
            reason: format!("expected `# samples,<rate>`, found `{head}`"),
        })?;
    Signal::new(read_values(lines)?, rate)
}
