//! CSV persistence for ensemble curves.
//!
//! Schema: header `t,p_mean,p_stderr,f_mean,f_stderr`, one row per sampled
//! iteration, rows ascending in `t`, LF line endings. Floats are written
//! with 17 significant digits so that write → read → write is byte
//! identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::ensemble::EnsembleSeries;
use crate::error::{Error, Result};
use crate::series::SeriesView;

pub const CSV_HEADER: &str = "t,p_mean,p_stderr,f_mean,f_stderr";

/// Curve data loaded back from a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSeries {
    pub t: Vec<u32>,
    pub p_mean: Vec<f64>,
    pub p_stderr: Vec<f64>,
    pub f_mean: Vec<f64>,
    pub f_stderr: Vec<f64>,
}

impl CsvSeries {
    pub fn view(&self) -> SeriesView<'_> {
        SeriesView {
            times: &self.t,
            p: &self.p_mean,
            f: &self.f_mean,
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders five parallel columns as CSV text.
pub fn format_csv(
    t: &[u32],
    p_mean: &[f64],
    p_stderr: &[f64],
    f_mean: &[f64],
    f_stderr: &[f64],
) -> String {
    let mut out = String::with_capacity(t.len() * 96 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for i in 0..t.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            t[i],
            format_float(p_mean[i]),
            format_float(p_stderr[i]),
            format_float(f_mean[i]),
            format_float(f_stderr[i]),
        );
    }
    out
}

pub fn ensemble_to_csv(series: &EnsembleSeries) -> String {
    format_csv(
        &series.sample_times,
        &series.p_mean,
        &series.p_stderr,
        &series.f_mean,
        &series.f_stderr,
    )
}

pub fn write_csv(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(Error::Io)
}

pub fn read_csv(path: &Path) -> Result<CsvSeries> {
    let text = fs::read_to_string(path)?;
    parse_csv(&text)
}

pub fn parse_csv(text: &str) -> Result<CsvSeries> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{CSV_HEADER}`, found `{header}`"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty file".to_string(),
            })
        }
    }

    let mut series = CsvSeries {
        t: Vec::new(),
        p_mean: Vec::new(),
        p_stderr: Vec::new(),
        f_mean: Vec::new(),
        f_stderr: Vec::new(),
    };
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let t: u32 = fields[0].parse().map_err(|e| Error::Parse {
            line: line_no,
            message: format!("bad iteration count `{}`: {e}", fields[0]),
        })?;
        if let Some(&last) = series.t.last() {
            if t <= last {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("sample times must be ascending ({last} then {t})"),
                });
            }
        }
        let mut values = [0.0f64; 4];
        for (k, field) in fields[1..].iter().enumerate() {
            values[k] = field.parse().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad value `{field}`: {e}"),
            })?;
        }
        series.t.push(t);
        series.p_mean.push(values[0]);
        series.p_stderr.push(values[1]);
        series.f_mean.push(values[2]);
        series.f_stderr.push(values[3]);
    }
    Ok(series)
}
