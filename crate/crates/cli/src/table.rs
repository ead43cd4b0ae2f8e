//! CSV and JSON encodings of result rows.

use std::io::{self, Write};

use fbf_blasius::SweepRow;
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: [&str; 5] = [
    "epsilon",
    "eta_eps",
    "fpp0",
    "newton_iterations",
    "mesh_points",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub epsilon: f64,
    pub eta_eps: f64,
    pub fpp0: f64,
    pub newton_iterations: usize,
    pub mesh_points: usize,
}

impl From<SweepRow<f64>> for Record {
    fn from(r: SweepRow<f64>) -> Self {
        Self {
            epsilon: r.epsilon,
            eta_eps: r.eta_eps,
            fpp0: r.fpp0,
            newton_iterations: r.newton_iterations,
            mesh_points: r.mesh_points,
        }
    }
}

impl From<Record> for SweepRow<f64> {
    fn from(r: Record) -> Self {
        Self {
            epsilon: r.epsilon,
            eta_eps: r.eta_eps,
            fpp0: r.fpp0,
            newton_iterations: r.newton_iterations,
            mesh_points: r.mesh_points,
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

/// `digits` significant digits in positional notation, scientific outside
/// `[1e-4, 1e9)`.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..9).contains(&mag) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit (9.99 -> 10.0)
    let rounded: f64 = s.parse().unwrap_or(x);
    if rounded.abs().log10().floor() as i32 > mag && decimals > 0 {
        format!("{:.*}", decimals - 1, x)
    } else {
        s
    }
}

/// Writes the header and rows, then an optional `# ...` trailer line.
pub fn write_csv<W: Write>(out: W, rows: &[Record], trailer: Option<&str>) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            full_precision(r.epsilon),
            full_precision(r.eta_eps),
            full_precision(r.fpp0),
            r.newton_iterations.to_string(),
            r.mesh_points.to_string(),
        ])?;
    }
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    if let Some(t) = trailer {
        writeln!(out, "# {t}")?;
    }
    out.flush()
}

/// Parses a table written by [`write_csv`]; `#` lines are skipped.
pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<Record>, csv::Error> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(csv::Error::from(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unexpected header {header:?}"),
        )));
    }
    r.deserialize().collect()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SweepDocument {
    pub rows: Vec<Record>,
    pub failed_epsilon: Option<f64>,
    pub error: Option<String>,
}
