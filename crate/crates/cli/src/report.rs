//! The versioned JSON report and the plot-ready CSV landscape.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;
use torus_blowup::blowup::LandscapeCell;
use torus_blowup::checks::{CheckRecord, CheckStatus};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: serde_json::Value,
    pub records: Vec<CheckRecord>,
    /// Command-specific payload (search reports, scan points).
    pub results: serde_json::Value,
    /// Wall-clock seconds; `None` unless requested, since it would break
    /// byte-identical reports.
    pub timing: Option<Timing>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Timing {
    pub elapsed_s: f64,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.status != CheckStatus::Fail)
    }
}

/// Writes every float with 17 significant digits so values round-trip.
struct RoundTrip;

impl Formatter for RoundTrip {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", float17(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// 17 significant digits in exponent form, valid as a JSON number.
pub fn float17(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, RoundTrip);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

pub const CSV_HEADER: &str = "a_re,a_im,branch,min_res_green";

/// One row per grid cell; cells inside the pole guard carry `NaN`.
pub fn landscape_csv(cells: &[LandscapeCell]) -> Vec<u8> {
    let mut out = String::with_capacity(64 * (cells.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{}\n",
            float17(c.a.re),
            float17(c.a.im),
            c.branch,
            float17(c.min_res_green)
        ));
    }
    out.into_bytes()
}
