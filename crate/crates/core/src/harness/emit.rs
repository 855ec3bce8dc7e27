//! CSV and JSON output.
//!
//! Sweep CSV columns:
//! `grid_idx,d,sigma,A,gamma,T,S,xnorm,ynorm,u,v,quad_log_value,env_shape_log,env_rate,log_ratio,err_est`.
//! Region CSV columns:
//! `ip_num,ip_den,iq_num,iq_den,strong,weak,restricted_weak,rationale_tag`.
//! Unused cells are empty. JSON output carries `schema: 1`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use super::experiment::{ExperimentReport, SCHEMA_VERSION};
use super::sweep::SweepRow;
use crate::region::{Classification, RegionParams, RegionPoint};
use crate::{Error, Result};

pub const SWEEP_HEADER: [&str; 16] = [
    "grid_idx",
    "d",
    "sigma",
    "A",
    "gamma",
    "T",
    "S",
    "xnorm",
    "ynorm",
    "u",
    "v",
    "quad_log_value",
    "env_shape_log",
    "env_rate",
    "log_ratio",
    "err_est",
];

pub const REGION_HEADER: [&str; 8] = [
    "ip_num",
    "ip_den",
    "iq_num",
    "iq_den",
    "strong",
    "weak",
    "restricted_weak",
    "rationale_tag",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Domain(format!("unknown format {s:?}"))),
        }
    }
}

/// A classified raster with the parameters it was computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub schema: u32,
    pub d: u32,
    pub sigma: f64,
    pub params: RegionParams,
    pub rows: Vec<RegionRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub ip_num: i64,
    pub ip_den: i64,
    pub iq_num: i64,
    pub iq_den: i64,
    pub strong: String,
    pub weak: String,
    pub restricted_weak: String,
    pub rationale_tag: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub near_boundary: bool,
}

impl RegionRow {
    pub fn new(pt: &RegionPoint, c: &Classification) -> Self {
        RegionRow {
            ip_num: *pt.ip.numer(),
            ip_den: *pt.ip.denom(),
            iq_num: *pt.iq.numer(),
            iq_den: *pt.iq.denom(),
            strong: c.strong.label().into(),
            weak: c.weak.label().into(),
            restricted_weak: c.restricted_weak.label().into(),
            rationale_tag: c.rationale_tag.label().into(),
            near_boundary: c.near_boundary,
        }
    }
}

impl RegionReport {
    pub fn new(
        d: u32,
        sigma: f64,
        params: RegionParams,
        points: &[(RegionPoint, Classification)],
    ) -> Self {
        RegionReport {
            schema: SCHEMA_VERSION,
            d,
            sigma,
            params,
            rows: points.iter().map(|(p, c)| RegionRow::new(p, c)).collect(),
        }
    }
}

fn io_err(path: &str, e: impl fmt::Display) -> Error {
    Error::Io {
        path: path.to_string(),
        message: e.to_string(),
    }
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes sweep rows as CSV; an empty slice gives the header alone.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.grid_idx.to_string(),
            cell(r.d),
            cell(r.sigma),
            cell(r.a),
            cell(r.gamma),
            cell(r.t),
            cell(r.s),
            cell(r.xnorm),
            cell(r.ynorm),
            cell(r.u),
            cell(r.v),
            r.quad_log_value.to_string(),
            cell(r.env_shape_log),
            cell(r.env_rate),
            cell(r.log_ratio),
            r.err_est.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_region_csv<W: Write>(rows: &[RegionRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REGION_HEADER)?;
    for r in rows {
        w.write_record([
            r.ip_num.to_string(),
            r.ip_den.to_string(),
            r.iq_num.to_string(),
            r.iq_den.to_string(),
            r.strong.clone(),
            r.weak.clone(),
            r.restricted_weak.clone(),
            r.rationale_tag.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_sweep_csv`].
pub fn read_sweep_csv<R: Read>(input: R) -> csv::Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(SWEEP_HEADER) {
        return Err(csv::Error::from(io::Error::new(
            io::ErrorKind::InvalidData,
            format!(
                "unexpected sweep header {:?}",
                header.iter().collect::<Vec<_>>()
            ),
        )));
    }
    r.deserialize().collect()
}

/// Opens `path` for writing, `-` meaning standard output.
pub fn open_output(path: &str) -> Result<Box<dyn Write>> {
    if path == "-" {
        return Ok(Box::new(io::stdout().lock()));
    }
    let p = Path::new(path);
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_err(path, e))?;
    }
    Ok(Box::new(BufWriter::new(
        File::create(p).map_err(|e| io_err(path, e))?,
    )))
}

fn write_json<T: Serialize>(value: &T, path: &str) -> Result<()> {
    let mut w = open_output(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| io_err(path, e))?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| io_err(path, e))
}

/// Writes a report: its rows as sweep CSV, or the whole report as JSON.
pub fn emit(report: &ExperimentReport, format: Format, path: &str) -> Result<()> {
    match format {
        Format::Csv => {
            write_sweep_csv(&report.rows, open_output(path)?).map_err(|e| io_err(path, e))
        }
        Format::Json => write_json(report, path),
    }
}

pub fn emit_region(report: &RegionReport, format: Format, path: &str) -> Result<()> {
    match format {
        Format::Csv => {
            write_region_csv(&report.rows, open_output(path)?).map_err(|e| io_err(path, e))
        }
        Format::Json => write_json(report, path),
    }
}

/// Loads sweep rows from a CSV file.
pub fn load_sweep_csv(path: &str) -> Result<Vec<SweepRow>> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    read_sweep_csv(f).map_err(|e| io_err(path, e))
}
