//! On-disk formats: metrics JSON, teleport series CSV, trace rasters (CSV and
//! plain PGM) and content hashes. All writers are deterministic.
//!
//! Raster cells use IDLE = 0, COMPUTE = 1 and COMM = 2; in the PGM (maxval 2)
//! idle shows black and communication white.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::arch::Architecture;
use crate::circuit::format_real;
use crate::traffic::{MetricsReport, TraceAxis, TraceGrid};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("malformed raster: {0}")]
    Raster(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), ReportError> {
    fs::write(path, contents).map_err(io_err(path))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Pretty printer that writes floats with 12 significant digits.
struct StableFormatter(PrettyFormatter<'static>);

impl Formatter for StableFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_real(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes with sorted object keys and fixed float formatting, ending
/// with a newline.
pub fn to_stable_json<T: Serialize>(value: &T) -> String {
    // Going through `Value` sorts the keys.
    let value = serde_json::to_value(value).expect("serializable");
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, StableFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory write");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// Inputs recorded next to the metrics.
#[derive(Debug, Clone)]
pub struct MetricsContext<'a> {
    /// Benchmark description; must contain at least `name`.
    pub bench: Value,
    pub arch: &'a Architecture,
    pub seed: u64,
    /// File name to SHA-256 of the artifacts the metrics derive from.
    pub hashes: BTreeMap<String, String>,
}

pub fn metrics_document(r: &MetricsReport, ctx: &MetricsContext) -> Value {
    json!({
        "bench": ctx.bench,
        "arch": {
            "num_cores": ctx.arch.num_cores,
            "capacity": ctx.arch.capacity,
            "teleport_ns": ctx.arch.teleport_ns,
            "cycle_ns": ctx.arch.cycle_ns,
        },
        "totals": {
            "gates": r.totals.gates,
            "two_qubit": r.totals.two_qubit_gates,
            "teleports": r.totals.teleports,
            "slices": r.totals.slices,
            "makespan_ns": r.makespan_ns,
        },
        "traffic_matrix": {
            "counts": r.traffic_matrix.counts,
            "ratios": r.traffic_matrix.ratios,
        },
        "per_core": {
            "teleports": r.per_core_teleports,
            "gates": r.per_core_gates,
        },
        "temporal": {
            "series": r.teleports_per_slice,
            "moving_avg": r.moving_avg,
            "window": r.window,
            "mean": r.mean_teleports_per_slice,
        },
        "cov": {
            "burstiness": r.burstiness_cov,
            "hotspotness": r.hotspotness_cov,
        },
        "time_fractions": r.time_fractions,
        "flags": { "zero_traffic": r.zero_traffic },
        "manifest": {
            "seed": ctx.seed,
            "version": TOOL_VERSION,
            "hashes": ctx.hashes,
        },
    })
}

pub fn metrics_json(r: &MetricsReport, ctx: &MetricsContext) -> String {
    to_stable_json(&metrics_document(r, ctx))
}

pub fn write_metrics(
    r: &MetricsReport,
    ctx: &MetricsContext,
    path: &Path,
) -> Result<(), ReportError> {
    write_file(path, metrics_json(r, ctx).as_bytes())
}

pub fn read_metrics(path: &Path) -> Result<Value, ReportError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| ReportError::Json {
        path: path.display().to_string(),
        source,
    })
}

/// `slice_index,teleports,moving_avg` table.
pub fn series_csv(series: &[u64], moving_avg: &[f64]) -> String {
    let mut out = String::from("slice_index,teleports,moving_avg\n");
    for (k, (t, m)) in series.iter().zip(moving_avg).enumerate() {
        let _ = writeln!(out, "{k},{t},{}", format_real(*m));
    }
    out
}

pub fn write_series_csv(
    series: &[u64],
    moving_avg: &[f64],
    path: &Path,
) -> Result<(), ReportError> {
    write_file(path, series_csv(series, moving_avg).as_bytes())
}

pub fn trace_csv(g: &TraceGrid) -> String {
    let mut out = String::with_capacity(g.cells.len() * 2);
    for r in 0..g.rows {
        for (i, c) in g.row(r).iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push(char::from(b'0' + c));
        }
        out.push('\n');
    }
    out
}

/// Plain PGM: width = cycles, height = qubits, maxval 2.
pub fn trace_pgm(g: &TraceGrid) -> String {
    let mut out = String::with_capacity(16 + g.cells.len() * 2);
    let _ = write!(out, "P2\n{} {}\n2\n", g.cols, g.rows);
    for r in 0..g.rows {
        for (i, c) in g.row(r).iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push(char::from(b'0' + c));
        }
        out.push('\n');
    }
    out
}

fn cell(tok: &str) -> Result<u8, ReportError> {
    match tok {
        "0" => Ok(0),
        "1" => Ok(1),
        "2" => Ok(2),
        _ => Err(ReportError::Raster(format!("invalid cell value '{tok}'"))),
    }
}

/// Decodes [`trace_csv`] output into `(rows, cols, cells)`.
pub fn parse_trace_csv(text: &str) -> Result<(usize, usize, Vec<u8>), ReportError> {
    let mut cells = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for line in text.lines() {
        let row: Vec<u8> = line.split(',').map(cell).collect::<Result<_, _>>()?;
        if *cols.get_or_insert(row.len()) != row.len() {
            return Err(ReportError::Raster(format!(
                "row {rows} has {} cells",
                row.len()
            )));
        }
        cells.extend(row);
        rows += 1;
    }
    Ok((rows, cols.unwrap_or(0), cells))
}

/// Decodes [`trace_pgm`] output into `(rows, cols, cells)`.
pub fn parse_pgm(text: &str) -> Result<(usize, usize, Vec<u8>), ReportError> {
    let mut tokens = text.split_ascii_whitespace();
    let mut next = |what: &str| {
        tokens
            .next()
            .ok_or_else(|| ReportError::Raster(format!("missing {what}")))
    };
    if next("magic")? != "P2" {
        return Err(ReportError::Raster("not a plain PGM".into()));
    }
    let num = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| ReportError::Raster(format!("bad number '{t}'")))
    };
    let cols = num(next("width")?)?;
    let rows = num(next("height")?)?;
    if next("maxval")? != "2" {
        return Err(ReportError::Raster("maxval must be 2".into()));
    }
    let cells = tokens.map(cell).collect::<Result<Vec<_>, _>>()?;
    if cells.len() != rows * cols {
        return Err(ReportError::Raster(format!(
            "{} cells for a {rows}x{cols} image",
            cells.len()
        )));
    }
    Ok((rows, cols, cells))
}

/// File stem for a raster of the given axis.
pub fn raster_stem(axis: TraceAxis) -> &'static str {
    match axis {
        TraceAxis::Physical => "trace_physical",
        TraceAxis::Virtual => "trace_virtual",
    }
}

/// Writes `<stem>.csv` and `<stem>.pgm` into `dir`, returning the file
/// names and contents hashes.
pub fn write_trace_raster(
    g: &TraceGrid,
    dir: &Path,
    stem: &str,
) -> Result<Vec<(String, String)>, ReportError> {
    let mut written = Vec::new();
    for (ext, body) in [("csv", trace_csv(g)), ("pgm", trace_pgm(g))] {
        let name = format!("{stem}.{ext}");
        write_file(&dir.join(&name), body.as_bytes())?;
        written.push((name, sha256_hex(body.as_bytes())));
    }
    Ok(written)
}
