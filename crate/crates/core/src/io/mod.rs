//! File formats: ladder configs (JSON), RD curves, traces, schedules and
//! plot data (CSV), and the run report.

mod config;
mod report;

pub use config::{
    build_ladder, load_ladder, ComparisonConfig, ExtraAps, GopSpec, LadderConfigFile, LoadedLadder,
    PictureOverride, RepresentationConfig, ToolOverride,
};
pub use report::{
    digest_files, round_floats, to_canonical_json, InputDigest, RunReport, TOOL_VERSION,
};

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gop::CodedSequence;
use crate::quality::{RdCurve, RdPoint};
use crate::switching::{BandwidthTrace, SessionReport, SwitchOutcome, TraceSample};

pub(crate) fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Reads CSV rows, insisting on the exact header.
fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path, header: &[&str]) -> Result<Vec<T>> {
    let text = read_file(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let got: Vec<String> = rdr
        .headers()
        .map_err(|e| parse_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if got != header {
        return Err(parse_err(
            path,
            format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                got.join(",")
            ),
        ));
    }
    rdr.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| parse_err(path, e))
}

pub const RD_HEADER: [&str; 4] = ["rate_kbps", "psnr_y", "psnr_u", "psnr_v"];

pub fn read_rd_curve(path: &Path) -> Result<RdCurve> {
    let rows: Vec<RdPoint> = read_rows(path, &RD_HEADER)?;
    RdCurve::new(rows).map_err(|e| parse_err(path, e))
}

pub fn rd_curve_csv(curve: &RdCurve) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in curve.points() {
        w.serialize(p)?;
    }
    finish(w)
}

pub fn read_trace(path: &Path) -> Result<BandwidthTrace> {
    let rows: Vec<TraceSample> = read_rows(path, &["time_s", "kbps"])?;
    BandwidthTrace::new(rows).map_err(|e| parse_err(path, e))
}

#[derive(Debug, Deserialize)]
struct ScheduleRow {
    segment: usize,
    rep_id: String,
}

/// One row per segment, in order, starting at 0.
pub fn read_schedule(path: &Path) -> Result<Vec<String>> {
    let rows: Vec<ScheduleRow> = read_rows(path, &["segment", "rep_id"])?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.into_iter().enumerate() {
        if r.segment != i {
            return Err(parse_err(
                path,
                format!("row {} lists segment {}, expected {i}", i + 1, r.segment),
            ));
        }
        out.push(r.rep_id);
    }
    Ok(out)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::invalid(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct GopRow {
    poc: u32,
    decode_idx: u32,
    tid: u32,
    kind: String,
    refs: String,
    collocated_ref: String,
    segment: usize,
}

/// One row per picture in POC order. Reference lists are space separated.
pub fn gop_csv(seq: &CodedSequence) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in &seq.pictures {
        w.serialize(GopRow {
            poc: p.poc,
            decode_idx: p.decode_idx,
            tid: p.tid,
            kind: p.kind.to_string(),
            refs: join(&p.refs),
            collocated_ref: p.collocated_ref.map(|c| c.to_string()).unwrap_or_default(),
            segment: p.segment,
        })?;
    }
    finish(w)
}

#[derive(Serialize)]
struct QualityRow<'a> {
    poc: u32,
    quality_db: String,
    rep_id: &'a str,
    status: &'a str,
}

/// `poc,quality_db,rep_id,status`; gaps leave `quality_db` empty.
pub fn quality_csv(report: &SessionReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for e in &report.timeline {
        w.serialize(QualityRow {
            poc: e.poc,
            quality_db: e.quality_db.map(fmt6).unwrap_or_default(),
            rep_id: &e.rep_id,
            status: e.status.as_str(),
        })?;
    }
    finish(w)
}

#[derive(Serialize)]
struct SwitchRow<'a> {
    segment: usize,
    from: &'a str,
    requested: &'a str,
    to: &'a str,
    outcome: &'a str,
    fallback: bool,
    panic: bool,
    affected: usize,
    mean_quality_db: String,
}

pub fn switches_csv(report: &SessionReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in &report.switches {
        let (affected, mean) = match &s.outcome {
            SwitchOutcome::GracefulDrift {
                affected_pocs,
                predicted_quality_series,
                ..
            } => {
                let n = predicted_quality_series.len();
                let m = predicted_quality_series.iter().sum::<f64>() / n.max(1) as f64;
                (affected_pocs.len(), fmt6(m))
            }
            SwitchOutcome::DroppedPictures { dropped_pocs } => (dropped_pocs.len(), String::new()),
            _ => (0, String::new()),
        };
        w.serialize(SwitchRow {
            segment: s.segment,
            from: &s.from,
            requested: &s.requested,
            to: &s.to,
            outcome: s.outcome.kind(),
            fallback: s.fallback,
            panic: s.panic,
            affected,
            mean_quality_db: mean,
        })?;
    }
    finish(w)
}

/// Six significant digits, shortest form.
pub fn fmt6(v: f64) -> String {
    round6(v).to_string()
}

pub(crate) fn round6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.5e}").parse().unwrap_or(v)
}
