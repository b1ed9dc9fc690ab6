use serde::{Deserialize, Serialize};

use super::Ladder;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub time_s: f64,
    pub kbps: f64,
}

/// Piecewise-constant throughput over time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthTrace {
    samples: Vec<TraceSample>,
}

impl BandwidthTrace {
    pub fn new(samples: Vec<TraceSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("bandwidth trace is empty"));
        }
        for s in &samples {
            if !(s.time_s.is_finite() && s.time_s >= 0.0) {
                return Err(Error::invalid(format!(
                    "trace time {} must be non-negative",
                    s.time_s
                )));
            }
            if !(s.kbps.is_finite() && s.kbps > 0.0) {
                return Err(Error::invalid(format!(
                    "trace throughput {} at {} s must be positive",
                    s.kbps, s.time_s
                )));
            }
        }
        if samples.windows(2).any(|w| w[1].time_s <= w[0].time_s) {
            return Err(Error::invalid("trace times must be strictly increasing"));
        }
        Ok(BandwidthTrace { samples })
    }

    /// Constant throughput from time zero.
    pub fn constant(kbps: f64) -> Result<Self> {
        Self::new(vec![TraceSample { time_s: 0.0, kbps }])
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    /// Throughput of the latest sample at or before `t`; the first sample
    /// also covers any time before it.
    pub fn throughput_at(&self, t: f64) -> f64 {
        let i = self.samples.partition_point(|s| s.time_s <= t);
        self.samples[i.saturating_sub(1)].kbps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BufferState {
    pub level_s: f64,
    pub capacity_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AbrConfig {
    /// Fraction of the throughput estimate a choice may use.
    pub safety_margin: f64,
    /// Below this buffer level the lowest representation is fetched.
    pub panic_threshold_s: f64,
    pub buffer_capacity_s: f64,
    pub initial_buffer_s: f64,
}

impl Default for AbrConfig {
    fn default() -> Self {
        AbrConfig {
            safety_margin: 0.9,
            panic_threshold_s: 2.0,
            buffer_capacity_s: 30.0,
            initial_buffer_s: 0.0,
        }
    }
}

impl AbrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.safety_margin > 0.0 && self.safety_margin <= 1.0) {
            return Err(Error::invalid(format!(
                "safety margin {} must be in (0, 1]",
                self.safety_margin
            )));
        }
        if !(self.buffer_capacity_s.is_finite() && self.buffer_capacity_s > 0.0) {
            return Err(Error::invalid("buffer capacity must be positive"));
        }
        if !(self.panic_threshold_s >= 0.0 && self.panic_threshold_s <= self.buffer_capacity_s) {
            return Err(Error::invalid(
                "panic threshold must lie within the buffer capacity",
            ));
        }
        if !(self.initial_buffer_s >= 0.0 && self.initial_buffer_s <= self.buffer_capacity_s) {
            return Err(Error::invalid(
                "initial buffer must lie within the buffer capacity",
            ));
        }
        Ok(())
    }
}

/// One segment fetch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbrDecision {
    pub segment_index: usize,
    pub rep_id: String,
    pub start_time_s: f64,
    /// Throughput estimate the choice was based on.
    pub estimate_kbps: f64,
    pub download_time_s: f64,
    /// Buffer after the segment was appended.
    pub buffer: BufferState,
    pub panic: bool,
    /// Playback time lost while this segment downloaded.
    pub stall_s: f64,
}

/// Throughput rule with a panic override, one segment at a time.
///
/// The estimate for segment `k > 0` is the throughput seen while fetching
/// segment `k - 1`; the first fetch uses the trace at time zero. Once the
/// buffer has reached the panic threshold, any later fall below it makes
/// the next fetch use the lowest representation; the initial fill does not
/// count as a panic. Otherwise the highest representation whose
/// bitrate fits `safety_margin * estimate` is chosen, or the lowest if none
/// fits.
///
/// Segment durations follow their picture counts, so the lone IDR segment
/// at the start and the final one are shorter. A fetch takes
/// `duration * bitrate / throughput` at the throughput in
/// force when it starts. The buffer then becomes
/// `clamp(level + duration - download, 0, capacity)`; any negative part is
/// a stall, and the client idles while the buffer is full.
pub fn run_abr(
    ladder: &Ladder,
    trace: &BandwidthTrace,
    cfg: &AbrConfig,
) -> Result<Vec<AbrDecision>> {
    cfg.validate()?;
    let reps = &ladder.representations;
    let mut level = cfg.initial_buffer_s;
    let mut t = 0.0;
    let mut last_throughput = trace.throughput_at(0.0);
    let mut armed = level >= cfg.panic_threshold_s;
    let mut out = Vec::with_capacity(ladder.segment_count());
    for k in 0..ladder.segment_count() {
        let estimate = last_throughput;
        let panic = armed && level < cfg.panic_threshold_s;
        let rep = if panic {
            &reps[0]
        } else {
            reps.iter()
                .rev()
                .find(|r| r.bitrate_kbps() <= cfg.safety_margin * estimate)
                .unwrap_or(&reps[0])
        };
        let dur = f64::from(rep.sequence.segments[k].duration_pics) / ladder.frame_rate;
        let throughput = trace.throughput_at(t);
        let download = dur * rep.bitrate_kbps() / throughput;
        let raw = level + dur - download;
        let stall_s = if k > 0 { (-raw).max(0.0) } else { 0.0 };
        let idle = (raw - cfg.buffer_capacity_s).max(0.0);
        level = raw.clamp(0.0, cfg.buffer_capacity_s);
        armed |= level >= cfg.panic_threshold_s;
        out.push(AbrDecision {
            segment_index: k,
            rep_id: rep.id.clone(),
            start_time_s: t,
            estimate_kbps: estimate,
            download_time_s: download,
            buffer: BufferState {
                level_s: level,
                capacity_s: cfg.buffer_capacity_s,
            },
            panic,
            stall_s,
        });
        t += download + idle;
        last_throughput = throughput;
    }
    Ok(out)
}
