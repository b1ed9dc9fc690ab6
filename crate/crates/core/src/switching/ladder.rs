use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::constraints::{
    apply_rasl_constraints, assign_aps, ApsEvent, ApsPolicy, LevelTable, SpsModel, SwitchingMode,
};
use crate::error::{Error, Result};
use crate::gop::{build_sequence, CodedSequence, GopConfig, IrapMode};
use crate::quality::{RdCurve, RdPoint, TransitionParams};

/// Region of the picture that sets the resampling ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingWindow {
    pub width: u32,
    pub height: u32,
}

/// Whether the decoder can predict from references of another size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodecCapabilities {
    pub supports_rpr: bool,
}

impl CodecCapabilities {
    pub const VVC: Self = CodecCapabilities { supports_rpr: true };
    /// AVC/HEVC-like decoders.
    pub const NO_RPR: Self = CodecCapabilities {
        supports_rpr: false,
    };
}

impl Default for CodecCapabilities {
    fn default() -> Self {
        Self::VVC
    }
}

/// Everything needed to produce one variant.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationParams {
    pub id: String,
    pub width: u32,
    pub height: u32,
    pub scaling_window: Option<ScalingWindow>,
    pub gop: GopConfig,
    pub length: u32,
    pub rd_curve: RdCurve,
    /// Index into the rate-sorted RD points this variant streams at.
    pub operating_point: usize,
    pub sps: SpsModel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Representation {
    pub id: String,
    pub width: u32,
    pub height: u32,
    pub scaling_window: ScalingWindow,
    pub sequence: CodedSequence,
    pub aps_events: Vec<ApsEvent>,
    pub sps: SpsModel,
    pub rd_curve: RdCurve,
    pub operating_point: usize,
}

impl Representation {
    /// Builds the coded structure and applies the encoder behaviour implied
    /// by the IRAP mode: closed and constrained variants reset APS content
    /// at every IRAP, constrained variants also restrict their RASL
    /// pictures for `mode`.
    pub fn encode(params: RepresentationParams, mode: SwitchingMode) -> Result<Self> {
        if params.width == 0 || params.height == 0 {
            return Err(Error::invalid(format!(
                "representation {} has a zero dimension",
                params.id
            )));
        }
        if params.operating_point >= params.rd_curve.points().len() {
            return Err(Error::invalid(format!(
                "operating point {} outside the {} rd points of {}",
                params.operating_point,
                params.rd_curve.points().len(),
                params.id
            )));
        }
        let window = params.scaling_window.unwrap_or(ScalingWindow {
            width: params.width,
            height: params.height,
        });
        if window.width == 0 || window.height == 0 {
            return Err(Error::invalid(format!(
                "representation {} has an empty scaling window",
                params.id
            )));
        }
        let seq = build_sequence(params.gop, params.length)?;
        let policy = match params.gop.irap_mode {
            IrapMode::OpenGop => ApsPolicy::StreamStart,
            IrapMode::ClosedGop | IrapMode::ConstrainedOpenGop => ApsPolicy::ResetAtIrap,
        };
        let (mut seq, aps_events) = assign_aps(&seq, policy);
        if params.gop.irap_mode == IrapMode::ConstrainedOpenGop {
            seq = apply_rasl_constraints(&seq, mode)?;
        }
        Ok(Representation {
            id: params.id,
            width: params.width,
            height: params.height,
            scaling_window: window,
            sequence: seq,
            aps_events,
            sps: params.sps,
            rd_curve: params.rd_curve,
            operating_point: params.operating_point,
        })
    }

    pub fn gop_config(&self) -> &GopConfig {
        &self.sequence.config
    }

    pub fn operating_point(&self) -> &RdPoint {
        &self.rd_curve.points()[self.operating_point]
    }

    pub fn bitrate_kbps(&self) -> f64 {
        self.operating_point().rate_kbps
    }

    /// Steady-state weighted YUV-PSNR.
    pub fn quality_db(&self) -> f64 {
        self.operating_point().yuv()
    }

    pub fn params(&self) -> RepresentationParams {
        RepresentationParams {
            id: self.id.clone(),
            width: self.width,
            height: self.height,
            scaling_window: Some(self.scaling_window),
            gop: self.sequence.config,
            length: self.sequence.length,
            rd_curve: self.rd_curve.clone(),
            operating_point: self.operating_point,
            sps: self.sps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ladder {
    /// Sorted by bitrate, lowest first.
    pub representations: Vec<Representation>,
    /// Closed-GOP encode of the lowest variant, used for down-switches that
    /// resampling cannot bridge.
    pub fallback: Option<Representation>,
    pub sps: SpsModel,
    pub level_table: LevelTable,
    pub segment_duration_pics: u32,
    pub frame_rate: f64,
    pub switching_mode: SwitchingMode,
    pub transition: TransitionParams,
}

impl Ladder {
    pub fn new(
        mut representations: Vec<Representation>,
        sps: SpsModel,
        frame_rate: f64,
        switching_mode: SwitchingMode,
    ) -> Result<Self> {
        let Some(first) = representations.first() else {
            return Err(Error::invalid("ladder has no representations"));
        };
        if !(frame_rate.is_finite() && frame_rate > 0.0) {
            return Err(Error::invalid(format!(
                "frame rate {frame_rate} must be positive"
            )));
        }
        let segment_duration_pics = first.gop_config().segment_length;
        let length = first.sequence.length;
        let mut ids = BTreeSet::new();
        for r in &representations {
            if !ids.insert(r.id.as_str()) {
                return Err(Error::invalid(format!(
                    "duplicate representation id {}",
                    r.id
                )));
            }
            if r.gop_config().segment_length != segment_duration_pics {
                return Err(Error::invalid(format!(
                    "representation {} uses segments of {} pictures, ladder uses {segment_duration_pics}",
                    r.id,
                    r.gop_config().segment_length
                )));
            }
            if r.sequence.length != length {
                return Err(Error::invalid(format!(
                    "representation {} has {} pictures, ladder has {length}",
                    r.id, r.sequence.length
                )));
            }
        }
        representations.sort_by(|a, b| a.bitrate_kbps().total_cmp(&b.bitrate_kbps()));
        Ok(Ladder {
            representations,
            fallback: None,
            sps,
            level_table: LevelTable::default(),
            segment_duration_pics,
            frame_rate,
            switching_mode,
            transition: TransitionParams::default(),
        })
    }

    /// Adds a closed-GOP encode of the lowest representation, optionally
    /// with its own RD curve.
    pub fn with_fallback(mut self, rd_curve: Option<RdCurve>) -> Result<Self> {
        let lowest = self.lowest();
        let mut params = lowest.params();
        params.id = format!("{}-closed", lowest.id);
        params.gop.irap_mode = IrapMode::ClosedGop;
        if let Some(rd) = rd_curve {
            params.rd_curve = rd;
        }
        if self.representation(&params.id).is_some() {
            return Err(Error::invalid(format!(
                "fallback id {} is already taken",
                params.id
            )));
        }
        self.fallback = Some(Representation::encode(params, self.switching_mode)?);
        Ok(self)
    }

    pub fn with_transition(mut self, transition: TransitionParams) -> Result<Self> {
        transition.validate()?;
        self.transition = transition;
        Ok(self)
    }

    pub fn with_level_table(mut self, table: LevelTable) -> Self {
        self.level_table = table;
        self
    }

    pub fn lowest(&self) -> &Representation {
        &self.representations[0]
    }

    pub fn all_representations(&self) -> impl Iterator<Item = &Representation> {
        self.representations.iter().chain(self.fallback.iter())
    }

    pub fn representation(&self, id: &str) -> Option<&Representation> {
        self.all_representations().find(|r| r.id == id)
    }

    pub(crate) fn require(&self, id: &str) -> Result<&Representation> {
        self.representation(id)
            .ok_or_else(|| Error::invalid(format!("unknown representation `{id}`")))
    }

    pub fn segment_count(&self) -> usize {
        self.lowest().sequence.segments.len()
    }

    pub fn segment_duration_s(&self) -> f64 {
        f64::from(self.segment_duration_pics) / self.frame_rate
    }

    pub fn max_dimensions(&self) -> (u32, u32) {
        let w = self
            .all_representations()
            .map(|r| r.width)
            .max()
            .unwrap_or(0);
        let h = self
            .all_representations()
            .map(|r| r.height)
            .max()
            .unwrap_or(0);
        (w, h)
    }
}
