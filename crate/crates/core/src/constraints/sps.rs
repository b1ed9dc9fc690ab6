use serde::{Deserialize, Serialize};

use super::report::{Location, RuleId, Violation};
use crate::error::{Error, Result};
use crate::switching::Ladder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChromaFormat {
    Monochrome,
    Yuv420,
    Yuv422,
    Yuv444,
}

/// The sequence parameter set fields that decide whether two variants can
/// be spliced without starting a new coded layer video sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpsModel {
    pub max_width: u32,
    pub max_height: u32,
    pub chroma_format: ChromaFormat,
    pub bit_depth: u32,
    pub ctu_size: u32,
    pub level_idc: u32,
    pub rpr_enabled: bool,
    pub res_change_allowed: bool,
    pub gci_no_res_change: bool,
    pub subpictures_enabled: bool,
}

impl SpsModel {
    /// A switchable SPS for a ladder whose largest picture is
    /// `max_width`x`max_height`.
    pub fn switchable(max_width: u32, max_height: u32, levels: &LevelTable) -> Self {
        SpsModel {
            max_width,
            max_height,
            chroma_format: ChromaFormat::Yuv420,
            bit_depth: 10,
            ctu_size: 128,
            level_idc: levels
                .min_level_for(max_width, max_height)
                .unwrap_or(levels.highest()),
            rpr_enabled: true,
            res_change_allowed: true,
            gci_no_res_change: false,
            subpictures_enabled: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelLimit {
    pub level_idc: u32,
    /// Maximum luma picture size in samples.
    pub max_luma_ps: u64,
}

/// Picture-size limits per level. Deployment data: the shipped default
/// carries the VVC maximum luma picture sizes and ignores sample-rate
/// limits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LevelTable(pub Vec<LevelLimit>);

impl Default for LevelTable {
    fn default() -> Self {
        let rows = [
            (16, 36_864),
            (32, 122_880),
            (35, 245_760),
            (48, 552_960),
            (51, 983_040),
            (64, 2_228_224),
            (67, 2_228_224),
            (80, 8_912_896),
            (83, 8_912_896),
            (86, 8_912_896),
            (96, 35_651_584),
            (99, 35_651_584),
            (102, 35_651_584),
        ];
        LevelTable(
            rows.into_iter()
                .map(|(level_idc, max_luma_ps)| LevelLimit {
                    level_idc,
                    max_luma_ps,
                })
                .collect(),
        )
    }
}

impl LevelTable {
    /// Lowest level whose picture-size limit covers the given size.
    pub fn min_level_for(&self, width: u32, height: u32) -> Option<u32> {
        let size = u64::from(width) * u64::from(height);
        self.0
            .iter()
            .filter(|l| l.max_luma_ps >= size)
            .map(|l| l.level_idc)
            .min()
    }

    pub fn highest(&self) -> u32 {
        self.0.iter().map(|l| l.level_idc).max().unwrap_or(0)
    }
}

/// Pillar three: every variant's SPS must match the ladder's shared SPS and
/// advertise the largest picture size with resampling allowed.
pub fn check_sps_alignment(ladder: &Ladder) -> Result<Vec<Violation>> {
    let reps: Vec<_> = ladder.all_representations().collect();
    if reps.is_empty() {
        return Err(Error::invalid("ladder has no representations"));
    }
    let max_w = reps.iter().map(|r| r.width).max().unwrap_or(0);
    let max_h = reps.iter().map(|r| r.height).max().unwrap_or(0);
    let shared = &ladder.sps;
    let min_level = ladder.level_table.min_level_for(max_w, max_h);

    let mut out = Vec::new();
    for rep in reps {
        let sps = &rep.sps;
        let loc = || Location::representation(&rep.id);
        let mut push =
            |rule: RuleId, message: String| out.push(Violation::new(rule, loc(), message));

        if sps.chroma_format != shared.chroma_format {
            push(
                RuleId::SpsChromaFormat,
                format!(
                    "chroma format {:?} differs from the ladder's {:?}",
                    sps.chroma_format, shared.chroma_format
                ),
            );
        }
        if sps.bit_depth != shared.bit_depth {
            push(
                RuleId::SpsBitDepth,
                format!(
                    "bit depth {} differs from the ladder's {}",
                    sps.bit_depth, shared.bit_depth
                ),
            );
        }
        if sps.ctu_size != shared.ctu_size {
            push(
                RuleId::SpsCtuSize,
                format!(
                    "CTU size {} differs from the ladder's {}",
                    sps.ctu_size, shared.ctu_size
                ),
            );
        }
        if sps.max_width < max_w || sps.max_height < max_h {
            push(
                RuleId::SpsMaxResolution,
                format!(
                    "SPS maximum {}x{} is below the ladder maximum {max_w}x{max_h}",
                    sps.max_width, sps.max_height
                ),
            );
        }
        if !sps.rpr_enabled {
            push(
                RuleId::SpsRprDisabled,
                "reference picture resampling is disabled".into(),
            );
        }
        if !sps.res_change_allowed {
            push(
                RuleId::SpsResChangeDisallowed,
                "resolution change within the CLVS is not allowed".into(),
            );
        }
        if sps.gci_no_res_change {
            push(
                RuleId::SpsGciNoResChange,
                "general constraint forbids resolution change within the CLVS".into(),
            );
        }
        if sps.subpictures_enabled {
            push(
                RuleId::SpsSubpictures,
                "independently coded subpictures must be off to use resampling".into(),
            );
        }
        match min_level {
            Some(min) if sps.level_idc < min => push(
                RuleId::SpsLevel,
                format!(
                    "level_idc {} does not cover {max_w}x{max_h} (needs {min})",
                    sps.level_idc
                ),
            ),
            None => push(
                RuleId::SpsLevel,
                format!("no level in the table covers {max_w}x{max_h}"),
            ),
            _ => {}
        }
    }
    Ok(out)
}
