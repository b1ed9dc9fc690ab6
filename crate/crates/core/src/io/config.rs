use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_file, read_rd_curve};
use crate::constraints::{ApsEvent, ApsKind, LevelTable, SpsModel, SwitchingMode, ToolFlags};
use crate::error::{Error, Result};
use crate::gop::{GopConfig, IrapMode, Poc};
use crate::quality::TransitionParams;
use crate::switching::{AbrConfig, Ladder, Representation, RepresentationParams, ScalingWindow};

/// On-disk ladder description. Relative RD-curve paths resolve against the
/// file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderConfigFile {
    pub frame_rate: f64,
    /// Pictures per representation, including the leading IDR.
    pub length: u32,
    pub segment_duration_pics: u32,
    #[serde(default)]
    pub switching_mode: SwitchingMode,
    /// Derive a closed-GOP encode of the lowest representation.
    #[serde(default)]
    pub fallback: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback_rd_curve: Option<PathBuf>,
    /// Defaults to a switchable SPS for the largest representation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sps: Option<SpsModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_table: Option<LevelTable>,
    #[serde(default)]
    pub abr: AbrConfig,
    #[serde(default)]
    pub transition: TransitionParams,
    pub representations: Vec<RepresentationConfig>,
    /// Extra RD pairs reported by `sim run` as BD-rate tables.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comparisons: Vec<ComparisonConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationConfig {
    pub id: String,
    pub width: u32,
    pub height: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling_window: Option<ScalingWindow>,
    pub gop: GopSpec,
    pub rd_curve: PathBuf,
    pub operating_point: usize,
    /// Replaces the ladder SPS for this representation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sps: Option<SpsModel>,
    /// Edits applied after encoding, used to seed faults.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub picture_overrides: Vec<PictureOverride>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_aps: Vec<ExtraAps>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GopSpec {
    pub gop_size: u32,
    pub irap_period: u32,
    pub mode: IrapMode,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolOverride {
    pub tmvp: Option<bool>,
    pub sbtmvp: Option<bool>,
    pub dmvr: Option<bool>,
    pub bdof: Option<bool>,
    pub prof: Option<bool>,
    pub cclm: Option<bool>,
    pub mc_wraparound: Option<bool>,
}

impl ToolOverride {
    fn apply(&self, t: &mut ToolFlags) {
        let set = |dst: &mut bool, v: Option<bool>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut t.tmvp, self.tmvp);
        set(&mut t.sbtmvp, self.sbtmvp);
        set(&mut t.dmvr, self.dmvr);
        set(&mut t.bdof, self.bdof);
        set(&mut t.prof, self.prof);
        set(&mut t.cclm, self.cclm);
        set(&mut t.mc_wraparound, self.mc_wraparound);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PictureOverride {
    pub poc: Poc,
    #[serde(default)]
    pub tools: ToolOverride,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collocated_ref: Option<Poc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refs: Option<Vec<Poc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aps_refs: Option<Vec<u32>>,
}

/// An APS carried in addition to the encoder's own.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraAps {
    pub aps_id: u32,
    pub carried_in_poc: Poc,
    pub kind: ApsKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonConfig {
    pub label: String,
    pub anchor: PathBuf,
    pub test: PathBuf,
}

/// A parsed ladder plus the knobs that live next to it.
#[derive(Debug, Clone)]
pub struct LoadedLadder {
    pub ladder: Ladder,
    pub abr: AbrConfig,
    pub config: LadderConfigFile,
    /// Every file read, in read order, for digesting.
    pub inputs: Vec<PathBuf>,
}

impl LadderConfigFile {
    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

pub fn load_ladder(path: &Path) -> Result<LoadedLadder> {
    let text = read_file(path)?;
    let config = LadderConfigFile::from_json(&text, path)?;
    build_ladder(config, path)
}

/// Builds a ladder from a parsed config; `path` anchors relative paths.
/// `fallback` in the config decides whether the closed-GOP variant exists.
pub fn build_ladder(config: LadderConfigFile, path: &Path) -> Result<LoadedLadder> {
    let base = path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &Path| {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };
    let mut inputs = vec![path.to_path_buf()];

    if config.representations.is_empty() {
        return Err(Error::invalid("ladder has no representations"));
    }
    let levels = config.level_table.clone().unwrap_or_default();
    let max_w = config
        .representations
        .iter()
        .map(|r| r.width)
        .max()
        .unwrap_or(0);
    let max_h = config
        .representations
        .iter()
        .map(|r| r.height)
        .max()
        .unwrap_or(0);
    let sps = config
        .sps
        .unwrap_or_else(|| SpsModel::switchable(max_w, max_h, &levels));

    let mut reps = Vec::with_capacity(config.representations.len());
    for rc in &config.representations {
        let rd_path = resolve(&rc.rd_curve);
        let rd_curve = read_rd_curve(&rd_path)?;
        inputs.push(rd_path);
        let gop = GopConfig::new(
            rc.gop.gop_size,
            rc.gop.irap_period,
            rc.gop.mode,
            config.segment_duration_pics,
        )
        .map_err(|e| Error::invalid(format!("representation {}: {e}", rc.id)))?;
        let mut rep = Representation::encode(
            RepresentationParams {
                id: rc.id.clone(),
                width: rc.width,
                height: rc.height,
                scaling_window: rc.scaling_window,
                gop,
                length: config.length,
                rd_curve,
                operating_point: rc.operating_point,
                sps: rc.sps.unwrap_or(sps),
            },
            config.switching_mode,
        )?;
        apply_overrides(&mut rep, rc)?;
        reps.push(rep);
    }

    let mut ladder = Ladder::new(reps, sps, config.frame_rate, config.switching_mode)?
        .with_level_table(levels)
        .with_transition(config.transition)?;
    if config.fallback {
        let rd = match &config.fallback_rd_curve {
            Some(p) => {
                let p = resolve(p);
                let c = read_rd_curve(&p)?;
                inputs.push(p);
                Some(c)
            }
            None => None,
        };
        ladder = ladder.with_fallback(rd)?;
    }
    for c in &config.comparisons {
        inputs.push(resolve(&c.anchor));
        inputs.push(resolve(&c.test));
    }
    config.abr.validate()?;
    let mut seen = std::collections::BTreeSet::new();
    inputs.retain(|p| seen.insert(p.clone()));
    Ok(LoadedLadder {
        ladder,
        abr: config.abr,
        config,
        inputs,
    })
}

fn apply_overrides(rep: &mut Representation, rc: &RepresentationConfig) -> Result<()> {
    let length = rep.sequence.length;
    let bad_poc = |poc: Poc| {
        Error::invalid(format!(
            "representation {}: override poc {poc} outside 0..{length}",
            rc.id
        ))
    };
    for o in &rc.picture_overrides {
        let pic = rep
            .sequence
            .picture_mut(o.poc)
            .ok_or_else(|| bad_poc(o.poc))?;
        o.tools.apply(&mut pic.tools);
        if let Some(c) = o.collocated_ref {
            pic.collocated_ref = Some(c);
        }
        if let Some(r) = &o.refs {
            pic.refs = r.clone();
        }
        if let Some(a) = &o.aps_refs {
            pic.aps_refs = a.clone();
        }
    }
    for e in &rc.extra_aps {
        let pic = rep
            .sequence
            .picture(e.carried_in_poc)
            .ok_or_else(|| bad_poc(e.carried_in_poc))?;
        rep.aps_events.push(ApsEvent {
            aps_id: e.aps_id,
            carried_in_poc: e.carried_in_poc,
            segment_index: pic.segment,
            kind: e.kind,
        });
    }
    Ok(())
}

impl LoadedLadder {
    /// Same ladder with the fallback forced on or off.
    pub fn with_fallback_flag(self, on: bool, path: &Path) -> Result<Self> {
        if on == self.config.fallback {
            return Ok(self);
        }
        let mut config = self.config;
        config.fallback = on;
        build_ladder(config, path)
    }
}
