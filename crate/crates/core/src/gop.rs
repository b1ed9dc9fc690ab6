//! Structural model of hierarchical GOP coded sequences.
//!
//! A sequence is POC 0 coded as a lone IDR followed by whole dyadic GOPs.
//! Every non-anchor picture predicts from its two dyadic brackets, the
//! nearest lower-layer pictures below and above it in presentation order.
//! GOP anchors that land on a multiple of the IRAP period become IDR or CRA
//! pictures, and the rest of their GOP turns into leading pictures.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constraints::ToolFlags;
use crate::error::{Error, Result};

/// Presentation order count.
pub type Poc = u32;

/// Largest hierarchical GOP the decoded picture buffer can hold.
pub const MAX_GOP_SIZE: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PictureKind {
    Idr,
    Cra,
    Rasl,
    Radl,
    Trail,
}

impl PictureKind {
    pub fn is_irap(self) -> bool {
        matches!(self, PictureKind::Idr | PictureKind::Cra)
    }

    pub fn is_leading(self) -> bool {
        matches!(self, PictureKind::Rasl | PictureKind::Radl)
    }
}

impl fmt::Display for PictureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PictureKind::Idr => "IDR",
            PictureKind::Cra => "CRA",
            PictureKind::Rasl => "RASL",
            PictureKind::Radl => "RADL",
            PictureKind::Trail => "TRAIL",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Picture {
    pub poc: Poc,
    pub decode_idx: u32,
    pub tid: u32,
    pub kind: PictureKind,
    /// Pictures used for sample prediction.
    pub refs: Vec<Poc>,
    /// Source of temporal motion vector candidates.
    pub collocated_ref: Option<Poc>,
    pub tools: ToolFlags,
    /// APS identifiers this picture reads.
    pub aps_refs: Vec<u32>,
    pub segment: usize,
}

/// How IRAP pictures are coded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IrapMode {
    /// IDR pictures; nothing predicts across the IRAP.
    #[serde(rename = "closed")]
    ClosedGop,
    /// CRA pictures with unconstrained RASL pictures.
    #[serde(rename = "open")]
    OpenGop,
    /// CRA pictures whose RASL pictures follow the switching constraints.
    #[serde(rename = "constrained_open")]
    ConstrainedOpenGop,
}

impl IrapMode {
    pub fn is_open(self) -> bool {
        !matches!(self, IrapMode::ClosedGop)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            IrapMode::ClosedGop => "closed",
            IrapMode::OpenGop => "open",
            IrapMode::ConstrainedOpenGop => "constrained_open",
        }
    }
}

impl fmt::Display for IrapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IrapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" | "closed_gop" | "idr" => Ok(IrapMode::ClosedGop),
            "open" | "open_gop" | "cra" => Ok(IrapMode::OpenGop),
            "constrained" | "constrained_open" | "constrained_open_gop" => {
                Ok(IrapMode::ConstrainedOpenGop)
            }
            other => Err(Error::invalid(format!(
                "unknown irap mode `{other}` (expected closed, open or constrained_open)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GopConfig {
    pub gop_size: u32,
    pub irap_period: u32,
    #[serde(rename = "mode")]
    pub irap_mode: IrapMode,
    pub segment_length: u32,
}

impl GopConfig {
    pub fn new(
        gop_size: u32,
        irap_period: u32,
        irap_mode: IrapMode,
        segment_length: u32,
    ) -> Result<Self> {
        let config = GopConfig {
            gop_size,
            irap_period,
            irap_mode,
            segment_length,
        };
        config.validate()?;
        Ok(config)
    }

    /// Segments aligned with the IRAP period.
    pub fn aligned(gop_size: u32, irap_period: u32, irap_mode: IrapMode) -> Result<Self> {
        Self::new(gop_size, irap_period, irap_mode, irap_period)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gop_size.is_power_of_two() {
            return Err(Error::invalid(format!(
                "gop size {} must be a power of two",
                self.gop_size
            )));
        }
        if self.gop_size > MAX_GOP_SIZE {
            return Err(Error::invalid(format!(
                "gop size {} exceeds the maximum of {MAX_GOP_SIZE}",
                self.gop_size
            )));
        }
        if self.irap_period == 0 || !self.irap_period.is_multiple_of(self.gop_size) {
            return Err(Error::invalid(format!(
                "irap period {} must be a positive multiple of the gop size {}",
                self.irap_period, self.gop_size
            )));
        }
        if self.segment_length == 0
            || !self.irap_period.is_multiple_of(self.segment_length)
            || !self.segment_length.is_multiple_of(self.gop_size)
        {
            return Err(Error::invalid(format!(
                "segment length {} must divide the irap period {} and be a multiple of the gop size {}",
                self.segment_length, self.irap_period, self.gop_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub index: usize,
    /// Member pictures in decode order.
    pub picture_pocs: Vec<Poc>,
    pub starts_with_irap: bool,
    pub duration_pics: u32,
}

impl Segment {
    pub fn first_poc(&self) -> Poc {
        self.picture_pocs[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodedSequence {
    pub config: GopConfig,
    pub length: u32,
    /// Indexed by POC.
    pub pictures: Vec<Picture>,
    pub segments: Vec<Segment>,
}

impl CodedSequence {
    pub fn picture(&self, poc: Poc) -> Option<&Picture> {
        self.pictures.get(poc as usize)
    }

    pub fn picture_mut(&mut self, poc: Poc) -> Option<&mut Picture> {
        self.pictures.get_mut(poc as usize)
    }

    /// POCs sorted by decode index.
    pub fn decode_order(&self) -> Vec<Poc> {
        let mut order: Vec<&Picture> = self.pictures.iter().collect();
        order.sort_by_key(|p| p.decode_idx);
        order.into_iter().map(|p| p.poc).collect()
    }

    pub fn irap_pocs(&self) -> Vec<Poc> {
        self.pictures
            .iter()
            .filter(|p| p.kind.is_irap())
            .map(|p| p.poc)
            .collect()
    }

    /// Pictures that follow `irap_poc` in decode order but precede it in
    /// presentation order, sorted by POC.
    pub fn leading_pictures(&self, irap_poc: Poc) -> Vec<Poc> {
        let Some(irap) = self.picture(irap_poc) else {
            return Vec::new();
        };
        self.pictures
            .iter()
            .filter(|p| p.decode_idx > irap.decode_idx && p.poc < irap_poc)
            .map(|p| p.poc)
            .collect()
    }

    /// Leading pictures sorted by decode index.
    pub fn leading_pictures_in_decode_order(&self, irap_poc: Poc) -> Vec<Poc> {
        let mut pocs = self.leading_pictures(irap_poc);
        pocs.sort_by_key(|&p| self.pictures[p as usize].decode_idx);
        pocs
    }

    /// The IRAP a leading picture belongs to: the first IRAP above it in
    /// presentation order.
    pub fn associated_irap(&self, poc: Poc) -> Option<Poc> {
        self.pictures[poc as usize..]
            .iter()
            .find(|p| p.kind.is_irap())
            .map(|p| p.poc)
    }

    /// Number of pictures of the given kind.
    pub fn count_kind(&self, kind: PictureKind) -> usize {
        self.pictures.iter().filter(|p| p.kind == kind).count()
    }

    /// Pictures whose references reach behind an IRAP they follow in decode
    /// order.
    pub fn pictures_crossing_irap(&self) -> Vec<Poc> {
        let irap_decode: Vec<u32> = self
            .pictures
            .iter()
            .filter(|p| p.kind.is_irap())
            .map(|p| p.decode_idx)
            .collect();
        self.pictures
            .iter()
            .filter(|p| {
                p.refs.iter().any(|&r| {
                    let Some(r) = self.picture(r) else {
                        return false;
                    };
                    irap_decode
                        .iter()
                        .any(|&i| r.decode_idx < i && i <= p.decode_idx && i != p.decode_idx)
                })
            })
            .map(|p| p.poc)
            .collect()
    }
}

fn check_gop_size(gop_size: u32) -> Result<()> {
    if gop_size == 0 || !gop_size.is_power_of_two() {
        return Err(Error::invalid(format!(
            "gop size {gop_size} must be a power of two"
        )));
    }
    Ok(())
}

/// Temporal layer of the picture at `offset_in_gop` (1-based, the anchor
/// sits at `gop_size`).
pub fn tid_of(offset_in_gop: u32, gop_size: u32) -> Result<u32> {
    check_gop_size(gop_size)?;
    if offset_in_gop == 0 || offset_in_gop > gop_size {
        return Err(Error::invalid(format!(
            "offset {offset_in_gop} outside 1..={gop_size}"
        )));
    }
    Ok(gop_size.trailing_zeros() - offset_in_gop.trailing_zeros())
}

/// Coding order of the offsets inside one GOP: the anchor, then a
/// depth-first midpoint split that visits lower offsets first.
pub fn build_decode_order(gop_size: u32) -> Result<Vec<u32>> {
    check_gop_size(gop_size)?;
    let mut order = Vec::with_capacity(gop_size as usize);
    order.push(gop_size);
    split(0, gop_size, &mut order);
    Ok(order)
}

fn split(lo: u32, hi: u32, out: &mut Vec<u32>) {
    if hi - lo < 2 {
        return;
    }
    let mid = lo + (hi - lo) / 2;
    out.push(mid);
    split(lo, mid, out);
    split(mid, hi, out);
}

/// Dyadic brackets of a non-anchor offset.
fn brackets(offset: u32) -> (u32, u32) {
    let step = 1 << offset.trailing_zeros();
    (offset - step, offset + step)
}

/// Builds the structural model of `length` pictures: POC 0 plus whole GOPs.
pub fn build_sequence(config: GopConfig, length: u32) -> Result<CodedSequence> {
    config.validate()?;
    let gop = config.gop_size;
    if length == 0 || !(length - 1).is_multiple_of(gop) {
        return Err(Error::invalid(format!(
            "sequence length {length} must be 1 + a multiple of the gop size {gop}"
        )));
    }
    let gop_order = build_decode_order(gop)?;
    let n_gops = (length - 1) / gop;

    let mut pictures: Vec<Option<Picture>> = vec![None; length as usize];
    pictures[0] = Some(Picture {
        poc: 0,
        decode_idx: 0,
        tid: 0,
        kind: PictureKind::Idr,
        refs: Vec::new(),
        collocated_ref: None,
        tools: ToolFlags::intra(),
        aps_refs: Vec::new(),
        segment: 0,
    });

    let mut decode_idx = 1;
    for g in 0..n_gops {
        let base = g * gop;
        let anchor = base + gop;
        let anchor_kind = if anchor.is_multiple_of(config.irap_period) {
            match config.irap_mode {
                IrapMode::ClosedGop => PictureKind::Idr,
                _ => PictureKind::Cra,
            }
        } else {
            PictureKind::Trail
        };
        let leading_kind = match anchor_kind {
            PictureKind::Idr => PictureKind::Radl,
            PictureKind::Cra => PictureKind::Rasl,
            _ => PictureKind::Trail,
        };

        for &offset in &gop_order {
            let poc = base + offset;
            let tid = tid_of(offset, gop)?;
            let (kind, refs) = if offset == gop {
                let refs = if anchor_kind.is_irap() {
                    Vec::new()
                } else {
                    vec![base]
                };
                (anchor_kind, refs)
            } else {
                let (lo, hi) = brackets(offset);
                let mut refs = vec![base + lo, base + hi];
                if leading_kind == PictureKind::Radl {
                    // Nothing before the IDR in decode order is available.
                    refs.retain(|&r| r != base);
                }
                (leading_kind, refs)
            };
            let collocated_ref = refs.iter().copied().min_by_key(|&r| {
                let t = if r % gop == 0 {
                    0
                } else {
                    tid_of(r % gop, gop).unwrap_or(0)
                };
                (t, r)
            });
            let tools = if kind.is_irap() {
                ToolFlags::intra()
            } else {
                ToolFlags::encoder_default()
            };
            pictures[poc as usize] = Some(Picture {
                poc,
                decode_idx,
                tid,
                kind,
                refs,
                collocated_ref,
                tools,
                aps_refs: Vec::new(),
                segment: 0,
            });
            decode_idx += 1;
        }
    }

    let mut pictures: Vec<Picture> = pictures
        .into_iter()
        .map(|p| p.expect("every POC is assigned"))
        .collect();
    let segments = segment_pictures(&mut pictures, config.segment_length);

    Ok(CodedSequence {
        config,
        length,
        pictures,
        segments,
    })
}

/// Cuts the decode order at every anchor whose POC is a multiple of the
/// segment length and records membership on each picture.
fn segment_pictures(pictures: &mut [Picture], segment_length: u32) -> Vec<Segment> {
    let mut order: Vec<usize> = (0..pictures.len()).collect();
    order.sort_by_key(|&i| pictures[i].decode_idx);

    let mut segments: Vec<Segment> = Vec::new();
    for i in order {
        let poc = pictures[i].poc;
        if segments.is_empty() || (poc > 0 && poc.is_multiple_of(segment_length)) {
            segments.push(Segment {
                index: segments.len(),
                picture_pocs: Vec::new(),
                starts_with_irap: pictures[i].kind.is_irap(),
                duration_pics: 0,
            });
        }
        let seg = segments.last_mut().expect("pushed above");
        seg.picture_pocs.push(poc);
        seg.duration_pics += 1;
        pictures[i].segment = seg.index;
    }
    segments
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureRule {
    FirstPictureNotIdr,
    DecodeOrderNotPermutation,
    UnknownReference,
    ReferenceNotYetDecoded,
    TemporalLayering,
    IdrWithReferences,
    IrapPlacement,
    LeadingPictureMisplaced,
    RaslWithoutCra,
    RadlReferencesBeforeIrap,
    SegmentPartition,
    SegmentIrapStart,
}

impl fmt::Display for StructureRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().unwrap_or("structure"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureViolation {
    pub poc: Option<Poc>,
    pub rule: StructureRule,
    pub message: String,
}

impl StructureViolation {
    fn new(poc: Option<Poc>, rule: StructureRule, message: String) -> Self {
        StructureViolation { poc, rule, message }
    }
}

/// Checks every structural invariant of a sequence. An empty result means
/// the sequence is well formed.
pub fn validate_structure(seq: &CodedSequence) -> Vec<StructureViolation> {
    use StructureRule::*;
    let mut out = Vec::new();
    let n = seq.pictures.len();

    match seq.pictures.first() {
        Some(p) if p.kind == PictureKind::Idr => {}
        Some(p) => out.push(StructureViolation::new(
            Some(0),
            FirstPictureNotIdr,
            format!("picture 0 is {}, expected IDR", p.kind),
        )),
        None => {
            out.push(StructureViolation::new(
                None,
                FirstPictureNotIdr,
                "sequence is empty".into(),
            ));
            return out;
        }
    }

    let mut seen = vec![false; n];
    for p in &seq.pictures {
        match seen.get_mut(p.decode_idx as usize) {
            Some(s) if !*s => *s = true,
            _ => out.push(StructureViolation::new(
                Some(p.poc),
                DecodeOrderNotPermutation,
                format!(
                    "decode index {} is duplicated or out of range",
                    p.decode_idx
                ),
            )),
        }
    }

    for p in &seq.pictures {
        if p.kind == PictureKind::Idr && !p.refs.is_empty() {
            out.push(StructureViolation::new(
                Some(p.poc),
                IdrWithReferences,
                format!("IDR picture {} references {:?}", p.poc, p.refs),
            ));
        }
        let mut checked = BTreeSet::new();
        for r in p.refs.iter().chain(p.collocated_ref.iter()) {
            if !checked.insert(*r) {
                continue;
            }
            let Some(rp) = seq.picture(*r) else {
                out.push(StructureViolation::new(
                    Some(p.poc),
                    UnknownReference,
                    format!("reference {r} is not part of the sequence"),
                ));
                continue;
            };
            if rp.decode_idx >= p.decode_idx {
                out.push(StructureViolation::new(
                    Some(p.poc),
                    ReferenceNotYetDecoded,
                    format!(
                        "reference {r} (decode {}) does not precede picture {} (decode {}) in decode order",
                        rp.decode_idx, p.poc, p.decode_idx
                    ),
                ));
            }
            if rp.tid > p.tid {
                out.push(StructureViolation::new(
                    Some(p.poc),
                    TemporalLayering,
                    format!(
                        "tid {} picture {} references tid {} picture {r}",
                        p.tid, p.poc, rp.tid
                    ),
                ));
            }
        }

        if p.kind.is_leading() {
            match seq.associated_irap(p.poc).and_then(|i| seq.picture(i)) {
                Some(irap) if irap.decode_idx < p.decode_idx => {
                    if p.kind == PictureKind::Rasl && irap.kind != PictureKind::Cra {
                        out.push(StructureViolation::new(
                            Some(p.poc),
                            RaslWithoutCra,
                            format!(
                                "RASL picture {} is associated with {} {}",
                                p.poc, irap.kind, irap.poc
                            ),
                        ));
                    }
                    if p.kind == PictureKind::Radl {
                        if let Some(&r) = p.refs.iter().find(|&&r| {
                            seq.picture(r)
                                .is_some_and(|rp| rp.decode_idx < irap.decode_idx)
                        }) {
                            out.push(StructureViolation::new(
                                Some(p.poc),
                                RadlReferencesBeforeIrap,
                                format!(
                                    "RADL picture {} references {r} from before IRAP {}",
                                    p.poc, irap.poc
                                ),
                            ));
                        }
                    }
                }
                _ => out.push(StructureViolation::new(
                    Some(p.poc),
                    LeadingPictureMisplaced,
                    format!(
                        "{} picture {} does not follow an IRAP in decode order",
                        p.kind, p.poc
                    ),
                )),
            }
        }
    }

    let period = seq.config.irap_period;
    for p in seq.pictures.iter().skip(1) {
        let expected = p.poc % period == 0;
        if p.kind.is_irap() != expected {
            out.push(StructureViolation::new(
                Some(p.poc),
                IrapPlacement,
                if expected {
                    format!("expected an IRAP at POC {}, found {}", p.poc, p.kind)
                } else {
                    format!("unexpected {} at POC {}", p.kind, p.poc)
                },
            ));
        }
    }

    let concatenated: Vec<Poc> = seq
        .segments
        .iter()
        .flat_map(|s| s.picture_pocs.iter().copied())
        .collect();
    if concatenated != seq.decode_order() {
        out.push(StructureViolation::new(
            None,
            SegmentPartition,
            "segments do not partition the decode order".into(),
        ));
    }
    for s in &seq.segments {
        let Some(&first) = s.picture_pocs.first() else {
            out.push(StructureViolation::new(
                None,
                SegmentPartition,
                format!("segment {} is empty", s.index),
            ));
            continue;
        };
        let first_is_irap = seq.picture(first).is_some_and(|p| p.kind.is_irap());
        if s.starts_with_irap && !first_is_irap {
            out.push(StructureViolation::new(
                Some(first),
                SegmentIrapStart,
                format!(
                    "segment {} is flagged IRAP-led but starts with POC {first}",
                    s.index
                ),
            ));
        }
        for &poc in &s.picture_pocs {
            if seq.picture(poc).is_some_and(|p| p.segment != s.index) {
                out.push(StructureViolation::new(
                    Some(poc),
                    SegmentPartition,
                    format!(
                        "picture {poc} is listed in segment {} but tagged otherwise",
                        s.index
                    ),
                ));
            }
        }
    }

    out
}
