use serde::{Deserialize, Serialize};

use super::report::{Location, RuleId, Severity, Violation};
use crate::gop::{CodedSequence, PictureKind, Poc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApsKind {
    Alf,
    Lmcs,
    ScalingList,
}

/// An adaptation parameter set carried in the access unit of a picture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApsEvent {
    pub aps_id: u32,
    pub carried_in_poc: Poc,
    pub segment_index: usize,
    pub kind: ApsKind,
}

/// Where APS content is (re)sent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApsPolicy {
    /// Sent once with the first picture and reused afterwards.
    StreamStart,
    /// Re-sent with every IRAP, the way closed-GOP encoding resets it.
    ResetAtIrap,
}

/// APS sets every picture reads by default: one ALF and one LMCS set.
pub const DEFAULT_APS: [(u32, ApsKind); 2] = [(0, ApsKind::Alf), (1, ApsKind::Lmcs)];

/// Assigns the default APS usage to every picture and emits the carrying
/// events according to `policy`.
pub fn assign_aps(seq: &CodedSequence, policy: ApsPolicy) -> (CodedSequence, Vec<ApsEvent>) {
    let mut out = seq.clone();
    for p in &mut out.pictures {
        p.aps_refs = DEFAULT_APS.iter().map(|&(id, _)| id).collect();
    }
    let carriers: Vec<&crate::gop::Picture> = match policy {
        ApsPolicy::StreamStart => out.pictures.iter().take(1).collect(),
        ApsPolicy::ResetAtIrap => out.pictures.iter().filter(|p| p.kind.is_irap()).collect(),
    };
    let events = carriers
        .into_iter()
        .flat_map(|p| {
            DEFAULT_APS.iter().map(move |&(aps_id, kind)| ApsEvent {
                aps_id,
                carried_in_poc: p.poc,
                segment_index: p.segment,
                kind,
            })
        })
        .collect();
    (out, events)
}

/// The event that supplies `aps_id` to the picture decoded at `decode_idx`:
/// the latest one carried at or before it.
pub(crate) fn resolve<'a>(
    seq: &CodedSequence,
    events: &'a [ApsEvent],
    aps_id: u32,
    decode_idx: u32,
) -> Option<&'a ApsEvent> {
    events
        .iter()
        .filter(|e| e.aps_id == aps_id)
        .filter_map(|e| seq.picture(e.carried_in_poc).map(|p| (p.decode_idx, e)))
        .filter(|&(d, _)| d <= decode_idx)
        .max_by_key(|&(d, _)| d)
        .map(|(_, e)| e)
}

/// Segment index of the latest IRAP-led segment at or before `segment`.
fn switch_segment(seq: &CodedSequence, segment: usize) -> usize {
    seq.segments[..=segment]
        .iter()
        .rev()
        .find(|s| s.starts_with_irap)
        .map(|s| s.index)
        .unwrap_or(0)
}

/// Flags every picture that reads an APS whose latest copy was carried in
/// a segment before the one it can be entered from.
pub fn check_aps_self_containment(seq: &CodedSequence, events: &[ApsEvent]) -> Vec<Violation> {
    let mut out = Vec::new();
    for poc in seq.decode_order() {
        let pic = &seq.pictures[poc as usize];
        let entry = switch_segment(seq, pic.segment);
        let mut stale = Vec::new();
        let mut missing = Vec::new();
        for &id in &pic.aps_refs {
            match resolve(seq, events, id, pic.decode_idx) {
                None => missing.push(id),
                Some(e) => {
                    let carrier_segment = seq
                        .picture(e.carried_in_poc)
                        .map(|p| p.segment)
                        .unwrap_or(e.segment_index);
                    if carrier_segment < entry {
                        stale.push((id, e.carried_in_poc, carrier_segment));
                    }
                }
            }
        }
        let severity = if pic.kind == PictureKind::Rasl {
            Severity::DecoderCrashRisk
        } else {
            Severity::Error
        };
        if !stale.is_empty() {
            let detail: Vec<String> = stale
                .iter()
                .map(|(id, c, s)| format!("APS {id} from POC {c} in segment {s}"))
                .collect();
            out.push(
                Violation::new(
                    RuleId::ApsCrossSegment,
                    Location::picture(pic.segment, poc),
                    format!(
                        "{} picture {poc} in segment {} reads {}",
                        pic.kind,
                        pic.segment,
                        detail.join(", ")
                    ),
                )
                .with_severity(severity),
            );
        }
        if !missing.is_empty() {
            out.push(
                Violation::new(
                    RuleId::ApsMissing,
                    Location::picture(pic.segment, poc),
                    format!("picture {poc} reads APS {missing:?} that was never carried"),
                )
                .with_severity(severity),
            );
        }
    }
    out
}
