use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{rpr_legal, rpr_scaling_factors, CodecCapabilities, Ladder, Representation};
use crate::constraints::{
    check_aps_self_containment, check_rasl_constraints, check_sps_alignment, resolve_aps,
    DriftCategory, Location, RuleId, Severity, SwitchingMode, Violation,
};
use crate::error::{Error, Result};
use crate::gop::{IrapMode, PictureKind, Poc};
use crate::quality::{transition_profile, Direction};

/// A change of representation at the start of segment
/// `boundary_segment_index`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub boundary_segment_index: usize,
    pub from_rep: String,
    pub to_rep: String,
}

impl SwitchEvent {
    pub fn new(boundary_segment_index: usize, from_rep: &str, to_rep: &str) -> Self {
        SwitchEvent {
            boundary_segment_index,
            from_rep: from_rep.to_string(),
            to_rep: to_rep.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SwitchOutcome {
    Seamless,
    GracefulDrift {
        /// Leading pictures of the target CRA, by POC.
        affected_pocs: Vec<Poc>,
        /// Predicted weighted YUV-PSNR, aligned with `affected_pocs`.
        predicted_quality_series: Vec<f64>,
        clamped: bool,
    },
    SevereArtefactRisk {
        causes: Vec<DriftCategory>,
    },
    NonConformant {
        violations: Vec<Violation>,
    },
    DroppedPictures {
        dropped_pocs: Vec<Poc>,
    },
    IllegalRprRatio {
        h_factor: f64,
        v_factor: f64,
    },
    NotASwitchPoint,
}

impl SwitchOutcome {
    pub fn kind(&self) -> &'static str {
        match self {
            SwitchOutcome::Seamless => "seamless",
            SwitchOutcome::GracefulDrift { .. } => "graceful_drift",
            SwitchOutcome::SevereArtefactRisk { .. } => "severe_artefact_risk",
            SwitchOutcome::NonConformant { .. } => "non_conformant",
            SwitchOutcome::DroppedPictures { .. } => "dropped_pictures",
            SwitchOutcome::IllegalRprRatio { .. } => "illegal_rpr_ratio",
            SwitchOutcome::NotASwitchPoint => "not_a_switch_point",
        }
    }

    pub const KINDS: [&'static str; 7] = [
        "seamless",
        "graceful_drift",
        "severe_artefact_risk",
        "non_conformant",
        "dropped_pictures",
        "illegal_rpr_ratio",
        "not_a_switch_point",
    ];
}

/// Classifies a switch. The first matching step wins:
///
/// 1. the target segment does not start with an IRAP: `NotASwitchPoint`;
/// 2. it starts with an IDR, or with a CRA without leading pictures:
///    `Seamless`;
/// 3. resolution changes and the decoder cannot resample:
///    `DroppedPictures`;
/// 4. resolution changes beyond the resampling range: `IllegalRprRatio`;
/// 5. conformance rules touching the boundary fail: `NonConformant`;
/// 6. leading pictures use high-severity drift paths:
///    `SevereArtefactRisk`;
/// 7. otherwise `GracefulDrift` over the leading pictures.
///
/// Equal ids denote a continuation and are `Seamless`.
pub fn evaluate_switch(
    ladder: &Ladder,
    event: &SwitchEvent,
    caps: CodecCapabilities,
) -> Result<SwitchOutcome> {
    let from = ladder.require(&event.from_rep)?;
    let to = ladder.require(&event.to_rep)?;
    let k = event.boundary_segment_index;
    let count = to.sequence.segments.len();
    if k == 0 || k >= count {
        return Err(Error::invalid(format!(
            "boundary segment {k} is not between two of the {count} segments"
        )));
    }
    if from.id == to.id {
        return Ok(SwitchOutcome::Seamless);
    }

    let segment = &to.sequence.segments[k];
    if !segment.starts_with_irap {
        return Ok(SwitchOutcome::NotASwitchPoint);
    }
    let irap = segment.first_poc();
    if to.sequence.pictures[irap as usize].kind == PictureKind::Idr {
        return Ok(SwitchOutcome::Seamless);
    }
    let leading = to.sequence.leading_pictures(irap);
    if leading.is_empty() {
        return Ok(SwitchOutcome::Seamless);
    }

    let (h, v) = rpr_scaling_factors(from, to)?;
    let resampled = h != 1.0 || v != 1.0;
    if resampled && !caps.supports_rpr {
        return Ok(SwitchOutcome::DroppedPictures {
            dropped_pocs: leading,
        });
    }
    if resampled && !rpr_legal(h, v)? {
        return Ok(SwitchOutcome::IllegalRprRatio {
            h_factor: h,
            v_factor: v,
        });
    }

    let stale = stale_aps(from, to, k);
    let violations = boundary_violations(ladder, from, to, k, &leading, resampled, &stale)?;
    if !violations.is_empty() {
        return Ok(SwitchOutcome::NonConformant { violations });
    }

    let causes = drift_causes(to, irap, &leading, &stale);
    if !causes.is_empty() {
        return Ok(SwitchOutcome::SevereArtefactRisk { causes });
    }

    let (direction, high, low) = if to.quality_db() > from.quality_db() {
        (Direction::Up, to.quality_db(), from.quality_db())
    } else {
        (Direction::Down, from.quality_db(), to.quality_db())
    };
    let profile = transition_profile(direction, high, low, leading.len(), &ladder.transition)?;
    Ok(SwitchOutcome::GracefulDrift {
        affected_pocs: leading,
        predicted_quality_series: profile.values,
        clamped: profile.clamped,
    })
}

/// An APS read in segment `k` of `to` whose copy lives in an earlier
/// segment. After the switch the decoder holds `from`'s content for that
/// id, or nothing at all.
struct StaleAps {
    poc: Poc,
    aps_id: u32,
    /// `from` carried some APS with the same id before the boundary.
    coincident: bool,
}

fn stale_aps(from: &Representation, to: &Representation, k: usize) -> Vec<StaleAps> {
    let seq = &to.sequence;
    let mut out = Vec::new();
    for &poc in &seq.segments[k].picture_pocs {
        let pic = &seq.pictures[poc as usize];
        for &id in &pic.aps_refs {
            let carrier_segment = resolve_aps(seq, &to.aps_events, id, pic.decode_idx)
                .and_then(|e| seq.picture(e.carried_in_poc))
                .map(|p| p.segment);
            // Unresolvable ids are reported by the self-containment check.
            if carrier_segment.is_some_and(|s| s < k) {
                let coincident = from
                    .aps_events
                    .iter()
                    .any(|e| e.aps_id == id && e.segment_index < k);
                out.push(StaleAps {
                    poc,
                    aps_id: id,
                    coincident,
                });
            }
        }
    }
    out
}

fn boundary_violations(
    ladder: &Ladder,
    from: &Representation,
    to: &Representation,
    k: usize,
    leading: &[Poc],
    resampled: bool,
    stale: &[StaleAps],
) -> Result<Vec<Violation>> {
    let mut out: Vec<Violation> = check_sps_alignment(ladder)?
        .into_iter()
        .filter(|v| {
            v.location
                .representation
                .as_deref()
                .is_some_and(|r| r == from.id || r == to.id)
        })
        .collect();

    let in_leading = |v: &Violation| v.location.poc.is_some_and(|p| leading.contains(&p));
    let mut seen = BTreeSet::new();
    let mut add_rasl = |out: &mut Vec<Violation>, v: Violation| {
        if seen.insert((v.rule_id, v.location.poc)) {
            out.push(v.in_representation(&to.id));
        }
    };
    let constrained = to.gop_config().irap_mode == IrapMode::ConstrainedOpenGop;
    if constrained {
        for v in check_rasl_constraints(&to.sequence, ladder.switching_mode) {
            if in_leading(&v) {
                add_rasl(&mut out, v);
            }
        }
    }
    if resampled {
        // Tools the decoder cannot run across a resampled reference.
        for v in check_rasl_constraints(&to.sequence, SwitchingMode::FullRpr) {
            let rpr_rule = matches!(
                v.rule_id,
                RuleId::RaslDmvr | RuleId::RaslBdof | RuleId::RaslProf | RuleId::RaslWraparound
            );
            if rpr_rule && in_leading(&v) {
                add_rasl(&mut out, v);
            }
        }
    }

    for v in check_aps_self_containment(&to.sequence, &to.aps_events) {
        let here = v.location.segment == Some(k);
        let relevant = v.rule_id == RuleId::ApsMissing || constrained;
        if here && relevant {
            out.push(v.in_representation(&to.id));
        }
    }
    for s in stale.iter().filter(|s| !s.coincident && !constrained) {
        let seg = to.sequence.pictures[s.poc as usize].segment;
        out.push(
            Violation::new(
                RuleId::ApsMissing,
                Location::picture(seg, s.poc).in_representation(&to.id),
                format!(
                    "APS {} is carried before segment {k} and {} never sent it",
                    s.aps_id, from.id
                ),
            )
            .with_severity(Severity::DecoderCrashRisk),
        );
    }
    Ok(out)
}

/// High-severity drift paths open on the target's leading pictures.
fn drift_causes(
    to: &Representation,
    irap: Poc,
    leading: &[Poc],
    stale: &[StaleAps],
) -> Vec<DriftCategory> {
    let seq = &to.sequence;
    let irap_decode = seq.pictures[irap as usize].decode_idx;
    let mut causes = BTreeSet::new();
    for &poc in leading {
        let pic = &seq.pictures[poc as usize];
        let t = &pic.tools;
        let crossing_col = pic
            .collocated_ref
            .and_then(|c| seq.picture(c))
            .is_some_and(|c| c.decode_idx < irap_decode);
        if t.uses_temporal_mv() && crossing_col {
            causes.insert(DriftCategory::SyntaxToSyntax);
        }
        if t.dmvr || t.cclm {
            causes.insert(DriftCategory::SampleToSyntax);
        }
    }
    if stale.iter().any(|s| s.coincident) {
        causes.insert(DriftCategory::ParameterSet);
    }
    causes.into_iter().collect()
}
