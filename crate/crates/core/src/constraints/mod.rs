//! Drift taxonomy of the inter-prediction tools and the three rule sets a
//! ladder must satisfy for drift-safe open-GOP switching:
//!
//! 1. RASL tool restrictions ([`apply_rasl_constraints`], [`check_rasl_constraints`]),
//! 2. APS self-containment per segment ([`check_aps_self_containment`]),
//! 3. SPS alignment across all variants ([`check_sps_alignment`]).
//!
//! [`validate_ladder`] runs all three.

mod aps;
mod rasl;
mod report;
mod sps;
mod tools;

pub use aps::{assign_aps, check_aps_self_containment, ApsEvent, ApsKind, ApsPolicy, DEFAULT_APS};
pub use rasl::{apply_rasl_constraints, check_rasl_constraints, SwitchingMode};
pub use report::{ConformanceReport, Location, RuleId, Severity, Violation, Warning};
pub use sps::{check_sps_alignment, ChromaFormat, LevelLimit, LevelTable, SpsModel};
pub use tools::{
    drift_category, drift_category_by_name, DriftAssessment, DriftCategory, DriftSeverity, Tool,
    ToolFlags,
};

pub(crate) use aps::resolve as resolve_aps;

use rayon::prelude::*;

use crate::gop::validate_structure;
use crate::switching::{rpr_legal, rpr_scaling_factors, Ladder, Representation};

/// Structure, pillar-one and pillar-two findings for one representation.
pub fn validate_representation(rep: &Representation, mode: SwitchingMode) -> Vec<Violation> {
    let mut out: Vec<Violation> = validate_structure(&rep.sequence)
        .into_iter()
        .map(|v| {
            Violation::new(
                RuleId::Structure,
                Location {
                    representation: None,
                    segment: v
                        .poc
                        .and_then(|p| rep.sequence.picture(p))
                        .map(|p| p.segment),
                    poc: v.poc,
                },
                format!("{}: {}", v.rule, v.message),
            )
        })
        .collect();
    out.extend(check_rasl_constraints(&rep.sequence, mode));
    out.extend(check_aps_self_containment(&rep.sequence, &rep.aps_events));
    for v in &mut out {
        v.location.representation = Some(rep.id.clone());
    }
    out
}

/// Runs all three rule sets over the ladder. Representations are checked in
/// parallel and merged in ladder order.
pub fn validate_ladder(ladder: &Ladder) -> ConformanceReport {
    let reps: Vec<&Representation> = ladder.all_representations().collect();
    let mut violations: Vec<Violation> = reps
        .par_iter()
        .map(|r| validate_representation(r, ladder.switching_mode))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    violations.extend(check_sps_alignment(ladder).unwrap_or_default());
    ConformanceReport::new(violations, illegal_pair_warnings(ladder))
}

/// Down-switch pairs that resampling cannot bridge when no closed-GOP
/// fallback exists.
pub fn illegal_pair_warnings(ladder: &Ladder) -> Vec<Warning> {
    if ladder.fallback.is_some() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for from in &ladder.representations {
        for to in &ladder.representations {
            if from.id == to.id {
                continue;
            }
            let Ok((h, v)) = rpr_scaling_factors(from, to) else {
                continue;
            };
            if !rpr_legal(h, v).unwrap_or(false) {
                out.push(Warning {
                    from: from.id.clone(),
                    to: to.id.clone(),
                    message: format!(
                        "direct switch needs scaling {h:.4}x{v:.4}, outside the resampling range, and no closed-GOP fallback is declared"
                    ),
                });
            }
        }
    }
    out
}
