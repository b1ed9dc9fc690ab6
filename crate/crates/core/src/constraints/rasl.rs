use serde::{Deserialize, Serialize};

use super::report::{Location, RuleId, Violation};
use crate::error::{Error, Result};
use crate::gop::{CodedSequence, PictureKind, Poc};

/// What the ladder is prepared for.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchingMode {
    /// Resolution switching with reference picture resampling.
    #[default]
    FullRpr,
    /// Quality switching at a single resolution. The optical-flow tools
    /// only matter for resampled references and stay enabled.
    QpSwitchingOnly,
}

impl SwitchingMode {
    pub fn constrains_optical_flow(self) -> bool {
        matches!(self, SwitchingMode::FullRpr)
    }
}

/// RASL pictures of every CRA in the sequence, grouped per CRA and listed
/// in decode order.
pub(crate) fn rasl_sets(seq: &CodedSequence) -> Vec<(Poc, Vec<Poc>)> {
    seq.pictures
        .iter()
        .filter(|p| p.kind == PictureKind::Cra)
        .map(|cra| {
            let rasl = seq
                .leading_pictures_in_decode_order(cra.poc)
                .into_iter()
                .filter(|&p| seq.pictures[p as usize].kind == PictureKind::Rasl)
                .collect();
            (cra.poc, rasl)
        })
        .collect()
}

/// Restricts the RASL pictures of every CRA so their decoding does not
/// depend on motion or sample-derived parameters from the previous segment.
///
/// The first RASL picture in decode order takes the CRA as collocated
/// picture. Later RASL pictures keep their collocated picture unless it was
/// decoded before the CRA, in which case the lowest-layer reference at or
/// after the CRA replaces it. DMVR, CCLM and wraparound are switched off,
/// and in [`SwitchingMode::FullRpr`] BDOF and PROF as well.
pub fn apply_rasl_constraints(seq: &CodedSequence, mode: SwitchingMode) -> Result<CodedSequence> {
    if !seq.config.irap_mode.is_open() {
        return Err(Error::invalid(
            "closed-GOP sequences have no RASL pictures to constrain",
        ));
    }
    let mut out = seq.clone();
    for (cra, rasl) in rasl_sets(seq) {
        let cra_decode = seq.pictures[cra as usize].decode_idx;
        for (i, &poc) in rasl.iter().enumerate() {
            let collocated = if i == 0 {
                Some(cra)
            } else {
                let current = seq.pictures[poc as usize].collocated_ref;
                match current {
                    Some(c) if seq.pictures[c as usize].decode_idx >= cra_decode => Some(c),
                    _ => seq.pictures[poc as usize]
                        .refs
                        .iter()
                        .copied()
                        .filter(|&r| seq.pictures[r as usize].decode_idx >= cra_decode)
                        .min_by_key(|&r| (seq.pictures[r as usize].tid, r))
                        .or(Some(cra)),
                }
            };
            let pic = &mut out.pictures[poc as usize];
            pic.collocated_ref = collocated;
            pic.tools.dmvr = false;
            pic.tools.cclm = false;
            pic.tools.mc_wraparound = false;
            if mode.constrains_optical_flow() {
                pic.tools.bdof = false;
                pic.tools.prof = false;
            }
        }
    }
    Ok(out)
}

/// Pillar-one checks over every RASL picture.
pub fn check_rasl_constraints(seq: &CodedSequence, mode: SwitchingMode) -> Vec<Violation> {
    let mut out = Vec::new();
    for (cra, rasl) in rasl_sets(seq) {
        let cra_decode = seq.pictures[cra as usize].decode_idx;
        for (i, &poc) in rasl.iter().enumerate() {
            let pic = &seq.pictures[poc as usize];
            let loc = || Location::picture(pic.segment, poc);
            let t = &pic.tools;
            let mut flag = |on: bool, rule: RuleId, name: &str| {
                if on {
                    out.push(Violation::new(
                        rule,
                        loc(),
                        format!("{name} enabled on RASL picture {poc} of CRA {cra}"),
                    ));
                }
            };
            flag(t.dmvr, RuleId::RaslDmvr, "DMVR");
            if mode.constrains_optical_flow() {
                flag(t.bdof, RuleId::RaslBdof, "BDOF");
                flag(t.prof, RuleId::RaslProf, "PROF");
            }
            flag(t.cclm, RuleId::RaslCclm, "CCLM");
            flag(
                t.mc_wraparound,
                RuleId::RaslWraparound,
                "wraparound motion compensation",
            );

            if t.uses_temporal_mv() {
                let problem = match pic.collocated_ref {
                    Some(c) if seq.picture(c).is_some_and(|cp| cp.decode_idx < cra_decode) => Some(
                        format!("collocated picture {c} of RASL {poc} precedes CRA {cra} in decode order"),
                    ),
                    Some(c) if i == 0 && c != cra => Some(format!(
                        "first RASL picture {poc} uses collocated picture {c} instead of CRA {cra}"
                    )),
                    None if i == 0 => Some(format!(
                        "first RASL picture {poc} has no collocated picture, expected CRA {cra}"
                    )),
                    _ => None,
                };
                if let Some(message) = problem {
                    out.push(Violation::new(RuleId::RaslCollocated, loc(), message));
                }
            }
        }
    }
    out
}
