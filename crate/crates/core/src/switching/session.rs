use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    evaluate_switch, run_abr, AbrConfig, AbrDecision, BandwidthTrace, CodecCapabilities, Ladder,
    SwitchEvent, SwitchOutcome,
};
use crate::error::{Error, Result};
use crate::gop::Poc;
use crate::quality::session_quality;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PictureStatus {
    Steady,
    Transition,
    /// Skipped by a decoder that cannot resample.
    Dropped,
    /// Not decodable after an illegal or non-conformant switch.
    Undecodable,
    /// Decoded with a high risk of visible artefacts.
    Artefact,
    /// Not contained in any fetched segment.
    Missing,
}

impl PictureStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PictureStatus::Steady => "steady",
            PictureStatus::Transition => "transition",
            PictureStatus::Dropped => "dropped",
            PictureStatus::Undecodable => "undecodable",
            PictureStatus::Artefact => "artefact",
            PictureStatus::Missing => "missing",
        }
    }

    pub fn is_gap(self) -> bool {
        matches!(
            self,
            PictureStatus::Dropped | PictureStatus::Undecodable | PictureStatus::Missing
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineEntry {
    pub poc: Poc,
    pub rep_id: String,
    pub quality_db: Option<f64>,
    pub status: PictureStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchRecord {
    pub segment: usize,
    pub from: String,
    pub requested: String,
    /// Representation actually played from this segment on.
    pub to: String,
    /// The request was rewritten to the closed-GOP fallback.
    pub fallback: bool,
    /// The request came from the ABR panic rule.
    pub panic: bool,
    #[serde(flatten)]
    pub outcome: SwitchOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub switch_counts: BTreeMap<String, usize>,
    pub mean_quality_db: Option<f64>,
    pub min_quality_db: Option<f64>,
    /// Mean quality over each graceful transition, in switch order.
    pub transition_means_db: Vec<Option<f64>>,
    pub dropped_pictures: usize,
    pub artefact_pictures: usize,
    pub stall_events: usize,
    pub stall_s: f64,
    pub panic_down_switches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    /// Representation played per segment.
    pub played: Vec<String>,
    pub switches: Vec<SwitchRecord>,
    pub timeline: Vec<TimelineEntry>,
    pub summary: SessionSummary,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub abr: Option<Vec<AbrDecision>>,
}

/// Plays `schedule` (one representation id per segment) and classifies
/// every change.
///
/// A change whose target cannot be reached by resampling is redirected to
/// the ladder's closed-GOP fallback when one exists; the fallback then
/// stands in for the lowest representation until something else is
/// requested. Switches at boundaries that are no switch point are deferred
/// until the next one.
pub fn simulate_session(
    ladder: &Ladder,
    schedule: &[String],
    caps: CodecCapabilities,
) -> Result<SessionReport> {
    simulate(ladder, schedule, &[], caps)
}

/// Runs the ABR over `trace` and plays its choices.
pub fn simulate_abr_session(
    ladder: &Ladder,
    trace: &BandwidthTrace,
    cfg: &AbrConfig,
    caps: CodecCapabilities,
) -> Result<SessionReport> {
    let decisions = run_abr(ladder, trace, cfg)?;
    let schedule: Vec<String> = decisions.iter().map(|d| d.rep_id.clone()).collect();
    let panics: Vec<bool> = decisions.iter().map(|d| d.panic).collect();
    let mut report = simulate(ladder, &schedule, &panics, caps)?;
    let stalls: Vec<f64> = decisions
        .iter()
        .map(|d| d.stall_s)
        .filter(|&s| s > 0.0)
        .collect();
    report.summary.stall_events = stalls.len();
    report.summary.stall_s = stalls.iter().fold(0.0, |a, b| a + b);
    report.abr = Some(decisions);
    Ok(report)
}

fn simulate(
    ladder: &Ladder,
    schedule: &[String],
    panics: &[bool],
    caps: CodecCapabilities,
) -> Result<SessionReport> {
    let count = ladder.segment_count();
    if schedule.len() != count {
        return Err(Error::invalid(format!(
            "schedule has {} entries for {count} segments",
            schedule.len()
        )));
    }
    for id in schedule {
        ladder.require(id)?;
    }
    let lowest = ladder.lowest().id.as_str();
    let fallback = ladder.fallback.as_ref().map(|f| f.id.as_str());

    let mut played: Vec<String> = Vec::with_capacity(count);
    let mut switches = Vec::new();
    let mut current = schedule[0].clone();
    played.push(current.clone());
    for (k, requested) in schedule.iter().enumerate().skip(1) {
        let wanted = match fallback {
            Some(fb) if current == fb && requested == lowest => fb,
            _ => requested.as_str(),
        };
        if wanted != current {
            let mut to = wanted.to_string();
            let mut outcome = evaluate_switch(ladder, &SwitchEvent::new(k, &current, &to), caps)?;
            let mut used_fallback = false;
            if let (SwitchOutcome::IllegalRprRatio { .. }, Some(fb)) = (&outcome, fallback) {
                to = fb.to_string();
                outcome = evaluate_switch(ladder, &SwitchEvent::new(k, &current, &to), caps)?;
                used_fallback = true;
            }
            if outcome != SwitchOutcome::NotASwitchPoint {
                current = to.clone();
            }
            switches.push(SwitchRecord {
                segment: k,
                from: played[k - 1].clone(),
                requested: requested.clone(),
                to,
                fallback: used_fallback,
                panic: panics.get(k).copied().unwrap_or(false),
                outcome,
            });
        }
        played.push(current.clone());
    }

    let timeline = build_timeline(ladder, &played, &switches)?;
    let summary = summarize(&timeline, &switches, lowest)?;
    Ok(SessionReport {
        played,
        switches,
        timeline,
        summary,
        abr: None,
    })
}

fn build_timeline(
    ladder: &Ladder,
    played: &[String],
    switches: &[SwitchRecord],
) -> Result<Vec<TimelineEntry>> {
    let length = ladder.lowest().sequence.length as usize;
    let mut slots: Vec<Option<TimelineEntry>> = vec![None; length];
    for (k, id) in played.iter().enumerate() {
        let rep = ladder.require(id)?;
        for &poc in &rep.sequence.segments[k].picture_pocs {
            slots[poc as usize] = Some(TimelineEntry {
                poc,
                rep_id: id.clone(),
                quality_db: Some(rep.quality_db()),
                status: PictureStatus::Steady,
            });
        }
    }
    for s in switches {
        let mark = |slots: &mut Vec<Option<TimelineEntry>>,
                    poc: Poc,
                    q: Option<f64>,
                    st: PictureStatus| {
            if let Some(e) = slots[poc as usize].as_mut() {
                e.quality_db = q;
                e.status = st;
            }
        };
        let leading = || -> Result<Vec<Poc>> {
            let rep = ladder.require(&s.to)?;
            let irap = rep.sequence.segments[s.segment].first_poc();
            Ok(rep.sequence.leading_pictures(irap))
        };
        match &s.outcome {
            SwitchOutcome::GracefulDrift {
                affected_pocs,
                predicted_quality_series,
                ..
            } => {
                for (&p, &q) in affected_pocs.iter().zip(predicted_quality_series) {
                    mark(&mut slots, p, Some(q), PictureStatus::Transition);
                }
            }
            SwitchOutcome::DroppedPictures { dropped_pocs } => {
                for &p in dropped_pocs {
                    mark(&mut slots, p, None, PictureStatus::Dropped);
                }
            }
            SwitchOutcome::IllegalRprRatio { .. } | SwitchOutcome::NonConformant { .. } => {
                for p in leading()? {
                    mark(&mut slots, p, None, PictureStatus::Undecodable);
                }
            }
            SwitchOutcome::SevereArtefactRisk { .. } => {
                for p in leading()? {
                    mark(&mut slots, p, None, PictureStatus::Artefact);
                }
            }
            SwitchOutcome::Seamless | SwitchOutcome::NotASwitchPoint => {}
        }
    }
    Ok(slots
        .into_iter()
        .enumerate()
        .map(|(poc, e)| {
            e.unwrap_or(TimelineEntry {
                poc: poc as Poc,
                rep_id: String::new(),
                quality_db: None,
                status: PictureStatus::Missing,
            })
        })
        .collect())
}

fn summarize(
    timeline: &[TimelineEntry],
    switches: &[SwitchRecord],
    lowest: &str,
) -> Result<SessionSummary> {
    let mut switch_counts: BTreeMap<String, usize> = SwitchOutcome::KINDS
        .iter()
        .map(|k| (k.to_string(), 0))
        .collect();
    for s in switches {
        *switch_counts
            .entry(s.outcome.kind().to_string())
            .or_default() += 1;
    }
    let series: Vec<(Poc, f64)> = timeline
        .iter()
        .filter_map(|e| e.quality_db.map(|q| (e.poc, q)))
        .collect();
    let windows: Vec<Vec<Poc>> = switches
        .iter()
        .filter_map(|s| match &s.outcome {
            SwitchOutcome::GracefulDrift { affected_pocs, .. } => Some(affected_pocs.clone()),
            _ => None,
        })
        .collect();
    let (mean, min, transition_means) = if series.is_empty() {
        (None, None, Vec::new())
    } else {
        let q = session_quality(&series, &windows)?;
        (Some(q.mean_db), Some(q.min_db), q.window_means_db)
    };
    Ok(SessionSummary {
        switch_counts,
        mean_quality_db: mean,
        min_quality_db: min,
        transition_means_db: transition_means,
        dropped_pictures: timeline.iter().filter(|e| e.status.is_gap()).count(),
        artefact_pictures: timeline
            .iter()
            .filter(|e| e.status == PictureStatus::Artefact)
            .count(),
        stall_events: 0,
        stall_s: 0.0,
        panic_down_switches: switches
            .iter()
            .filter(|s| s.panic && s.requested == lowest)
            .count(),
    })
}
