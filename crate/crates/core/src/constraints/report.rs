use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gop::Poc;

/// Stable identifiers of the conformance rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleId {
    Structure,
    RaslDmvr,
    RaslBdof,
    RaslProf,
    RaslCclm,
    RaslWraparound,
    RaslCollocated,
    ApsCrossSegment,
    ApsMissing,
    SpsChromaFormat,
    SpsBitDepth,
    SpsCtuSize,
    SpsMaxResolution,
    SpsRprDisabled,
    SpsResChangeDisallowed,
    SpsGciNoResChange,
    SpsSubpictures,
    SpsLevel,
}

impl RuleId {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::Structure => "structure",
            RuleId::RaslDmvr => "rasl-dmvr",
            RuleId::RaslBdof => "rasl-bdof",
            RuleId::RaslProf => "rasl-prof",
            RuleId::RaslCclm => "rasl-cclm",
            RuleId::RaslWraparound => "rasl-wraparound",
            RuleId::RaslCollocated => "rasl-collocated",
            RuleId::ApsCrossSegment => "aps-cross-segment",
            RuleId::ApsMissing => "aps-missing",
            RuleId::SpsChromaFormat => "sps-chroma-format",
            RuleId::SpsBitDepth => "sps-bit-depth",
            RuleId::SpsCtuSize => "sps-ctu-size",
            RuleId::SpsMaxResolution => "sps-max-resolution",
            RuleId::SpsRprDisabled => "sps-rpr-disabled",
            RuleId::SpsResChangeDisallowed => "sps-res-change-disallowed",
            RuleId::SpsGciNoResChange => "sps-gci-no-res-change",
            RuleId::SpsSubpictures => "sps-subpictures",
            RuleId::SpsLevel => "sps-level",
        }
    }

    pub fn is_rasl_rule(self) -> bool {
        matches!(
            self,
            RuleId::RaslDmvr
                | RuleId::RaslBdof
                | RuleId::RaslProf
                | RuleId::RaslCclm
                | RuleId::RaslWraparound
                | RuleId::RaslCollocated
        )
    }

    pub fn is_aps_rule(self) -> bool {
        matches!(self, RuleId::ApsCrossSegment | RuleId::ApsMissing)
    }

    pub fn is_sps_rule(self) -> bool {
        self.as_str().starts_with("sps-")
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
    /// A decoder lacking error resilience may fail after a switch.
    DecoderCrashRisk,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
            Severity::DecoderCrashRisk => "decoder-crash risk after switch",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Location {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub representation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub segment: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub poc: Option<Poc>,
}

impl Location {
    pub fn picture(segment: usize, poc: Poc) -> Self {
        Location {
            representation: None,
            segment: Some(segment),
            poc: Some(poc),
        }
    }

    pub fn representation(id: &str) -> Self {
        Location {
            representation: Some(id.to_owned()),
            ..Default::default()
        }
    }

    pub fn in_representation(mut self, id: &str) -> Self {
        self.representation = Some(id.to_owned());
        self
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(r) = &self.representation {
            parts.push(format!("rep={r}"));
        }
        if let Some(s) = self.segment {
            parts.push(format!("segment={s}"));
        }
        if let Some(p) = self.poc {
            parts.push(format!("poc={p}"));
        }
        if parts.is_empty() {
            f.write_str("ladder")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule_id: RuleId,
    pub location: Location,
    pub message: String,
    pub severity: Severity,
}

impl Violation {
    pub fn new(rule_id: RuleId, location: Location, message: impl Into<String>) -> Self {
        Violation {
            rule_id,
            location,
            message: message.into(),
            severity: Severity::Error,
        }
    }

    pub fn with_severity(mut self, severity: Severity) -> Self {
        self.severity = severity;
        self
    }

    pub fn in_representation(mut self, id: &str) -> Self {
        self.location.representation = Some(id.to_owned());
        self
    }
}

/// Findings that do not make a ladder unswitchable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub from: String,
    pub to: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
    pub is_switchable: bool,
}

impl ConformanceReport {
    pub fn new(violations: Vec<Violation>, warnings: Vec<Warning>) -> Self {
        let is_switchable = violations.is_empty();
        ConformanceReport {
            violations,
            warnings,
            is_switchable,
        }
    }

    pub fn count(&self, rule: RuleId) -> usize {
        self.violations.iter().filter(|v| v.rule_id == rule).count()
    }

    /// Line-oriented form used by the CLI.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.violations {
            out.push_str(&format!(
                "violation {} [{}] {}: {}\n",
                v.rule_id, v.severity, v.location, v.message
            ));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning {} -> {}: {}\n", w.from, w.to, w.message));
        }
        out.push_str(&format!(
            "switchable: {} ({} violations, {} warnings)\n",
            self.is_switchable,
            self.violations.len(),
            self.warnings.len()
        ));
        out
    }
}
