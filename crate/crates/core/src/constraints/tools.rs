use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-picture inter/intra tool usage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ToolFlags {
    pub tmvp: bool,
    pub sbtmvp: bool,
    pub dmvr: bool,
    pub bdof: bool,
    pub prof: bool,
    pub cclm: bool,
    pub mc_wraparound: bool,
}

impl ToolFlags {
    /// What an unconstrained random-access encode turns on for inter
    /// pictures. Wraparound only matters for 360-degree content and stays
    /// off.
    pub const fn encoder_default() -> Self {
        ToolFlags {
            tmvp: true,
            sbtmvp: true,
            dmvr: true,
            bdof: true,
            prof: true,
            cclm: true,
            mc_wraparound: false,
        }
    }

    /// Intra pictures: only CCLM is meaningful.
    pub const fn intra() -> Self {
        ToolFlags {
            tmvp: false,
            sbtmvp: false,
            dmvr: false,
            bdof: false,
            prof: false,
            cclm: true,
            mc_wraparound: false,
        }
    }

    pub fn uses_temporal_mv(&self) -> bool {
        self.tmvp || self.sbtmvp
    }
}

impl Default for ToolFlags {
    fn default() -> Self {
        Self::encoder_default()
    }
}

/// Coding tools with a known drift behaviour under open-GOP switching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Tool {
    Mc,
    Amc,
    Prof,
    Bdof,
    Tmvp,
    Sbtmvp,
    Dmvr,
    Cclm,
    Lmcs,
    Aps,
}

impl Tool {
    pub const ALL: [Tool; 10] = [
        Tool::Mc,
        Tool::Amc,
        Tool::Prof,
        Tool::Bdof,
        Tool::Tmvp,
        Tool::Sbtmvp,
        Tool::Dmvr,
        Tool::Cclm,
        Tool::Lmcs,
        Tool::Aps,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Tool::Mc => "MC",
            Tool::Amc => "AMC",
            Tool::Prof => "PROF",
            Tool::Bdof => "BDOF",
            Tool::Tmvp => "TMVP",
            Tool::Sbtmvp => "SBTMVP",
            Tool::Dmvr => "DMVR",
            Tool::Cclm => "CCLM",
            Tool::Lmcs => "LMCS",
            Tool::Aps => "APS",
        }
    }
}

impl fmt::Display for Tool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tool {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        Tool::ALL
            .into_iter()
            .find(|t| t.as_str() == upper)
            .ok_or_else(|| Error::invalid(format!("unknown coding tool `{s}`")))
    }
}

/// How a mismatched reference propagates through a tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftCategory {
    /// Predicted samples from reference samples; quality leans toward the
    /// reference and recovers through residuals.
    SampleToSample,
    /// Motion information predicted from the collocated picture's motion.
    SyntaxToSyntax,
    /// Model parameters or motion refinements derived from reconstructed
    /// samples.
    SampleToSyntax,
    /// Parameter sets that may be missing or stale after a switch.
    ParameterSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftSeverity {
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DriftAssessment {
    pub tool: Tool,
    pub category: DriftCategory,
    pub severity: DriftSeverity,
    pub note: &'static str,
}

pub fn drift_category(tool: Tool) -> DriftAssessment {
    use DriftCategory::*;
    use DriftSeverity::*;
    let (category, severity, note) = match tool {
        Tool::Mc | Tool::Amc | Tool::Prof | Tool::Bdof => (
            SampleToSample,
            Low,
            "graceful transition toward the reference quality",
        ),
        Tool::Tmvp | Tool::Sbtmvp => (
            SyntaxToSyntax,
            High,
            "wrong temporal motion candidates propagate into later pictures",
        ),
        Tool::Dmvr => (
            SampleToSyntax,
            High,
            "refined motion vectors depend on mismatched reference samples",
        ),
        Tool::Cclm => (
            SampleToSyntax,
            High,
            "model extrema from a single outlier sample can cause severe drift",
        ),
        Tool::Lmcs => (
            SampleToSyntax,
            Low,
            "mitigated: chroma scaling averages many luma samples",
        ),
        Tool::Aps => (
            ParameterSet,
            High,
            "references to unavailable parameter sets may crash the decoder",
        ),
    };
    DriftAssessment {
        tool,
        category,
        severity,
        note,
    }
}

/// Parses the tool name first.
pub fn drift_category_by_name(name: &str) -> Result<DriftAssessment> {
    Ok(drift_category(name.parse()?))
}
