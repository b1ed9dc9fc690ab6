//! Restricts the RASL pictures of an open-GOP encode and shows what the
//! checker says before and after.

use ogop_sim::constraints::{
    apply_rasl_constraints, check_rasl_constraints, drift_category, SwitchingMode, Tool,
};
use ogop_sim::gop::{build_sequence, GopConfig, IrapMode};

fn main() -> ogop_sim::Result<()> {
    for tool in Tool::ALL {
        let d = drift_category(tool);
        println!("{:<8} {:?} / {:?}", tool.as_str(), d.category, d.severity);
    }

    let seq = build_sequence(GopConfig::aligned(32, 64, IrapMode::OpenGop)?, 129)?;
    for mode in [SwitchingMode::QpSwitchingOnly, SwitchingMode::FullRpr] {
        let before = check_rasl_constraints(&seq, mode);
        let after = check_rasl_constraints(&apply_rasl_constraints(&seq, mode)?, mode);
        println!(
            "{mode:?}: {} violations unconstrained, {} after restriction",
            before.len(),
            after.len()
        );
        if let Some(v) = before.first() {
            println!(
                "  e.g. {} at poc {:?}: {}",
                v.rule_id, v.location.poc, v.message
            );
        }
    }
    Ok(())
}
