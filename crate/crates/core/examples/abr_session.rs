//! Streams the bundled ladder over the step-down trace and prints each
//! fetch and each switch.

use std::path::PathBuf;

use ogop_sim::io::{load_ladder, read_trace};
use ogop_sim::switching::{simulate_abr_session, CodecCapabilities};

fn main() -> ogop_sim::Result<()> {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let loaded = load_ladder(&data.join("ladder.json"))?;
    let trace = read_trace(&data.join("trace_step_down.csv"))?;
    let report = simulate_abr_session(&loaded.ladder, &trace, &loaded.abr, CodecCapabilities::VVC)?;

    for d in report.abr.as_deref().unwrap_or_default() {
        println!(
            "seg {:>2} t={:>6.2}s est={:>6.0} kbps -> {:<6} buffer {:>5.2}s{}",
            d.segment_index,
            d.start_time_s,
            d.estimate_kbps,
            d.rep_id,
            d.buffer.level_s,
            if d.panic { " PANIC" } else { "" }
        );
    }
    for s in &report.switches {
        println!(
            "switch at {}: {} -> {} (asked {}) {}{}",
            s.segment,
            s.from,
            s.to,
            s.requested,
            s.outcome.kind(),
            if s.fallback { ", via fallback" } else { "" }
        );
    }
    println!("{:#?}", report.summary);
    Ok(())
}
