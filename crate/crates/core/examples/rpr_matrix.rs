//! Scaling factors and switch outcomes between every pair of the bundled
//! representations at segment 3.

use std::path::PathBuf;

use ogop_sim::io::load_ladder;
use ogop_sim::switching::{
    evaluate_switch, rpr_legal, rpr_scaling_factors, CodecCapabilities, SwitchEvent,
};

fn main() -> ogop_sim::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/ladder.json");
    let ladder = load_ladder(&path)?.ladder;
    for from in &ladder.representations {
        for to in &ladder.representations {
            let (h, v) = rpr_scaling_factors(from, to)?;
            let rpr = evaluate_switch(
                &ladder,
                &SwitchEvent::new(3, &from.id, &to.id),
                CodecCapabilities::VVC,
            )?;
            let plain = evaluate_switch(
                &ladder,
                &SwitchEvent::new(3, &from.id, &to.id),
                CodecCapabilities::NO_RPR,
            )?;
            println!(
                "{:>6} -> {:<6} {:.3}x{:.3} legal={:<5} rpr: {:<16} no-rpr: {}",
                from.id,
                to.id,
                h,
                v,
                rpr_legal(h, v)?,
                rpr.kind(),
                plain.kind()
            );
        }
    }
    Ok(())
}
