//! Predicted RASL quality for an up- and a down-switch between 45 and 38 dB.

use ogop_sim::quality::{transition_profile, Direction, TransitionParams};

fn main() -> ogop_sim::Result<()> {
    let params = TransitionParams::default();
    for dir in [Direction::Up, Direction::Down] {
        let p = transition_profile(dir, 45.0, 38.0, 31, &params)?;
        let series: Vec<String> = p.values.iter().map(|v| format!("{v:.2}")).collect();
        println!(
            "{dir:?}: mean {:.3} dB, clamped {}",
            p.mean().unwrap_or(f64::NAN),
            p.clamped
        );
        println!("  {}", series.join(" "));
    }
    Ok(())
}
